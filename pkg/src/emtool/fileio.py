"""Line-oriented text format for machines and labeled graphs.

Machine files::

    # comment
    states 2
    alphabet 0 1
    edge 0 0 1/2 0
    edge 0 1 0.5 1
    edge 1 1 1 0

Probabilities may be decimal literals or exact rationals ``a/b``; both are
converted at full double precision.  Serialization writes 17 significant
digits so parse(serialize(m)) reproduces probabilities bitwise.

Probability-free labeled graphs reuse the format with every probability
written as 1; an optional ``start <i>`` line marks a DFA start state.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import MachineFormatError
from .machine import Alphabet, LabeledMatrixMachine


def _parse_prob(token: str) -> float:
    try:
        return float(Fraction(token))
    except (ValueError, ZeroDivisionError):
        raise MachineFormatError(f"bad probability literal {token!r}")


def parse_machine(text: str):
    """Parse machine text.  Returns (machine, warnings).

    Explicit zero-probability edges are dropped with a warning rather than
    rejected.
    """
    n_states = None
    alphabet = None
    matrices = None
    warnings: list[str] = []
    seen_edges = set()
    start = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        kind = fields[0]
        if kind == "states":
            if len(fields) != 2 or not fields[1].isdigit() or int(fields[1]) < 1:
                raise MachineFormatError(f"line {lineno}: expected 'states <N>' with N >= 1")
            n_states = int(fields[1])
        elif kind == "alphabet":
            if len(fields) < 2:
                raise MachineFormatError(f"line {lineno}: empty alphabet")
            try:
                alphabet = Alphabet(tuple(fields[1:]))
            except ValueError as exc:
                raise MachineFormatError(f"line {lineno}: {exc}")
        elif kind == "start":
            if len(fields) != 2:
                raise MachineFormatError(f"line {lineno}: expected 'start <i>'")
            start = int(fields[1])
        elif kind == "edge":
            if n_states is None or alphabet is None:
                raise MachineFormatError(
                    f"line {lineno}: edge before 'states' and 'alphabet' lines"
                )
            if len(fields) != 5:
                raise MachineFormatError(
                    f"line {lineno}: expected 'edge <from> <symbol> <prob> <to>'"
                )
            _, src, sym, prob, dst = fields
            try:
                i, j = int(src), int(dst)
            except ValueError:
                raise MachineFormatError(f"line {lineno}: bad state index")
            if not (0 <= i < n_states and 0 <= j < n_states):
                raise MachineFormatError(f"line {lineno}: state index out of range")
            if sym not in alphabet.symbols:
                raise MachineFormatError(f"line {lineno}: unknown symbol {sym!r}")
            x = alphabet.index(sym)
            if (i, x, j) in seen_edges:
                raise MachineFormatError(f"line {lineno}: duplicate edge {i} {sym} -> {j}")
            seen_edges.add((i, x, j))
            p = _parse_prob(prob)
            if p < 0.0:
                raise MachineFormatError(f"line {lineno}: negative probability")
            if matrices is None:
                matrices = np.zeros((len(alphabet), n_states, n_states))
            if p == 0.0:
                warnings.append(f"line {lineno}: zero-probability edge dropped")
                continue
            matrices[x, i, j] = p
        else:
            raise MachineFormatError(f"line {lineno}: unknown directive {kind!r}")
    if n_states is None or alphabet is None:
        raise MachineFormatError("missing 'states' or 'alphabet' line")
    if matrices is None:
        matrices = np.zeros((len(alphabet), n_states, n_states))
    machine = LabeledMatrixMachine(n_states=n_states, alphabet=alphabet, matrices=matrices)
    if start is not None:
        return machine, warnings, start
    return machine, warnings


def serialize_machine(machine: LabeledMatrixMachine, start: int | None = None) -> str:
    lines = [f"states {machine.n_states}", "alphabet " + " ".join(machine.alphabet.symbols)]
    if start is not None:
        lines.append(f"start {start}")
    for i, x, p, j in machine.edges():
        lines.append(f"edge {i} {machine.alphabet.symbols[x]} {p:.17g} {j}")
    return "\n".join(lines) + "\n"


def load_machine(path: str) -> LabeledMatrixMachine:
    with open(path, "r", encoding="utf-8") as fh:
        result = parse_machine(fh.read())
    return result[0]


def save_machine(path: str, machine: LabeledMatrixMachine, start: int | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_machine(machine, start=start))
