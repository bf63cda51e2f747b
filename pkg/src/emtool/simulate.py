"""Sampling symbol/state paths and empirical word statistics.

The RNG is numpy's PCG64 (``np.random.default_rng``).  Substreams for
independent chains are derived by seeding with ``(seed, chain_index)``, so
any (machine, start, length, seed) quadruple reproduces bit-identical runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotIrreducibleError
from .machine import LabeledMatrixMachine, stationary_distribution


@dataclass
class SampleRun:
    symbols: np.ndarray  # int array, length L
    states: np.ndarray  # int array, length L + 1 (includes the initial state)
    seed: int
    start: np.ndarray  # the initial distribution actually used


@dataclass
class EmpiricalWordTable:
    counts: dict[tuple[int, ...], int]
    length: int
    max_len: int

    def count(self, word) -> int:
        return self.counts.get(tuple(word), 0)

    def freq(self, word) -> float:
        word = tuple(word)
        windows = self.length - len(word) + 1
        if windows <= 0:
            return 0.0
        return self.counts.get(word, 0) / windows


def _resolve_start(machine: LabeledMatrixMachine, start) -> np.ndarray:
    n = machine.n_states
    if isinstance(start, str):
        if start != "stationary":
            raise ValueError(f"unknown start spec {start!r}")
        try:
            return stationary_distribution(machine).pi
        except NotIrreducibleError:
            raise NotIrreducibleError("stationary start requires a strongly connected machine")
    if np.isscalar(start):
        dist = np.zeros(n)
        dist[int(start)] = 1.0
        return dist
    dist = np.asarray(start, dtype=float)
    if dist.shape != (n,) or np.any(dist < 0) or abs(dist.sum() - 1.0) > 1e-9:
        raise ValueError("start distribution must be a probability vector over states")
    return dist


def _outgoing_edges(machine: LabeledMatrixMachine):
    """Per-state cumulative probabilities with matching (symbol, target)
    arrays, in file order (symbol-major, then target)."""
    cum, syms, tgts = [], [], []
    for i in range(machine.n_states):
        p_list, x_list, j_list = [], [], []
        for x in range(machine.n_symbols):
            row = machine.matrices[x][i]
            for j in np.flatnonzero(row > 0.0):
                p_list.append(row[j])
                x_list.append(x)
                j_list.append(int(j))
        if not p_list:
            raise ValueError(f"state {i} has no outgoing edges")
        cum.append(np.cumsum(p_list))
        syms.append(np.array(x_list, dtype=np.int64))
        tgts.append(np.array(j_list, dtype=np.int64))
    return cum, syms, tgts


def sample_path(
    machine: LabeledMatrixMachine,
    start,
    length: int,
    seed: int,
    chain: int = 0,
) -> SampleRun:
    """Weighted random walk emitting ``length`` symbols.

    ``start`` is a state index, a distribution, or "stationary".  Edges are
    drawn by cumulative-probability inversion over the state's outgoing
    edges in file order.
    """
    dist = _resolve_start(machine, start)
    rng = np.random.default_rng([int(seed), int(chain)])
    cum, syms, tgts = _outgoing_edges(machine)
    states = np.empty(length + 1, dtype=np.int64)
    symbols = np.empty(length, dtype=np.int64)
    states[0] = rng.choice(machine.n_states, p=dist)
    draws = rng.random(length)
    s = states[0]
    for t in range(length):
        c = cum[s]
        k = int(np.searchsorted(c, draws[t] * c[-1], side="right"))
        k = min(k, len(c) - 1)
        symbols[t] = syms[s][k]
        s = tgts[s][k]
        states[t + 1] = s
    return SampleRun(symbols=symbols, states=states, seed=int(seed), start=dist)


def empirical_word_probs(symbols, max_len: int, n_symbols: int | None = None) -> EmpiricalWordTable:
    """Sliding-window counts of every word up to ``max_len``."""
    symbols = np.asarray(symbols, dtype=np.int64)
    length = len(symbols)
    if max_len > length:
        raise ValueError(f"max_len {max_len} exceeds sample length {length}")
    if n_symbols is None:
        n_symbols = int(symbols.max()) + 1 if length else 1
    counts: dict[tuple[int, ...], int] = {}
    codes = np.zeros(0, dtype=np.int64)
    for ell in range(1, max_len + 1):
        if ell == 1:
            codes = symbols.copy()
        else:
            codes = codes[:-1] * n_symbols + symbols[ell - 1 :]
        uniq, cnt = np.unique(codes, return_counts=True)
        for code, c in zip(uniq.tolist(), cnt.tolist()):
            word = []
            v = code
            for _ in range(ell):
                word.append(v % n_symbols)
                v //= n_symbols
            counts[tuple(reversed(word))] = int(c)
    return EmpiricalWordTable(counts=counts, length=length, max_len=max_len)


def check_edge_consistency(machine: LabeledMatrixMachine, run: SampleRun) -> bool:
    """Every consecutive (state, symbol, state) triple must be a positive
    edge of the machine."""
    m = machine.matrices
    probs = m[run.symbols, run.states[:-1], run.states[1:]]
    return bool(np.all(probs > 0.0))
