"""Built-in parametric example machines.

All four are binary-alphabet machines:

* ``even(p)``: blocks of uninterrupted 1s have even length, bounded by 0s.
* ``abc(p, q)``: two alternating coins with different biases, random phase.
* ``np2(p)``: nonminimal four-state presentation of the noisy period-2
  process (1s alternate with random symbols); states 0/2 and 1/3 are
  probabilistically equivalent.
* ``sns(p, q)``: the classic two-state nonunifilar source emitting long
  1-runs broken by isolated 0s.
"""

from __future__ import annotations

import numpy as np

from .machine import Alphabet, LabeledMatrixMachine

BINARY = Alphabet(("0", "1"))


def _check_unit(name: str, value: float) -> None:
    if not 0.0 < value < 1.0:
        raise ValueError(f"{name} must lie strictly between 0 and 1, got {value}")


def even(p: float = 0.5) -> LabeledMatrixMachine:
    """Even machine: state 0 emits 0 (prob p, self-loop) or 1 (to state 1);
    state 1 always emits 1 back to state 0."""
    _check_unit("p", p)
    t0 = np.array([[p, 0.0], [0.0, 0.0]])
    t1 = np.array([[0.0, 1.0 - p], [1.0, 0.0]])
    return LabeledMatrixMachine(2, BINARY, np.stack([t0, t1]))


def abc(p: float = 0.4, q: float = 0.6) -> LabeledMatrixMachine:
    """Alternating biased coins: state 0 flips a p-biased coin and moves to
    state 1, which flips a q-biased coin and moves back.  Requires p != q,
    otherwise the two phases are indistinguishable."""
    _check_unit("p", p)
    _check_unit("q", q)
    if p == q:
        raise ValueError("abc requires p != q (equal biases make the states indistinct)")
    t0 = np.array([[0.0, 1.0 - p], [1.0 - q, 0.0]])
    t1 = np.array([[0.0, p], [q, 0.0]])
    return LabeledMatrixMachine(2, BINARY, np.stack([t0, t1]))


def np2(p: float = 0.5) -> LabeledMatrixMachine:
    """Nonminimal noisy period-2 machine: a 4-cycle where states 0 and 2
    always emit 1, and states 1 and 3 emit 0 with probability p."""
    _check_unit("p", p)
    t0 = np.zeros((4, 4))
    t1 = np.zeros((4, 4))
    t1[0, 1] = 1.0
    t0[1, 2] = p
    t1[1, 2] = 1.0 - p
    t1[2, 3] = 1.0
    t0[3, 0] = p
    t1[3, 0] = 1.0 - p
    return LabeledMatrixMachine(4, BINARY, np.stack([t0, t1]))


def np2_minimal(p: float = 0.5) -> LabeledMatrixMachine:
    """Two-state quotient of ``np2(p)``."""
    _check_unit("p", p)
    t0 = np.array([[0.0, 0.0], [p, 0.0]])
    t1 = np.array([[0.0, 1.0], [1.0 - p, 0.0]])
    return LabeledMatrixMachine(2, BINARY, np.stack([t0, t1]))


def sns(p: float = 0.5, q: float = 0.5) -> LabeledMatrixMachine:
    """Simple nonunifilar source: state 0 emits 1 and either stays (prob p)
    or moves to state 1 (prob 1-p); state 1 emits 1 and stays (prob q) or
    emits 0 back to state 0 (prob 1-q).  State 0 carries two 1-edges."""
    _check_unit("p", p)
    _check_unit("q", q)
    t0 = np.array([[0.0, 0.0], [1.0 - q, 0.0]])
    t1 = np.array([[p, 1.0 - p], [0.0, q]])
    return LabeledMatrixMachine(2, BINARY, np.stack([t0, t1]))


# name -> (builder, parameter names)
REGISTRY = {
    "even": (even, ("p",)),
    "abc": (abc, ("p", "q")),
    "np2": (np2, ("p",)),
    "np2-minimal": (np2_minimal, ("p",)),
    "sns": (sns, ("p", "q")),
}


def build(name: str, params) -> LabeledMatrixMachine:
    if name not in REGISTRY:
        raise ValueError(f"unknown example {name!r}; known: {', '.join(sorted(REGISTRY))}")
    builder, names = REGISTRY[name]
    params = [float(v) for v in params]
    if len(params) != len(names):
        raise ValueError(f"example {name} takes parameters {names}, got {len(params)} values")
    return builder(*params)
