"""The three generator axioms: irreducibility, unifilarity, distinct states.

Also holds the synchronizing-word search that separates exact machines
(finite synchronizing word) from nonexact ones.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import NotUnifilarError
from .machine import LabeledMatrixMachine

# Probability vectors are compared entrywise within this tolerance when
# refining the state partition.
EPS_DIST = 1e-9


@dataclass
class StatePartition:
    """Disjoint nonempty blocks of state indices covering all states."""

    blocks: list[list[int]]

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def block_of(self) -> list[int]:
        n = sum(len(b) for b in self.blocks)
        out = [0] * n
        for k, block in enumerate(self.blocks):
            for s in block:
                out[s] = k
        return out

    def is_discrete(self) -> bool:
        return all(len(b) == 1 for b in self.blocks)


@dataclass
class AxiomReport:
    irreducible: bool
    unifilar: bool
    probabilistically_distinct: bool | None
    witness: dict

    @property
    def is_generator_em(self) -> bool:
        return bool(self.irreducible and self.unifilar and self.probabilistically_distinct)


def _positive_adjacency(machine: LabeledMatrixMachine):
    pos = (machine.matrices > 0.0).any(axis=0)
    return [list(np.flatnonzero(pos[i])) for i in range(machine.n_states)]


def strongly_connected_components(adj: list[list[int]]) -> list[list[int]]:
    """Tarjan's algorithm, iterative to avoid recursion limits.

    Components are returned in reverse topological order (targets first).
    """
    n = len(adj)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    sccs: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            while pi < len(adj[v]):
                w = adj[v][pi]
                pi += 1
                if index[w] == -1:
                    work[-1] = (v, pi)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(sorted(comp))
            if work:
                u, _ = work[-1]
                low[u] = min(low[u], low[v])
    return sccs


def is_irreducible(machine: LabeledMatrixMachine):
    """True iff the positive-edge digraph is one strongly connected component.

    Returns (flag, scc_list)."""
    sccs = strongly_connected_components(_positive_adjacency(machine))
    return len(sccs) == 1, sccs


def is_unifilar(machine: LabeledMatrixMachine):
    """True iff every (state, symbol) has at most one positive edge.

    Returns (flag, violating (state, symbol) pairs)."""
    counts = (machine.matrices > 0.0).sum(axis=2)  # (symbol, state)
    bad = [(int(i), int(x)) for x, i in zip(*np.nonzero(counts > 1))]
    bad.sort()
    return not bad, bad


def unifilar_transitions(machine: LabeledMatrixMachine) -> list[list[int | None]]:
    """delta[state][symbol] -> successor index or None, for unifilar machines."""
    delta: list[list[int | None]] = []
    for i in range(machine.n_states):
        row: list[int | None] = []
        for x in range(machine.n_symbols):
            nz = np.flatnonzero(machine.matrices[x][i] > 0.0)
            if nz.size > 1:
                raise NotUnifilarError(f"state {i} has {nz.size} edges on symbol {x}")
            row.append(int(nz[0]) if nz.size else None)
        delta.append(row)
    return delta


def next_symbol_probs(machine: LabeledMatrixMachine) -> np.ndarray:
    """(state, symbol) matrix of one-step emission probabilities."""
    return machine.matrices.sum(axis=2).T


def distinctness_partition(
    machine: LabeledMatrixMachine, tolerance: float = EPS_DIST
) -> StatePartition:
    """Coarsest partition whose blocks agree on the probability of every word.

    Moore-style refinement: seed blocks by the next-symbol probability
    vector (compared entrywise within ``tolerance``), then refine by the
    per-symbol successor-block signature until a fixpoint; at most N - 1
    refinement rounds are needed.
    """
    ok, pairs = is_unifilar(machine)
    if not ok:
        raise NotUnifilarError(f"machine is not unifilar at (state, symbol) pairs {pairs}")
    n = machine.n_states
    probs = next_symbol_probs(machine)
    delta = unifilar_transitions(machine)

    # Seed: group states whose emission vectors match within tolerance.
    blocks: list[list[int]] = []
    for i in range(n):
        for block in blocks:
            if np.abs(probs[i] - probs[block[0]]).max() <= tolerance:
                block.append(i)
                break
        else:
            blocks.append([i])

    for _ in range(max(n - 1, 1)):
        block_of = [0] * n
        for k, block in enumerate(blocks):
            for s in block:
                block_of[s] = k
        refined: list[list[int]] = []
        for block in blocks:
            groups: dict[tuple, list[int]] = {}
            for s in block:
                sig = tuple(
                    block_of[delta[s][x]] if delta[s][x] is not None else -1
                    for x in range(machine.n_symbols)
                )
                groups.setdefault(sig, []).append(s)
            refined.extend(groups.values())
        if len(refined) == len(blocks):
            blocks = refined
            break
        blocks = refined
    blocks = [sorted(b) for b in blocks]
    blocks.sort(key=lambda b: b[0])
    return StatePartition(blocks=blocks)


def separating_word(machine: LabeledMatrixMachine, i: int, j: int, tolerance: float = EPS_DIST):
    """Shortest word on which states ``i`` and ``j`` disagree by more than
    ``tolerance``, or None if none exists up to length N - 1.

    Breadth-first in lexicographic alphabet order, so the witness is
    deterministic.
    """
    from .machine import word_prob_from_state

    n = machine.n_states
    queue = deque([()])
    while queue:
        w = queue.popleft()
        if w:
            pi = word_prob_from_state(machine, i, w)
            pj = word_prob_from_state(machine, j, w)
            if abs(pi - pj) > tolerance:
                return w
        if len(w) < max(n - 1, 1):
            for x in range(machine.n_symbols):
                queue.append(w + (x,))
    return None


def is_generator_em(machine: LabeledMatrixMachine, tolerance: float = EPS_DIST) -> AxiomReport:
    """Evaluate all three generator axioms with failure witnesses.

    Distinctness is only decidable here for unifilar machines; when
    unifilarity fails it is reported as None (not applicable).
    """
    witness: dict = {}
    irreducible, sccs = is_irreducible(machine)
    if not irreducible:
        witness["scc"] = sccs
    unifilar, pairs = is_unifilar(machine)
    if not unifilar:
        witness["nonunifilar_pairs"] = pairs
    distinct: bool | None = None
    if unifilar:
        partition = distinctness_partition(machine, tolerance)
        distinct = partition.is_discrete()
        if not distinct:
            block = next(b for b in partition.blocks if len(b) > 1)
            witness["indistinct_pair"] = (block[0], block[1])
            witness["partition"] = partition.blocks
    return AxiomReport(
        irreducible=irreducible,
        unifilar=unifilar,
        probabilistically_distinct=distinct,
        witness=witness,
    )


def find_sync_word(machine: LabeledMatrixMachine, max_len: int | None = None):
    """Shortest word that drives an observer's consistent-state set to a
    single state, or None within ``max_len``.

    Breadth-first over the subset automaton, starting from the set of all
    states; ties broken lexicographically by alphabet order.  Exploration is
    capped at 2**N subsets.
    """
    from .machine import stationary_distribution, word_prob_from_distribution

    ok, pairs = is_unifilar(machine)
    if not ok:
        raise NotUnifilarError(f"machine is not unifilar at (state, symbol) pairs {pairs}")
    n = machine.n_states
    if max_len is None:
        max_len = 4 * n
    irreducible, _ = is_irreducible(machine)
    if irreducible:
        start_dist = stationary_distribution(machine).pi
    else:
        start_dist = np.full(n, 1.0 / n)
    delta = unifilar_transitions(machine)
    start = frozenset(range(n))
    if len(start) == 1:
        return ()
    seen = {start}
    queue = deque([(start, ())])
    while queue:
        subset, word = queue.popleft()
        if len(word) >= max_len:
            continue
        for x in range(machine.n_symbols):
            nxt = frozenset(delta[s][x] for s in subset if delta[s][x] is not None)
            if not nxt or nxt in seen:
                continue
            w = word + (x,)
            if len(nxt) == 1:
                if word_prob_from_distribution(machine, start_dist, w) > 0.0:
                    return w
                continue
            if len(seen) < 2**n:
                seen.add(nxt)
                queue.append((nxt, w))
    return None
