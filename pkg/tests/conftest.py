"""Shared fixtures and independent oracles.

The oracles deliberately avoid the library's matrix-product code paths:
word probabilities are computed by explicit enumeration of state paths, so
agreement with the library is a genuine cross-check.
"""

import itertools

import numpy as np
import pytest

from emtool import examples
from emtool.machine import stationary_distribution


@pytest.fixture(scope="session")
def even():
    return examples.even(0.5)


@pytest.fixture(scope="session")
def abc():
    return examples.abc(0.4, 0.6)


@pytest.fixture(scope="session")
def np2():
    return examples.np2(0.5)


@pytest.fixture(scope="session")
def np2_minimal():
    return examples.np2_minimal(0.5)


@pytest.fixture(scope="session")
def sns():
    return examples.sns(0.5, 0.5)


def all_words(n_symbols, length):
    return itertools.product(range(n_symbols), repeat=length)


def brute_word_prob(machine, start_dist, word):
    """P(word) by summing over every explicit state path."""
    n = machine.n_states
    total = 0.0
    for path in itertools.product(range(n), repeat=len(word) + 1):
        p = start_dist[path[0]]
        for t, x in enumerate(word):
            p *= machine.matrices[x, path[t], path[t + 1]]
            if p == 0.0:
                break
        else:
            total += p
    return total


def brute_stationary_word_prob(machine, word):
    pi = stationary_distribution(machine).pi
    return brute_word_prob(machine, pi, word)


def brute_belief(machine, word):
    """phi_i(word) = sum_j pi_j P(word, end in i | start j) / P(word), with
    the stationary fallback for impossible words."""
    pi = stationary_distribution(machine).pi
    n = machine.n_states
    mass = np.zeros(n)
    for path in itertools.product(range(n), repeat=len(word) + 1):
        p = pi[path[0]]
        for t, x in enumerate(word):
            p *= machine.matrices[x, path[t], path[t + 1]]
            if p == 0.0:
                break
        else:
            mass[path[-1]] += p
    if mass.sum() <= 0.0:
        return pi
    return mass / mass.sum()
