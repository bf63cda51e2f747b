import numpy as np
import pytest

from conftest import all_words
from emtool import examples
from emtool.axioms import is_generator_em
from emtool.errors import (
    ClassExplosionError,
    InsufficientDataError,
    NotIrreducibleError,
)
from emtool.isomorphism import are_isomorphic
from emtool.machine import (
    Alphabet,
    LabeledMatrixMachine,
    word_prob_from_state,
    word_prob_stationary,
)
from emtool.mixed_state import belief_update
from emtool.reconstruct import (
    build_context_model,
    reconstruct_analytic,
    reconstruct_empirical,
    sns_belief_closed_form,
)
from emtool.simulate import sample_path


@pytest.mark.parametrize("name", ["even", "abc", "np2_minimal"])
def test_analytic_round_trip(name, request):
    machine = request.getfixturevalue(name)
    result = reconstruct_analytic(machine)
    assert result.provenance == "analytic"
    assert are_isomorphic(machine, result.machine, tolerance=1e-6) is not None


def test_analytic_on_nonminimal_input(np2):
    # a unifilar machine with indistinct states reconstructs to its quotient
    result = reconstruct_analytic(np2)
    assert result.machine.n_states == 2
    assert are_isomorphic(result.machine, examples.np2_minimal(0.5), tolerance=1e-6)


def test_analytic_output_is_generator(even, abc):
    for machine in (even, abc):
        result = reconstruct_analytic(machine)
        assert is_generator_em(result.machine).is_generator_em


def test_analytic_mu_is_stationary(even, abc):
    for machine in (even, abc):
        result = reconstruct_analytic(machine)
        mu = result.class_probability
        T = result.machine.matrices.sum(axis=0)
        assert np.abs(mu @ T - mu).max() <= 1e-9
        assert mu.sum() == pytest.approx(1.0, abs=1e-12)


def test_analytic_preserves_word_probabilities(even):
    result = reconstruct_analytic(even)
    mu = result.class_probability
    for length in range(1, 7):
        for w in all_words(2, length):
            row = mu.copy()
            for x in w:
                row = row @ result.machine.matrices[x]
            assert float(row.sum()) == pytest.approx(
                word_prob_stationary(even, w), abs=1e-9
            )


def test_analytic_atlas_diagnostics(even):
    diag = reconstruct_analytic(even).diagnostics
    assert diag["n_classes"] == 4  # pi, post-"1", and the two vertices
    assert diag["n_transient"] == 2
    assert diag["state_words"] == [(0,), (0, 1)]


def test_analytic_requires_irreducible():
    mats = np.zeros((1, 2, 2))
    mats[0, 0, 1] = 1.0
    mats[0, 1, 1] = 1.0
    m = LabeledMatrixMachine(2, Alphabet(("a",)), mats)
    with pytest.raises(NotIrreducibleError):
        reconstruct_analytic(m)


def test_sns_class_explosion(sns):
    with pytest.raises(ClassExplosionError) as excinfo:
        reconstruct_analytic(sns, cap=20)
    assert excinfo.value.n_classes >= 20


def test_sns_closed_form_values():
    # hand-computed: q_1 = (1-q)(1-p) / (p + (1-p))
    assert sns_belief_closed_form(0.5, 0.5, 1) == pytest.approx(0.25, abs=1e-15)
    # n = 2 at p = q = 0.5: tail = 0.5*(0.5 + 0.5) = 0.5 -> 0.5*0.5/(0.25+0.5)
    assert sns_belief_closed_form(0.5, 0.5, 2) == pytest.approx(1 / 3, abs=1e-15)


def test_sns_closed_form_matches_belief_propagation():
    for p in (0.3, 0.5, 0.7):
        for q in (0.3, 0.5, 0.7):
            machine = examples.sns(p, q)
            # after "0" the state is known to be sigma_1 exactly
            phi = np.array([1.0, 0.0])
            for n in range(1, 11):
                phi = belief_update(machine, phi, 1)
                prob0 = float((phi @ machine.matrices[0]).sum())
                assert prob0 == pytest.approx(
                    sns_belief_closed_form(p, q, n), abs=1e-12
                )


def test_sns_closed_form_increasing():
    for p in (0.3, 0.5, 0.7):
        for q in (0.3, 0.5, 0.7):
            values = [sns_belief_closed_form(p, q, n) for n in range(1, 31)]
            assert all(b > a for a, b in zip(values, values[1:]))


def test_sns_closed_form_domain():
    with pytest.raises(ValueError):
        sns_belief_closed_form(0.0, 0.5, 1)
    with pytest.raises(ValueError):
        sns_belief_closed_form(0.5, 0.5, 0)


def test_context_model_counts_consistent(even):
    run = sample_path(even, "stationary", 5000, seed=13)
    model = build_context_model(run.symbols, l_ctx=4, l_fut=2, n_symbols=2)
    assert np.array_equal(model.future_counts.sum(axis=1), model.ctx_counts)
    assert model.ctx_counts.sum() == 5000 - 4 - 2 + 1
    # decode round-trips
    for code in model.ctx_codes[:5]:
        word = model.decode_context(int(code))
        assert len(word) == 4


def test_context_model_rejects_short_samples():
    with pytest.raises(InsufficientDataError):
        build_context_model([0, 1, 0], l_ctx=4, l_fut=2, n_symbols=2)


def test_empirical_even_small_sample(even):
    run = sample_path(even, "stationary", 10**5, seed=31)
    result = reconstruct_empirical(
        run.symbols, 2, l_ctx=6, l_fut=3, min_count=300, pool_tol=0.03
    )
    assert result.machine.n_states == 2
    assert is_generator_em(result.machine).is_generator_em
    assert are_isomorphic(even, result.machine, tolerance=0.03) is not None


def test_empirical_iid_coin_single_state():
    rng = np.random.default_rng(5)
    coin = (rng.random(50_000) < 0.5).astype(np.int64)
    result = reconstruct_empirical(coin, 2, l_ctx=5, l_fut=3, min_count=300)
    assert result.machine.n_states == 1
    p1 = float(result.machine.matrices[1].sum())
    assert p1 == pytest.approx(0.5, abs=0.02)


def test_empirical_min_count_guard():
    with pytest.raises(InsufficientDataError):
        reconstruct_empirical(np.zeros(200, dtype=np.int64), 2, l_ctx=4, l_fut=2,
                              min_count=10**6)


def test_empirical_state_future_matches_machine(even):
    # Lemma-4-style consistency: each state's empirical future distribution
    # agrees with the reconstructed machine's own word probabilities
    run = sample_path(even, "stationary", 2 * 10**5, seed=33)
    result = reconstruct_empirical(
        run.symbols, 2, l_ctx=6, l_fut=3, min_count=300, pool_tol=0.03
    )
    m = result.machine
    iso = are_isomorphic(even, m, tolerance=0.03)
    assert iso is not None
    for i in range(m.n_states):
        for w in all_words(2, 3):
            assert word_prob_from_state(m, i, w) == pytest.approx(
                word_prob_from_state(even, iso.mapping.index(i), w), abs=0.03
            )
