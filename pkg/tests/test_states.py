import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from afwbounds.entropy import conditional_entropy, entropy_of_probs, energy_moment, von_neumann_entropy
from afwbounds.gibbs import HamiltonianSpectrum
from afwbounds.operators import (
    ValidationError,
    commute,
    eigvals_desc,
    rank,
    shared_eigenbasis,
    trace_distance,
)
from afwbounds.states import (
    GenerationError,
    QCState,
    commuting_pair,
    energy_constrained,
    extremal_energy_pair,
    generic_pair,
    make_rng,
    move_mass,
    partial_majorized_pair,
    partial_sums_ok,
    qc_pair,
    random_density,
    robin_hood,
    schur_check,
)

OSC = HamiltonianSpectrum.oscillator()


@pytest.mark.parametrize("dim, r", [(2, 1), (4, 1), (4, 2), (5, 5)])
def test_random_density_rank(dim, r):
    rho = random_density(dim, r, seed=7)
    assert rank(rho) == r
    assert np.trace(rho).real == pytest.approx(1.0)
    if r == 1:
        assert von_neumann_entropy(rho) == pytest.approx(0.0, abs=1e-10)


def test_random_density_errors_and_determinism():
    with pytest.raises(ValidationError):
        random_density(3, 4)
    assert np.array_equal(random_density(4, seed=3), random_density(4, seed=3))
    assert not np.array_equal(random_density(4, seed=3), random_density(4, seed=4))


def test_random_density_mean_eigenvalue():
    w = np.array([np.linalg.eigvalsh(random_density(3, seed=s)) for s in range(300)])
    assert w.sum(axis=1).mean() / 3 == pytest.approx(1 / 3, abs=1e-12)
    assert np.diag(np.mean([random_density(3, seed=s) for s in range(2000)], axis=0)).real == pytest.approx(
        np.full(3, 1 / 3), abs=0.02)


def test_make_rng_streams_independent():
    a = make_rng(5, 0).random(4)
    assert np.array_equal(a, make_rng(5, 0).random(4))
    assert not np.array_equal(a, make_rng(5, 1).random(4))
    with pytest.raises(ValidationError):
        make_rng(-1)


def test_move_mass_exact_tv():
    rng = np.random.default_rng(0)
    p = rng.dirichlet(np.ones(6))
    for eps in (0.01, 0.2, 0.5):
        q = move_mass(p, eps, rng)
        assert 0.5 * np.abs(p - q).sum() == pytest.approx(eps, abs=1e-12)
        assert q.sum() == pytest.approx(1.0)
    with pytest.raises(GenerationError):
        move_mass(np.array([0.5, 0.5]), 1.0, rng, max_tries=5)


@pytest.mark.parametrize("dim", [2, 3, 6])
@pytest.mark.parametrize("eps", [0.01, 0.3, 0.7, 1.0])
def test_commuting_pair_distance(dim, eps):
    rho, sigma = commuting_pair(dim, eps, seed=11)
    assert trace_distance(rho, sigma) == pytest.approx(eps, abs=1e-10)
    assert np.linalg.norm(rho @ sigma - sigma @ rho) <= 1e-12
    # TV of eigenvalues in a shared basis equals the trace distance
    V = shared_eigenbasis(rho, sigma)
    p = np.real(np.diag(V.conj().T @ rho @ V))
    q = np.real(np.diag(V.conj().T @ sigma @ V))
    assert 0.5 * np.abs(p - q).sum() == pytest.approx(eps, abs=1e-10)


def test_commuting_pair_given_spectrum():
    rho, sigma = commuting_pair(2, 0.25, seed=1, p=[0.75, 0.25], basis=np.eye(2))
    assert np.allclose(np.diag(sigma).real, [0.5, 0.5])


@pytest.mark.parametrize("eps", [0.0, 1.5])
def test_commuting_pair_rejects_eps(eps):
    with pytest.raises(ValidationError):
        commuting_pair(3, eps)


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("eps", [0.01, 0.1, 0.3, 0.7])
def test_partial_majorized_pair(m, eps):
    for seed in range(5):
        rho, sigma = partial_majorized_pair(5, m, eps, seed=seed)
        lr, ls = eigvals_desc(rho), eigvals_desc(sigma)
        assert partial_sums_ok(lr, ls, m)
        assert np.sum(lr > 1e-12) > m
        assert trace_distance(rho, sigma) == pytest.approx(eps, abs=1e-10)
        assert commute(rho, sigma)


@pytest.mark.parametrize("eps", [0.05, 0.4])
def test_full_majorization_entropy_grows(eps):
    for seed in range(5):
        rho, sigma = partial_majorized_pair(4, 2, eps, seed=seed, full=True)
        lr, ls = eigvals_desc(rho), eigvals_desc(sigma)
        assert partial_sums_ok(lr, ls, 5)
        assert schur_check(lr, ls)
        assert von_neumann_entropy(rho) <= von_neumann_entropy(sigma) + 1e-12


def test_partial_majorized_pair_errors():
    with pytest.raises(ValidationError):
        partial_majorized_pair(2, 2, 0.1)
    with pytest.raises(ValidationError):
        partial_majorized_pair(3, 0, 0.1)


def test_robin_hood_majorized():
    p = np.array([0.6, 0.3, 0.1])
    q = robin_hood(p, 0.2)
    assert 0.5 * np.abs(p - q).sum() == pytest.approx(0.2, abs=1e-10)
    assert partial_sums_ok(p, q, 3)
    assert entropy_of_probs(q) >= entropy_of_probs(p)


@pytest.mark.parametrize("eps", [0.01, 0.3, 0.9])
def test_generic_pair_within_distance(eps):
    for seed in range(5):
        rho, sigma = generic_pair(4, eps, seed=seed)
        assert trace_distance(rho, sigma) <= eps + 1e-10


def test_qc_state_basics():
    a, b = np.diag([0.7, 0.3]), np.diag([0.1, 0.9])
    s = QCState([0.4, 0.6], [a, b])
    M = s.matrix()
    assert np.trace(M).real == pytest.approx(1.0)
    assert s.conditional_entropy() == pytest.approx(conditional_entropy(M, (2, 2)), abs=1e-12)
    assert np.allclose(s.marginal_A(), 0.4 * a + 0.6 * b)
    with pytest.raises(ValidationError):
        QCState([0.5, 0.6], [a, b])


@pytest.mark.parametrize("blocks", [1, 2, 3])
@pytest.mark.parametrize("eps", [0.01, 0.3, 0.7])
def test_qc_pair(blocks, eps):
    rho, sigma = qc_pair(3, blocks, eps, seed=2)
    d = rho.distance(sigma)
    assert d <= eps + 1e-8
    # blockwise distance equals the full-matrix distance
    assert trace_distance(rho.matrix(), sigma.matrix()) == pytest.approx(d, abs=1e-10)
    again = qc_pair(3, blocks, eps, seed=2)
    assert np.array_equal(again[1].matrix(), sigma.matrix())


def test_qc_pair_hits_target_on_grid():
    hits = sum(abs(qc_pair(3, 2, 0.3, seed=s)[0].distance(qc_pair(3, 2, 0.3, seed=s)[1]) - 0.3) < 1e-8
               for s in range(20))
    assert hits == 20


def test_energy_constrained():
    with pytest.raises(ValidationError):
        energy_constrained(HamiltonianSpectrum.explicit([1, 2, 3]), 0.5, 3)
    lv = OSC.levels(6)
    for seed in range(10):
        rho = energy_constrained(OSC, 0.7, 6, seed=seed)
        assert energy_moment(rho, lv) <= 0.7 + 1e-12
        rho = energy_constrained(OSC, 0.7, 6, seed=seed, exact=True)
        assert energy_moment(rho, lv) == pytest.approx(0.7, abs=1e-9)
    # a huge budget leaves the random sample untouched
    rho = energy_constrained(OSC, 1e6, 6, seed=3, rank=6)
    assert np.allclose(rho, random_density(6, 6, make_rng(3)), atol=1e-15)


@pytest.mark.parametrize("k", [2, 3, 5])
@pytest.mark.parametrize("eps", [0.01, 0.3, 1.0])
def test_extremal_pair_gap(k, eps):
    rho, sigma = extremal_energy_pair(OSC, k, eps)
    lv = OSC.levels(rho.shape[0])
    assert trace_distance(rho, sigma) == pytest.approx(eps, abs=1e-14)
    assert energy_moment(rho, lv) - energy_moment(sigma, lv) == pytest.approx((k - 1) * eps, abs=1e-14)


def test_extremal_pair_ground_level_has_no_gap():
    rho, sigma = extremal_energy_pair(OSC, 1, 0.4)
    lv = OSC.levels(rho.shape[0])
    assert energy_moment(rho, lv) - energy_moment(sigma, lv) == 0.0


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.floats(0.001, 1.0), st.integers(0, 2**32 - 1))
def test_commuting_pair_property(dim, eps, seed):
    rho, sigma = commuting_pair(dim, eps, seed=seed)
    assert trace_distance(rho, sigma) == pytest.approx(eps, abs=1e-10)
