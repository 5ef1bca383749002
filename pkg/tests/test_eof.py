import math

import numpy as np
import pytest

from afwbounds.bounds import eof_scb
from afwbounds.entropy import von_neumann_entropy
from afwbounds.eof import (
    PureEnsemble,
    concurrence,
    convex_roof_eof,
    ensemble_value,
    wootters_eof,
)
from afwbounds.operators import ValidationError, partial_trace
from afwbounds.states import commuting_pair, generic_pair, random_density

LN2 = math.log(2)


def bell(p=1.0):
    """Isotropic mixture p |Phi+><Phi+| + (1-p) I/4."""
    phi = np.array([1, 0, 0, 1]) / math.sqrt(2)
    return p * np.outer(phi, phi) + (1 - p) * np.eye(4) / 4


def test_wootters_examples():
    assert wootters_eof(bell()) == pytest.approx(LN2, abs=1e-12)
    assert wootters_eof(np.diag([1.0, 0, 0, 0])) == pytest.approx(0.0, abs=1e-12)
    assert wootters_eof(np.eye(4) / 4) == 0.0
    with pytest.raises(ValidationError):
        concurrence(np.eye(9) / 9)


@pytest.mark.parametrize("p", [0.4, 0.6, 0.8, 0.95])
def test_concurrence_of_isotropic_states(p):
    # Bell fidelity f = (1 + 3p)/4 and concurrence max(0, 2f - 1)
    f = (1 + 3 * p) / 4
    assert concurrence(bell(p)) == pytest.approx(max(0.0, 2 * f - 1), abs=1e-12)


def test_wootters_matches_marginal_entropy_on_pure_states():
    for s in range(10):
        psi = random_density(4, 1, seed=s)
        assert wootters_eof(psi) == pytest.approx(von_neumann_entropy(partial_trace(psi, (2, 2), "A")), abs=1e-9)


def test_pure_state_roof_is_exact():
    psi = random_density(9, 1, seed=3)
    res = convex_roof_eof(psi, (3, 3))
    assert res.value == pytest.approx(von_neumann_entropy(partial_trace(psi, (3, 3), "A")), abs=1e-12)
    assert res.ensemble.size == 1 and res.converged


def test_separable_input_ensemble_gives_zero():
    a = [np.array([1, 0]), np.array([0, 1]), np.array([1, 1]) / math.sqrt(2)]
    b = [np.array([1, 0]), np.array([1, 1j]) / math.sqrt(2), np.array([0, 1])]
    vecs = np.array([np.kron(x, y) for x, y in zip(a, b)])
    ens = PureEnsemble(np.array([0.5, 0.3, 0.2]), vecs)
    assert ensemble_value(ens, (2, 2)) == pytest.approx(0.0, abs=1e-12)
    res = convex_roof_eof(ens.matrix(), (2, 2), restarts=2, initial=ens)
    assert res.value == pytest.approx(0.0, abs=1e-9)


def test_roof_reproduces_ensemble_state():
    rho = random_density(4, 3, seed=8)
    res = convex_roof_eof(rho, (2, 2), restarts=4, seed=1)
    ens = res.ensemble
    assert ens.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(np.linalg.norm(ens.vectors, axis=1)[ens.weights > 0], 1.0, atol=1e-12)
    assert np.allclose(ens.matrix(), rho, atol=1e-8)
    assert res.value == pytest.approx(ens.value((2, 2)))


@pytest.mark.parametrize("seed", range(4))
def test_roof_matches_wootters(seed):
    rho = random_density(4, seed=100 + seed)
    res = convex_roof_eof(rho, (2, 2), restarts=16, seed=seed)
    w = wootters_eof(rho)
    assert -1e-9 <= res.value - w <= 5e-3


def test_roof_of_isotropic_state():
    rho = bell(0.8)
    res = convex_roof_eof(rho, (2, 2), restarts=16)
    assert res.value == pytest.approx(wootters_eof(rho), abs=5e-3)
    assert res.value >= wootters_eof(rho) - 1e-9


def test_convexity_with_concatenated_ensemble():
    r1, r2 = random_density(4, seed=1), random_density(4, seed=2)
    e1 = convex_roof_eof(r1, (2, 2), restarts=8).ensemble
    e2 = convex_roof_eof(r2, (2, 2), restarts=8).ensemble
    for p in (0.25, 0.5, 0.8):
        mixed = e1.mix(e2, p)
        assert np.allclose(mixed.matrix(), p * r1 + (1 - p) * r2, atol=1e-8)
        lhs = convex_roof_eof(mixed.matrix(), (2, 2), restarts=4, initial=mixed).value
        assert lhs <= p * e1.value((2, 2)) + (1 - p) * e2.value((2, 2)) + 1e-7


def test_roof_rejects_large_dims():
    with pytest.raises(ValidationError):
        convex_roof_eof(np.eye(10) / 10, (2, 5))
    with pytest.raises(ValidationError):
        convex_roof_eof(np.eye(4) / 4, (2, 3))


def test_nonconvergence_warns():
    rho = random_density(4, seed=5)
    with pytest.warns(RuntimeWarning):
        res = convex_roof_eof(rho, (2, 2), restarts=2, max_iter=2)
    assert not res.converged
    assert res.value >= wootters_eof(rho) - 1e-9


@pytest.mark.parametrize("eps", [0.01, 0.1, 0.3, 0.7])
def test_eof_bound_with_wootters_gaps(eps):
    for s in range(10):
        pair = commuting_pair(4, eps, seed=s) if s % 2 else generic_pair(4, eps, seed=s)
        ev = eof_scb(*pair, (2, 2), eps=eps)
        assert ev.passed()


def test_eof_bound_at_endpoint():
    ev = eof_scb(bell(), np.eye(4) / 4, (2, 2), eps=1.0)
    assert ev.variants["delta"] == 1.0
    # envelope of t ln 2 + h(t) on [0, 1] by grid search
    t = np.linspace(1e-9, 1 - 1e-9, 200001)
    grid_max = np.max(t * LN2 - t * np.log(t) - (1 - t) * np.log(1 - t))
    assert ev.bound_value == pytest.approx(grid_max, abs=1e-9)
