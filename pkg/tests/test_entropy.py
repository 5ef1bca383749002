import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings, strategies as st

from afwbounds.entropy import (
    INV_E,
    LN2,
    binary_entropy,
    binary_entropy_family,
    conditional_entropy,
    conditional_entropy_bounded,
    energy_moment,
    eta,
    eta_up,
    g_function,
    h_up,
    lindblad_relative_entropy,
    mutual_information,
    nondecreasing_envelope,
    rank_envelope,
    relative_entropy,
    von_neumann_entropy,
)
from afwbounds.operators import ValidationError, partial_trace

from conftest import ginibre, oracle_entropy, oracle_relent

BELL = np.zeros((4, 4))
BELL[np.ix_([0, 3], [0, 3])] = 0.5
CLASSICAL = np.diag([0.5, 0, 0, 0.5])


def test_family_at_zero_and_half():
    f = binary_entropy_family(0.0)
    assert f.h == 0 and f.eta == 0
    f = binary_entropy_family(0.5)
    assert f.h == pytest.approx(LN2) and f.h_up == pytest.approx(LN2)


@pytest.mark.parametrize("x", [0.6, 0.8, 0.99, 1.0])
def test_h_up_plateau(x):
    assert h_up(x) == LN2


@pytest.mark.parametrize("x", [0.4, 0.5, 0.9, 1.0])
def test_eta_up_plateau(x):
    assert eta_up(x) == pytest.approx(INV_E if x >= INV_E else eta(x))


@pytest.mark.parametrize("x", [-0.1, 1.1])
def test_family_rejects_out_of_range(x):
    with pytest.raises(ValidationError):
        binary_entropy_family(x)


def test_h_value():
    # direct scalar evaluation
    x = 0.3
    assert binary_entropy(x) == pytest.approx(-x * math.log(x) - (1 - x) * math.log(1 - x), abs=1e-15)
    assert binary_entropy(0.3) == pytest.approx(0.6108643, abs=1e-7)


@pytest.mark.parametrize("x, expected", [
    (0.0, 0.0),
    (1.0, 2 * math.log(2)),
    (2.0, 3 * math.log(3) - 2 * math.log(2)),
    (1e-9, (1e-9 + 1) * math.log1p(1e-9) - 1e-9 * math.log(1e-9)),
    (1e6, (1e6 + 1) * math.log(1e6 + 1) - 1e6 * math.log(1e6)),
])
def test_g_values(x, expected):
    assert g_function(x) == pytest.approx(expected, rel=1e-9, abs=1e-15)


def test_g_rejects_negative():
    with pytest.raises(ValidationError):
        g_function(-1.0)


def test_scalar_shapes_on_grid():
    xs = np.linspace(0, 1, 401)
    hu = [h_up(x) for x in xs]
    eu = [eta_up(x) for x in xs]
    assert np.all(np.diff(hu) >= -1e-15) and np.all(np.diff(eu) >= -1e-15)
    gs = np.array([g_function(x) for x in np.linspace(0, 20, 401)])
    assert np.all(gs >= 0) and np.all(np.diff(gs) > 0)
    assert np.all(np.diff(gs, 2) <= 1e-12)


@pytest.mark.parametrize("log_dim, coeff", [(0.0, 1.0), (math.log(2), 1.0), (math.log(3), 2.0), (math.log(10), 0.5)])
def test_rank_envelope_matches_numeric_envelope(log_dim, coeff):
    f = lambda t: coeff * t * log_dim + binary_entropy(t)
    for x in (0.01, 0.3, 0.5, 0.7, 0.95, 1.0):
        assert rank_envelope(x, log_dim, coeff) == pytest.approx(nondecreasing_envelope(f, x), abs=1e-9)
    assert rank_envelope(1.0, log_dim, coeff) == pytest.approx(math.log1p(math.exp(coeff * log_dim)))


def test_envelope_of_nonmonotone_function():
    assert nondecreasing_envelope(lambda t: -(t - 0.3) ** 2, 0.8) == pytest.approx(0.0, abs=1e-12)
    assert nondecreasing_envelope(lambda t: -(t - 0.3) ** 2, 0.1) == pytest.approx(-0.04)


def test_entropy_examples():
    assert von_neumann_entropy(np.eye(2) / 2) == pytest.approx(LN2)
    assert von_neumann_entropy(np.diag([1.0, 0.0])) == 0.0
    assert von_neumann_entropy(np.zeros((2, 2)), extended=True) == 0.0


def test_extended_entropy_example():
    # scalar oracle of sum eta(l) - eta(sum l)
    a, b = 0.35, 0.15
    expected = -a * math.log(a) - b * math.log(b) + (a + b) * math.log(a + b)
    assert von_neumann_entropy(np.diag([a, b]), extended=True) == pytest.approx(expected, abs=1e-14)
    assert expected == pytest.approx(0.305432, abs=1e-6)


def test_extended_entropy_is_homogeneous(rng):
    rho = ginibre(rng, 4)
    for t in (0.1, 0.5, 0.9):
        assert von_neumann_entropy(t * rho, extended=True) == pytest.approx(t * von_neumann_entropy(rho))


def test_subnormalized_requires_extended():
    with pytest.raises(ValidationError):
        von_neumann_entropy(np.diag([0.35, 0.15]))


def test_entropy_against_oracle(rng):
    for d in (2, 3, 5, 8):
        rho = ginibre(rng, d)
        assert von_neumann_entropy(rho) == pytest.approx(oracle_entropy(rho), abs=1e-10)


def test_relative_entropy_examples():
    assert relative_entropy(np.eye(2) / 2, np.eye(2) / 2) == pytest.approx(0.0, abs=1e-15)
    assert relative_entropy(np.diag([1.0, 0]), np.diag([0, 1.0])) == math.inf
    expected = 0.75 * math.log(1.5) + 0.25 * math.log(0.5)
    assert relative_entropy(np.diag([0.75, 0.25]), np.eye(2) / 2) == pytest.approx(expected, abs=1e-14)


def test_relative_entropy_against_logm_oracle(rng):
    for d in (2, 3, 4):
        r, s = ginibre(rng, d), ginibre(rng, d)
        assert relative_entropy(r, s) == pytest.approx(oracle_relent(r, s), abs=1e-8)


def test_relative_entropy_pure_against_full_rank(rng):
    psi = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    psi /= np.linalg.norm(psi)
    r = np.outer(psi, psi.conj())
    s = ginibre(rng, 3)
    expected = -np.real(psi.conj() @ sla.logm(s) @ psi)
    assert relative_entropy(r, s) == pytest.approx(expected, abs=1e-9)


def test_lindblad_trace_terms(rng):
    r, s = ginibre(rng, 3), ginibre(rng, 3)
    assert lindblad_relative_entropy(0.5 * r, 2 * s) == pytest.approx(
        0.5 * oracle_relent(r, s) - 0.5 * math.log(4) + 2 - 0.5, abs=1e-9)
    assert lindblad_relative_entropy(np.zeros((3, 3)), s) == pytest.approx(1.0)


def test_conditional_entropy_examples():
    a, b = np.diag([0.2, 0.8]), np.diag([0.5, 0.3, 0.2])
    assert conditional_entropy(np.kron(a, b), (2, 3)) == pytest.approx(von_neumann_entropy(a))
    assert conditional_entropy(BELL, (2, 2)) == pytest.approx(-LN2)
    assert conditional_entropy(CLASSICAL, (2, 2)) == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(ValidationError):
        conditional_entropy(BELL, (3, 2))


def test_conditional_entropy_two_routes(rng):
    for dims in ((2, 2), (2, 3), (3, 2)):
        rho = ginibre(rng, dims[0] * dims[1])
        a = conditional_entropy(rho, dims)
        assert a == pytest.approx(conditional_entropy_bounded(rho, dims), abs=1e-9)
        assert abs(a) <= von_neumann_entropy(partial_trace(rho, dims, "A")) + 1e-12


def test_mutual_information_examples():
    assert mutual_information(np.kron(np.eye(2) / 2, np.diag([0.3, 0.7])), (2, 2)) == pytest.approx(0, abs=1e-14)
    assert mutual_information(BELL, (2, 2)) == pytest.approx(2 * LN2)
    assert mutual_information(CLASSICAL, (2, 2)) == pytest.approx(LN2)


def test_energy_moment_examples():
    levels = np.arange(5.0)
    assert energy_moment(np.diag([1.0, 0, 0, 0, 0]), levels, 2.0) == 0.0
    for a in (1.0, 1.5, 3.0):
        assert energy_moment(np.diag([0, 0, 1.0, 0, 0]), levels, a) == pytest.approx(2 ** a)
    assert energy_moment(np.diag([2 / 3, 1 / 3]), [0.0, 1.0]) == pytest.approx(1 / 3)
    with pytest.raises(ValidationError):
        energy_moment(np.eye(3) / 3, [0.0, 1.0])
    with pytest.raises(ValidationError):
        energy_moment(np.eye(2) / 2, [0.0, 1.0], a=0.5)


def test_energy_moment_in_rotated_basis(rng):
    U = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))[0]
    rho = ginibre(rng, 3)
    H = (U * np.array([0.0, 1.0, 2.5])) @ U.conj().T
    assert energy_moment(rho, [0.0, 1.0, 2.5], basis=U) == pytest.approx(np.trace(H @ rho).real)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.0, 1.0))
def test_concavity_defect_bounded_by_h(seed, p):
    r = np.random.default_rng(seed)
    a, b = ginibre(r, 3), ginibre(r, 3)
    defect = von_neumann_entropy(p * a + (1 - p) * b) - p * von_neumann_entropy(a) - (1 - p) * von_neumann_entropy(b)
    assert -1e-9 <= defect <= binary_entropy(p) + 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_mutual_information_bounds(seed):
    r = np.random.default_rng(seed)
    rho = ginibre(r, 6)
    sa = von_neumann_entropy(partial_trace(rho, (2, 3), "A"))
    sb = von_neumann_entropy(partial_trace(rho, (2, 3), "B"))
    assert 0 <= mutual_information(rho, (2, 3)) <= 2 * min(sa, sb) + 1e-10
