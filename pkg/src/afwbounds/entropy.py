"""Scalar entropy kit and entropic functionals of density matrices.

All logarithms are natural. ``0 ln 0`` is taken as 0 everywhere.
"""

from __future__ import annotations

import math
from collections import namedtuple

import numpy as np
from scipy.optimize import minimize_scalar

from .operators import (
    ValidationError,
    check_density,
    check_hermitian,
    check_positive,
    partial_trace,
)

SUPPORT_TOL = 1e-12
INV_E = math.exp(-1.0)
LN2 = math.log(2.0)

BinaryEntropyFamily = namedtuple("BinaryEntropyFamily", "h h_up eta eta_up")


def _check_unit(x: float, name: str = "x") -> float:
    x = float(x)
    if not (0.0 <= x <= 1.0):
        raise ValidationError(f"{name} must lie in [0, 1], got {x}")
    return x


def eta(x):
    """``-x ln x`` with ``eta(0) = 0``; accepts scalars or arrays."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = -x[pos] * np.log(x[pos])
    return out if out.ndim else float(out)


def binary_entropy(x: float) -> float:
    x = _check_unit(x)
    return eta(x) + eta(1.0 - x)


def h_up(x: float) -> float:
    """Binary entropy on ``[0, 1/2]``, ``ln 2`` beyond."""
    x = _check_unit(x)
    return binary_entropy(x) if x <= 0.5 else LN2


def eta_up(x: float) -> float:
    """``eta`` on ``[0, 1/e]``, ``1/e`` beyond."""
    x = _check_unit(x)
    return eta(x) if x <= INV_E else INV_E


def binary_entropy_family(x: float) -> BinaryEntropyFamily:
    """Return ``(h, h_up, eta, eta_up)`` evaluated at ``x``."""
    x = _check_unit(x)
    return BinaryEntropyFamily(binary_entropy(x), h_up(x), eta(x), eta_up(x))


def g_function(x: float) -> float:
    """``(x+1) ln(x+1) - x ln x``: entropy of the oscillator Gibbs state at mean ``x``."""
    x = float(x)
    if x < 0:
        raise ValidationError(f"g is defined for x >= 0, got {x}")
    if x == 0:
        return 0.0
    # x*log1p(1/x) + log1p(x) avoids cancellation for large x
    return x * math.log1p(1.0 / x) + math.log1p(x)


def nondecreasing_envelope(f, x: float, lo: float = 0.0, xatol: float = 1e-12) -> float:
    """Smallest nondecreasing majorant of ``f`` evaluated at ``x``.

    Computes ``sup_{lo <= t <= x} f(t)`` by bounded Brent search plus an
    endpoint check. Exact for concave (more generally unimodal) ``f``, which
    covers every expression it is used on here.
    """
    x = float(x)
    if x <= lo:
        return float(f(x))
    res = minimize_scalar(lambda t: -f(t), bounds=(lo, x), method="bounded",
                          options={"xatol": xatol})
    return float(max(f(x), f(lo), -res.fun))


def rank_envelope(x: float, log_dim: float, coeff: float = 1.0) -> float:
    """Closed form of ``{coeff*t*log_dim + h(t)}^up`` at ``x``.

    The maximizer of ``c t ln d + h(t)`` is ``t* = D/(D+1)`` with
    ``D = d**c``, where the value is ``ln(D + 1)``.
    """
    x = _check_unit(x)
    big = math.exp(coeff * log_dim)
    t_star = big / (big + 1.0)
    if x <= t_star:
        return coeff * x * log_dim + binary_entropy(x)
    return math.log1p(big)


def _spectrum(A, extended: bool) -> np.ndarray:
    A = check_positive(A) if extended else check_density(A)
    return np.clip(np.linalg.eigvalsh(A), 0.0, None)


def entropy_of_probs(p) -> float:
    """Shannon entropy (nats) of a nonnegative vector, no normalization."""
    return float(np.sum(eta(np.clip(np.asarray(p, dtype=float), 0.0, None))))


def von_neumann_entropy(rho, extended: bool = False) -> float:
    """Von Neumann entropy ``Tr eta(rho)``.

    Parameters
    ----------
    rho : array_like
        Density matrix, or any positive operator when ``extended`` is set.
    extended : bool
        Use the homogeneous extension ``sum eta(l_i) - eta(Tr rho)``, which
        equals ``t * S(rho / t)`` for ``t = Tr rho`` and vanishes at zero.
        Required whenever the trace differs from one.
    """
    w = _spectrum(rho, extended)
    s = entropy_of_probs(w)
    if extended:
        s -= eta(float(np.sum(w)))
    return float(max(s, 0.0))


def extended_entropy_of_probs(p) -> float:
    p = np.clip(np.asarray(p, dtype=float), 0.0, None)
    return float(max(entropy_of_probs(p) - eta(float(np.sum(p))), 0.0))


def _log_on_support(w: np.ndarray) -> np.ndarray:
    out = np.zeros_like(w)
    pos = w > SUPPORT_TOL
    out[pos] = np.log(w[pos])
    return out


def lindblad_relative_entropy(rho, sigma) -> float:
    """Relative entropy of positive operators ``Tr(rho ln rho - rho ln sigma + sigma - rho)``.

    Returns ``inf`` when the support of ``rho`` is not contained in that of
    ``sigma``; ``D(0 || sigma) = Tr sigma``.
    """
    rho, sigma = check_positive(rho), check_positive(sigma)
    if rho.shape != sigma.shape:
        raise ValidationError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    wr, Vr = np.linalg.eigh(rho)
    ws, Vs = np.linalg.eigh(sigma)
    wr, ws = np.clip(wr, 0.0, None), np.clip(ws, 0.0, None)
    # overlap[i, j] = |<r_i|s_j>|^2
    overlap = np.abs(Vr.conj().T @ Vs) ** 2
    supp_r = wr > SUPPORT_TOL
    kernel_s = ws <= SUPPORT_TOL
    if np.any(overlap[np.ix_(supp_r, kernel_s)] * wr[supp_r, None] > SUPPORT_TOL):
        return math.inf
    cross = float(np.sum(wr[:, None] * overlap * _log_on_support(ws)[None, :]))
    return float(-entropy_of_probs(wr) - cross + np.sum(ws) - np.sum(wr))


def relative_entropy(rho, omega) -> float:
    """Quantum relative entropy ``D(rho || omega)``; ``inf`` off support.

    Computed as ``Tr rho ln rho - Tr rho ln omega``; ``omega`` may be
    subnormalized.
    """
    omega = check_positive(omega, max_trace=1.0)
    d = lindblad_relative_entropy(check_density(rho), omega)
    # strip the Lindblad trace terms Tr omega - Tr rho
    return d - (float(np.trace(omega).real) - 1.0)


def conditional_entropy(rho_ab, dims) -> float:
    """``S(AB) - S(B)``."""
    rho_ab = check_density(rho_ab)
    rho_b = partial_trace(rho_ab, dims, keep="B")
    return von_neumann_entropy(rho_ab) - von_neumann_entropy(rho_b)


def conditional_entropy_bounded(rho_ab, dims) -> float:
    """``S(A) - D(rho_AB || rho_A (x) rho_B)``: the finite-``S(A)`` expression
    of the conditional entropy, kept as an independent cross-check."""
    rho_ab = check_density(rho_ab)
    rho_a = partial_trace(rho_ab, dims, keep="A")
    rho_b = partial_trace(rho_ab, dims, keep="B")
    return von_neumann_entropy(rho_a) - relative_entropy(rho_ab, np.kron(rho_a, rho_b))


def mutual_information(rho_ab, dims) -> float:
    """``S(A) + S(B) - S(AB)``."""
    rho_ab = check_density(rho_ab)
    s_a = von_neumann_entropy(partial_trace(rho_ab, dims, keep="A"))
    s_b = von_neumann_entropy(partial_trace(rho_ab, dims, keep="B"))
    return max(s_a + s_b - von_neumann_entropy(rho_ab), 0.0)


def energy_moment(rho, levels, a: float = 1.0, basis=None) -> float:
    """``Tr H^a rho = sum_k h_k^a <tau_k|rho|tau_k>``.

    ``levels`` are the Hamiltonian eigenvalues ``h_k`` (at least
    ``dim`` of them, extra ones ignored); ``basis`` holds the eigenvectors
    ``tau_k`` as columns and defaults to the computational basis.
    """
    rho = check_hermitian(rho)
    if a < 1:
        raise ValidationError(f"moment order must be >= 1, got {a}")
    d = rho.shape[0]
    levels = np.asarray(levels, dtype=float)
    if levels.size < d:
        raise ValidationError(f"need {d} levels, got {levels.size}")
    if basis is None:
        diag = np.diag(rho).real
    else:
        basis = np.asarray(basis, dtype=complex)
        if basis.shape != rho.shape:
            raise ValidationError(f"basis shape {basis.shape} does not match state {rho.shape}")
        diag = np.real(np.einsum("ik,ij,jk->k", basis.conj(), rho, basis))
    return float(np.sum(levels[:d] ** a * diag))
