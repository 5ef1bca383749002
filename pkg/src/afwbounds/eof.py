"""Entanglement of formation: two-qubit closed form and a convex-roof optimizer.

Every pure-state ensemble of ``rho = W W^H`` (``W = V sqrt(Lambda)``, ``r``
columns) has unnormalized members ``psi_k = sum_j U_kj w_j`` for an isometry
``U`` of shape ``K x r``. The average marginal entropy of the ensemble is
``f(U) = sum_k S~(Tr_B psi_k psi_k^H)`` with ``S~`` the homogeneous entropy,
which is minimized over ``U`` by Riemannian gradient descent.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .entropy import binary_entropy, von_neumann_entropy
from .operators import ValidationError, check_density, partial_trace
from .states import make_rng

SIGMA_Y = np.array([[0, -1j], [1j, 0]])
YY = np.kron(SIGMA_Y, SIGMA_Y)


def concurrence(rho) -> float:
    """Two-qubit concurrence from the spin-flipped state."""
    rho = check_density(rho)
    if rho.shape != (4, 4):
        raise ValidationError(f"concurrence needs a two-qubit state, got shape {rho.shape}")
    # the lambdas are the singular values of sqrt(rho) YY conj(sqrt(rho)); taking
    # them directly avoids square roots of roundoff-sized eigenvalues
    w, V = np.linalg.eigh(rho)
    sq = (V * np.sqrt(np.clip(w, 0.0, None))) @ V.conj().T
    lam = np.linalg.svd(sq @ YY @ sq.conj(), compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def wootters_eof(rho) -> float:
    """Entanglement of formation of a two-qubit state (nats)."""
    c = min(concurrence(rho), 1.0)
    return binary_entropy(0.5 * (1.0 + math.sqrt(max(1.0 - c * c, 0.0))))


@dataclass
class PureEnsemble:
    """Pure-state decomposition ``sum_k p_k |psi_k><psi_k|``."""

    weights: np.ndarray
    vectors: np.ndarray  # shape (K, d), unit rows

    def matrix(self) -> np.ndarray:
        return np.einsum("k,ki,kj->ij", self.weights, self.vectors, self.vectors.conj())

    def value(self, dims) -> float:
        """``sum_k p_k S(Tr_B psi_k)``."""
        return ensemble_value(self, dims)

    @property
    def size(self) -> int:
        return int(np.sum(self.weights > 0))

    def mix(self, other: "PureEnsemble", p: float) -> "PureEnsemble":
        return PureEnsemble(np.concatenate([p * self.weights, (1 - p) * other.weights]),
                            np.concatenate([self.vectors, other.vectors]))


def ensemble_value(ens: PureEnsemble, dims) -> float:
    total = 0.0
    for p, v in zip(ens.weights, ens.vectors):
        if p > 0:
            total += p * von_neumann_entropy(partial_trace(np.outer(v, v.conj()), dims, "A"))
    return float(total)


def _factor(rho, tol=1e-12):
    w, V = np.linalg.eigh(rho)
    keep = w > tol
    return V[:, keep] * np.sqrt(w[keep]), w[keep]


def _members(U, W):
    """Unnormalized ensemble members, shape (..., K, d)."""
    return U @ W.T


def _objective_and_grad(U, W, dims, need_grad=True):
    """Average marginal entropy over restarts and its Euclidean gradient.

    ``U`` has shape (R, K, r). Returns ``f`` of shape (R,) and ``dF/dU*``.
    """
    dA, dB = dims
    psi = _members(U, W)  # (R, K, d)
    M = psi.reshape(psi.shape[:-1] + (dA, dB))
    A = M @ np.conj(np.swapaxes(M, -1, -2))  # (R, K, dA, dA)
    w, V = np.linalg.eigh(A)
    w = np.clip(w, 0.0, None)
    tr = w.sum(-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        wl = np.where(w > 1e-300, w * np.log(np.where(w > 1e-300, w, 1.0)), 0.0)
        tl = np.where(tr > 1e-300, tr * np.log(np.where(tr > 1e-300, tr, 1.0)), 0.0)
    f = (tl - wl.sum(-1)).sum(-1)
    if not need_grad:
        return f, None
    # d S~(A) / dA = -ln A + ln(Tr A) I on the support of A
    logw = np.log(np.maximum(w, 1e-300))
    g_eig = -logw + np.log(np.maximum(tr, 1e-300))[..., None]
    G = (V * g_eig[..., None, :]) @ np.conj(np.swapaxes(V, -1, -2))
    GM = (G @ M).reshape(psi.shape)  # (R, K, d)
    grad = GM @ np.conj(W)  # (R, K, r): sum_i conj(W_ij) (G psi_k)_i
    return f, grad


def _project(U, G):
    """Tangent projection on the complex Stiefel manifold."""
    UhG = np.conj(np.swapaxes(U, -1, -2)) @ G
    return G - U @ (0.5 * (UhG + np.conj(np.swapaxes(UhG, -1, -2))))


def _retract(X):
    """Polar retraction onto isometries."""
    u, _, vh = np.linalg.svd(X, full_matrices=False)
    return u @ vh


def _random_isometry(rng, K, r, R):
    Z = rng.standard_normal((R, K, r)) + 1j * rng.standard_normal((R, K, r))
    return _retract(Z)


def ensemble_to_isometry(ens: PureEnsemble, W, lam) -> np.ndarray:
    """Coefficients ``U`` with ``sqrt(p_k) psi_k = sum_j U_kj w_j``."""
    psi = np.sqrt(ens.weights)[:, None] * ens.vectors
    return (psi @ np.conj(W)) / lam[None, :]


def isometry_to_ensemble(U, W) -> PureEnsemble:
    psi = _members(U, W)
    p = np.real(np.sum(np.abs(psi) ** 2, axis=-1))
    vecs = np.where(p[:, None] > 0, psi / np.sqrt(np.where(p > 0, p, 1.0))[:, None], psi)
    return PureEnsemble(p / p.sum(), vecs)


@dataclass
class RoofResult:
    value: float
    ensemble: PureEnsemble
    restart_values: np.ndarray
    iterations: int
    converged: bool


def convex_roof_eof(rho, dims, K: int | None = None, restarts: int = 32, seed: int = 0,
                    max_iter: int = 3000, gtol: float = 1e-7, initial: PureEnsemble | None = None
                    ) -> RoofResult:
    """Upper bound on the entanglement of formation by ensemble optimization.

    Parameters
    ----------
    rho : array_like
        Bipartite state on ``A (x) B``.
    dims : tuple of int
        ``(dA, dB)``, each at most 4.
    K : int, optional
        Ensemble size, at least ``rank(rho)``; defaults to ``dA * dB`` and is
        capped at ``(dA * dB) ** 2``.
    restarts : int
        Random initial isometries, optimized together.
    seed : int
        Seed of the Philox stream for the initial points.
    initial : PureEnsemble, optional
        Extra starting ensemble (its size sets ``K`` if larger).

    Returns
    -------
    RoofResult
        Best value found, its ensemble, per-restart values and a
        convergence flag. The value is the average marginal entropy of an
        explicit decomposition of ``rho``, hence never below the true roof.
    """
    rho = check_density(rho)
    dA, dB = dims
    if dA > 4 or dB > 4:
        raise ValidationError("convex roof optimization is limited to 4x4")
    d = dA * dB
    if rho.shape != (d, d):
        raise ValidationError(f"state shape {rho.shape} does not match dims {dims}")
    W, lam = _factor(rho)
    r = W.shape[1]
    K = d if K is None else K
    if initial is not None:
        K = max(K, initial.weights.size)
    K = min(max(K, r), d * d)
    if K < r:
        raise ValidationError(f"ensemble size {K} below rank {r}")
    if r == 1:
        ens = PureEnsemble(np.ones(1), (W[:, 0] / np.linalg.norm(W[:, 0]))[None, :])
        v = ens.value(dims)
        return RoofResult(v, ens, np.array([v]), 0, True)
    rng = make_rng(seed)
    U = _random_isometry(rng, K, r, max(restarts, 1))
    if initial is not None:
        U0 = np.zeros((K, r), dtype=complex)
        U0[: initial.weights.size] = ensemble_to_isometry(initial, W, lam)
        U = np.concatenate([U0[None], U], axis=0)
    R = U.shape[0]
    step = np.full(R, 1.0)
    f, G = _objective_and_grad(U, W, dims)
    active = np.ones(R, dtype=bool)
    it = 0
    for it in range(1, max_iter + 1):
        xi = _project(U, G)
        gnorm2 = np.real(np.sum(np.abs(xi) ** 2, axis=(-2, -1)))
        active &= gnorm2 > gtol ** 2
        if not active.any():
            break
        # Armijo backtracking, vectorized over restarts
        accepted = ~active
        trial_U = U.copy()
        trial_f = f.copy()
        for _ in range(40):
            todo = ~accepted
            if not todo.any():
                break
            cand = _retract(U[todo] - step[todo, None, None] * xi[todo])
            fc, _ = _objective_and_grad(cand, W, dims, need_grad=False)
            ok = fc <= f[todo] - 1e-4 * step[todo] * gnorm2[todo]
            idx = np.flatnonzero(todo)
            trial_U[idx[ok]] = cand[ok]
            trial_f[idx[ok]] = fc[ok]
            accepted[idx[ok]] = True
            step[idx[~ok]] *= 0.5
        stalled = ~accepted
        active &= ~stalled
        grow = active & accepted
        step[grow] *= 1.5
        U, f = trial_U, trial_f
        _, G = _objective_and_grad(U, W, dims)
    converged = not active.any()
    best = int(np.argmin(f))
    ens = isometry_to_ensemble(U[best], W)
    value = ens.value(dims)
    if not converged:
        warnings.warn("convex roof optimization hit the iteration budget", RuntimeWarning)
    return RoofResult(value, ens, f.copy(), it, converged)
