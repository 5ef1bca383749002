"""Dense Hermitian and density-matrix algebra.

States are plain complex ``numpy`` arrays. The ``check_*`` helpers validate
them against the tolerances below and return a cleaned copy; everything else
is a pure function of its arguments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITICITY_TOL = 1e-12
NEGATIVITY_TOL = 1e-10
TRACE_TOL = 1e-12
COMMUTATOR_TOL = 1e-10
DEGENERATE_SPLIT_TOL = 1e-14


class ValidationError(ValueError):
    """Input violates a documented precondition."""


class DegenerateSplitError(ValidationError):
    """Jordan split requested for (numerically) identical states."""


def _as_square(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {A.shape}")
    return A


def check_hermitian(A, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Return ``A`` symmetrized, raising if it is not Hermitian within ``tol``."""
    A = _as_square(A)
    dev = np.max(np.abs(A - A.conj().T)) if A.size else 0.0
    if dev > tol:
        raise ValidationError(
            f"matrix is not Hermitian: max |A - A^H| entry is {dev:.3e} (tol {tol:.0e})"
        )
    return (A + A.conj().T) / 2


def check_positive(A, max_trace: float | None = None) -> np.ndarray:
    """Validate a positive semidefinite operator.

    Eigenvalues in ``[-1e-10, 0)`` are clipped to zero; anything more
    negative is an error. ``max_trace`` additionally caps the trace (used for
    subnormalized operators).
    """
    A = check_hermitian(A)
    w, V = np.linalg.eigh(A)
    if w.size and w[0] < -NEGATIVITY_TOL:
        raise ValidationError(f"operator is not positive: min eigenvalue {w[0]:.3e}")
    if w.size and w[0] < 0:
        w = np.clip(w, 0.0, None)
        A = (V * w) @ V.conj().T
        A = (A + A.conj().T) / 2
    if max_trace is not None and np.trace(A).real > max_trace + TRACE_TOL:
        raise ValidationError(f"trace {np.trace(A).real:.6g} exceeds {max_trace}")
    return A


def check_density(rho) -> np.ndarray:
    """Validate a density matrix; tiny negative eigenvalues are clipped and
    the result renormalized."""
    raw_tr = np.trace(_as_square(rho)).real
    if abs(raw_tr - 1.0) > TRACE_TOL:
        raise ValidationError(f"density matrix must have unit trace, got {raw_tr:.15g}")
    rho = check_positive(rho)
    # clipping can move the trace by O(d * 1e-10)
    return rho / np.trace(rho).real


def spectral_decompose(A) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    Returns
    -------
    eigenvalues : ndarray
        Real eigenvalues in nonincreasing order.
    eigenvectors : ndarray
        Unitary matrix whose columns are the matching eigenvectors. Each
        column has its first non-negligible entry made real and positive, and
        columns within a degenerate eigenvalue cluster are ordered
        lexicographically so repeated calls are reproducible.
    """
    A = check_hermitian(A)
    w, V = np.linalg.eigh(A)
    w, V = w[::-1], V[:, ::-1]
    for j in range(V.shape[1]):
        col = V[:, j]
        k = int(np.argmax(np.abs(col) > 1e-8))
        V[:, j] = col * (abs(col[k]) / col[k])
    order = sorted(
        range(len(w)),
        key=lambda j: (-round(w[j] / 1e-12), tuple(np.round(V[:, j].real, 10)),
                       tuple(np.round(V[:, j].imag, 10))),
    )
    return w[order].copy(), V[:, order].copy()


def eigvals_desc(A) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, nonincreasing."""
    return np.linalg.eigvalsh(check_hermitian(A))[::-1]


def apply_spectral(A, fn) -> np.ndarray:
    """Apply a real function to the spectrum of a Hermitian matrix."""
    w, V = np.linalg.eigh(check_hermitian(A))
    return (V * fn(w)) @ V.conj().T


def trace_norm(A) -> float:
    return float(np.sum(np.abs(np.linalg.eigvalsh(check_hermitian(A, tol=1e-9)))))


def _same_dims(rho, sigma):
    rho, sigma = np.asarray(rho), np.asarray(sigma)
    if rho.shape != sigma.shape:
        raise ValidationError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")


def trace_distance(rho, sigma) -> float:
    """Half the trace norm of ``rho - sigma``."""
    _same_dims(rho, sigma)
    return min(1.0, 0.5 * trace_norm(np.asarray(rho) - np.asarray(sigma)))


def psd_sqrt(A) -> np.ndarray:
    return apply_spectral(A, lambda w: np.sqrt(np.clip(w, 0.0, None)))


def fidelity(rho, sigma) -> float:
    """Squared fidelity ``||sqrt(rho) sqrt(sigma)||_1 ** 2``, clipped to [0, 1]."""
    _same_dims(rho, sigma)
    s = np.linalg.svd(psd_sqrt(rho) @ psd_sqrt(sigma), compute_uv=False)
    return float(min(1.0, max(0.0, np.sum(s) ** 2)))


def _check_eps(eps: float):
    if eps < 0:
        raise ValidationError(f"epsilon must be nonnegative, got {eps}")


def clip_below(rho, eps: float) -> np.ndarray:
    """Positive part of ``rho - eps*I``: eigenvalues ``max(l - eps, 0)``."""
    _check_eps(eps)
    return apply_spectral(rho, lambda w: np.maximum(w - eps, 0.0))


def cap_at(rho, eps: float) -> np.ndarray:
    """``rho`` with its eigenvalues capped at ``eps``: ``min(l, eps)``."""
    _check_eps(eps)
    return apply_spectral(rho, lambda w: np.clip(np.minimum(w, eps), 0.0, None))


def positive_part(A) -> np.ndarray:
    return apply_spectral(A, lambda w: np.maximum(w, 0.0))


def negative_part(A) -> np.ndarray:
    """``[A]_-`` with the sign convention ``A = [A]_+ - [A]_-``."""
    return apply_spectral(A, lambda w: np.maximum(-w, 0.0))


def pinch(rho, basis=None) -> np.ndarray:
    """Dephase ``rho`` in ``basis`` (columns), default the computational basis."""
    rho = np.asarray(rho, dtype=complex)
    if basis is None:
        return np.diag(np.diag(rho))
    basis = np.asarray(basis, dtype=complex)
    p = np.real(np.einsum("ik,ij,jk->k", basis.conj(), rho, basis))
    return (basis * p) @ basis.conj().T


def commutator_norm(A, B) -> float:
    A, B = np.asarray(A), np.asarray(B)
    return float(np.linalg.norm(A @ B - B @ A))


def commute(A, B, tol: float = COMMUTATOR_TOL) -> bool:
    return commutator_norm(A, B) <= tol


def rank(A, tol: float = 1e-12) -> int:
    return int(np.sum(np.linalg.eigvalsh(check_hermitian(A, tol=1e-9)) > tol))


def support_dimension(rho, sigma, tol: float = 1e-12) -> int:
    """Dimension of the smallest subspace containing both supports."""
    return rank(np.asarray(rho) + np.asarray(sigma), tol)


def shared_eigenbasis(rho, sigma, tol: float = COMMUTATOR_TOL, attempts: int = 8):
    """Simultaneously diagonalize two commuting Hermitian matrices.

    Diagonalizes ``rho + c*sigma`` for a few fixed irrational-ish ``c`` and
    keeps the first basis in which both matrices are diagonal within ``tol``.
    """
    rho, sigma = check_hermitian(rho), check_hermitian(sigma)
    if not commute(rho, sigma, tol):
        raise ValidationError("states do not commute; no shared eigenbasis")
    for j in range(attempts):
        c = 0.6180339887 * (j + 1) + 0.1234567 * j * j
        _, V = np.linalg.eigh(rho + c * sigma)
        off_r = V.conj().T @ rho @ V
        off_s = V.conj().T @ sigma @ V
        if (np.max(np.abs(off_r - np.diag(np.diag(off_r)))) <= tol
                and np.max(np.abs(off_s - np.diag(np.diag(off_s)))) <= tol):
            return V
    raise ValidationError("joint diagonalization did not converge")


def partial_trace(rho, dims, keep: str = "A") -> np.ndarray:
    """Reduced state of a bipartite operator on ``A (x) B``.

    ``keep`` is ``"A"`` or ``"B"``. Works for any (sub)normalized operator.
    """
    dA, dB = dims
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (dA * dB, dA * dB):
        raise ValidationError(f"operator of shape {rho.shape} does not factor as {dA}x{dB}")
    t = rho.reshape(dA, dB, dA, dB)
    if keep == "A":
        return np.einsum("ijkj->ik", t)
    if keep == "B":
        return np.einsum("ijil->jl", t)
    raise ValidationError(f"keep must be 'A' or 'B', got {keep!r}")


def ket_to_dm(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    return np.outer(psi, psi.conj())


def basis_projector(dim: int, k: int) -> np.ndarray:
    P = np.zeros((dim, dim), dtype=complex)
    P[k, k] = 1.0
    return P


@dataclass(frozen=True)
class JordanSplit:
    """Common-part decomposition of a pair of states.

    ``rho = eps*tau_plus + (1-eps)*omega_star`` and
    ``sigma = eps*tau_minus + (1-eps)*omega_star``. ``omega_star`` is
    ``None`` when ``eps == 1`` (it carries no weight). For non-commuting
    input ``omega_star`` need not be positive; ``commuting`` records which
    case produced the split.
    """

    epsilon: float
    tau_plus: np.ndarray
    tau_minus: np.ndarray
    omega_star: np.ndarray | None
    commuting: bool = True


def jordan_split(rho, sigma, allow_noncommuting: bool = False) -> JordanSplit:
    """Split ``rho - sigma`` into orthogonal positive and negative parts.

    Commuting input is required unless ``allow_noncommuting`` is set; in the
    latter case the Hermitian Jordan decomposition of ``rho - sigma`` is
    still returned but ``omega_star`` may fail to be positive.
    """
    rho, sigma = check_density(rho), check_density(sigma)
    _same_dims(rho, sigma)
    comm = commute(rho, sigma)
    if not comm and not allow_noncommuting:
        raise ValidationError(
            f"states do not commute (||[rho, sigma]||_F = {commutator_norm(rho, sigma):.2e})"
        )
    diff = rho - sigma
    plus, minus = positive_part(diff), negative_part(diff)
    eps = float(np.trace(plus).real)
    if eps < DEGENERATE_SPLIT_TOL:
        raise DegenerateSplitError("rho and sigma coincide; the split is undefined")
    eps = min(eps, 1.0)
    omega = None
    if eps < 1.0 - 1e-14:
        omega = (rho - plus) / (1.0 - eps)
        omega = (omega + omega.conj().T) / 2
    return JordanSplit(eps, plus / eps, minus / eps, omega, comm)
