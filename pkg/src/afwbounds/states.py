"""Seeded generation of state pairs that satisfy bound preconditions by construction.

Every generator takes a ``numpy.random.Generator``; ``make_rng(seed, stream)``
builds a counter-based Philox generator so sample ``i`` of a campaign can be
drawn independently of every other sample.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import unitary_group

from .entropy import entropy_of_probs, von_neumann_entropy
from .operators import (
    ValidationError,
    basis_projector,
    check_density,
    eigvals_desc,
    trace_distance,
    trace_norm,
)


class GenerationError(RuntimeError):
    """A constrained sample could not be produced within the attempt budget."""


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Philox generator keyed by ``(seed, stream)``."""
    seed, stream = int(seed), int(stream)
    if seed < 0 or stream < 0:
        raise ValidationError("seed and stream must be nonnegative")
    key = (seed % 2**64) | ((stream % 2**64) << 64)
    return np.random.Generator(np.random.Philox(key=key))


def _rng(rng_or_seed) -> np.random.Generator:
    if isinstance(rng_or_seed, np.random.Generator):
        return rng_or_seed
    return make_rng(int(rng_or_seed))


def haar_unitary(dim: int, rng) -> np.ndarray:
    return unitary_group.rvs(dim, random_state=_rng(rng)) if dim > 1 else np.ones((1, 1), complex)


def random_density(dim: int, rank: int | None = None, seed=0) -> np.ndarray:
    """Ginibre state ``G G^H / Tr`` with ``G`` a ``dim x rank`` complex Gaussian."""
    rng = _rng(seed)
    rank = dim if rank is None else int(rank)
    if not 1 <= rank <= dim:
        raise ValidationError(f"rank must lie in [1, {dim}], got {rank}")
    G = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = G @ G.conj().T
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real


def random_probs(dim: int, rng, support: int | None = None, concentration: float = 1.0) -> np.ndarray:
    """Dirichlet probability vector with ``support`` nonzero entries."""
    support = dim if support is None else support
    p = np.zeros(dim)
    idx = rng.permutation(dim)[:support]
    p[idx] = rng.dirichlet(np.full(support, concentration))
    return p


def diag_in(basis: np.ndarray, p) -> np.ndarray:
    rho = (basis * np.asarray(p, dtype=float)) @ basis.conj().T
    return (rho + rho.conj().T) / 2


def move_mass(p, eps: float, rng, max_tries: int = 200) -> np.ndarray:
    """Return ``q`` with ``TV(p, q) = eps`` by moving exactly ``eps`` mass.

    Donor entries (taken in random order until they hold at least ``eps``)
    lose mass in proportion to their size; the remaining entries receive it
    with Dirichlet weights. Donors and recipients are disjoint, so the total
    variation is exactly the moved mass.
    """
    p = np.asarray(p, dtype=float)
    for _ in range(max_tries):
        order = rng.permutation(p.size)
        csum = np.cumsum(p[order])
        n_donor = int(np.searchsorted(csum, eps - 1e-15)) + 1
        if n_donor >= p.size:
            continue
        donors, recips = order[:n_donor], order[n_donor:]
        mass = float(np.sum(p[donors]))
        if mass < eps:
            continue
        q = p.copy()
        q[donors] -= eps * p[donors] / mass
        q[recips] += eps * rng.dirichlet(np.ones(recips.size))
        return np.clip(q, 0.0, None)
    raise GenerationError(f"cannot move {eps} mass out of {p}")


def commuting_pair(dim: int, target_eps: float, seed=0, p=None, basis=None):
    """Commuting states at trace distance exactly ``target_eps``.

    Both states are diagonal in one Haar-random basis (or ``basis``). The
    eigenvalue vector ``q`` of ``sigma`` is obtained from ``p`` by moving
    ``target_eps`` of probability mass.
    """
    rng = _rng(seed)
    if not 0.0 < target_eps <= 1.0:
        raise ValidationError(f"target epsilon must lie in (0, 1], got {target_eps}")
    if p is None:
        for _ in range(100):
            support = int(rng.integers(1, dim + 1))
            if target_eps > 0.5:
                support = int(rng.integers(1, dim))
            p = random_probs(dim, rng, support, concentration=float(rng.choice([0.3, 1.0, 3.0])))
            try:
                q = move_mass(p, target_eps, rng, max_tries=20)
                break
            except GenerationError:
                continue
        else:
            raise GenerationError(f"no feasible mass move for eps={target_eps} in dim {dim}")
    else:
        p = np.asarray(p, dtype=float)
        q = move_mass(p, target_eps, rng)
    U = haar_unitary(dim, rng) if basis is None else np.asarray(basis, dtype=complex)
    return diag_in(U, p), diag_in(U, q)


def partial_sums_ok(p, q, m: int, tol: float = 1e-12) -> bool:
    """Largest-``r`` partial sums of ``q`` are at most those of ``p`` for ``r < m``."""
    ps = np.cumsum(np.sort(p)[::-1])
    qs = np.cumsum(np.sort(q)[::-1])
    r = min(m - 1, ps.size)
    return bool(np.all(qs[:r] <= ps[:r] + tol))


def robin_hood(p, eps: float) -> np.ndarray:
    """Flatten ``p`` by water-filling: lower the top to a level and raise the
    bottom to another, moving exactly ``eps``. The result is majorized by ``p``."""
    p = np.asarray(p, dtype=float)
    srt = np.sort(p)[::-1]
    if eps > 0.5 * np.sum(np.abs(srt - 1.0 / srt.size)) + 1e-15:
        raise GenerationError("target epsilon exceeds the distance to the uniform vector")

    def cut_top(level):
        return float(np.sum(np.maximum(p - level, 0.0)))

    def fill_bottom(level):
        return float(np.sum(np.maximum(level - p, 0.0)))

    from scipy.optimize import brentq

    top = brentq(lambda t: cut_top(t) - eps, 1.0 / p.size, p.max()) if eps > 0 else p.max()
    bot = brentq(lambda b: fill_bottom(b) - eps, p.min(), 1.0 / p.size) if eps > 0 else p.min()
    return np.clip(np.minimum(p, top), bot, None)


def _reversal_pair(dim: int, m: int, eps: float, rng, tries: int = 50):
    """Fully majorized pair at distance ``eps``: ``q = (1-t) p + t P p`` with
    ``P`` the order reversal of the support of ``p`` (a doubly stochastic
    mixture, hence ``q`` is majorized by ``p``)."""
    for j in range(tries):
        r = int(rng.integers(m + 1, dim + 1))
        # push the top entry toward 1 on retries so TV(p, Pp) can reach eps
        lo = min(max(eps, 1.0 / r) + (1 - max(eps, 1.0 / r)) * j / tries, 1.0 - 1e-6)
        top = float(rng.uniform(lo, 1.0 - 1e-6 * (1 - j / tries)))
        rest = (1.0 - top) * rng.dirichlet(np.ones(r - 1))
        sup = np.sort(np.concatenate([[top], rest]))[::-1]
        rev = sup[::-1]
        tv = 0.5 * float(np.sum(np.abs(sup - rev)))
        if tv < eps or np.sum(sup > 1e-12) <= m:
            continue
        t = eps / tv
        q_sup = (1.0 - t) * sup + t * rev
        idx = rng.permutation(dim)[:r]
        p, q = np.zeros(dim), np.zeros(dim)
        p[idx], q[idx] = sup, q_sup
        return p, q
    raise GenerationError(f"no majorized pair at distance {eps} in dim {dim}")


def partial_majorized_pair(dim: int, m: int, target_eps: float, seed=0, full: bool = False,
                           attempts: int = 1000):
    """Commuting pair whose spectra satisfy the ``m``-partial majorization
    condition (``sigma``'s top-``r`` sums below ``rho``'s for ``r < m``) at
    trace distance ``target_eps``, with ``rank(rho) > m``.

    Draws commuting pairs by rejection; after 20 misses (or when ``full``
    asks for complete majorization) the pair is built by mixing the
    spectrum with its reversal, which majorizes completely.
    """
    rng = _rng(seed)
    if m < 1:
        raise ValidationError("m must be positive")
    if not 0.0 < target_eps <= 1.0:
        raise ValidationError(f"target epsilon must lie in (0, 1], got {target_eps}")
    if dim <= m:
        raise ValidationError(f"need dim > m, got dim={dim}, m={m}")
    tries = 0 if full else min(20, attempts)
    for _ in range(tries):
        rho, sigma = commuting_pair(dim, target_eps, rng)
        lr, ls = eigvals_desc(rho), eigvals_desc(sigma)
        if partial_sums_ok(lr, ls, m) and np.sum(lr > 1e-12) > m:
            return rho, sigma
    p, q = _reversal_pair(dim, m, target_eps, rng, tries=max(attempts - tries, 1))
    U = haar_unitary(dim, rng)
    return diag_in(U, p), diag_in(U, q)


def _line_toward(rho, tau, eps):
    """Point on the segment from ``rho`` to ``tau`` at trace distance ``eps``
    (or ``tau`` itself when it is closer than ``eps``)."""
    dist = trace_distance(rho, tau)
    t = 1.0 if dist <= eps else eps / dist
    sigma = (1.0 - t) * rho + t * tau
    return (sigma + sigma.conj().T) / 2


def generic_pair(dim: int, target_eps: float, seed=0, rank: int | None = None):
    """Arbitrary (generally non-commuting) pair with distance at most ``target_eps``.

    ``sigma`` lies on the segment from ``rho`` toward either a random state or
    the projector onto ``rho``'s least likely eigenvector; the segment point
    at distance exactly ``target_eps`` is used whenever it exists.
    """
    rng = _rng(seed)
    if not 0.0 < target_eps <= 1.0:
        raise ValidationError(f"target epsilon must lie in (0, 1], got {target_eps}")
    r = int(rng.integers(1, dim + 1)) if rank is None else rank
    rho = random_density(dim, r, rng)
    if rng.random() < 0.5:
        w, V = np.linalg.eigh(rho)
        tau = np.outer(V[:, 0], V[:, 0].conj())
        # rotate slightly so the pair does not commute
        tau = 0.9 * tau + 0.1 * random_density(dim, 1, rng)
    else:
        tau = random_density(dim, int(rng.integers(1, dim + 1)), rng)
    return rho, _line_toward(rho, tau, target_eps)


@dataclass
class QCState:
    """Quantum-classical state ``sum_k p_k rho_k (x) |k><k|``."""

    weights: np.ndarray
    blocks: list = field(default_factory=list)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.ndim != 1 or self.weights.size != len(self.blocks):
            raise ValidationError("one weight per block required")
        if abs(self.weights.sum() - 1.0) > 1e-10 or np.any(self.weights < -1e-15):
            raise ValidationError("weights must form a probability vector")
        self.blocks = [check_density(b) for b in self.blocks]

    @property
    def dA(self) -> int:
        return self.blocks[0].shape[0]

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def scaled_blocks(self) -> list:
        return [p * b for p, b in zip(self.weights, self.blocks)]

    def matrix(self) -> np.ndarray:
        """Full matrix on ``A (x) B`` with ``B`` the classical register."""
        K = self.n_blocks
        out = np.zeros((self.dA * K, self.dA * K), dtype=complex)
        for k, blk in enumerate(self.scaled_blocks()):
            P = basis_projector(K, k)
            out += np.kron(blk, P)
        return out

    def marginal_A(self) -> np.ndarray:
        return sum(self.scaled_blocks())

    def conditional_entropy(self) -> float:
        """``sum_k p_k S(rho_k)``."""
        return float(sum(p * von_neumann_entropy(b) for p, b in zip(self.weights, self.blocks) if p > 0))

    def distance(self, other: "QCState") -> float:
        """Half the trace norm of the difference (blockwise)."""
        if other.n_blocks != self.n_blocks or other.dA != self.dA:
            raise ValidationError("q-c states live on different registers")
        return 0.5 * sum(trace_norm(a - b) for a, b in zip(self.scaled_blocks(), other.scaled_blocks()))

    def mix(self, other: "QCState", t: float) -> "QCState":
        scaled = [(1 - t) * a + t * b for a, b in zip(self.scaled_blocks(), other.scaled_blocks())]
        w = np.array([np.trace(s).real for s in scaled])
        blocks = [s / wk if wk > 0 else b for s, wk, b in zip(scaled, w, self.blocks)]
        w = np.clip(w, 0.0, None)
        return QCState(w / w.sum(), blocks)


def random_qc(dA: int, blocks: int, rng) -> QCState:
    w = rng.dirichlet(np.full(blocks, float(rng.choice([0.5, 1.0, 2.0]))))
    return QCState(w, [random_density(dA, int(rng.integers(1, dA + 1)), rng) for _ in range(blocks)])


def qc_pair(dA: int, blocks: int, target_eps: float, seed=0):
    """Two q-c states over the same classical register at distance ``target_eps``.

    ``sigma`` is the point on the segment from ``rho`` toward a random q-c
    state (or one concentrated on a single block) at the requested distance;
    if no drawn target is far enough the farthest one found is used, so the
    distance never exceeds ``target_eps``.
    """
    rng = _rng(seed)
    if not 0.0 < target_eps <= 1.0:
        raise ValidationError(f"target epsilon must lie in (0, 1], got {target_eps}")
    rho = random_qc(dA, blocks, rng)
    best, best_d = None, -1.0
    for attempt in range(20):
        if attempt % 2:
            k = int(np.argmin(rho.weights))
            w = np.zeros(blocks)
            w[k] = 1.0
            tgt = QCState(w, [random_density(dA, 1, rng) for _ in range(blocks)])
        else:
            tgt = random_qc(dA, blocks, rng)
        d = rho.distance(tgt)
        if d > best_d:
            best, best_d = tgt, d
        if d >= target_eps:
            break
    t = 1.0 if best_d <= target_eps else target_eps / best_d
    return rho, rho.mix(best, t)


def energy_constrained(spec, E: float, dim: int, seed=0, exact: bool = False, rank=None):
    """Random state with ``Tr H rho <= E`` in the Hamiltonian eigenbasis.

    A random state whose energy exceeds ``E`` is mixed with the ground level
    just enough to meet the constraint; with ``exact`` a state below ``E``
    is mixed with the highest kept level to reach ``E`` exactly.
    """
    rng = _rng(seed)
    lv = spec.levels(dim)
    if E < lv[0]:
        raise ValidationError(f"energy {E} is below the lowest level {lv[0]}")
    rho = random_density(dim, rank if rank is not None else int(rng.integers(1, dim + 1)), rng)
    e = float(np.dot(lv, np.diag(rho).real))
    if e > E:
        t = (e - E) / (e - lv[0])
        rho = (1 - t) * rho + t * basis_projector(dim, 0)
    elif exact and e < E:
        if lv[-1] < E:
            raise ValidationError(f"energy {E} is not reachable within {dim} levels")
        t = (E - e) / (lv[-1] - e)
        rho = (1 - t) * rho + t * basis_projector(dim, dim - 1)
    return (rho + rho.conj().T) / 2


def extremal_energy_pair(spec, k: int, eps: float, dim: int | None = None):
    """``|tau_k><tau_k|`` and ``eps |tau_1><tau_1| + (1-eps) |tau_k><tau_k|``.

    ``k`` is 1-based. The energy gap is exactly ``h_k * eps``.
    """
    if k < 1:
        raise ValidationError("k is 1-based")
    if not 0.0 < eps <= 1.0:
        raise ValidationError(f"eps must lie in (0, 1], got {eps}")
    dim = max(k, 2) if dim is None else dim
    rho = basis_projector(dim, k - 1)
    sigma = eps * basis_projector(dim, 0) + (1 - eps) * rho
    return rho, sigma


def schur_check(p, q) -> bool:
    """For ``q`` majorized by ``p`` the Shannon entropy can only grow."""
    return entropy_of_probs(p) <= entropy_of_probs(q) + 1e-12
