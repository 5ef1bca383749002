"""Hamiltonian spectra and Gibbs-state thermodynamics.

A Hamiltonian is always represented in its own eigenbasis by the
nondecreasing sequence of its eigenvalues. ``F_of_E(spec, E)`` is the
maximal entropy of states with mean energy at most ``E``, attained by the
Gibbs state ``exp(-beta H) / Z`` whose mean energy is ``E``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .operators import ValidationError

DEFAULT_LEVELS = 256
MAX_LEVELS = 4096
TAIL_TOL = 1e-12
STATE_TAIL_TOL = 1e-10


class RangeError(ValidationError):
    """Requested energy is outside the attainable range of the spectrum."""


class TruncationError(RuntimeError):
    """Partition sum did not converge within the level cap."""


@dataclass(frozen=True)
class HamiltonianSpectrum:
    """Nondecreasing Hamiltonian spectrum.

    The base sequence is ``scale * (k - 1)`` for ``family="linear"`` (an
    oscillator when ``scale == 1``) or the finite tuple ``values`` for
    ``family="explicit"``. Each base level is raised to ``exponent``; then the
    first ``skip`` levels are dropped and, if ``zero_head`` is set, a single
    zero level is prepended. These transformations express ``H**a``, the
    tail Hamiltonian with the lowest ``m`` levels removed, and the same tail
    with the ground level put back.
    """

    family: str = "linear"
    scale: float = 1.0
    values: tuple = ()
    exponent: float = 1.0
    skip: int = 0
    zero_head: bool = False

    def __post_init__(self):
        if self.family not in ("linear", "explicit"):
            raise ValidationError(f"unknown spectrum family {self.family!r}")
        if self.family == "linear" and not self.scale > 0:
            raise ValidationError(f"linear spectrum needs a positive scale, got {self.scale}")
        if self.family == "explicit":
            v = np.asarray(self.values, dtype=float)
            if v.size == 0:
                raise ValidationError("explicit spectrum needs at least one level")
            if np.any(np.diff(v) < 0):
                raise ValidationError("explicit spectrum must be sorted nondecreasing")
            if v[0] < 0:
                raise ValidationError("spectrum must be nonnegative")
        if self.exponent <= 0:
            raise ValidationError(f"exponent must be positive, got {self.exponent}")
        if self.skip < 0:
            raise ValidationError("skip must be nonnegative")
        if self.size is not None and self.size < 1:
            raise ValidationError("spectrum has no levels left after truncation")

    @classmethod
    def oscillator(cls) -> "HamiltonianSpectrum":
        return cls("linear", 1.0)

    @classmethod
    def explicit(cls, values) -> "HamiltonianSpectrum":
        return cls("explicit", values=tuple(float(v) for v in values))

    @property
    def size(self) -> int | None:
        """Number of levels, ``None`` for an infinite sequence."""
        if self.family == "linear":
            return None
        return len(self.values) - self.skip + int(self.zero_head)

    @property
    def closed_form(self) -> bool:
        return self.family == "linear" and self.exponent == 1.0

    @property
    def grounded(self) -> bool:
        return self.lowest == 0.0

    @property
    def lowest(self) -> float:
        return float(self.levels(1)[0])

    def power(self, a: float) -> "HamiltonianSpectrum":
        """Spectrum of ``H**a``."""
        if self.skip or self.zero_head:
            raise ValidationError("take powers before truncating")
        return replace(self, exponent=self.exponent * a)

    def levels(self, n: int) -> np.ndarray:
        """First ``n`` levels (fewer if the spectrum is finite)."""
        head = [0.0] if self.zero_head else []
        n_base = max(n - len(head), 0)
        if self.family == "linear":
            j = np.arange(self.skip, self.skip + n_base, dtype=float)
            base = (self.scale * j) ** self.exponent
        else:
            base = np.asarray(self.values, dtype=float)[self.skip:self.skip + n_base] ** self.exponent
        return np.concatenate([np.asarray(head, dtype=float), base])

    def multiplicity(self, tol: float = 1e-12) -> int:
        lv = self.levels(64)
        return int(np.sum(lv <= lv[0] + tol))

    def to_dict(self) -> dict:
        if self.family == "linear":
            fam = "oscillator" if self.scale == 1.0 else "linear"
            d = {"family": fam, "scale": self.scale}
        else:
            d = {"family": "explicit", "values": list(self.values)}
        if self.exponent != 1.0:
            d["exponent"] = self.exponent
        return d


def spectrum_from_dict(d: dict) -> HamiltonianSpectrum:
    """Build a spectrum from ``{"family": ..., params}``."""
    fam = d.get("family")
    if fam == "oscillator":
        spec = HamiltonianSpectrum.oscillator()
    elif fam == "linear":
        spec = HamiltonianSpectrum("linear", float(d.get("scale", d.get("c", 1.0))))
    elif fam == "explicit":
        spec = HamiltonianSpectrum.explicit(d["values"])
    else:
        raise ValidationError(f"unknown spectrum family {fam!r}")
    if "exponent" in d:
        spec = spec.power(float(d["exponent"]))
    return spec


@dataclass(frozen=True)
class GibbsSolution:
    E: float
    beta: float
    Z: float
    F: float
    tail_mass: float
    log_Z: float = 0.0
    levels_used: int = 0


def _closed_form_moments(spec: HamiltonianSpectrum, beta: float):
    """``(ln Z, mean)`` for a linear spectrum via geometric series."""
    s, m = spec.scale, spec.skip
    x = beta * s
    # excited part: sum_{j >= m} exp(-x j)
    log_zex = -x * m - math.log(-math.expm1(-x))
    mean_ex = s * (m + 1.0 / math.expm1(x)) if x < 700 else s * m
    if not spec.zero_head:
        return log_zex, mean_ex
    log_z = float(np.logaddexp(0.0, log_zex))
    return float(log_z), mean_ex * math.exp(log_zex - log_z)


def _numeric_moments(spec: HamiltonianSpectrum, beta: float, n: int):
    lv = spec.levels(n)
    w = np.exp(-beta * (lv - lv[0]))
    z = float(np.sum(w))
    return -beta * lv[0] + math.log(z), float(np.dot(w, lv) / z), lv, w / z


def gibbs_moments(spec: HamiltonianSpectrum, beta: float):
    """Return ``(ln Z, mean energy, tail_mass, levels_used)`` at ``beta``.

    Infinite non-linear spectra are summed over ``L`` levels, doubling ``L``
    from 256 up to 4096 until the mass in the last half falls below 1e-12.
    """
    if beta <= 0:
        raise ValidationError(f"beta must be positive, got {beta}")
    if spec.closed_form:
        lz, mean = _closed_form_moments(spec, beta)
        return lz, mean, 0.0, 0
    if spec.size is not None:
        lz, mean, _, _ = _numeric_moments(spec, beta, spec.size)
        return lz, mean, 0.0, spec.size
    n = DEFAULT_LEVELS
    while True:
        lz, mean, lv, p = _numeric_moments(spec, beta, n)
        tail = float(np.sum(p[n // 2:]))
        if tail <= TAIL_TOL:
            return lz, mean, tail, n
        if n >= MAX_LEVELS:
            raise TruncationError(
                f"partition sum at beta={beta:.3e} keeps tail mass {tail:.2e} at "
                f"{n} levels; use a larger truncation"
            )
        n *= 2


def uniform_mean(spec: HamiltonianSpectrum) -> float:
    """Mean energy of the maximally mixed state (``inf`` for infinite spectra)."""
    if spec.size is None:
        return math.inf
    return float(np.mean(spec.levels(spec.size)))


def _mean(spec, beta):
    return gibbs_moments(spec, beta)[1]


@lru_cache(maxsize=65536)
def solve_beta(spec: HamiltonianSpectrum, E: float) -> GibbsSolution:
    """Inverse temperature at which the Gibbs state has mean energy ``E``.

    Parameters
    ----------
    spec : HamiltonianSpectrum
    E : float
        Target mean energy, strictly between the lowest level and the
        largest attainable mean.

    Returns
    -------
    GibbsSolution
        ``beta``, ``Z``, ``F = beta*E + ln Z`` and the tail mass ignored by the
        truncation.

    Raises
    ------
    RangeError
        ``E`` is at or below the lowest level, or at or above the
        maximally mixed mean of a finite spectrum.
    TruncationError
        The partition sum does not converge within the level cap.
    """
    E = float(E)
    lo_level = spec.lowest
    if not E > lo_level:
        raise RangeError(f"energy {E} must exceed the lowest level {lo_level}")
    if not E < uniform_mean(spec):
        raise RangeError(f"energy {E} is not below the maximally mixed mean {uniform_mean(spec)}")
    # mean energy is strictly decreasing in beta
    lo, hi = 1.0, 1.0
    if _mean(spec, 1.0) > E:
        while _mean(spec, hi) > E:
            lo, hi = hi, hi * 2.0
            if hi > 1e300:
                raise RangeError(f"energy {E} too close to the lowest level")
    else:
        while _mean(spec, lo) <= E:
            hi, lo = lo, lo / 2.0
            if lo < 1e-300:
                raise RangeError(f"energy {E} too large for this spectrum")
    tol = 1e-10 * max(1.0, E)
    beta = brentq(lambda b: _mean(spec, b) - E, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                  maxiter=200)
    lz, mean, tail, n = gibbs_moments(spec, beta)
    if abs(mean - E) > tol:
        raise RuntimeError(f"beta solve missed the target: mean {mean!r} vs E {E!r}")
    F = beta * E + lz
    Z = math.exp(lz) if lz < 700 else math.inf
    return GibbsSolution(E, float(beta), Z, float(F), float(tail), float(lz), n)


def _ground_entropy(spec: HamiltonianSpectrum) -> float:
    return math.log(spec.multiplicity())


def F_of_E(spec: HamiltonianSpectrum, E: float) -> float:
    """Maximal entropy at mean energy at most ``E``.

    Equals ``ln`` of the ground multiplicity at the lowest level and
    ``ln L`` once a finite spectrum of length ``L`` is saturated.
    Energies below the lowest level by less than 1e-12 (relative) are
    snapped to it.
    """
    E = float(E)
    lo = spec.lowest
    if E <= lo + 1e-12 * max(1.0, abs(lo)):
        if E < lo - 1e-12 * max(1.0, abs(lo)):
            raise RangeError(f"energy {E} is below the lowest level {lo}")
        return _ground_entropy(spec)
    if spec.size is not None and E >= uniform_mean(spec):
        return math.log(spec.size)
    if spec.closed_form and not spec.zero_head:
        # shifted geometric distribution: the entropy is g(mean excitation)
        x = (E - spec.scale * spec.skip) / spec.scale
        return x * math.log1p(1.0 / x) + math.log1p(x)
    return solve_beta(spec, E).F


def partition_function(spec: HamiltonianSpectrum, E: float) -> float:
    """``Z`` of the Gibbs state at mean energy ``E``; 1 (times multiplicity) at the ground level."""
    lo = spec.lowest
    if E <= lo + 1e-12 * max(1.0, abs(lo)):
        # beta -> inf: only the ground levels survive (weights relative to h_1 = 0)
        return float(spec.multiplicity()) if lo == 0 else 0.0
    if spec.size is not None and E >= uniform_mean(spec):
        return float(spec.size)
    return solve_beta(spec, E).Z


def truncate_hamiltonian(spec: HamiltonianSpectrum, m: int):
    """Remove the ``m`` lowest levels.

    Returns
    -------
    H_m : HamiltonianSpectrum
        Levels ``h_{m+1}, h_{m+2}, ...``.
    H0_m : HamiltonianSpectrum
        ``0, h_{m+1}, h_{m+2}, ...``.
    a_fn : callable
        ``E -> 1 - 1/Z_{H0_m}(E)``, the excited mass of the ``H0_m`` Gibbs
        state at mean energy ``E``.
    """
    if m < 1:
        raise ValidationError(f"m must be a positive integer, got {m}")
    if spec.skip or spec.zero_head:
        raise ValidationError("spectrum is already truncated")
    L = spec.size if spec.size is not None else MAX_LEVELS
    if m >= L:
        raise ValidationError(f"m={m} must be smaller than the number of levels {L}")
    H_m = replace(spec, skip=m)
    H0_m = replace(spec, skip=m, zero_head=True)

    def a_fn(E: float) -> float:
        return 1.0 - 1.0 / partition_function(H0_m, E)

    return H_m, H0_m, a_fn


def gibbs_state(spec: HamiltonianSpectrum, E: float, dim: int) -> np.ndarray:
    """Gibbs state at mean energy ``E`` restricted to the lowest ``dim`` levels.

    Raises ``TruncationError`` when more than 1e-10 of the mass lies beyond
    ``dim``; otherwise the kept weights are renormalized.
    """
    lv = spec.levels(dim)
    if lv.size < dim:
        raise ValidationError(f"spectrum has only {lv.size} levels, asked for {dim}")
    lo = lv[0]
    if E <= lo + 1e-12 * max(1.0, abs(lo)):
        p = (lv <= lo + 1e-12).astype(float)
        p /= p.sum()
        return np.diag(p).astype(complex)
    if spec.size is not None and E >= uniform_mean(spec):
        return np.eye(dim, dtype=complex) / dim
    sol = solve_beta(spec, E)
    p = np.exp(-sol.beta * lv - sol.log_Z)
    missing = 1.0 - float(np.sum(p))
    if missing > STATE_TAIL_TOL:
        raise TruncationError(
            f"Gibbs state at E={E} keeps mass {missing:.2e} beyond {dim} levels"
        )
    return np.diag(p / p.sum()).astype(complex)


def F_composite(specs, E_total: float) -> float:
    """Maximal total entropy of independent parts with total energy ``E_total``.

    Maximizes ``sum_k F_k(E_k)`` subject to ``sum_k E_k = E_total``. At the
    optimum all parts share one inverse temperature, so a single root solve
    for the common ``beta`` replaces an iterative split search. Identical
    parts reduce to ``m * F(E_total / m)``.
    """
    specs = list(specs)
    if not specs:
        raise ValidationError("F_composite needs at least one spectrum")
    if not all(s.grounded for s in specs):
        raise ValidationError("every part must be grounded")
    if len(set(specs)) == 1:
        return len(specs) * F_of_E(specs[0], E_total / len(specs))
    if E_total <= 0:
        return float(sum(_ground_entropy(s) for s in specs))

    def total_mean(b):
        return sum(_mean(s, b) for s in specs)

    cap = sum(uniform_mean(s) for s in specs)
    if E_total >= cap:
        return float(sum(math.log(s.size) for s in specs))
    lo, hi = 1.0, 1.0
    if total_mean(1.0) > E_total:
        while total_mean(hi) > E_total:
            lo, hi = hi, hi * 2.0
    else:
        while total_mean(lo) <= E_total:
            hi, lo = lo, lo / 2.0
    beta = brentq(lambda b: total_mean(b) - E_total, lo, hi, xtol=1e-300,
                  rtol=4 * np.finfo(float).eps)
    return float(beta * E_total + sum(gibbs_moments(s, beta)[0] for s in specs))


def composite_split(specs, E_total: float) -> list[float]:
    """Energies ``E_k`` of the optimal split used by ``F_composite``."""
    specs = list(specs)
    if len(set(specs)) == 1:
        return [E_total / len(specs)] * len(specs)

    def total_mean(b):
        return sum(_mean(s, b) for s in specs)

    beta = brentq(lambda b: total_mean(b) - E_total, 1e-8, 1e3)
    return [_mean(s, beta) for s in specs]


def tail_mass(spec: HamiltonianSpectrum, beta: float, n: int) -> float:
    """Gibbs mass at ``beta`` outside the lowest ``n`` levels."""
    lz, _, _, _ = gibbs_moments(spec, beta)
    lv = spec.levels(n)
    return float(max(1.0 - np.sum(np.exp(-beta * lv - lz)), 0.0))
