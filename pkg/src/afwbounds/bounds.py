"""Bound evaluators.

Each evaluator returns a ``BoundEvaluation`` holding the bound value next to
the gap it is supposed to control; deciding PASS/FAIL is left to the caller.
Upper bounds have ``slack = bound - gap``. Lower bounds (``sense="lower"``)
store the measured functional in ``measured_gap`` and use
``slack = measured - bound``, so a nonnegative slack always means the
inequality holds.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from .entropy import (
    binary_entropy,
    conditional_entropy,
    energy_moment,
    eta,
    eta_up,
    extended_entropy_of_probs,
    h_up,
    nondecreasing_envelope,
    rank_envelope,
    relative_entropy,
    von_neumann_entropy,
)
from .gibbs import F_of_E, HamiltonianSpectrum, gibbs_moments, partition_function, truncate_hamiltonian
from .operators import (
    ValidationError,
    check_density,
    clip_below,
    commute,
    eigvals_desc,
    partial_trace,
    pinch,
    rank,
    trace_distance,
)

RANK_TOL = 1e-12
EXACT_EPS_TOL = 1e-10


class PreconditionError(ValidationError):
    """Inputs do not satisfy the hypothesis of the requested bound."""


@dataclass(frozen=True)
class ClassParams:
    """Constants of a locally almost affine function class.

    ``C`` multiplies the rank/energy term, ``D`` the binary-entropy term;
    the function lives on ``n`` subsystems and the constraint acts on the
    first ``m`` of them.
    """

    C: float
    D: float
    m: int = 1
    n: int = 1

    def __post_init__(self):
        if self.C < 0 or self.D < 0:
            raise ValidationError("C and D must be nonnegative")
        if not 1 <= self.m <= self.n:
            raise ValidationError(f"need 1 <= m <= n, got m={self.m}, n={self.n}")


@dataclass(frozen=True)
class BoundEvaluation:
    bound_id: str
    epsilon: float
    bound_value: float
    measured_gap: float
    slack: float
    inputs_digest: str
    sense: str = "upper"
    variants: dict = field(default_factory=dict)
    vacuous: bool = False

    def passed(self, rtol: float = 1e-9) -> bool:
        if self.vacuous:
            return True
        return self.slack >= -rtol * max(1.0, abs(self.bound_value))

    @property
    def tightness(self) -> float:
        """``gap / bound`` for upper bounds (0 when the bound is 0)."""
        if self.sense != "upper" or self.bound_value == 0 or not math.isfinite(self.measured_gap):
            return 0.0
        return self.measured_gap / self.bound_value


def digest_inputs(*items) -> str:
    """Short SHA-256 fingerprint of arrays and scalars (rounded to 12 digits)."""
    hsh = hashlib.sha256()
    for it in items:
        if isinstance(it, np.ndarray) or isinstance(it, (list, tuple)):
            arr = np.asarray(it)
            if np.iscomplexobj(arr):
                arr = np.concatenate([arr.real.ravel(), arr.imag.ravel()])
            hsh.update(np.round(arr.astype(float).ravel(), 12).tobytes())
        else:
            hsh.update(repr(it).encode())
    return hsh.hexdigest()[:16]


def _evaluation(bound_id, eps, bound, gap, digest, sense="upper", variants=None, vacuous=False):
    bound, gap = float(bound), float(gap)
    if sense == "upper":
        slack = bound - gap
    elif sense == "lower":
        slack = gap - bound
    elif sense == "equal":
        slack = -abs(bound - gap)
    else:
        raise ValueError(sense)
    if math.isnan(slack):
        slack = math.inf if vacuous else -math.inf
    return BoundEvaluation(bound_id, float(eps), bound, gap, float(slack), digest, sense,
                           dict(variants or {}), vacuous)


def _check_eps(eps: float, open_left: bool = False):
    if not (0.0 <= eps <= 1.0) or (open_left and eps == 0.0):
        raise ValidationError(f"epsilon must lie in {'(0' if open_left else '[0'}, 1], got {eps}")


def _h_variant(eps: float, envelope: str) -> float:
    if envelope == "exact":
        return binary_entropy(eps)
    if envelope == "h_up":
        return h_up(eps)
    raise ValidationError(f"unknown envelope mode {envelope!r}")


# -- generic class bounds ---------------------------------------------------


def generic_rank_bound(p: ClassParams, d_m: float, eps: float, envelope: str = "h_up") -> float:
    """``C eps ln d_m + D h(eps)`` with the binary-entropy term chosen by ``envelope``.

    ``envelope`` is ``"exact"`` (plain ``h``, valid at distance exactly
    ``eps``), ``"envelope"`` (smallest nondecreasing majorant of the whole
    expression) or ``"h_up"``. For a single system with ``m = n = 1`` the
    caller may pass ``d_* - 1`` with ``d_*`` the dimension of the joint
    support.
    """
    _check_eps(eps)
    if d_m < 1:
        raise ValidationError(f"d_m must be >= 1, got {d_m}")
    ln_d = math.log(d_m)
    if envelope == "envelope":
        if p.D == 0:
            return p.C * eps * ln_d
        # C t ln d + D h(t) = D (t (C/D) ln d + h(t))
        return p.D * rank_envelope(eps, ln_d, coeff=p.C / p.D)
    return p.C * eps * ln_d + p.D * _h_variant(eps, envelope)


def generic_energy_bound(p: ClassParams, F_Hm, E: float, eps: float, envelope: str = "h_up") -> float:
    """``C eps F_{H_m}(m E / eps) + D h(eps)``.

    ``F_Hm`` is the entropy-energy function of the constrained subsystems.
    In one-sided use ``E`` may be the refined energy ``E(rho) - E_eps(rho)``.
    """
    _check_eps(eps)
    if E < 0:
        raise ValidationError(f"energy must be nonnegative, got {E}")
    if eps == 0:
        return 0.0

    def expr(t, hfun):
        if t <= 0:
            return 0.0
        return p.C * t * F_Hm(p.m * E / t) + p.D * hfun(t)

    if envelope == "envelope":
        return nondecreasing_envelope(lambda t: expr(t, binary_entropy), eps)
    return expr(eps, lambda t: _h_variant(t, envelope))


# -- von Neumann entropy ------------------------------------------------------


def majorization_holds(lam_rho, lam_sigma, m: int, tol: float = 1e-12) -> bool:
    ps, qs = np.cumsum(np.sort(lam_rho)[::-1]), np.cumsum(np.sort(lam_sigma)[::-1])
    r = min(m - 1, ps.size)
    return bool(np.all(qs[:r] <= ps[:r] + tol))


def entropy_scb_rank_value(d: int, m: int, eps: float) -> float:
    """Piecewise rank semicontinuity bound for the entropy."""
    _check_eps(eps)
    if not 0 <= m < d:
        raise PreconditionError(f"need m < rank, got m={m}, rank={d}")
    k = d - m
    if eps <= 1.0 - 1.0 / (k + 1):
        return eps * math.log(k) + binary_entropy(eps)
    return math.log(k + 1)


def entropy_scb_rank(rho, sigma, m: int, eps: float) -> BoundEvaluation:
    """Upper bound on ``S(rho) - S(sigma)`` for ``rank rho = d`` and ``m``-partial majorization."""
    lr, ls = eigvals_desc(rho), eigvals_desc(sigma)
    if not majorization_holds(lr, ls, m):
        raise PreconditionError(f"{m}-partial majorization fails")
    d = int(np.sum(lr > RANK_TOL))
    bound = entropy_scb_rank_value(d, m, eps)
    gap = von_neumann_entropy(rho) - von_neumann_entropy(sigma)
    return _evaluation("entropy.scb.rank", eps, bound, gap, digest_inputs(rho, sigma, m, eps))


def entropy_scb_energy_value(E: float, lam_rho, spec: HamiltonianSpectrum, m: int, eps: float):
    """Returns ``(piecewise bound, simple bound)`` for the energy-constrained entropy.

    ``E_m = E - sum_{i<=m} h_i lambda_i`` removes the energy the ``m``
    largest eigenvalues must at least carry. Below the threshold
    ``a = 1 - 1/Z_{H0_m}(E_m)`` the bound is ``eps F_{H_m}(E_m/eps) + h(eps)``,
    above it the constant ``F_{H0_m}(E_m)``. The simple form is
    ``eps F_{H0_m}(E_m/eps) + h_up(eps)``.
    """
    _check_eps(eps)
    lam = np.sort(np.asarray(lam_rho, dtype=float))[::-1]
    lv = spec.levels(m)
    E_m = max(E - float(np.dot(lv[:m], lam[:m])), 0.0)
    H_m, H0_m, a_fn = truncate_hamiltonian(spec, m)
    if eps == 0:
        return 0.0, 0.0
    a = a_fn(E_m)
    if eps <= a:
        piecewise = eps * F_of_E(H_m, E_m / eps) + binary_entropy(eps)
    else:
        piecewise = F_of_E(H0_m, E_m)
    simple = eps * F_of_E(H0_m, E_m / eps) + h_up(eps)
    return piecewise, simple


def entropy_scb_energy(rho, sigma, spec: HamiltonianSpectrum, m: int, eps: float,
                       basis=None) -> BoundEvaluation:
    """Energy-constrained semicontinuity bound on ``S(rho) - S(sigma)``.

    ``basis`` holds the Hamiltonian eigenvectors (default computational).
    Variant ``simple`` is the single-formula form; it dominates the bound.
    """
    lr, ls = eigvals_desc(rho), eigvals_desc(sigma)
    if not majorization_holds(lr, ls, m):
        raise PreconditionError(f"{m}-partial majorization fails")
    E = energy_moment(rho, spec.levels(rho.shape[0]), 1.0, basis)
    piecewise, simple = entropy_scb_energy_value(E, lr, spec, m, eps)
    gap = von_neumann_entropy(rho) - von_neumann_entropy(sigma)
    return _evaluation("entropy.scb.energy", eps, piecewise, gap,
                       digest_inputs(rho, sigma, m, eps), variants={"simple": simple, "E": E})


def entropy_truncation_scb(rho, sigma, eps: float) -> BoundEvaluation:
    """``S(rho) - S(sigma) <= S~(rho ^ eps) + h_up(eps)``."""
    _check_eps(eps, open_left=True)
    lam = eigvals_desc(rho)
    bound = extended_entropy_of_probs(np.minimum(np.clip(lam, 0, None), eps)) + h_up(eps)
    gap = von_neumann_entropy(rho) - von_neumann_entropy(sigma)
    return _evaluation("entropy.scb.truncation", eps, bound, gap, digest_inputs(rho, sigma, eps))


def entropy_llb(rho, sigma, eps: float) -> BoundEvaluation:
    """Local lower bound ``S(sigma) >= S~([rho - eps]_+) - h_up(eps)``."""
    _check_eps(eps, open_left=True)
    lam = eigvals_desc(rho)
    bound = extended_entropy_of_probs(np.maximum(lam - eps, 0.0)) - h_up(eps)
    return _evaluation("entropy.llb", eps, bound, von_neumann_entropy(sigma),
                       digest_inputs(rho, sigma, eps), sense="lower")


# -- energy -------------------------------------------------------------------


def energy_scb_value(rho, spec: HamiltonianSpectrum, a: float, eps: float, basis=None):
    """Returns ``(refined, simple)`` energy semicontinuity bounds.

    ``refined = eps^(1-1/a) (Tr H^a (rho_hat ^ eps))^(1/a)`` with ``rho_hat``
    the dephasing of ``rho`` in the Hamiltonian eigenbasis; ``simple``
    replaces ``rho_hat ^ eps`` by ``rho``.
    """
    _check_eps(eps)
    d = rho.shape[0]
    lv = spec.levels(d)
    p = np.clip(np.diag(pinch(rho, basis) if basis is None else
                        np.conj(basis).T @ rho @ basis).real, 0.0, None)
    capped = float(np.dot(lv ** a, np.minimum(p, eps)))
    full = float(np.dot(lv ** a, p))
    scale = eps ** (1.0 - 1.0 / a)
    return scale * capped ** (1.0 / a), scale * full ** (1.0 / a)


def energy_scb(rho, sigma, spec: HamiltonianSpectrum, a: float, eps: float, basis=None) -> BoundEvaluation:
    """Upper bound on ``E_H(rho) - E_H(sigma)`` (refined form; ``simple`` in variants)."""
    if a < 1:
        raise ValidationError(f"a must be >= 1, got {a}")
    refined, simple = energy_scb_value(rho, spec, a, eps, basis)
    lv = spec.levels(rho.shape[0])
    gap = energy_moment(rho, lv, 1.0, basis) - energy_moment(sigma, lv, 1.0, basis)
    return _evaluation("energy.scb", eps, refined, gap, digest_inputs(rho, sigma, a, eps),
                       variants={"simple": simple})


def energy_cb(rho, sigma, spec: HamiltonianSpectrum, a: float, eps: float, E: float | None = None,
              basis=None) -> BoundEvaluation:
    """Two-sided bound ``|E_H(rho) - E_H(sigma)| <= eps^(1-1/a) E^(1/a)`` on ``Tr H^a <= E``."""
    if a <= 1:
        raise ValidationError(f"the two-sided energy bound needs a > 1, got {a}")
    _check_eps(eps)
    lv = spec.levels(rho.shape[0])
    ma = max(energy_moment(rho, lv, a, basis), energy_moment(sigma, lv, a, basis))
    E = ma if E is None else E
    if ma > E * (1 + 1e-12):
        raise PreconditionError(f"moment {ma} exceeds E={E}")
    bound = eps ** (1.0 - 1.0 / a) * E ** (1.0 / a)
    gap = abs(energy_moment(rho, lv, 1.0, basis) - energy_moment(sigma, lv, 1.0, basis))
    return _evaluation("energy.cb", eps, bound, gap, digest_inputs(rho, sigma, a, eps, E))


# -- relative entropy ---------------------------------------------------------


def relative_entropy_to_gibbs(rho, spec: HamiltonianSpectrum, beta: float, basis=None) -> float:
    """``D(rho || exp(-beta H)/Z)`` using the untruncated partition function."""
    lz = gibbs_moments(spec, beta)[0]
    E = energy_moment(rho, spec.levels(rho.shape[0]), 1.0, basis)
    return -von_neumann_entropy(rho) + beta * E + lz


def re_cb_value(F_H, c: float, a: float, E: float, eps: float) -> float:
    """``(1/c) eps^(1-1/a) E^(1/a) + eps F_H((E/eps)^(1/a)) + h_up(eps)``."""
    _check_eps(eps)
    if eps == 0:
        return 0.0
    return (eps ** (1 - 1 / a) * E ** (1 / a)) / c + eps * F_H((E / eps) ** (1 / a)) + h_up(eps)


def re_refined_terms(spec: HamiltonianSpectrum, a: float, E: float, eps: float):
    """Sharper replacements for ``eps F_H((E/eps)^(1/a)) + h_up(eps)``.

    Returns ``(threshold_form, max_form)``. ``threshold_form`` is
    ``eps F_{H_1}((E/eps)^(1/a)) + h(eps)`` and is only valid for
    ``eps <= 1 - 1/Z_{H^a}(E)`` (``None`` above that). ``max_form`` maximizes
    ``x F_{H_1}((E/x)^(1/a)) + h(x)`` over ``x`` in ``[0, min(eps, E/h_2^a)]``
    and is valid for every ``eps``.
    """
    H1, _, _ = truncate_hamiltonian(spec, 1)
    h2 = float(spec.levels(2)[1])
    thr = 1.0 - 1.0 / partition_function(spec.power(a), E)
    thr_form = None
    if eps <= thr and (E / eps) ** (1 / a) >= h2:
        thr_form = eps * F_of_E(H1, (E / eps) ** (1 / a)) + binary_entropy(eps)
    x_max = min(eps, E / h2 ** a)

    def f(x):
        if x <= 0:
            return 0.0
        return x * F_of_E(H1, max((E / x) ** (1 / a), h2)) + binary_entropy(min(x, 1.0))

    max_form = nondecreasing_envelope(f, x_max) if x_max > 0 else 0.0
    return thr_form, max_form


def re_gibbs_cb(rho, sigma, spec: HamiltonianSpectrum, beta: float, a: float, eps: float,
                E: float | None = None, refine: bool = True) -> BoundEvaluation:
    """Continuity bound for ``D(. || gamma)`` with ``gamma`` a Gibbs state of ``H``.

    Requires ``Tr H^a rho, Tr H^a sigma <= E`` (``E`` defaults to the
    larger of the two). Variants hold the refined replacements.
    """
    if a <= 1:
        raise ValidationError(f"a must exceed 1, got {a}")
    lv = spec.levels(rho.shape[0])
    ma = max(energy_moment(rho, lv, a), energy_moment(sigma, lv, a))
    E = ma if E is None else E
    if ma > E * (1 + 1e-12):
        raise PreconditionError(f"moment {ma} exceeds E={E}")
    bound = re_cb_value(lambda x: F_of_E(spec, x), 1.0 / beta, a, E, eps)
    gap = abs(relative_entropy_to_gibbs(rho, spec, beta) - relative_entropy_to_gibbs(sigma, spec, beta))
    variants = {}
    if refine and eps > 0 and E > 0:
        first = beta * eps ** (1 - 1 / a) * E ** (1 / a)
        thr_form, max_form = re_refined_terms(spec, a, E, eps)
        if thr_form is not None:
            variants["threshold"] = first + thr_form
        variants["max"] = first + max_form
    return _evaluation("relent.cb.gibbs", eps, bound, gap, digest_inputs(rho, sigma, beta, a, eps, E),
                       variants=variants)


def hamiltonian_of_state(omega, c: float):
    """Spectrum and eigenbasis of ``c (-ln omega + ln lambda_max I)`` for faithful ``omega``."""
    w, V = np.linalg.eigh(check_density(omega))
    if w[0] <= RANK_TOL:
        raise PreconditionError("reference state must be faithful")
    w, V = w[::-1], V[:, ::-1]
    levels = c * (np.log(w[0]) - np.log(w))
    levels[0] = 0.0
    return HamiltonianSpectrum.explicit(np.maximum.accumulate(levels)), V


def re_faithful_cb(rho, sigma, omega, c: float, a: float, eps: float, E: float | None = None) -> BoundEvaluation:
    """Continuity bound for ``D(. || omega)`` with ``omega`` faithful, via ``H = c(-ln omega + ln l_1)``."""
    if a <= 1 or c <= 0:
        raise ValidationError("need a > 1 and c > 0")
    spec, V = hamiltonian_of_state(omega, c)
    lv = spec.levels(rho.shape[0])
    ma = max(energy_moment(rho, lv, a, V), energy_moment(sigma, lv, a, V))
    E = ma if E is None else E
    if ma > E * (1 + 1e-12):
        raise PreconditionError(f"moment {ma} exceeds E={E}")
    bound = re_cb_value(lambda x: F_of_E(spec, x), c, a, E, eps)
    gap = abs(relative_entropy(rho, omega) - relative_entropy(sigma, omega))
    return _evaluation("relent.cb.faithful", eps, bound, gap, digest_inputs(rho, sigma, omega, c, a, eps))


def dominated_values(c: float, eps: float):
    """``(1/c) eta_up(c eps) + h_up(eps)``, the exact-distance form and its envelope."""
    _check_eps(eps)
    main = eta_up(c * eps) / c + h_up(eps)
    exact = eta(c * eps) / c + binary_entropy(eps)
    env = nondecreasing_envelope(lambda t: eta(c * t) / c + binary_entropy(t), eps) if eps > 0 else 0.0
    return main, exact, env


def re_dominated_scb(rho, sigma, omega, c: float, eps: float, mode: str = "scb") -> BoundEvaluation:
    """Bound on ``D(rho||omega) - D(sigma||omega)`` when ``c rho <= omega``.

    ``mode="scb"`` needs ``[rho, sigma] = 0`` or ``[rho, omega] = 0``;
    ``mode="two_sided"`` bounds the absolute difference and needs
    ``c sigma <= omega`` and ``[rho, sigma] = 0``. The exact-distance variant
    is reported when the pair commutes and sits at distance ``eps``.
    """
    if not 0 < c < 1:
        raise ValidationError(f"c must lie in (0, 1), got {c}")
    _check_eps(eps)
    omega = np.asarray(omega)
    if np.linalg.eigvalsh(omega - c * np.asarray(rho))[0] < -1e-10:
        raise PreconditionError("c rho <= omega fails")
    c_rs = commute(rho, sigma)
    if mode == "scb":
        if not (c_rs or commute(rho, omega)):
            raise PreconditionError("need [rho, sigma] = 0 or [rho, omega] = 0")
    elif mode == "two_sided":
        if not c_rs:
            raise PreconditionError("need [rho, sigma] = 0")
        if np.linalg.eigvalsh(omega - c * np.asarray(sigma))[0] < -1e-10:
            raise PreconditionError("c sigma <= omega fails")
    else:
        raise ValidationError(f"unknown mode {mode!r}")
    main, exact, env = dominated_values(c, eps)
    d_r, d_s = relative_entropy(rho, omega), relative_entropy(sigma, omega)
    gap = d_r - d_s if mode == "scb" else abs(d_r - d_s)
    vacuous = math.isinf(d_s) and mode == "scb"
    variants = {"envelope": env}
    if c_rs and abs(trace_distance(rho, sigma) - eps) <= EXACT_EPS_TOL:
        variants["exact"] = exact
    bid = "relent.scb.dominated" if mode == "scb" else "relent.cb.dominated"
    return _evaluation(bid, eps, main, gap, digest_inputs(rho, sigma, omega, c, eps),
                       variants=variants, vacuous=vacuous)


# -- conditional entropy --------------------------------------------------------


def qce_commuting_cb(rho, sigma, dims, eps: float, d: int | None = None,
                     spec: HamiltonianSpectrum | None = None, E: float | None = None) -> BoundEvaluation:
    """Continuity bound for ``S(A|B)`` on commuting pairs.

    Rank form (``spec is None``): ``{2 eps ln d + h(eps)}^up`` with variants
    ``h_up`` (``2 eps ln d + h_up(eps)``) and ``winter``
    (``2 eps ln d + g(eps)``). Energy form: ``2 eps F_H(E/eps) + h_up(eps)``
    with ``H`` acting on ``A`` in the computational basis.
    """
    from .entropy import g_function

    _check_eps(eps)
    if not commute(rho, sigma):
        raise PreconditionError("states must commute")
    ra, sa = partial_trace(rho, dims, "A"), partial_trace(sigma, dims, "A")
    gap = abs(conditional_entropy(rho, dims) - conditional_entropy(sigma, dims))
    dig = digest_inputs(rho, sigma, dims, eps)
    if spec is None:
        rmax = max(rank(ra, RANK_TOL), rank(sa, RANK_TOL))
        d = rmax if d is None else d
        if rmax > d:
            raise PreconditionError(f"marginal rank {rmax} exceeds d={d}")
        ln_d = math.log(d)
        bound = rank_envelope(eps, ln_d, coeff=2.0)
        variants = {"h_up": 2 * eps * ln_d + h_up(eps), "winter": 2 * eps * ln_d + g_function(eps)}
        return _evaluation("qce.cb.commuting.rank", eps, bound, gap, dig, variants=variants)
    lv = spec.levels(dims[0])
    em = max(energy_moment(ra, lv), energy_moment(sa, lv))
    E = em if E is None else E
    if em > E * (1 + 1e-12):
        raise PreconditionError(f"marginal energy {em} exceeds E={E}")
    bound = 2 * eps * F_of_E(spec, E / eps) + h_up(eps) if eps > 0 else 0.0
    return _evaluation("qce.cb.commuting.energy", eps, bound, gap, dig, variants={"E": E})


def qc_energy_clip(rho_qc, spec: HamiltonianSpectrum, eps: float) -> float:
    """``E_{H,eps} = sum_k Tr H [p_k rho_k - eps I]_+`` (computational basis)."""
    lv = spec.levels(rho_qc.dA)
    return float(sum(np.real(np.trace(np.diag(lv) @ clip_below(b, eps))) for b in rho_qc.scaled_blocks()))


def qce_qc_scb(rho_qc, sigma_qc, eps: float, spec: HamiltonianSpectrum | None = None) -> BoundEvaluation:
    """Semicontinuity bound for ``S(A|B)`` on quantum-classical states.

    Rank form: ``{eps ln rank(rho_A) + h(eps)}^up`` (variant ``h_up``).
    Energy form: ``eps F_H((E - E_{H,eps})/eps) + h_up(eps)`` with
    ``E = Tr H rho_A``; variant ``loose`` drops ``E_{H,eps}``.
    """
    _check_eps(eps, open_left=True)
    if rho_qc.distance(sigma_qc) > eps + 1e-10:
        raise PreconditionError("q-c states are farther apart than eps")
    gap = rho_qc.conditional_entropy() - sigma_qc.conditional_entropy()
    ra = rho_qc.marginal_A()
    dig = digest_inputs(rho_qc.matrix(), sigma_qc.matrix(), eps)
    if spec is None:
        r = rank(ra, RANK_TOL)
        bound = rank_envelope(eps, math.log(r))
        return _evaluation("qce.qc.scb.rank", eps, bound, gap, dig,
                           variants={"h_up": eps * math.log(r) + h_up(eps)})
    lv = spec.levels(rho_qc.dA)
    E = energy_moment(ra, lv)
    e_clip = qc_energy_clip(rho_qc, spec, eps)
    refined = eps * F_of_E(spec, max(E - e_clip, 0.0) / eps) + h_up(eps)
    loose = eps * F_of_E(spec, E / eps) + h_up(eps)
    return _evaluation("qce.qc.scb.energy", eps, refined, gap, dig,
                       variants={"loose": loose, "E": E, "E_clip": e_clip})


def qce_qc_truncation_and_llb(rho_qc, sigma_qc, eps: float):
    """Blockwise truncation bound and local lower bound for ``S(A|B)`` on q-c states.

    ``scb``: ``S(A|B)_rho - S(A|B)_sigma <= sum_k S~((p_k rho_k) ^ eps) + h_up(eps)``.
    ``llb``: ``S(A|B)_sigma >= sum_k S~([p_k rho_k - eps]_+) - h_up(eps)``.
    The same formulas hold for ensembles at blockwise distance ``eps``.
    """
    _check_eps(eps, open_left=True)
    if rho_qc.distance(sigma_qc) > eps + 1e-10:
        raise PreconditionError("q-c states are farther apart than eps")
    spectra = [np.clip(eigvals_desc(b), 0.0, None) for b in rho_qc.scaled_blocks()]
    s_cap = sum(extended_entropy_of_probs(np.minimum(w, eps)) for w in spectra)
    s_clip = sum(extended_entropy_of_probs(np.maximum(w - eps, 0.0)) for w in spectra)
    ce_r, ce_s = rho_qc.conditional_entropy(), sigma_qc.conditional_entropy()
    dig = digest_inputs(rho_qc.matrix(), sigma_qc.matrix(), eps)
    scb = _evaluation("qce.qc.scb.truncation", eps, s_cap + h_up(eps), ce_r - ce_s, dig)
    llb = _evaluation("qce.qc.llb", eps, s_clip - h_up(eps), ce_s, dig, sense="lower")
    return scb, llb


# -- entanglement of formation ---------------------------------------------------


def eof_delta(eps: float | None = None, fidelity_value: float | None = None) -> float:
    """``sqrt(eps (2 - eps))`` or, from a fidelity, ``sqrt(1 - F)``."""
    if (eps is None) == (fidelity_value is None):
        raise ValidationError("give exactly one of eps and fidelity")
    if fidelity_value is not None:
        _check_eps(fidelity_value)
        return math.sqrt(max(1.0 - fidelity_value, 0.0))
    _check_eps(eps)
    return math.sqrt(eps * (2.0 - eps))


def eof_scb(rho, sigma, dims, eps: float | None = None, fidelity_value: float | None = None,
            spec: HamiltonianSpectrum | None = None, eof_fn=None) -> BoundEvaluation:
    """Semicontinuity bound for the entanglement of formation.

    Rank form: ``{delta ln rank(rho_A) + h(delta)}^up``; energy form:
    ``delta F_H(E/delta) + h_up(delta)`` with ``E = Tr H rho_A``. ``eof_fn``
    computes the entanglement of formation (default: two-qubit closed form).
    """
    from .eof import wootters_eof

    eof_fn = wootters_eof if eof_fn is None else eof_fn
    delta = eof_delta(eps, fidelity_value)
    ra = partial_trace(rho, dims, "A")
    if spec is None:
        bound = rank_envelope(delta, math.log(rank(ra, RANK_TOL)))
        bid = "eof.scb.rank"
    else:
        E = energy_moment(ra, spec.levels(dims[0]))
        bound = delta * F_of_E(spec, E / delta) + h_up(delta) if delta > 0 else 0.0
        bid = "eof.scb.energy"
    if fidelity_value is not None:
        bid = "eof.scb.fidelity"
    gap = eof_fn(rho) - eof_fn(sigma)
    e = eps if eps is not None else fidelity_value
    return _evaluation(bid, e, bound, gap, digest_inputs(rho, sigma, dims, e),
                       variants={"delta": delta})
