"""Auxiliary inequalities and identities the bounds are built from.

Every check returns a ``BoundEvaluation`` so that campaigns can treat them
like the bounds themselves. ``sense="equal"`` marks identities.
"""

from __future__ import annotations

import math

import numpy as np

from .bounds import (
    BoundEvaluation,
    ClassParams,
    PreconditionError,
    _evaluation,
    digest_inputs,
    generic_energy_bound,
    generic_rank_bound,
)
from .entropy import (
    binary_entropy,
    conditional_entropy,
    energy_moment,
    lindblad_relative_entropy,
    mutual_information,
    von_neumann_entropy,
)
from .gibbs import F_of_E, HamiltonianSpectrum
from .operators import (
    ValidationError,
    clip_below,
    commute,
    eigvals_desc,
    fidelity,
    jordan_split,
    partial_trace,
    positive_part,
    rank,
    support_dimension,
    trace_distance,
    trace_norm,
)

EXACT_EPS_TOL = 1e-10

ENTROPY_CLASS = ClassParams(1.0, 1.0, 1, 1)
QCE_CLASS = ClassParams(2.0, 1.0, 1, 2)
MI_CLASS = ClassParams(2.0, 2.0, 1, 2)


# -- split of a commuting pair --------------------------------------------------


def afw_split_check(rho, sigma) -> BoundEvaluation:
    """``S(rho) + eps S(tau_-) <= S(sigma) + eps S(tau_+) + h(eps)`` for commuting states.

    ``eps`` is the trace distance and ``tau_+``, ``tau_-`` the normalized
    positive and negative parts of ``rho - sigma``.
    """
    split = jordan_split(rho, sigma)
    eps = split.epsilon
    lhs = von_neumann_entropy(rho) + eps * von_neumann_entropy(split.tau_minus)
    rhs = von_neumann_entropy(sigma) + eps * von_neumann_entropy(split.tau_plus) + binary_entropy(eps)
    return _evaluation("afw.split", eps, rhs, lhs, digest_inputs(rho, sigma))


def afw_split_probe(rho, sigma) -> dict:
    """Same inequality for a non-commuting pair, using the Hermitian Jordan split.

    The common part need not be positive here, so the inequality has no
    guarantee. Returns the slack, the smallest eigenvalue of the common
    part and whether the pair commutes.
    """
    split = jordan_split(rho, sigma, allow_noncommuting=True)
    eps = split.epsilon
    lhs = von_neumann_entropy(rho) + eps * von_neumann_entropy(split.tau_minus)
    rhs = von_neumann_entropy(sigma) + eps * von_neumann_entropy(split.tau_plus) + binary_entropy(eps)
    wmin = 0.0 if split.omega_star is None else float(np.linalg.eigvalsh(split.omega_star)[0])
    return {"epsilon": eps, "slack": rhs - lhs, "omega_min_eig": wmin, "commuting": split.commuting}


# -- spectra ------------------------------------------------------------------------


def mirsky_check(rho, sigma) -> BoundEvaluation:
    """``sum_i |lambda_i(rho) - lambda_i(sigma)| <= ||rho - sigma||_1`` (sorted spectra)."""
    lr, ls = eigvals_desc(rho), eigvals_desc(sigma)
    gap = float(np.sum(np.abs(lr - ls)))
    bound = trace_norm(np.asarray(rho) - np.asarray(sigma))
    return _evaluation("mirsky", 0.5 * bound, bound, gap, digest_inputs(rho, sigma))


def fvdg_check(rho, sigma) -> tuple[BoundEvaluation, BoundEvaluation]:
    """Fuchs-van de Graaf: ``1 - sqrt(F) <= TD <= sqrt(1 - F)`` with squared fidelity ``F``."""
    td = trace_distance(rho, sigma)
    F = fidelity(rho, sigma)
    dig = digest_inputs(rho, sigma)
    upper = _evaluation("fidelity.fvdg.upper", td, math.sqrt(max(1.0 - F, 0.0)), td, dig)
    lower = _evaluation("fidelity.fvdg.lower", td, 1.0 - math.sqrt(F), td, dig, sense="lower")
    return upper, lower


# -- mixing inequalities -------------------------------------------------------------


def _mix(rho, sigma, p):
    return p * np.asarray(rho) + (1 - p) * np.asarray(sigma)


def entropy_mixing_check(rho, sigma, p: float) -> tuple[BoundEvaluation, BoundEvaluation]:
    """Upper ``S(mix) <= p S(rho) + (1-p) S(sigma) + h(p)`` and concavity lower bound."""
    if not 0 <= p <= 1:
        raise ValidationError(f"p must lie in [0, 1], got {p}")
    s_mix = von_neumann_entropy(_mix(rho, sigma, p))
    avg = p * von_neumann_entropy(rho) + (1 - p) * von_neumann_entropy(sigma)
    dig = digest_inputs(rho, sigma, p)
    return (_evaluation("entropy.mixing", p, avg + binary_entropy(p), s_mix, dig),
            _evaluation("entropy.concavity", p, avg, s_mix, dig, sense="lower"))


def qce_mixing_check(rho, sigma, dims, p: float) -> tuple[BoundEvaluation, BoundEvaluation]:
    """Same pair of inequalities for the conditional entropy ``S(A|B)``."""
    s_mix = conditional_entropy(_mix(rho, sigma, p), dims)
    avg = p * conditional_entropy(rho, dims) + (1 - p) * conditional_entropy(sigma, dims)
    dig = digest_inputs(rho, sigma, dims, p)
    return (_evaluation("qce.mixing", p, avg + binary_entropy(p), s_mix, dig),
            _evaluation("qce.concavity", p, avg, s_mix, dig, sense="lower"))


def mi_mixing_check(rho, sigma, dims, p: float) -> tuple[BoundEvaluation, BoundEvaluation]:
    """``I(mix)`` lies within ``h(p)`` of the average mutual information."""
    i_mix = mutual_information(_mix(rho, sigma, p), dims)
    avg = p * mutual_information(rho, dims) + (1 - p) * mutual_information(sigma, dims)
    h = binary_entropy(p)
    dig = digest_inputs(rho, sigma, dims, p)
    return (_evaluation("mi.mixing.lower", p, avg - h, i_mix, dig, sense="lower"),
            _evaluation("mi.mixing.upper", p, avg + h, i_mix, dig))


# -- relative entropy of positive operators --------------------------------------------


def relent_scaling_check(rho, sigma, c: float) -> BoundEvaluation:
    """``D(c rho || c sigma) = c D(rho || sigma)``."""
    lhs = lindblad_relative_entropy(c * np.asarray(rho), c * np.asarray(sigma))
    rhs = c * lindblad_relative_entropy(rho, sigma)
    return _evaluation("relent.scaling", c, rhs, lhs, digest_inputs(rho, sigma, c), sense="equal",
                       vacuous=math.isinf(rhs) and math.isinf(lhs))


def relent_constant_check(rho, sigma, c: float) -> BoundEvaluation:
    """``D(rho || c sigma) = D(rho || sigma) - Tr rho ln c + (c - 1) Tr sigma``."""
    if c <= 0:
        raise ValidationError("c must be positive")
    lhs = lindblad_relative_entropy(rho, c * np.asarray(sigma))
    rhs = (lindblad_relative_entropy(rho, sigma) - np.trace(rho).real * math.log(c)
           + (c - 1) * np.trace(sigma).real)
    return _evaluation("relent.constant", c, rhs, lhs, digest_inputs(rho, sigma, c), sense="equal",
                       vacuous=math.isinf(rhs) and math.isinf(lhs))


def relent_subadditive_check(rho, sigma, omega) -> BoundEvaluation:
    """``D(rho || sigma + omega) <= D(rho || sigma) + Tr omega``."""
    lhs = lindblad_relative_entropy(rho, np.asarray(sigma) + np.asarray(omega))
    rhs = lindblad_relative_entropy(rho, sigma) + np.trace(omega).real
    return _evaluation("relent.subadditive", float(np.trace(omega).real), rhs, lhs,
                       digest_inputs(rho, sigma, omega), vacuous=math.isinf(rhs))


# -- generic class bounds on concrete functions ------------------------------------------


def _functional(name: str):
    if name == "entropy":
        return ENTROPY_CLASS, lambda r, dims: von_neumann_entropy(r)
    if name == "qce":
        return QCE_CLASS, conditional_entropy
    if name == "mi":
        return MI_CLASS, mutual_information
    raise ValidationError(f"unknown functional {name!r}")


def _pair_distance(rho, sigma, eps):
    if not commute(rho, sigma):
        raise PreconditionError("the class bounds need commuting states")
    td = trace_distance(rho, sigma)
    if td > eps + EXACT_EPS_TOL:
        raise PreconditionError(f"trace distance {td} exceeds eps={eps}")
    return td


def generic_rank_check(name: str, rho, sigma, eps: float, dims=None) -> BoundEvaluation:
    """Rank-constrained class bound applied to ``S``, ``S(A|B)`` or ``I(A:B)``.

    The main value is the exact-distance form when the pair sits at
    distance ``eps`` and the envelope form otherwise. For the entropy the
    rank is replaced by ``d_* - 1`` with ``d_*`` the dimension of the joint
    support; otherwise ``d_m`` is the larger rank of the ``A`` marginals.
    Variant ``h_up`` is the plain ``h_up`` form.
    """
    p, f = _functional(name)
    td = _pair_distance(rho, sigma, eps)
    if name == "entropy":
        d_m = max(support_dimension(rho, sigma) - 1, 1)
    else:
        d_m = max(rank(partial_trace(rho, dims, "A")), rank(partial_trace(sigma, dims, "A")))
    exact = abs(td - eps) <= EXACT_EPS_TOL
    main = generic_rank_bound(p, d_m, eps, "exact" if exact else "envelope")
    variants = {"h_up": generic_rank_bound(p, d_m, eps, "h_up"),
                "envelope": generic_rank_bound(p, d_m, eps, "envelope")}
    gap = abs(f(rho, dims) - f(sigma, dims))
    return _evaluation(f"generic.rank.{name}", eps, main, gap, digest_inputs(rho, sigma, eps, dims),
                       variants=variants)


def _energy_parts(name, rho, sigma, spec, eps, dims):
    """``E(rho)``, ``E(sigma)``, ``E_eps(rho)`` and ``E(rho, sigma)`` for the constrained subsystem."""
    if name == "entropy":
        lv = spec.levels(rho.shape[0])

        def marg(x):
            return x
    else:
        lv = spec.levels(dims[0])

        def marg(x):
            return partial_trace(x, dims, "A")
    e_r, e_s = energy_moment(marg(rho), lv), energy_moment(marg(sigma), lv)
    e_clip = energy_moment(marg(clip_below(rho, eps)), lv)
    e_pair = energy_moment(marg(positive_part(np.asarray(rho) - np.asarray(sigma))), lv)
    return e_r, e_s, e_clip, e_pair


def generic_energy_check(name: str, rho, sigma, spec: HamiltonianSpectrum, eps: float,
                         dims=None, one_sided: bool = False, E: float | None = None) -> BoundEvaluation:
    """Energy-constrained class bound for ``S`` or ``I(A:B)`` (``H`` on ``A``, computational basis).

    Two-sided (default): ``|f(rho) - f(sigma)| <= C eps F_H(E/eps) + D h_up(eps)``
    with ``E`` the larger energy. One-sided: ``f(rho) - f(sigma)`` against the
    refined ``C eps F_H((E(rho) - E_eps(rho))/eps) + D h_up(eps)``; variants
    ``loose`` (plain ``E(rho)``) and ``pair`` (``E(rho, sigma)``).
    """
    if name == "qce":
        raise ValidationError("use qce_commuting_cb for the conditional entropy")
    p, f = _functional(name)
    _pair_distance(rho, sigma, eps)
    rho, sigma = np.asarray(rho), np.asarray(sigma)
    e_r, e_s, e_clip, e_pair = _energy_parts(name, rho, sigma, spec, eps, dims)

    def F(x):
        return F_of_E(spec, x)

    dig = digest_inputs(rho, sigma, eps, dims, one_sided)
    if not one_sided:
        Emax = max(e_r, e_s) if E is None else E
        bound = generic_energy_bound(p, F, Emax, eps, "h_up")
        gap = abs(f(rho, dims) - f(sigma, dims))
        return _evaluation(f"generic.energy.{name}", eps, bound, gap, dig, variants={"E": Emax})
    refined = generic_energy_bound(p, F, max(e_r - e_clip, 0.0), eps, "h_up")
    loose = generic_energy_bound(p, F, e_r, eps, "h_up")
    pair = generic_energy_bound(p, F, e_pair, eps, "h_up")
    gap = f(rho, dims) - f(sigma, dims)
    return _evaluation(f"generic.energy.{name}.refined", eps, refined, gap, dig,
                       variants={"loose": loose, "pair": pair, "E": e_r, "E_clip": e_clip})


# -- existence search for near-violations of the loose q-c energy bound --------------------


def qc_loose_energy_search(spec: HamiltonianSpectrum, eps: float, dA: int = 3, blocks: int = 2,
                           trials: int = 200, seed: int = 0, structured_dim: int = 40) -> dict:
    """Search for q-c pairs beating ``eps F_H(E/eps)`` without the ``h`` term.

    Reports the best margin ``S(A|B)_rho - S(A|B)_sigma - eps F_H(E/eps)``
    found (``E = Tr H rho_A``). Random q-c pairs are tried first, then a
    one-block family: ``sigma`` the ground level and
    ``rho = (1 - eps) |0><0| + eps tau`` with ``tau`` geometric on the excited
    levels. A positive margin exhibits a pair for which the bound without
    the binary-entropy term fails; not finding one says nothing.
    """
    from .states import QCState, make_rng, qc_pair

    best = {"margin": -math.inf, "trial": None, "family": None}
    for t in range(trials):
        rho, sigma = qc_pair(dA, blocks, eps, make_rng(seed, t))
        E = energy_moment(rho.marginal_A(), spec.levels(dA))
        margin = (rho.conditional_entropy() - sigma.conditional_entropy()
                  - eps * F_of_E(spec, E / eps))
        if margin > best["margin"]:
            best = {"margin": float(margin), "trial": t, "family": "random"}
    lv = spec.levels(structured_dim)
    ground = np.zeros(structured_dim)
    ground[0] = 1.0
    for t, q in enumerate(np.linspace(0.05, 0.95, 19)):
        tail = q ** np.arange(structured_dim - 1)
        p = np.concatenate([[1.0 - eps], eps * tail / tail.sum()])
        rho, sigma = QCState([1.0], [np.diag(p)]), QCState([1.0], [np.diag(ground)])
        E = float(np.dot(lv, p))
        margin = (rho.conditional_entropy() - sigma.conditional_entropy()
                  - eps * F_of_E(spec, E / eps))
        if margin > best["margin"]:
            best = {"margin": float(margin), "trial": t, "family": "structured"}
    best["found"] = best["margin"] > 0
    return best
