"""Command-line interface: ``afwbounds {scalar, gibbs, bounds, eof, verify}``.

Exit status is 0 on success, 1 when a verification campaign records
violations and 2 on invalid input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict

import numpy as np

from . import __version__
from . import bounds as B
from . import checks as C
from .campaign import (
    DEFAULT_GRID,
    DEFAULT_TOLERANCE,
    REGISTRY,
    CampaignConfig,
    ConfigError,
    emit_report,
    load_config,
    report_csv,
    report_json,
    run_campaign,
)
from .entropy import binary_entropy, eta, eta_up, g_function, h_up, rank_envelope
from .gibbs import HamiltonianSpectrum, RangeError, TruncationError, solve_beta, spectrum_from_dict
from .io import load_hamiltonian, load_matrix
from .operators import ValidationError, fidelity
from .states import QCState

log = logging.getLogger("afwbounds")

SCALARS = {
    "h": binary_entropy,
    "h_up": h_up,
    "eta": eta,
    "eta_up": eta_up,
    "g": g_function,
}


def _print(obj) -> None:
    print(json.dumps(obj, indent=2, default=_default))


def _default(o):
    if isinstance(o, (np.integer, np.floating)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, HamiltonianSpectrum):
        return o.to_dict()
    raise TypeError(type(o).__name__)


def _spectrum(args) -> HamiltonianSpectrum:
    if getattr(args, "spectrum", None):
        return load_hamiltonian(args.spectrum)
    return spectrum_from_dict({"family": getattr(args, "family", None) or "oscillator"})


# -- scalar ------------------------------------------------------------------------


def cmd_scalar(args) -> int:
    if args.name == "rank_envelope":
        if args.log_dim is None:
            raise ValidationError("rank_envelope needs --log-dim")
        value = rank_envelope(args.x, args.log_dim, args.coeff)
    else:
        value = float(SCALARS[args.name](args.x))
    _print({"function": args.name, "x": args.x, "value": value})
    return 0


# -- gibbs -------------------------------------------------------------------------


def cmd_gibbs_solve(args) -> int:
    sol = solve_beta(_spectrum(args), args.energy)
    _print({"E": sol.E, "beta": sol.beta, "Z": sol.Z, "F": sol.F, "tail_mass": sol.tail_mass})
    return 0


# -- bounds eval -----------------------------------------------------------------------


def _qc_from_matrix(M, dA: int, K: int) -> QCState:
    """Recover ``sum_k p_k rho_k (x) |k><k|`` from its matrix on ``A (x) K``."""
    t = np.asarray(M).reshape(dA, K, dA, K)
    scaled = [t[:, k, :, k] for k in range(K)]
    w = np.array([np.trace(b).real for b in scaled])
    blocks = [b / wk if wk > 1e-15 else np.eye(dA) / dA for b, wk in zip(scaled, w)]
    return QCState(w / w.sum(), blocks)


def cmd_bounds_eval(args) -> int:
    rho, sigma = load_matrix(args.rho), load_matrix(args.sigma)
    bid, eps = args.bound, args.eps
    dims = tuple(args.dims) if args.dims else None
    spec = _spectrum(args)
    if bid == "entropy.scb.rank":
        ev = B.entropy_scb_rank(rho, sigma, args.m, eps)
    elif bid == "entropy.scb.energy":
        ev = B.entropy_scb_energy(rho, sigma, spec, args.m, eps)
    elif bid == "entropy.scb.truncation":
        ev = B.entropy_truncation_scb(rho, sigma, eps)
    elif bid == "entropy.llb":
        ev = B.entropy_llb(rho, sigma, eps)
    elif bid == "energy.scb":
        ev = B.energy_scb(rho, sigma, spec, args.a, eps)
    elif bid == "energy.cb":
        ev = B.energy_cb(rho, sigma, spec, args.a, eps, E=args.energy)
    elif bid == "relent.cb.gibbs":
        ev = B.re_gibbs_cb(rho, sigma, spec, args.beta, args.a, eps, E=args.energy)
    elif bid in ("relent.cb.faithful", "relent.scb.dominated", "relent.cb.dominated"):
        if not args.omega:
            raise ValidationError(f"{bid} needs --omega")
        omega = load_matrix(args.omega)
        if bid == "relent.cb.faithful":
            ev = B.re_faithful_cb(rho, sigma, omega, args.c, args.a, eps, E=args.energy)
        else:
            mode = "scb" if bid == "relent.scb.dominated" else "two_sided"
            ev = B.re_dominated_scb(rho, sigma, omega, args.c, eps, mode=mode)
    elif bid.startswith("qce.cb.commuting"):
        _need_dims(dims, bid)
        energy = bid.endswith("energy")
        ev = B.qce_commuting_cb(rho, sigma, dims, eps, spec=spec if energy else None,
                                E=args.energy if energy else None)
    elif bid.startswith("qce.qc"):
        _need_dims(dims, bid)
        rq, sq = _qc_from_matrix(rho, *dims), _qc_from_matrix(sigma, *dims)
        if bid == "qce.qc.scb.rank":
            ev = B.qce_qc_scb(rq, sq, eps)
        elif bid == "qce.qc.scb.energy":
            ev = B.qce_qc_scb(rq, sq, eps, spec=spec)
        else:
            scb, llb = B.qce_qc_truncation_and_llb(rq, sq, eps)
            ev = llb if bid == "qce.qc.llb" else scb
    elif bid.startswith("eof.scb"):
        _need_dims(dims, bid)
        if bid == "eof.scb.fidelity":
            ev = B.eof_scb(rho, sigma, dims, fidelity_value=fidelity(rho, sigma))
        else:
            ev = B.eof_scb(rho, sigma, dims, eps=eps, spec=spec if bid.endswith("energy") else None)
    elif bid == "afw.split":
        ev = C.afw_split_check(rho, sigma)
    elif bid == "mirsky":
        ev = C.mirsky_check(rho, sigma)
    else:
        raise ValidationError(f"bounds eval does not handle {bid!r}; see 'verify list'")
    out = asdict(ev)
    out["passed"] = ev.passed(args.tolerance)
    _print(out)
    return 0


def _need_dims(dims, bid):
    if not dims or len(dims) != 2:
        raise ValidationError(f"{bid} needs --dims DA DB")


# -- eof ---------------------------------------------------------------------------------


def cmd_eof_compute(args) -> int:
    from .eof import convex_roof_eof, wootters_eof

    rho = load_matrix(args.state)
    dims = tuple(args.dims)
    res = convex_roof_eof(rho, dims, K=args.K, restarts=args.restarts, seed=args.seed)
    vals = np.asarray(res.restart_values)
    out = {
        "value": res.value,
        "ensemble_size": res.ensemble.size,
        "restarts": int(vals.size),
        "restart_min": float(vals.min()),
        "restart_median": float(np.median(vals)),
        "restart_max": float(vals.max()),
        "iterations": res.iterations,
        "converged": res.converged,
    }
    if dims == (2, 2):
        out["wootters"] = wootters_eof(rho)
    _print(out)
    return 0


# -- verify --------------------------------------------------------------------------------


def cmd_verify_list(args) -> int:
    for bid, entry in REGISTRY.items():
        print(f"{bid:34s} kinds={','.join(entry.kinds)}")
    return 0


def cmd_verify_run(args) -> int:
    base = load_config(args.config) if args.config else {}
    if args.bound:
        base["bound_id"] = args.bound
    for key in ("seed", "samples", "tolerance", "out", "format"):
        val = getattr(args, key)
        if val is not None:
            base[key] = val
    if args.epsilon:
        base["epsilon_grid"] = args.epsilon
    if "bound_id" not in base:
        raise ConfigError("give --bound or a config with bound_id")
    cfg = CampaignConfig.from_dict(base)
    report = run_campaign(cfg, workers=args.workers)
    if cfg.out:
        emit_report(report, cfg.out, cfg.format)
        log.info("report written to %s", cfg.out)
    else:
        sys.stdout.write(report_json(report) if cfg.format == "json" else report_csv(report))
        if cfg.format == "json":
            sys.stdout.write("\n")
    status = "PASS" if report.violations == 0 else "FAIL"
    print(f"{status} {cfg.bound_id} violations={report.violations} digest={report.digest}",
          file=sys.stderr)
    return 0 if report.violations == 0 else 1


# -- parser --------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="afwbounds", description="Continuity bounds for entropic "
                                "quantities: evaluation and randomized verification.")
    p.add_argument("--version", action="version", version=f"afwbounds {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    sc = sub.add_parser("scalar", help="evaluate a scalar function")
    sc.add_argument("name", choices=sorted(SCALARS) + ["rank_envelope"])
    sc.add_argument("x", type=float)
    sc.add_argument("--log-dim", type=float)
    sc.add_argument("--coeff", type=float, default=1.0)
    sc.set_defaults(func=cmd_scalar)

    gb = sub.add_parser("gibbs", help="Gibbs-state quantities")
    gsub = gb.add_subparsers(dest="gibbs_command", required=True)
    gs = gsub.add_parser("solve", help="inverse temperature at a given mean energy")
    gs.add_argument("--spectrum", help="spectrum JSON file")
    gs.add_argument("--family", choices=["oscillator"], help="built-in spectrum")
    gs.add_argument("--energy", type=float, required=True)
    gs.set_defaults(func=cmd_gibbs_solve)

    bd = sub.add_parser("bounds", help="evaluate a bound on a pair of states")
    bsub = bd.add_subparsers(dest="bounds_command", required=True)
    be = bsub.add_parser("eval")
    be.add_argument("--bound", required=True)
    be.add_argument("--rho", required=True, help="matrix JSON file")
    be.add_argument("--sigma", required=True, help="matrix JSON file")
    be.add_argument("--omega", help="reference state (relative entropy bounds)")
    be.add_argument("--eps", type=float, default=None)
    be.add_argument("--dims", type=int, nargs=2)
    be.add_argument("--m", type=int, default=1)
    be.add_argument("--a", type=float, default=1.0)
    be.add_argument("--beta", type=float, default=1.0)
    be.add_argument("--c", type=float, default=0.5)
    be.add_argument("--energy", type=float, default=None)
    be.add_argument("--spectrum")
    be.add_argument("--family", choices=["oscillator"])
    be.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    be.set_defaults(func=cmd_bounds_eval)

    ef = sub.add_parser("eof", help="entanglement of formation")
    esub = ef.add_subparsers(dest="eof_command", required=True)
    ec = esub.add_parser("compute")
    ec.add_argument("--state", required=True)
    ec.add_argument("--dims", type=int, nargs=2, default=[2, 2])
    ec.add_argument("--restarts", type=int, default=32)
    ec.add_argument("--K", type=int, default=None)
    ec.add_argument("--seed", type=int, default=0)
    ec.set_defaults(func=cmd_eof_compute)

    vf = sub.add_parser("verify", help="randomized verification campaigns")
    vsub = vf.add_subparsers(dest="verify_command", required=True)
    vr = vsub.add_parser("run")
    vr.add_argument("--config", help="campaign JSON config")
    vr.add_argument("--bound")
    vr.add_argument("--seed", type=int)
    vr.add_argument("--samples", type=int)
    vr.add_argument("--epsilon", type=float, nargs="+",
                    help=f"epsilon grid (default {' '.join(map(str, DEFAULT_GRID))})")
    vr.add_argument("--out")
    vr.add_argument("--format", choices=["json", "csv"])
    vr.add_argument("--tolerance", type=float)
    vr.add_argument("--workers", type=int, default=None)
    vr.set_defaults(func=cmd_verify_run)
    vl = vsub.add_parser("list")
    vl.set_defaults(func=cmd_verify_list)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if getattr(args, "command", None) == "bounds" and args.eps is None and args.bound != "eof.scb.fidelity" \
            and args.bound not in ("afw.split", "mirsky"):
        parser.error("--eps is required for this bound")
    try:
        return int(args.func(args))
    except (ValidationError, RangeError, TruncationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
