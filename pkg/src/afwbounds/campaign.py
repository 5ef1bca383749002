"""Verification campaigns: sample pairs, evaluate a bound, aggregate slack statistics.

Each bound id in ``REGISTRY`` names the sample kinds that meet its
preconditions, an evaluator, and the dominance relations between its
variants that should hold on every sample. Every sample draws from its own
Philox stream keyed by ``(seed, bound_id, eps, index)``, so reports do not
depend on the number of workers or on evaluation order.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import bounds as B
from . import checks as C
from .gibbs import HamiltonianSpectrum, spectrum_from_dict
from .operators import ValidationError, negative_part
from .states import (
    GenerationError,
    _line_toward,
    commuting_pair,
    energy_constrained,
    extremal_energy_pair,
    generic_pair,
    make_rng,
    partial_majorized_pair,
    qc_pair,
    random_density,
)

DEFAULT_GRID = (0.01, 0.1, 0.3, 0.7)
DEFAULT_TOLERANCE = 1e-9
DOMINANCE_TOL = 1e-12
WORKERS_ENV = "AFWB_WORKERS"

SAMPLE_KINDS = ("generic", "commuting_pair", "qc_pair", "energy_constrained",
                "majorized_pair", "extremal_energy_pair")


class ConfigError(ValidationError):
    """Campaign configuration is inconsistent."""


# -- sampling -------------------------------------------------------------------


def _choice(rng, options):
    return options[int(rng.integers(len(options)))]


def draw_sample(spec: dict, eps: float, rng) -> dict:
    """Draw one pair according to a sample spec.

    ``spec["dims"]`` lists candidate dimension tuples (``[d]`` for a single
    system, ``[dA, dB]`` for a bipartite one, ``[dA, blocks]`` for q-c
    pairs); one is picked per sample.
    """
    kind = spec["kind"]
    dims = tuple(_choice(rng, spec["dims"]))
    dim = int(np.prod(dims))
    ham = spectrum_from_dict(spec.get("spectrum", {"family": "oscillator"}))
    out = {"kind": kind, "dims": dims, "spec": ham}
    if kind == "generic":
        out["rho"], out["sigma"] = generic_pair(dim, eps, rng)
    elif kind == "commuting_pair":
        out["rho"], out["sigma"] = commuting_pair(dim, eps, rng)
    elif kind == "majorized_pair":
        m = int(_choice(rng, spec.get("m", [1, 2])))
        out["m"] = m
        out["rho"], out["sigma"] = partial_majorized_pair(dim, m, eps, rng)
    elif kind == "qc_pair":
        out["rho_qc"], out["sigma_qc"] = qc_pair(dims[0], dims[1], eps, rng)
        out["rho"], out["sigma"] = out["rho_qc"].matrix(), out["sigma_qc"].matrix()
    elif kind == "energy_constrained":
        E = float(spec["E"]) if "E" in spec else float(rng.uniform(0.2, 3.0))
        rho = energy_constrained(ham, E, dim, rng)
        tau = energy_constrained(ham, E, dim, rng)
        out["rho"], out["sigma"], out["E"] = rho, _line_toward(rho, tau, eps), E
    elif kind == "extremal_energy_pair":
        k = int(_choice(rng, spec.get("k", [2, 3, 5])))
        out["k"] = k
        out["rho"], out["sigma"] = extremal_energy_pair(ham, k, eps, max(dim, k))
    else:
        raise ConfigError(f"unknown sample kind {kind!r}; known kinds: {', '.join(SAMPLE_KINDS)}")
    return out


def _a(rng, s, options):
    return float(_choice(rng, s.get("a_values", options)))


# -- evaluators --------------------------------------------------------------------
# Each takes (sample, eps, rng, spec) and returns a BoundEvaluation. ``rng``
# continues the sample's stream for auxiliary draws (exponents, constants).


def _ev_scb_rank(s, eps, rng, sp):
    return B.entropy_scb_rank(s["rho"], s["sigma"], s["m"], eps)


def _ev_scb_energy(s, eps, rng, sp):
    return B.entropy_scb_energy(s["rho"], s["sigma"], s["spec"], s["m"], eps)


def _ev_truncation(s, eps, rng, sp):
    return B.entropy_truncation_scb(s["rho"], s["sigma"], eps)


def _ev_llb(s, eps, rng, sp):
    return B.entropy_llb(s["rho"], s["sigma"], eps)


def _ev_energy_scb(s, eps, rng, sp):
    a = 1.0 if s["kind"] == "extremal_energy_pair" else float(_choice(rng, sp.get("a_values", [1, 2, 4])))
    return B.energy_scb(s["rho"], s["sigma"], s["spec"], a, eps)


def _ev_energy_cb(s, eps, rng, sp):
    return B.energy_cb(s["rho"], s["sigma"], s["spec"], _a(rng, sp, [2, 4]), eps)


def _ev_re_gibbs(s, eps, rng, sp):
    beta = float(rng.uniform(0.2, 2.0))
    return B.re_gibbs_cb(s["rho"], s["sigma"], s["spec"], beta, _a(rng, sp, [2, 4]), eps)


def _ev_re_faithful(s, eps, rng, sp):
    omega = random_density(s["rho"].shape[0], None, rng)
    c = float(rng.uniform(0.3, 3.0))
    return B.re_faithful_cb(s["rho"], s["sigma"], omega, c, _a(rng, sp, [2, 4]), eps)


def _ev_re_dominated(s, eps, rng, sp):
    rho, sigma = s["rho"], s["sigma"]
    d = rho.shape[0]
    c = float(rng.uniform(0.05, 0.95))
    if s["kind"] == "commuting_pair":
        tau = random_density(d, None, rng)
    else:
        # tau diagonal in rho's eigenbasis, so [rho, omega] = 0
        _, V = np.linalg.eigh(rho)
        tau = (V * rng.dirichlet(np.ones(d))) @ V.conj().T
    omega = c * rho + (1 - c) * tau
    return B.re_dominated_scb(rho, sigma, (omega + omega.conj().T) / 2, c, eps, mode="scb")


def _ev_re_dominated_two_sided(s, eps, rng, sp):
    rho, sigma = s["rho"], s["sigma"]
    d = rho.shape[0]
    upper = rho + negative_part(rho - sigma)  # max(rho, sigma) for commuting states
    t = float(np.trace(upper).real)
    c = float(rng.uniform(0.05, 0.95)) / t
    omega = c * upper + (1 - c * t) * random_density(d, None, rng)
    return B.re_dominated_scb(rho, sigma, (omega + omega.conj().T) / 2, c, eps, mode="two_sided")


def _ev_qce_rank(s, eps, rng, sp):
    return B.qce_commuting_cb(s["rho"], s["sigma"], s["dims"], eps)


def _ev_qce_energy(s, eps, rng, sp):
    return B.qce_commuting_cb(s["rho"], s["sigma"], s["dims"], eps, spec=s["spec"])


def _ev_qc_rank(s, eps, rng, sp):
    return B.qce_qc_scb(s["rho_qc"], s["sigma_qc"], eps)


def _ev_qc_energy(s, eps, rng, sp):
    return B.qce_qc_scb(s["rho_qc"], s["sigma_qc"], eps, spec=s["spec"])


def _ev_qc_trunc(s, eps, rng, sp):
    return B.qce_qc_truncation_and_llb(s["rho_qc"], s["sigma_qc"], eps)[0]


def _ev_qc_llb(s, eps, rng, sp):
    return B.qce_qc_truncation_and_llb(s["rho_qc"], s["sigma_qc"], eps)[1]


def _ev_eof_rank(s, eps, rng, sp):
    return B.eof_scb(s["rho"], s["sigma"], s["dims"], eps=eps)


def _ev_eof_energy(s, eps, rng, sp):
    return B.eof_scb(s["rho"], s["sigma"], s["dims"], eps=eps, spec=s["spec"])


def _ev_eof_fidelity(s, eps, rng, sp):
    from .operators import fidelity

    return B.eof_scb(s["rho"], s["sigma"], s["dims"], fidelity_value=fidelity(s["rho"], s["sigma"]))


def _ev_split(s, eps, rng, sp):
    return C.afw_split_check(s["rho"], s["sigma"])


def _ev_mirsky(s, eps, rng, sp):
    return C.mirsky_check(s["rho"], s["sigma"])


def _ev_fvdg_upper(s, eps, rng, sp):
    return C.fvdg_check(s["rho"], s["sigma"])[0]


def _ev_fvdg_lower(s, eps, rng, sp):
    return C.fvdg_check(s["rho"], s["sigma"])[1]


def _ev_mixing(which, idx):
    def ev(s, eps, rng, sp):
        if which == "entropy":
            return C.entropy_mixing_check(s["rho"], s["sigma"], eps)[idx]
        fn = C.qce_mixing_check if which == "qce" else C.mi_mixing_check
        return fn(s["rho"], s["sigma"], s["dims"], eps)[idx]

    return ev


def _positive_ops(s, rng):
    """Rescale the pair to unnormalized positive operators."""
    a, b = rng.uniform(0.2, 3.0, size=2)
    return a * s["rho"], b * s["sigma"]


def _ev_relent_scaling(s, eps, rng, sp):
    rho, sigma = _positive_ops(s, rng)
    return C.relent_scaling_check(rho, sigma, float(rng.uniform(0.1, 5.0)))


def _ev_relent_constant(s, eps, rng, sp):
    rho, sigma = _positive_ops(s, rng)
    return C.relent_constant_check(rho, sigma, float(rng.uniform(0.1, 5.0)))


def _ev_relent_subadditive(s, eps, rng, sp):
    rho, sigma = _positive_ops(s, rng)
    d = rho.shape[0]
    omega = float(rng.uniform(0.0, 2.0)) * random_density(d, int(rng.integers(1, d + 1)), rng)
    return C.relent_subadditive_check(rho, sigma, omega)


def _ev_generic_rank(name):
    def ev(s, eps, rng, sp):
        return C.generic_rank_check(name, s["rho"], s["sigma"], eps, s["dims"])

    return ev


def _ev_generic_energy(name, one_sided):
    def ev(s, eps, rng, sp):
        return C.generic_energy_check(name, s["rho"], s["sigma"], s["spec"], eps, s["dims"],
                                      one_sided=one_sided)

    return ev


# -- registry -------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundEntry:
    bound_id: str
    kinds: tuple
    evaluate: object
    default_sample: dict
    dominance: tuple = ()  # (refined, loose, strict); "main" is the bound value
    description: str = ""


def _entry(bound_id, kinds, ev, sample, dominance=(), description=""):
    return BoundEntry(bound_id, tuple(kinds), ev, sample, tuple(dominance), description)


SINGLE = [[2], [3], [4], [6]]
SMALL = [[3], [4], [6]]
BIPARTITE = [[2, 2], [2, 3], [3, 2], [3, 3]]
QC = [[2, 2], [3, 2], [2, 3], [4, 2]]
ENERGY = [[3], [4], [6]]
OSC = {"family": "oscillator"}

REGISTRY: dict[str, BoundEntry] = {e.bound_id: e for e in [
    _entry("entropy.scb.rank", ["majorized_pair"], _ev_scb_rank,
           {"kind": "majorized_pair", "dims": SMALL, "m": [1, 2]},
           description="entropy, rank constraint with m-partial majorization"),
    _entry("entropy.scb.energy", ["majorized_pair"], _ev_scb_energy,
           {"kind": "majorized_pair", "dims": SMALL, "m": [1, 2], "spectrum": OSC},
           [("main", "simple", False)], "entropy, energy constraint with m-partial majorization"),
    _entry("entropy.scb.truncation", ["generic", "commuting_pair"], _ev_truncation,
           {"kind": "generic", "dims": SINGLE}, description="entropy, truncation form"),
    _entry("entropy.llb", ["generic", "commuting_pair"], _ev_llb,
           {"kind": "generic", "dims": SINGLE}, description="entropy, local lower bound"),
    _entry("energy.scb", ["energy_constrained", "extremal_energy_pair", "generic"], _ev_energy_scb,
           {"kind": "energy_constrained", "dims": ENERGY, "spectrum": OSC, "a_values": [1, 2, 4]},
           [("main", "simple", False)], "energy, one-sided"),
    _entry("energy.cb", ["energy_constrained", "generic"], _ev_energy_cb,
           {"kind": "energy_constrained", "dims": ENERGY, "spectrum": OSC, "a_values": [2, 4]},
           description="energy, two-sided under a higher moment"),
    _entry("relent.cb.gibbs", ["energy_constrained", "generic"], _ev_re_gibbs,
           {"kind": "energy_constrained", "dims": ENERGY, "spectrum": OSC, "a_values": [2, 4]},
           [("threshold", "main", False)], "relative entropy to a Gibbs state"),
    _entry("relent.cb.faithful", ["generic", "commuting_pair"], _ev_re_faithful,
           {"kind": "generic", "dims": SINGLE, "a_values": [2, 4]},
           description="relative entropy to a faithful state"),
    _entry("relent.scb.dominated", ["commuting_pair", "generic"], _ev_re_dominated,
           {"kind": "commuting_pair", "dims": SINGLE},
           [("envelope", "main", False), ("exact", "envelope", False)],
           "relative entropy, dominated reference"),
    _entry("relent.cb.dominated", ["commuting_pair"], _ev_re_dominated_two_sided,
           {"kind": "commuting_pair", "dims": SINGLE},
           [("envelope", "main", False), ("exact", "envelope", False)],
           "relative entropy, dominated reference, two-sided"),
    _entry("qce.cb.commuting.rank", ["commuting_pair"], _ev_qce_rank,
           {"kind": "commuting_pair", "dims": BIPARTITE},
           [("main", "h_up", False), ("h_up", "winter", True)], "conditional entropy, commuting, rank"),
    _entry("qce.cb.commuting.energy", ["commuting_pair"], _ev_qce_energy,
           {"kind": "commuting_pair", "dims": BIPARTITE, "spectrum": OSC},
           description="conditional entropy, commuting, energy"),
    _entry("qce.qc.scb.rank", ["qc_pair"], _ev_qc_rank, {"kind": "qc_pair", "dims": QC},
           [("main", "h_up", False)], "conditional entropy, q-c, rank"),
    _entry("qce.qc.scb.energy", ["qc_pair"], _ev_qc_energy,
           {"kind": "qc_pair", "dims": QC, "spectrum": OSC},
           [("main", "loose", False)], "conditional entropy, q-c, energy"),
    _entry("qce.qc.scb.truncation", ["qc_pair"], _ev_qc_trunc, {"kind": "qc_pair", "dims": QC},
           description="conditional entropy, q-c, truncation form"),
    _entry("qce.qc.llb", ["qc_pair"], _ev_qc_llb, {"kind": "qc_pair", "dims": QC},
           description="conditional entropy, q-c, local lower bound"),
    _entry("eof.scb.rank", ["generic"], _ev_eof_rank, {"kind": "generic", "dims": [[2, 2]]},
           description="entanglement of formation, rank"),
    _entry("eof.scb.energy", ["generic"], _ev_eof_energy,
           {"kind": "generic", "dims": [[2, 2]], "spectrum": OSC},
           description="entanglement of formation, energy"),
    _entry("eof.scb.fidelity", ["generic"], _ev_eof_fidelity, {"kind": "generic", "dims": [[2, 2]]},
           description="entanglement of formation, fidelity distance"),
    _entry("afw.split", ["commuting_pair"], _ev_split, {"kind": "commuting_pair", "dims": SINGLE},
           description="entropy split inequality for commuting pairs"),
    _entry("mirsky", ["generic", "commuting_pair"], _ev_mirsky, {"kind": "generic", "dims": SINGLE},
           description="spectral perturbation in trace norm"),
    _entry("fidelity.fvdg.upper", ["generic"], _ev_fvdg_upper, {"kind": "generic", "dims": SINGLE}),
    _entry("fidelity.fvdg.lower", ["generic"], _ev_fvdg_lower, {"kind": "generic", "dims": SINGLE}),
    _entry("entropy.mixing", ["generic"], _ev_mixing("entropy", 0), {"kind": "generic", "dims": SINGLE}),
    _entry("entropy.concavity", ["generic"], _ev_mixing("entropy", 1), {"kind": "generic", "dims": SINGLE}),
    _entry("qce.mixing", ["generic"], _ev_mixing("qce", 0), {"kind": "generic", "dims": BIPARTITE}),
    _entry("qce.concavity", ["generic"], _ev_mixing("qce", 1), {"kind": "generic", "dims": BIPARTITE}),
    _entry("mi.mixing.lower", ["generic"], _ev_mixing("mi", 0), {"kind": "generic", "dims": BIPARTITE}),
    _entry("mi.mixing.upper", ["generic"], _ev_mixing("mi", 1), {"kind": "generic", "dims": BIPARTITE}),
    _entry("relent.scaling", ["generic"], _ev_relent_scaling, {"kind": "generic", "dims": SINGLE}),
    _entry("relent.constant", ["generic"], _ev_relent_constant, {"kind": "generic", "dims": SINGLE}),
    _entry("relent.subadditive", ["generic"], _ev_relent_subadditive, {"kind": "generic", "dims": SINGLE}),
    _entry("generic.rank.entropy", ["commuting_pair"], _ev_generic_rank("entropy"),
           {"kind": "commuting_pair", "dims": SINGLE}, [("main", "h_up", False)]),
    _entry("generic.rank.qce", ["commuting_pair"], _ev_generic_rank("qce"),
           {"kind": "commuting_pair", "dims": BIPARTITE}, [("main", "h_up", False)]),
    _entry("generic.rank.mi", ["commuting_pair"], _ev_generic_rank("mi"),
           {"kind": "commuting_pair", "dims": BIPARTITE}, [("main", "h_up", False)]),
    _entry("generic.energy.entropy", ["commuting_pair"], _ev_generic_energy("entropy", False),
           {"kind": "commuting_pair", "dims": SINGLE, "spectrum": OSC}),
    _entry("generic.energy.entropy.refined", ["commuting_pair"], _ev_generic_energy("entropy", True),
           {"kind": "commuting_pair", "dims": SINGLE, "spectrum": OSC}, [("main", "loose", False)]),
    _entry("generic.energy.mi", ["commuting_pair"], _ev_generic_energy("mi", False),
           {"kind": "commuting_pair", "dims": BIPARTITE, "spectrum": OSC}),
    _entry("generic.energy.mi.refined", ["commuting_pair"], _ev_generic_energy("mi", True),
           {"kind": "commuting_pair", "dims": BIPARTITE, "spectrum": OSC}, [("main", "loose", False)]),
]}


# -- configuration and reports ------------------------------------------------------------


@dataclass
class CampaignConfig:
    bound_id: str
    sample: dict | None = None
    samples: int = 1000
    epsilon_grid: tuple = DEFAULT_GRID
    tolerance: float = DEFAULT_TOLERANCE
    seed: int = 0
    out: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.bound_id not in REGISTRY:
            raise ConfigError(f"unknown bound id {self.bound_id!r}")
        if int(self.samples) < 1:
            raise ValidationError(f"samples must be >= 1, got {self.samples}")
        self.samples = int(self.samples)
        self.epsilon_grid = tuple(float(e) for e in self.epsilon_grid)
        if not self.epsilon_grid or any(not 0 < e <= 1 for e in self.epsilon_grid):
            raise ValidationError("epsilon grid must be nonempty and within (0, 1]")
        entry = REGISTRY[self.bound_id]
        merged = dict(entry.default_sample)
        merged.update(self.sample or {})
        if merged["kind"] not in entry.kinds:
            raise ConfigError(f"sample kind {merged['kind']!r} does not fit {self.bound_id}; "
                              f"compatible kinds: {', '.join(entry.kinds)}")
        self.sample = merged
        if self.format not in ("json", "csv"):
            raise ConfigError(f"unknown report format {self.format!r}")

    @classmethod
    def from_dict(cls, d: dict) -> "CampaignConfig":
        known = {"bound_id", "sample", "samples", "epsilon_grid", "tolerance", "seed", "out", "format"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        return cls(**d)


@dataclass
class CampaignReport:
    bound_id: str
    rows: list
    seed: int
    version: str
    sample: dict = field(default_factory=dict)
    tolerance: float = DEFAULT_TOLERANCE
    runtime: float = 0.0

    @property
    def violations(self) -> int:
        return int(sum(r["violations"] for r in self.rows))

    @property
    def dominance_violations(self) -> int:
        return int(sum(r.get("dominance_violations", 0) for r in self.rows))

    def to_dict(self) -> dict:
        meta = {"seed": self.seed, "version": self.version, "tolerance": self.tolerance,
                "sample": self.sample}
        body = {"bound_id": self.bound_id, "rows": self.rows, "meta": meta}
        meta["digest"] = report_digest(body)
        meta["runtime"] = self.runtime
        return body

    @classmethod
    def from_dict(cls, d: dict) -> "CampaignReport":
        m = d["meta"]
        return cls(d["bound_id"], d["rows"], m["seed"], m["version"], m.get("sample", {}),
                   m.get("tolerance", DEFAULT_TOLERANCE), m.get("runtime", 0.0))

    @property
    def digest(self) -> str:
        return self.to_dict()["meta"]["digest"]


def report_digest(body: dict) -> str:
    """SHA-256 of the report without its runtime field."""
    clean = {"bound_id": body["bound_id"], "rows": body["rows"],
             "meta": {k: v for k, v in body["meta"].items() if k not in ("runtime", "digest")}}
    return hashlib.sha256(json.dumps(clean, sort_keys=True).encode()).hexdigest()


def version_tag() -> str:
    return f"afwbounds-{__version__}"


def sample_stream(bound_id: str, eps: float, index: int) -> int:
    """64-bit stream id for one sample."""
    h = hashlib.blake2b(f"{bound_id}|{eps!r}|{index}".encode(), digest_size=8)
    return int.from_bytes(h.digest(), "little")


def _dominance(ev: B.BoundEvaluation, pairs) -> tuple[int, int]:
    checked = failed = 0
    values = dict(ev.variants)
    values["main"] = ev.bound_value
    for refined, loose, strict in pairs:
        if refined not in values or loose not in values:
            continue
        r, l = values[refined], values[loose]
        checked += 1
        tol = DOMINANCE_TOL * max(1.0, abs(l))
        if (strict and not r < l) or r > l + tol:
            failed += 1
    return checked, failed


def evaluate_sample(bound_id: str, sample_spec: dict, eps: float, seed: int, index: int) -> dict:
    """Generate and evaluate one sample; the result is a plain dict."""
    entry = REGISTRY[bound_id]
    rng = make_rng(seed, sample_stream(bound_id, eps, index))
    try:
        s = draw_sample(sample_spec, eps, rng)
        ev = entry.evaluate(s, eps, rng, sample_spec)
    except (GenerationError, B.PreconditionError) as exc:
        return {"index": index, "excluded": True, "reason": type(exc).__name__ + ": " + str(exc)}
    checked, failed = _dominance(ev, entry.dominance)
    return {"index": index, "excluded": False, "slack": ev.slack, "bound": ev.bound_value,
            "gap": ev.measured_gap, "tightness": ev.tightness, "vacuous": ev.vacuous,
            "dom_checked": checked, "dom_failed": failed}


def _run_chunk(args):
    bound_id, sample_spec, eps, seed, start, stop = args
    return [evaluate_sample(bound_id, sample_spec, eps, seed, i) for i in range(start, stop)]


def _aggregate(eps: float, results: list, tol: float) -> dict:
    kept = [r for r in results if not r["excluded"]]
    live = [r for r in kept if not r["vacuous"]]
    slacks = np.array([r["slack"] for r in live], dtype=float)
    viol = int(sum(1 for r in live if r["slack"] < -tol * max(1.0, abs(r["bound"]))))
    tight = np.array([r["tightness"] for r in live], dtype=float)
    return {
        "epsilon": eps,
        "samples": len(kept),
        "violations": viol,
        "min_slack": float(slacks.min()) if slacks.size else None,
        "median_slack": float(np.median(slacks)) if slacks.size else None,
        "p95_tightness": float(np.percentile(tight, 95)) if tight.size else None,
        "vacuous": len(kept) - len(live),
        "excluded": len(results) - len(kept),
        "dominance_checks": int(sum(r["dom_checked"] for r in kept)),
        "dominance_violations": int(sum(r["dom_failed"] for r in kept)),
    }


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def run_campaign(cfg: CampaignConfig, workers: int | None = None) -> CampaignReport:
    """Evaluate ``cfg.samples`` samples per epsilon and aggregate the slack statistics."""
    workers = default_workers() if workers is None else max(1, int(workers))
    t0 = time.perf_counter()
    rows = []
    for eps in cfg.epsilon_grid:
        if workers == 1:
            results = _run_chunk((cfg.bound_id, cfg.sample, eps, cfg.seed, 0, cfg.samples))
        else:
            step = math.ceil(cfg.samples / workers)
            jobs = [(cfg.bound_id, cfg.sample, eps, cfg.seed, a, min(a + step, cfg.samples))
                    for a in range(0, cfg.samples, step)]
            with ProcessPoolExecutor(workers) as pool:
                results = [r for chunk in pool.map(_run_chunk, jobs) for r in chunk]
        results.sort(key=lambda r: r["index"])
        rows.append(_aggregate(eps, results, cfg.tolerance))
    return CampaignReport(cfg.bound_id, rows, cfg.seed, version_tag(), dict(cfg.sample),
                          cfg.tolerance, round(time.perf_counter() - t0, 3))


CSV_COLUMNS = ("epsilon", "samples", "violations", "min_slack", "median_slack", "p95_tightness")


def report_csv(report: CampaignReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in report.rows:
        w.writerow(["" if r[c] is None else repr(r[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def report_json(report: CampaignReport) -> str:
    return json.dumps(report.to_dict(), indent=2, default=_json_default)


def _json_default(o):
    if isinstance(o, HamiltonianSpectrum):
        return o.to_dict()
    if isinstance(o, (np.integer, np.floating)):
        return o.item()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def emit_report(report: CampaignReport, path, fmt: str = "json") -> Path:
    """Write the report as JSON or CSV; IO failures name the path."""
    text = report_json(report) if fmt == "json" else report_csv(report) if fmt == "csv" else None
    if text is None:
        raise ConfigError(f"unknown report format {fmt!r}")
    path = Path(path)
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc
    return path


def load_config(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc


def config_as_dict(cfg: CampaignConfig) -> dict:
    return asdict(cfg)
