import csv
import io
import json

import numpy as np
import pytest

from afwbounds.campaign import (
    CSV_COLUMNS,
    REGISTRY,
    SAMPLE_KINDS,
    CampaignConfig,
    CampaignReport,
    ConfigError,
    draw_sample,
    emit_report,
    evaluate_sample,
    load_config,
    report_csv,
    report_digest,
    run_campaign,
    sample_stream,
)
from afwbounds.operators import ValidationError, trace_distance
from afwbounds.states import GenerationError, make_rng


def small(bound_id, **kw):
    kw.setdefault("samples", 20)
    kw.setdefault("epsilon_grid", (0.1, 0.7))
    return CampaignConfig(bound_id, **kw)


def test_registry_ids_and_kinds():
    assert len(REGISTRY) == 39
    for bid, entry in REGISTRY.items():
        assert entry.bound_id == bid
        assert set(entry.kinds) <= set(SAMPLE_KINDS)
        assert entry.default_sample["kind"] in entry.kinds


@pytest.mark.parametrize("kind", SAMPLE_KINDS)
def test_draw_sample_kinds(kind):
    spec = {"kind": kind, "dims": [[2, 2]] if kind == "qc_pair" else [[4]]}
    s = draw_sample(spec, 0.3, make_rng(1))
    assert s["rho"].shape == s["sigma"].shape
    if kind in ("commuting_pair", "majorized_pair", "extremal_energy_pair"):
        assert trace_distance(s["rho"], s["sigma"]) == pytest.approx(0.3, abs=1e-10)
    else:
        assert trace_distance(s["rho"], s["sigma"]) <= 0.3 + 1e-10


def test_draw_sample_unknown_kind():
    with pytest.raises(ConfigError, match="known kinds"):
        draw_sample({"kind": "bogus", "dims": [[2]]}, 0.1, make_rng(0))


def test_config_validation():
    with pytest.raises(ValidationError):
        CampaignConfig("entropy.llb", samples=0)
    with pytest.raises(ValidationError):
        CampaignConfig("entropy.llb", epsilon_grid=(0.0, 0.5))
    with pytest.raises(ConfigError, match="unknown bound"):
        CampaignConfig("nope")
    with pytest.raises(ConfigError, match="compatible kinds: majorized_pair"):
        CampaignConfig("entropy.scb.rank", sample={"kind": "qc_pair"})
    with pytest.raises(ConfigError, match="unknown config keys"):
        CampaignConfig.from_dict({"bound_id": "entropy.llb", "colour": 1})


def test_sample_stream_distinct():
    ids = {sample_stream("a", e, i) for e in (0.1, 0.3) for i in range(50)}
    assert len(ids) == 100


def test_evaluate_sample_rejects_impossible_spec():
    with pytest.raises(ValidationError, match="dim > m"):
        evaluate_sample("entropy.scb.rank", {"kind": "majorized_pair", "dims": [[2]], "m": [2]}, 0.1, 0, 0)


def test_generation_failures_are_excluded(monkeypatch):
    import afwbounds.campaign as C

    def fail(spec, eps, rng):
        raise GenerationError("no sample")

    monkeypatch.setattr(C, "draw_sample", fail)
    out = evaluate_sample("mirsky", REGISTRY["mirsky"].default_sample, 0.1, 0, 0)
    assert out["excluded"] and "GenerationError" in out["reason"]
    rep = run_campaign(small("mirsky", samples=3))
    assert all(r["excluded"] == 3 and r["samples"] == 0 and r["min_slack"] is None for r in rep.rows)
    assert report_csv(rep).splitlines()[1] == "0.1,0,0,,,"


@pytest.mark.parametrize("bid", ["entropy.scb.rank", "qce.qc.scb.energy", "relent.scb.dominated",
                                 "generic.energy.mi.refined", "afw.split"])
def test_small_campaigns_pass(bid):
    rep = run_campaign(small(bid))
    assert rep.violations == 0
    assert rep.dominance_violations == 0
    for row in rep.rows:
        assert row["samples"] + row["excluded"] == 20
        assert row["min_slack"] <= row["median_slack"]


def test_extremal_campaign_has_zero_slack():
    rep = run_campaign(small("energy.scb", sample={"kind": "extremal_energy_pair"}))
    for row in rep.rows:
        assert abs(row["min_slack"]) <= 1e-12
        assert row["p95_tightness"] == pytest.approx(1.0, abs=1e-12)


def test_violation_count_matches_slacks():
    # a negative tolerance turns every sample with slack below |tol| into a violation
    rep = run_campaign(small("mirsky", tolerance=-1e6))
    assert rep.violations == sum(r["samples"] - r["vacuous"] for r in rep.rows)


def test_determinism_and_digest():
    a = run_campaign(small("entropy.llb", seed=5))
    b = run_campaign(small("entropy.llb", seed=5))
    c = run_campaign(small("entropy.llb", seed=6))
    assert a.digest == b.digest
    assert a.digest != c.digest
    body = a.to_dict()
    assert body["meta"]["digest"] == report_digest(body)


def test_json_round_trip(tmp_path):
    rep = run_campaign(small("qce.qc.llb"))
    path = emit_report(rep, tmp_path / "r.json", "json")
    back = CampaignReport.from_dict(json.loads(path.read_text()))
    assert back.to_dict() == json.loads(path.read_text())
    assert back.digest == rep.digest


def test_same_seed_files_identical_modulo_runtime(tmp_path):
    p1 = emit_report(run_campaign(small("mirsky")), tmp_path / "a.json")
    p2 = emit_report(run_campaign(small("mirsky")), tmp_path / "b.json")
    d1, d2 = json.loads(p1.read_text()), json.loads(p2.read_text())
    d1["meta"].pop("runtime")
    d2["meta"].pop("runtime")
    assert d1 == d2


def test_csv_columns_and_header_only(tmp_path):
    rep = run_campaign(small("mirsky"))
    rows = list(csv.reader(io.StringIO(report_csv(rep))))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 3
    empty = CampaignReport("mirsky", [], 0, "v")
    assert report_csv(empty) == ",".join(CSV_COLUMNS) + "\n"
    path = emit_report(empty, tmp_path / "e.csv", "csv")
    assert path.read_text() == ",".join(CSV_COLUMNS) + "\n"


def test_emit_report_errors(tmp_path):
    rep = CampaignReport("mirsky", [], 0, "v")
    with pytest.raises(OSError, match="missing"):
        emit_report(rep, tmp_path / "missing" / "r.json")
    with pytest.raises(ConfigError):
        emit_report(rep, tmp_path / "r.txt", "xml")


def test_load_config(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"bound_id": "mirsky", "samples": 3}))
    cfg = CampaignConfig.from_dict(load_config(p))
    assert cfg.samples == 3
    p.write_text("{not json")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_config(p)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.json")


def test_workers_do_not_change_report():
    cfg = small("entropy.scb.truncation", samples=12)
    assert run_campaign(cfg, workers=1).digest == run_campaign(cfg, workers=2).digest


def test_default_workers_env(monkeypatch):
    from afwbounds.campaign import default_workers
    monkeypatch.setenv("AFWB_WORKERS", "3")
    assert default_workers() == 3
    monkeypatch.setenv("AFWB_WORKERS", "x")
    assert default_workers() == 1


def test_rows_are_json_safe():
    rep = run_campaign(small("relent.cb.gibbs", samples=5))
    text = json.dumps(rep.to_dict())
    assert np.isfinite(json.loads(text)["rows"][0]["min_slack"])
