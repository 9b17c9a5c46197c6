import json
import subprocess
import sys
import time

import pytest

from torusgeom.cli import main
from torusgeom.suites import (
    SUITE_CHECKS,
    SUITE_RUNNERS,
    SuiteConfig,
    SuiteReport,
    convergence_table,
    run_suites,
)

SMALL = {
    "grid_sizes": [32],
    "seeds": [0, 1, 2],
    "kmax": 4,
    "suites": ["kobayashi", "calculus"],
}


def write_config(tmp_path, data, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def strip_volatile(body: dict) -> dict:
    body = json.loads(json.dumps(body))
    body.pop("generated_at", None)
    body["summary"].pop("wall_time", None)
    for rec in body["records"]:
        rec.pop("wall_time", None)
    return body


# ------------------------------------------------------------ config layer


def test_config_rejects_unknown_suite():
    with pytest.raises(ValueError, match="unknown suite"):
        SuiteConfig(suites=("nope",))


def test_config_rejects_bad_grid():
    with pytest.raises(ValueError, match="grid_sizes"):
        SuiteConfig(grid_sizes=(7,))


def test_config_rejects_nonpositive_tolerance():
    with pytest.raises(ValueError, match="positive"):
        SuiteConfig(tolerances={"momentum": 0.0})


def test_config_rejects_unknown_field():
    with pytest.raises(ValueError, match="unknown config field"):
        SuiteConfig.from_dict({"grids": [64]})


def test_config_rejects_large_kmax():
    with pytest.raises(ValueError, match="kmax"):
        SuiteConfig(grid_sizes=(32,), kmax=8)


# ------------------------------------------------------------- suite runs


def test_kobayashi_suite_fast_and_all_pass():
    config = SuiteConfig(grid_sizes=(32,), seeds=tuple(range(5)), suites=("kobayashi",))
    t0 = time.perf_counter()
    report = run_suites(config)
    elapsed = time.perf_counter() - t0
    assert report.overall_pass
    assert elapsed < 1.0
    assert {r.name for r in report.records} == set(SUITE_CHECKS["kobayashi"])


def test_report_records_sorted_and_named():
    config = SuiteConfig(grid_sizes=(32,), seeds=(0, 1, 2), suites=("calculus", "kobayashi"))
    body = run_suites(config).to_dict()
    keys = [(r["suite"], r["name"], r["seed"], r["n"]) for r in body["records"]]
    assert keys == sorted(keys)
    for rec in body["records"]:
        assert rec["name"] in SUITE_CHECKS[rec["suite"]]
    assert body["schema"] == 1


def test_runner_turns_exceptions_into_failed_records(monkeypatch):
    def exploding(config):
        raise RuntimeError("synthetic blow-up")
        yield  # pragma: no cover

    from torusgeom import suites as suites_mod

    monkeypatch.setitem(SUITE_RUNNERS, "kobayashi", suites_mod._guarded(exploding))
    report = run_suites(SuiteConfig(grid_sizes=(32,), seeds=(0,), suites=("kobayashi",)))
    assert not report.overall_pass
    assert any("synthetic blow-up" in r.note for r in report.records)


def test_nan_residual_fails_record():
    from torusgeom.suites import _record

    rec = _record("momentum", "x", 0, 32, 4, float("nan"), 1e-8, time.perf_counter())
    assert not rec.passed


def test_momentum_suite_fifty_seeds_within_budget():
    config = SuiteConfig(grid_sizes=(64,), seeds=tuple(range(50)), suites=("momentum",))
    t0 = time.perf_counter()
    report = run_suites(config)
    elapsed = time.perf_counter() - t0
    assert report.overall_pass
    assert elapsed <= 60.0
    residual_records = [r for r in report.records if r.name == "momentum_residual"]
    assert len(residual_records) == 50
    assert sum(1 for r in residual_records if r.note == "harmonic") >= 10


def test_single_record_rerun():
    report = run_suites(
        SuiteConfig(grid_sizes=(32, 64), seeds=tuple(range(50))),
        record_filter=("momentum_residual", 7, 64),
    )
    assert len(report.records) == 1
    rec = report.records[0]
    assert (rec.name, rec.seed, rec.n) == ("momentum_residual", 7, 64)
    assert rec.passed


def test_single_record_unknown_name():
    with pytest.raises(ValueError, match="unknown record"):
        run_suites(SuiteConfig(), record_filter=("no_such_check", 0, 64))


def test_convergence_table_rows():
    config = SuiteConfig(grid_sizes=(32, 48, 64), seeds=(0, 1, 2), suites=("convergence",))
    report = run_suites(config)
    csv_text, warning = convergence_table(report)
    assert warning is None
    lines = csv_text.strip().splitlines()
    assert lines[0] == "check,N,residual,ratio,flag"
    dalpha_rows = [l for l in lines if l.startswith("dalpha_residual")]
    assert len(dalpha_rows) == 3
    last = dalpha_rows[-1].split(",")
    assert float(last[3]) <= 1e-2 and last[4] == "spectral"


def test_convergence_table_empty_warning():
    report = SuiteReport(SuiteConfig(), [], 0.0, [])
    csv_text, warning = convergence_table(report)
    assert warning is not None
    assert csv_text.strip() == "check,N,residual,ratio,flag"


# ------------------------------------------------------------------- CLI


def test_cli_pass_run(tmp_path):
    cfg = write_config(tmp_path, SMALL)
    out = tmp_path / "report.json"
    assert main(["--config", cfg, "--out", str(out)]) == 0
    body = json.loads(out.read_text())
    assert body["summary"]["overall_pass"] is True
    assert (tmp_path / "report_convergence.csv").exists()


def test_cli_exit_1_on_check_failure(tmp_path):
    cfg = write_config(tmp_path, {**SMALL, "tolerances": {"calculus": 1e-300}})
    out = tmp_path / "report.json"
    assert main(["--config", cfg, "--out", str(out)]) == 1
    body = json.loads(out.read_text())
    assert body["summary"]["failed"] > 0


def test_cli_exit_2_on_bad_json(tmp_path):
    bad = tmp_path / "broken.json"
    bad.write_text("{ not json")
    assert main(["--config", str(bad), "--out", str(tmp_path / "r.json")]) == 2


def test_cli_exit_2_on_unknown_suite(tmp_path):
    assert main(["--suites", "nonexistent", "--out", str(tmp_path / "r.json")]) == 2


def test_cli_exit_2_on_missing_config(tmp_path):
    assert main(["--config", str(tmp_path / "absent.json"), "--out", str(tmp_path / "r.json")]) == 2


def test_cli_record_flag(tmp_path):
    out = tmp_path / "single.json"
    code = main(["--record", "momentum_residual:3:64", "--out", str(out)])
    assert code == 0
    body = json.loads(out.read_text())
    assert [r["name"] for r in body["records"]] == ["momentum_residual"]
    assert body["records"][0]["seed"] == 3


def test_cli_record_flag_bad_spec(tmp_path):
    assert main(["--record", "momentum_residual:x:64", "--out", str(tmp_path / "r.json")]) == 2


def test_cli_deterministic_report_body(tmp_path):
    cfg = write_config(tmp_path, SMALL)
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    assert main(["--config", cfg, "--out", str(out1)]) == 0
    assert main(["--config", cfg, "--out", str(out2)]) == 0
    b1 = strip_volatile(json.loads(out1.read_text()))
    b2 = strip_volatile(json.loads(out2.read_text()))
    assert json.dumps(b1, sort_keys=True) == json.dumps(b2, sort_keys=True)


def test_cli_env_var_overrides_out_dir(tmp_path, monkeypatch):
    target = tmp_path / "elsewhere"
    monkeypatch.setenv("TORUSGEOM_REPORT_DIR", str(target))
    cfg = write_config(tmp_path, SMALL)
    assert main(["--config", cfg, "--out", "report.json"]) == 0
    assert (target / "report.json").exists()


def test_cli_entry_point_subprocess(tmp_path):
    cfg = write_config(tmp_path, {**SMALL, "suites": ["kobayashi"]})
    out = tmp_path / "r.json"
    proc = subprocess.run(
        [sys.executable, "-m", "torusgeom", "--config", cfg, "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "PASS" in proc.stdout


def test_cli_record_outside_sweep_is_usage_error(tmp_path):
    # the momentum sweep is defined at desk scale; an off-sweep N is exit 2
    assert main(["--record", "momentum_residual:7:8", "--out", str(tmp_path / "r.json")]) == 2
