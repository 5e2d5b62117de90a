import json
import os

import numpy as np
import pytest

from gpchain import models
from gpchain.cli import main


def _write_cfg(tmp_path, payload, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def test_verify_derivation_passes(tmp_path):
    out = tmp_path / "v"
    rc = main(["verify-derivation", "--out", str(out)])
    assert rc == 0
    report = (out / "verify_report.txt").read_text()
    assert report.count("ok  ") == 8
    assert "FAIL" not in report
    assert report.strip().endswith("overall: ok")
    summary = json.loads((out / "verify_summary.json").read_text())
    assert summary["status"] == "ok"
    assert len(summary["checks"]) == 8
    names = {c["name"] for c in summary["checks"]}
    assert "matrix-oracle" in names and "jordan-wigner-identity" in names


def test_verify_detects_tampered_hamiltonian(tmp_path, monkeypatch):
    real = models.build_xxz_bosonized
    monkeypatch.setattr(
        models, "build_xxz_bosonized",
        lambda *a, **k: real(*a, **k) + real(*a, **k))
    out = tmp_path / "v"
    rc = main(["verify-derivation", "--out", str(out)])
    assert rc == 1
    report = (out / "verify_report.txt").read_text()
    assert "FAIL" in report
    assert report.strip().endswith("overall: failed")


def test_config_errors_exit_2(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, {"verify": {"N": 3}})
    assert main(["verify-derivation", "--config", cfg]) == 2
    assert "config error" in capsys.readouterr().err
    cfg2 = _write_cfg(tmp_path, {"modle": {}}, "typo.json")
    assert main(["simulate", "--config", cfg2]) == 2
    assert main(["study", "--config", _write_cfg(tmp_path, {}, "e.json")]) == 2


def test_dry_run_prints_plan_only(tmp_path, capsys):
    out = tmp_path / "never"
    rc = main(["simulate", "--out", str(out), "--dry-run"])
    assert rc == 0
    plan = json.loads(capsys.readouterr().out)
    assert plan["command"] == "simulate"
    assert plan["config"]["equation"] == "xxz-lattice"
    assert not out.exists()


def _gp_config(tmp_path, name="gp.json"):
    return _write_cfg(tmp_path, {
        "equation": "gp",
        "grid": {"L": 20.0, "M": 64},
        "integrator": {"dt": 1e-3, "t_end": 0.1},
        "initial": {"profile": "sech-soliton", "eta": 1.0},
    }, name)


def test_simulate_gp_outputs_and_determinism(tmp_path):
    cfg = _gp_config(tmp_path)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "--config", cfg, "--out", str(a)]) == 0
    assert main(["simulate", "--config", cfg, "--out", str(b)]) == 0
    for fname in ("field.csv", "run_summary.json"):
        assert (a / fname).read_bytes() == (b / fname).read_bytes()
    summary = json.loads((a / "run_summary.json").read_text())
    assert summary["status"] == "ok"
    n0 = summary["initial_observables"]["norm"]
    n1 = summary["final_observables"]["norm"]
    assert abs(n1 - n0) < 1e-10 * n0
    lines = (a / "field.csv").read_text().splitlines()
    assert lines[0] == "xi,flavor,re,im"
    assert len(lines) == 1 + 64


def test_simulate_xxz_lattice_trajectory(tmp_path):
    cfg = _write_cfg(tmp_path, {
        "equation": "xxz-lattice",
        "model": {"N": 8, "J0": 1.0, "R0": 0.5},
        "integrator": {"dt": 1e-3, "t_end": 0.05},
        "initial": {"profile": "gaussian", "amplitude": 0.3, "width": 2.0},
    })
    out = tmp_path / "lat"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    lines = (out / "trajectory.csv").read_text().splitlines()
    assert lines[0] == "time,site,flavor,re,im"
    # initial and final snapshot, one flavor, eight sites
    assert len(lines) == 1 + 2 * 8
    summary = json.loads((out / "run_summary.json").read_text())
    drift = abs(summary["final_observables"]["norm"]
                - summary["initial_observables"]["norm"])
    assert drift < 1e-10


def test_simulate_precursor_reports_transform(tmp_path):
    cfg = _write_cfg(tmp_path, {
        "equation": "precursor",
        "model": {"N": 8, "J0": 1.0, "R0": 2.0, "s": 1.0},
        "grid": {"L": 25.0, "M": 64},
        "integrator": {"dt": 1e-3, "t_end": 0.05},
        "initial": {"profile": "gaussian", "amplitude": 0.5, "width": 3.0},
    })
    out = tmp_path / "pre"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    summary = json.loads((out / "run_summary.json").read_text())
    assert summary["transform"]["A"] == pytest.approx(np.sqrt(0.5))
    assert summary["transform"]["B"] == pytest.approx(np.sqrt(0.5))


def test_simulate_precursor_degenerate_fails(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, {
        "equation": "precursor",
        "model": {"N": 8, "J0": 1.0, "R0": 1.0},
        "grid": {"M": 64},
        "integrator": {"t_end": 0.01},
    })
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "d")]) == 1
    assert "error" in capsys.readouterr().err


def test_simulate_coupled_gp(tmp_path):
    cfg = _write_cfg(tmp_path, {
        "equation": "coupled-gp",
        "model": {"family": "hubbard", "N": 8, "t": 0.5, "U": 1.0},
        "grid": {"L": 30.0, "M": 64},
        "integrator": {"dt": 1e-3, "t_end": 0.05},
        "initial": {"profile": "gaussian", "amplitude": 0.6, "width": 3.0,
                    "center": 10.0},
        "initial2": {"profile": "gaussian", "amplitude": 0.4, "width": 3.0,
                     "center": 20.0},
    })
    out = tmp_path / "cg"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    lines = (out / "field.csv").read_text().splitlines()
    assert len(lines) == 1 + 2 * 64  # two flavors
    summary = json.loads((out / "run_summary.json").read_text())
    for key in ("norm_flavor0", "norm_flavor1"):
        assert abs(summary["final_observables"][key]
                   - summary["initial_observables"][key]) < 1e-10


def test_simulate_blowup_reports_failure(tmp_path):
    cfg = _write_cfg(tmp_path, {
        "equation": "xxz-lattice",
        "model": {"N": 8, "J0": 1.0, "R0": 1.0},
        "integrator": {"dt": 10.0, "t_end": 100.0},
        "initial": {"profile": "uniform", "value": 50.0},
    })
    out = tmp_path / "boom"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 1
    summary = json.loads((out / "run_summary.json").read_text())
    assert summary["status"] == "failed"
    assert "non-finite" in summary["failure"]
    # the trajectory still holds the last finite snapshot
    assert (out / "trajectory.csv").read_text().count("\n") >= 1 + 8


def test_study_truncation_cli(tmp_path):
    cfg = _write_cfg(tmp_path, {
        "model": {"N": 8, "J0": 1.0, "R0": 2.0, "s": 1.0},
        "study": {"kind": "truncation", "s_values": [40.0, 400.0],
                  "M": 64, "t_end": 0.1, "dt": 1e-3,
                  "profile": "gaussian", "amplitude": 0.8, "width": 2.0},
    })
    out = tmp_path / "tr"
    assert main(["study", "--config", cfg, "--out", str(out)]) == 0
    lines = (out / "study.csv").read_text().splitlines()
    assert lines[0] == "s,rho,error,skipped"
    assert len(lines) == 3
    summary = json.loads((out / "study_summary.json").read_text())
    assert summary["passed"] is True
    assert 0.7 <= summary["slope"] <= 1.3


def test_study_continuum_limit_cli(tmp_path):
    cfg = _write_cfg(tmp_path, {
        "model": {"N": 8, "J0": 1.0, "R0": 2.0, "s": 1.0},
        "study": {"kind": "continuum-limit", "sizes": [16, 32],
                  "t_end": 0.1, "dt": 1e-3, "grid_refine": 4,
                  "profile": "gaussian", "amplitude": 0.8, "width": 2.0,
                  "slope_min": 1.0, "slope_max": 3.0},
    })
    out = tmp_path / "cl"
    assert main(["study", "--config", cfg, "--out", str(out), "--threads", "2"]) == 0
    lines = (out / "study.csv").read_text().splitlines()
    assert lines[0] == "spacing,N,error"
    assert len(lines) == 3
    summary = json.loads((out / "study_summary.json").read_text())
    assert summary["passed"] is True
