# =====================================
# This file is part of the CodeDev project
# Author: Ricel Quispe
# =====================================

# eplab/app/tests/test_cli.py

import json

import pytest

from app.main import main
from app.presentation.handlers.exceptions import (
    EXIT_INVALID_INPUT,
    EXIT_NUMERICAL_FAILURE,
    EXIT_OK,
    EXIT_WRITE_FAILURE,
)

SWEEP_HEADER = "param,predicted_verdict,observed_outcome,t_pred,t_detect\n"


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured


def _write_config(path, **document):
    path.write_text(json.dumps(document), encoding="utf-8")
    return path


# ==============================
# classify
# ==============================


def test_classify_omega1_example(capsys):
    code, captured = _run(capsys, "classify", "--d=-3", "--rho", "1", "--n", "2")
    assert code == EXIT_OK
    result = json.loads(captured.out)
    assert result["verdict"] == "SupCriticalOmega1"
    assert result["I"] == pytest.approx(9.0)
    assert result["t_upper"] == pytest.approx(2.0 / 3.0)


def test_classify_boundary_example(capsys):
    code, captured = _run(capsys, "classify", "--d", "0", "--rho", "1", "--n", "5")
    assert code == EXIT_OK
    result = json.loads(captured.out)
    assert result["verdict"] == "Boundary"
    assert "t_upper" not in result


def test_classify_physical_units_match_unit_free(capsys):
    _, physical = _run(capsys, "classify", "--d", "0", "--rho", "2", "--n", "2",
                       "--c", "1", "--k=-1")
    _, unit_free = _run(capsys, "classify", "--d", "0", "--rho", "2", "--n", "2")
    assert json.loads(physical.out) == json.loads(unit_free.out)
    assert json.loads(unit_free.out)["verdict"] == "SupCriticalOmega2"
    assert json.loads(unit_free.out)["chae_tadmor_member"] is False


@pytest.mark.parametrize("extra", [["--rho", "0"], ["--rho=-1"], ["--rho", "1", "--k", "1"],
                                   ["--rho", "1", "--c", "0"]])
def test_classify_rejects_invalid_states(capsys, extra):
    code, captured = _run(capsys, "classify", "--d", "0", "--n", "2", *extra)
    assert code == EXIT_INVALID_INPUT
    assert captured.out == ""
    assert "error:" in captured.err


def test_unknown_command_is_a_usage_error(capsys):
    code, _ = _run(capsys, "transmogrify")
    assert code == EXIT_INVALID_INPUT


# ==============================
# integrate
# ==============================


def test_integrate_writes_trajectory_and_summary(capsys, tmp_path):
    code, captured = _run(capsys, "--out-dir", str(tmp_path),
                          "integrate", "--d0=-3", "--rho0", "1", "--n", "2")
    assert code == EXIT_OK
    manifest = json.loads(captured.out)
    assert manifest["command"] == "integrate"
    assert sorted(manifest["outputs"]) == ["summary.json", "trajectory.csv"]

    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["event"] == "BlowupDetected"
    assert summary["t_detect"] <= 2.0 / 3.0 + 1e-3
    assert summary["bounds"]["t_upper"] == pytest.approx(2.0 / 3.0)
    header = (tmp_path / "trajectory.csv").read_text().splitlines()[0]
    assert header == "t,d,rho,I"


# ==============================
# portrait
# ==============================


def test_portrait_bundle(capsys, tmp_path):
    code, captured = _run(capsys, "--out-dir", str(tmp_path),
                          "portrait", "--n", "2", "--resolution", "10")
    assert code == EXIT_OK
    manifest = json.loads(captured.out)
    expected = {"separatrix.csv", "nullclines.csv", "trajectories.csv", "grid.csv",
                "points.csv", "summary.json"}
    assert set(manifest["outputs"]) == expected
    assert {p.name for p in tmp_path.iterdir()} == expected | {"manifest.json"}
    assert json.loads((tmp_path / "manifest.json").read_text()) == manifest

    points = (tmp_path / "points.csv").read_text().splitlines()
    assert points[0] == "d,rho,kind"
    assert len(points) == 4
    assert len((tmp_path / "grid.csv").read_text().splitlines()) == 1 + 10 * 10

    nullclines = (tmp_path / "nullclines.csv").read_text().splitlines()
    assert nullclines[0] == "curve,rho,d"
    curves = [line.split(",") for line in nullclines[1:]]
    assert {c[0] for c in curves} == {"d_prime_neg", "d_prime_pos", "rho_prime"}
    assert all(c[2] == "0" for c in curves if c[0] == "rho_prime")
    assert sum(c[0] == "rho_prime" for c in curves) == 10


def test_portrait_with_random_seeds_is_reproducible(capsys, tmp_path):
    for name in ("a", "b"):
        code, _ = _run(capsys, "--out-dir", str(tmp_path / name), "--seed", "7",
                       "portrait", "--resolution", "8", "--random-seeds", "3")
        assert code == EXIT_OK
    for name in ("trajectories.csv", "summary.json", "manifest.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_portrait_write_failure(capsys, tmp_path):
    blocker = tmp_path / "not_a_dir"
    blocker.write_text("occupied")
    code, captured = _run(capsys, "--out-dir", str(blocker),
                          "portrait", "--resolution", "8")
    assert code == EXIT_WRITE_FAILURE
    assert captured.out == ""
    assert blocker.read_text() == "occupied"


# ==============================
# simulate
# ==============================


def test_simulate_uniform_config(capsys, tmp_path):
    config = _write_config(tmp_path / "uniform.json", cells=64, max_time=0.5,
                           initial={"kind": "uniform"})
    out = tmp_path / "out"
    code, captured = _run(capsys, "--out-dir", str(out), "simulate", str(config))
    assert code == EXIT_OK
    document = json.loads(captured.out)
    assert document["summary"]["outcome"] == "RanToMaxTime"
    assert document["summary"]["t_pred"] is None
    assert document["summary"]["final_max_rho"] == pytest.approx(1.0, abs=1e-12)
    assert "prediction.csv" in document["manifest"]["outputs"]
    assert (out / "fields_t0.000000.csv").exists()
    assert (out / "fields_t0.500000.csv").exists()


def test_simulate_rejects_density_without_unit_mean(capsys, tmp_path):
    config = _write_config(tmp_path / "offset.json", cells=32, max_time=0.1,
                           initial={"kind": "uniform", "density_offset": 0.1})
    code, _ = _run(capsys, "--out-dir", str(tmp_path / "out"), "simulate", str(config))
    assert code == EXIT_INVALID_INPUT
    assert not (tmp_path / "out").exists()


@pytest.mark.parametrize("document", [{"cells": 8}, {"cell_count": 64}, {"scheme": "weno"}])
def test_simulate_rejects_schema_violations(capsys, tmp_path, document):
    config = _write_config(tmp_path / "bad.json", **document)
    code, _ = _run(capsys, "--out-dir", str(tmp_path / "out"), "simulate", str(config))
    assert code == EXIT_INVALID_INPUT


def test_simulate_rejects_malformed_json(capsys, tmp_path):
    config = tmp_path / "broken.json"
    config.write_text("{cells: 64", encoding="utf-8")
    code, _ = _run(capsys, "simulate", str(config))
    assert code == EXIT_INVALID_INPUT


def test_simulate_step_budget_exhaustion_is_a_numerical_failure(capsys, tmp_path):
    config = _write_config(tmp_path / "budget.json", cells=32, max_time=1.0, max_steps=5)
    out = tmp_path / "out"
    code, captured = _run(capsys, "--out-dir", str(out), "simulate", str(config))
    assert code == EXIT_NUMERICAL_FAILURE
    assert captured.out == ""
    assert not out.exists()


@pytest.mark.slow
def test_simulate_cosine_bump_matches_prediction(capsys, tmp_path):
    config = _write_config(tmp_path / "cosine.json", cells=4096, max_time=3.0,
                           rho_threshold=50.0,
                           initial={"kind": "density_cosine", "amplitude": 0.5})
    code, captured = _run(capsys, "--out-dir", str(tmp_path / "out"), "simulate", str(config))
    assert code == EXIT_OK
    summary = json.loads(captured.out)["summary"]
    assert summary["outcome"] == "BlowupDetected"
    assert summary["critical_cell"] == 0
    assert summary["relative_gap"] < 0.05


# ==============================
# sweep
# ==============================


def test_empty_sweep_writes_header_only(capsys, tmp_path):
    code, _ = _run(capsys, "--out-dir", str(tmp_path), "sweep", "--family", "density_cosine",
                   "--start", "0.1", "--stop", "0.5", "--steps", "0")
    assert code == EXIT_OK
    assert (tmp_path / "sweep.csv").read_text() == SWEEP_HEADER


def test_sweep_rerun_is_byte_identical(capsys, tmp_path):
    config = _write_config(tmp_path / "base.json", cells=32, max_time=0.2)
    out = tmp_path / "out"
    argv = ["--out-dir", str(out), "sweep", "--family", "velocity_sine", "--start", "0.1",
            "--stop", "0.3", "--steps", "2", "--config", str(config)]

    code, _ = _run(capsys, *argv)
    assert code == EXIT_OK
    first = {name: (out / name).read_bytes() for name in ("sweep.csv", "manifest.json")}
    code, _ = _run(capsys, *argv)
    assert code == EXIT_OK
    second = {name: (out / name).read_bytes() for name in ("sweep.csv", "manifest.json")}
    assert first == second

    rows = first["sweep.csv"].decode().splitlines()
    assert rows[0] + "\n" == SWEEP_HEADER
    assert len(rows) == 3
    assert rows[1].startswith("0.10000000000000001,")


def _crossing_sweep(capsys, tmp_path, out, threads):
    config = _write_config(tmp_path / "crossing.json", cells=256, max_time=2.5,
                           rho_threshold=10.0)
    code, _ = _run(capsys, "--out-dir", str(out), "--threads", threads, "sweep",
                   "--family", "velocity_sine", "--start", "0.0", "--stop", "1.0",
                   "--steps", "3", "--config", str(config))
    assert code == EXIT_OK
    return (out / "sweep.csv").read_bytes()


def test_sweep_crosses_from_smooth_to_blowup(capsys, tmp_path):
    table = _crossing_sweep(capsys, tmp_path, tmp_path / "serial", "1")
    rows = [line.split(",") for line in table.decode().splitlines()[1:]]
    assert [r[0] for r in rows] == ["0", "0.5", "1"]
    assert [r[2] for r in rows] == ["RanToMaxTime", "BlowupDetected", "BlowupDetected"]
    assert rows[0][1] == "Boundary"
    assert [r[1] for r in rows[1:]] == ["SupCriticalOmega1", "SupCriticalOmega1"]
    assert rows[0][4] == ""
    assert float(rows[2][4]) < float(rows[1][4])


def test_sweep_rows_do_not_depend_on_worker_count(capsys, tmp_path):
    serial = _crossing_sweep(capsys, tmp_path, tmp_path / "serial", "1")
    parallel = _crossing_sweep(capsys, tmp_path, tmp_path / "parallel", "2")
    assert parallel == serial


def test_sweep_with_failing_run_writes_nothing(capsys, tmp_path):
    config = _write_config(tmp_path / "budget.json", cells=32, max_time=1.0, max_steps=5)
    out = tmp_path / "out"
    code, captured = _run(capsys, "--out-dir", str(out), "sweep", "--family", "velocity_sine",
                          "--start", "0.1", "--stop", "0.3", "--steps", "2",
                          "--config", str(config))
    assert code == EXIT_NUMERICAL_FAILURE
    assert captured.out == ""
    assert "0.1" in captured.err
    assert not out.exists()
