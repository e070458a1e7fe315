"""Command-line surface: artifacts, manifests, exit codes, determinism."""

import contextlib
import io
import json
import os
import subprocess

import numpy as np
import pytest

import traceform as tf
from traceform.cli import main


def run(*argv, env=None):
    out, err = io.StringIO(), io.StringIO()
    saved = dict(os.environ)
    if env:
        os.environ.update(env)
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            rc = main([str(a) for a in argv])
    finally:
        os.environ.clear()
        os.environ.update(saved)
    return rc, out.getvalue(), err.getvalue()


MEMBER_CSV = "x,value\n0.0,0.0\n0.375,0.375\n0.625,0.375\n1.0,0.75\n"


class TestSetCommands:
    def test_build_writes_set_and_manifest(self, tmp_path):
        rc, out, _ = run("set", "build", "--svc-depth", "1", "--out", tmp_path)
        assert rc == 0
        assert sorted(p.name for p in tmp_path.iterdir()) == ["manifest.json", "set.json"]
        assert str(tmp_path / "set.json") in out
        data = json.loads((tmp_path / "set.json").read_text())
        assert data["components"] == [["3/8", "5/8"]]
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["command"] == "set build"
        assert manifest["artifacts"] == ["set.json"]
        assert manifest["config"]["svc_depth"] == 1
        assert len(manifest["config_sha256"]) == 64

    def test_build_from_components(self, tmp_path):
        rc, _, _ = run("set", "build", "--components", "1/8,1/4;1/2,3/4",
                       "--window", "0,1", "--tails", "AllF,AllG", "--out", tmp_path)
        assert rc == 0
        data = json.loads((tmp_path / "set.json").read_text())
        assert data["tail_left"] == "AllF" and data["tail_right"] == "AllG"
        assert len(data["components"]) == 2

    def test_rerun_is_byte_identical(self, tmp_path):
        argv = ("set", "build", "--svc-depth", "3", "--out", tmp_path)
        run(*argv)
        first = [(tmp_path / n).read_bytes() for n in ("set.json", "manifest.json")]
        run(*argv)
        second = [(tmp_path / n).read_bytes() for n in ("set.json", "manifest.json")]
        assert first == second

    def test_validate_reports_density(self, tmp_path):
        rc, out, _ = run("set", "validate", "--svc-depth", "1", "--delta", "1/4",
                         "--out", tmp_path)
        assert rc == 0
        assert "ok=False" in out
        rep = json.loads((tmp_path / "validation.json").read_text())
        assert rep["measure_dense"] is False
        assert rep["no_shared_endpoints"] is True
        assert rep["no_isolated_f_points"] is True
        assert ["0", "3/8"] in rep["violations"]

    def test_validate_dense_case(self, tmp_path):
        rc, out, _ = run("set", "validate", "--svc-depth", "3", "--delta", "1/5",
                         "--out", tmp_path)
        assert rc == 0
        assert "ok=True" in out
        assert json.loads((tmp_path / "validation.json").read_text())["ok"] is True

    def test_outdir_env_var(self, tmp_path):
        rc, out, _ = run("set", "build", "--svc-depth", "2",
                         env={"TRACEFORM_OUTDIR": str(tmp_path)})
        assert rc == 0
        assert (tmp_path / "set.json").exists()
        assert out.strip().splitlines()[0].startswith(str(tmp_path))

    def test_out_flag_beats_env(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        rc, _, _ = run("set", "build", "--svc-depth", "1", "--out", a,
                       env={"TRACEFORM_OUTDIR": str(b)})
        assert rc == 0
        assert (a / "set.json").exists()
        assert not b.exists()


class TestTransformCommands:
    def test_scale_eval(self, tmp_path):
        rc, _, _ = run("scale", "eval", "--svc-depth", "1",
                       "--points", "0,3/8,1/2,1", "--out", tmp_path)
        assert rc == 0
        assert (tmp_path / "scale.csv").read_text() == (
            "x,scale\n0.0,0.0\n0.375,0.0\n0.5,0.125\n1.0,0.25\n")
        meta = json.loads((tmp_path / "scale.json").read_text())
        assert meta["case"] == "CaseIII"
        assert meta["window_image"] == ["0", "1/4"]

    def test_darn_map(self, tmp_path):
        rc, _, _ = run("darn", "map", "--svc-depth", "1", "--anchor", "0",
                       "--out", tmp_path)
        assert rc == 0
        info = json.loads((tmp_path / "darn_map.json").read_text())
        assert (info["lo"], info["hi"]) == ("0", "3/4")
        assert info["bounded_left"] is False and info["bounded_right"] is False
        assert info["collapsed"] == [{"index": 0, "position": "3/8", "width": "1/4"}]


class TestEnergyCommands:
    def test_full_energy_artifact(self, tmp_path):
        u = tmp_path / "u.csv"
        u.write_text(MEMBER_CSV)
        rc, out, _ = run("energy", "full", "--svc-depth", "1", "--u", u,
                         "--out", tmp_path)
        assert rc == 0
        assert "value=0.375" in out
        rep = json.loads((tmp_path / "energy.json").read_text())
        assert rep["value"] == 0.375
        assert rep["form"] == "full"
        assert [0.375, 0.625, 0.0] in rep["breakdown"]

    def test_decompose_artifacts(self, tmp_path):
        u = tmp_path / "u.csv"
        u.write_text(MEMBER_CSV)
        rc, out, _ = run("decompose", "--svc-depth", "1", "--u", u, "--out", tmp_path)
        assert rc == 0
        assert "case=CaseIII" in out
        dec = json.loads((tmp_path / "decompose.json").read_text())
        assert dec["case"] == "CaseIII"
        u1 = tf.GridFunction.from_csv((tmp_path / "u1.csv").read_text())
        u2 = tf.GridFunction.from_csv((tmp_path / "u2.csv").read_text())
        total = tf.GridFunction.from_csv(MEMBER_CSV)
        assert u1.values + u2.values == pytest.approx(total.values, abs=1e-12)


class TestTraceCommands:
    def test_trace_energy(self, tmp_path):
        phi = tmp_path / "phi.csv"
        phi.write_text("x,value\n0.0,0.0\n0.375,0.375\n0.625,0.625\n1.0,1.0\n")
        rc, out, _ = run("trace", "energy", "--svc-depth", "1", "--phi", phi,
                         "--out", tmp_path)
        assert rc == 0
        assert "value=0.5" in out
        rep = json.loads((tmp_path / "trace_energy.json").read_text())
        assert rep["value"] == 0.5
        assert [0.375, 0.625, 0.125] in rep["breakdown"]

    def test_jump_table(self, tmp_path):
        rc, _, _ = run("trace", "jump-table", "--svc-depth", "1", "--out", tmp_path)
        assert rc == 0
        assert (tmp_path / "jump_table.csv").read_text() == (
            "a_n,b_n,d_n,weight\n0.375,0.625,0.25,2.0\n")


class TestFellerCommand:
    def test_ladder_csv(self, tmp_path):
        rc, _, _ = run("feller", "--d", "1/2", "--alpha-ladder", "1,10,100",
                       "--out", tmp_path)
        assert rc == 0
        lines = (tmp_path / "feller.csv").read_text().splitlines()
        assert lines[0] == "alpha,numeric,limit"
        rows = [line.split(",") for line in lines[1:]]
        assert [float(r[0]) for r in rows] == [1.0, 10.0, 100.0]
        numeric = [float(r[1]) for r in rows]
        assert numeric == sorted(numeric)
        assert all(float(r[2]) == 1.0 for r in rows)
        assert numeric[-1] == pytest.approx(tf.feller_numeric(0.5, 100.0), rel=1e-15)


class TestEquivalenceCommand:
    def test_member_sample(self, tmp_path):
        u = tmp_path / "m.csv"
        u.write_text(MEMBER_CSV)
        rc, _, _ = run("equivalence", "--svc-depth", "1", "--samples", u,
                       "--out", tmp_path)
        assert rc == 0
        rep = json.loads((tmp_path / "equivalence.json").read_text())
        assert rep["ok"] is True
        assert rep["samples"][0]["l2"] == [0.17578125, 0.17578125]
        assert rep["samples"][0]["energy"] == [0.375, 0.375]


class TestSimulateEstimate:
    def test_bm_writes_numbered_paths(self, tmp_path):
        rc, _, _ = run("simulate", "bm", "--n", "3", "--dt", "0.01",
                       "--horizon", "0.05", "--seed", "7", "--out", tmp_path)
        assert rc == 0
        names = sorted(p.name for p in tmp_path.glob("bm_*.csv"))
        assert names == ["bm_0000.csv", "bm_0001.csv", "bm_0002.csv"]
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["artifacts"] == names

    def test_darning_path_feeds_occupation(self, tmp_path):
        rc, _, _ = run("simulate", "darning", "--svc-depth", "1",
                       "--h", "0.0234375", "--x0", "0.1", "--horizon", "50",
                       "--seed", "4", "--out", tmp_path)
        assert rc == 0
        path_file = tmp_path / "path.csv"
        sample = tf.PathSample.from_csv(path_file.read_text())
        assert sample.horizon == 50.0
        rc, out, _ = run("estimate", "occupation", "--path", path_file,
                         "--target", "0.375", "--target", "0,0.2",
                         "--burn-in", "5", "--out", tmp_path)
        assert rc == 0
        rows = json.loads((tmp_path / "occupation.json").read_text())
        assert [r["target"] for r in rows] == [
            "occupation of point 0.375", "occupation of interval [0.0, 0.2]"]
        assert all(0 <= r["estimate"] <= 1 and r["n"] == 20 for r in rows)
        assert "occupation of point 0.375" in out

    def test_gap_shortcut_and_workers(self, tmp_path):
        a, b = tmp_path / "w1", tmp_path / "w4"
        rc, out, _ = run("estimate", "hitting", "--gap", "0,1", "--x0", "0.25",
                         "--n", "200", "--seed", "7", "--out", a)
        assert rc == 0
        assert "left=" in out and "right=" in out
        rep = json.loads((a / "estimate.json").read_text())
        assert rep["left"]["n"] == 200
        assert rep["left"]["estimate"] + rep["right"]["estimate"] == 1.0
        assert rep["left"]["target"] == "exit at 0.0 (left endpoint)"
        rc, _, _ = run("estimate", "hitting", "--gap", "0,1", "--x0", "0.25",
                       "--n", "200", "--seed", "7", "--workers", "4", "--out", b)
        assert rc == 0
        assert (a / "estimate.json").read_bytes() == (b / "estimate.json").read_bytes()

    def test_laplace_artifact(self, tmp_path):
        rc, _, _ = run("estimate", "laplace", "--gap", "0,1", "--x0", "0.5",
                       "--alpha", "2", "--n", "200", "--seed", "7", "--out", tmp_path)
        assert rc == 0
        rep = json.loads((tmp_path / "estimate.json").read_text())
        assert rep["left"]["target"].startswith("exp(-2.0 tau)")


class TestErrorHandling:
    def test_validation_error_is_exit_2(self, tmp_path):
        rc, _, err = run("set", "build", "--components", "0.1,0.9", "--out", tmp_path)
        assert rc == 2
        assert "validation error" in err
        assert "--components requires --window" in err

    def test_precondition_error_is_exit_3(self, tmp_path):
        rc, _, err = run("estimate", "hitting", "--gap", "0,1", "--x0", "2.5",
                         "--n", "10", "--seed", "1", "--out", tmp_path)
        assert rc == 3
        assert "precondition violated" in err
        assert "lies in F" in err

    def test_io_error_is_exit_4(self, tmp_path):
        rc, _, err = run("energy", "full", "--svc-depth", "1",
                         "--u", tmp_path / "missing.csv", "--out", tmp_path)
        assert rc == 4
        assert "io error" in err
        assert "missing.csv" in err


class TestConsoleScript:
    def test_version(self):
        proc = subprocess.run(["traceform", "--version"], capture_output=True, text=True)
        assert proc.returncode == 0
        assert proc.stdout.startswith("traceform ")

    def test_end_to_end_subprocess(self, tmp_path):
        proc = subprocess.run(
            ["traceform", "set", "build", "--svc-depth", "1", "--out", str(tmp_path)],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert (tmp_path / "set.json").exists()
