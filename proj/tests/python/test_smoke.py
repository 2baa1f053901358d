import json
import os
import subprocess

import numpy as np
import pytest

mongeamp = pytest.importorskip("mongeamp")


def test_schedule_arithmetic():
    assert mongeamp.delta(1.6) == pytest.approx(80 / 3, rel=1e-15)
    assert mongeamp.limit_factor(6) == pytest.approx(0.8, rel=1e-15)
    assert mongeamp.mu_n(6, 1.6, 0, 2) == pytest.approx(6 ** (1.6 ** 2), rel=1e-15)


def test_exact_model_in_memory():
    r = mongeamp.run(K="exact", normalize=False)
    assert r["status"] == "converged"
    assert r["solves"] == 0
    assert r["verification"]["ma_residual"]["sup"] <= 1e-8
    assert r["log"][0]["n"] == 1


def test_quadratic_run_log_and_field():
    r = mongeamp.run(nx=33, ny=33)
    assert r["status"] == "converged"
    assert r["norm_f1"] / r["norm_final"] >= 1e2
    assert r["w"].shape == (33, 33)
    keys = {"n", "theta_n", "mu_n", "domain", "norm_f0", "norm_u0", "trackers", "fallback_flags", "q_norm"}
    assert keys <= set(r["log"][0])


def test_bad_config_names_the_field():
    with pytest.raises(ValueError, match="'epsilon'"):
        mongeamp.run("epsilon = nope")


def test_solve_writes_artifacts_and_verifies(tmp_path):
    code, rep = mongeamp.solve(tmp_path / "run", nx=33, ny=33)
    assert code == 0
    assert rep["schema"] == 1
    for name in ["w.field", "w_inf.field", "z.field", "f.field", "run.jsonl", "report.json", "config.cfg"]:
        assert (tmp_path / "run" / name).exists()
    v = mongeamp.verify(tmp_path / "run")
    assert v["consistent"]
    w, box = mongeamp.read_field(str(tmp_path / "run" / "w.field"))
    assert w.shape == (33, 33)
    assert box == (-1.0, 1.0, -1.0, 1.0)


def test_field_round_trip(tmp_path):
    a = np.random.default_rng(0).standard_normal((9, 12))
    p = str(tmp_path / "a.field")
    mongeamp.write_field(p, a, (-1, 1), (0, 2))
    b, box = mongeamp.read_field(p)
    assert np.array_equal(a, b)
    assert box == (-1.0, 1.0, 0.0, 2.0)


def test_mollify_and_curvature():
    x = np.linspace(-1, 1, 65)
    X, Y = np.meshgrid(x, x, indexing="ij")
    f = np.cos(np.pi * (X + 1) / 2)
    assert np.max(np.abs(mongeamp.mollify(f, 2.0) - f)) < 1e-10
    z = (X**2 + Y**2) / 2
    K = mongeamp.graph_curvature(z, (-1, 1), (-1, 1))
    assert np.max(np.abs(K - 1 / (1 + X**2 + Y**2) ** 2)) < 1e-8


def test_estimates():
    rows = mongeamp.energy_constants(33, 33, [1e-2, 1e-3], probes=5, seed=2)
    assert len(rows) == 10
    assert all(r["ratio"] > 0 for r in rows)
    assert mongeamp.tame_constant(33, 65) > 0


def test_cli_executable(tmp_path):
    exe = os.environ.get("MA_CLI")
    if not exe:
        pytest.skip("MA_CLI not set")
    out = tmp_path / "cli"
    p = subprocess.run([exe, "solve-curvature", "--grid", "33", "33", "--out", str(out)], capture_output=True, text=True)
    assert p.returncode == 0
    assert json.loads((out / "report.json").read_text())["status"] == "converged"
    bad = tmp_path / "bad.cfg"
    bad.write_text("nx = 2\n")
    p = subprocess.run([exe, "solve-curvature", "--config", str(bad)], capture_output=True, text=True)
    assert p.returncode == 1
    assert "'nx'" in p.stderr
