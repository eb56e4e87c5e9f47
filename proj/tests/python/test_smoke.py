import math
import os
import subprocess
from pathlib import Path

import numpy as np
import pytest

import muskat


def grid(n):
    return 2 * math.pi * np.arange(n) / n


def test_flat_dn_matches_multiplier():
    x = grid(64)
    f = np.cos(3 * x)
    out = muskat.dn_apply(np.zeros_like(x), f, depth=1.0, z_intervals=64)
    expected = muskat.flat_dn_multiplier(3.0, 1.0) * f
    assert np.linalg.norm(out["g"] - expected) / np.linalg.norm(expected) < 1e-4
    assert muskat.flat_dn_multiplier(-2.0) == 2.0


def test_dn_of_curved_interface_is_nonnegative():
    x = grid(64)
    eta = 0.2 * np.cos(x)
    out = muskat.dn_apply(eta, eta)
    assert np.dot(out["g"], eta) > 0
    assert out["B"].max() < 1


def test_step_decreases_l2():
    x = grid(32)
    eta = 0.2 * np.cos(x) + 0.05 * np.sin(2 * x)
    nxt = muskat.step_one_phase(eta, dt=0.05, z_intervals=16)
    assert np.linalg.norm(nxt) < np.linalg.norm(eta)


def test_two_phase_potentials():
    x = grid(64)
    sol = muskat.solve_interface_potentials(0.2 * np.cos(x), mu_plus=2.0, z_intervals=32)
    assert sol["flux_residual"] < 1e-8
    assert np.abs(sol["rt_via_B"] - sol["rt_via_darcy"]).max() < 1e-3


def test_config_errors_are_value_errors():
    with pytest.raises(ValueError, match="unknown key"):
        muskat.parse_config("preset: freeplay\nbogus: 1\n")
    text = muskat.parse_config("preset: dispersion\n")
    assert "preset: dispersion" in text


def test_geometry_error():
    x = grid(32)
    with pytest.raises(ValueError):
        muskat.dn_apply(np.full_like(x, -0.95), np.cos(x), depth=1.0)


def test_oracles_and_checks():
    assert "flat_dn" in muskat.oracle_names()
    assert "tanh" in muskat.oracle("flat_dn") or len(muskat.oracle("flat_dn")) > 0
    assert muskat.sha256_hex("abc").startswith("ba7816bf")


def test_run_from_python(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text(
        "preset: freeplay\ngrid:\n  resolutions: [32]\n  z_intervals: [16]\ntime:\n  t_end: 0.05\n"
    )
    r = muskat.run(str(cfg), out=str(tmp_path / "out"), seed=3)
    assert r["exit_code"] == 0
    for name in ("summary.csv", "monitors.ndjson", "manifest.json"):
        assert (tmp_path / "out" / name).exists()


@pytest.mark.skipif("MUSKAT_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_check_and_bad_config(tmp_path):
    cli = os.environ["MUSKAT_CLI"]
    r = subprocess.run([cli, "check"], capture_output=True, text=True)
    assert r.returncode == 0, r.stdout + r.stderr
    bad = tmp_path / "bad.yaml"
    bad.write_text("preset: freeplay\ngrid:\n  resolutions: [100]\n")
    r = subprocess.run([cli, "run", str(bad)], capture_output=True, text=True)
    assert r.returncode == 2
    assert "power of two" in r.stderr


@pytest.mark.skipif("MUSKAT_CONFIGS" not in os.environ, reason="config directory not provided")
def test_shipped_configs_parse():
    files = sorted(Path(os.environ["MUSKAT_CONFIGS"]).glob("*.yaml"))
    assert len(files) >= 6
    for f in files:
        muskat.parse_config(f.read_text())
