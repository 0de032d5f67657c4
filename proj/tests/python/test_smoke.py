import math
import os

import pytest

import stochpe


def test_metadata():
    assert stochpe.__version__ == stochpe.version()
    assert "linear-decay" in stochpe.presets()
    assert "all" in stochpe.verify_suites()
    keys = {k["key"] for k in stochpe.schema()}
    assert {"domain.N1", "solver.dt", "noise.family"} <= keys
    assert "run.name = ou-additive" in stochpe.preset_text("ou-additive")


def test_resolved_config_and_errors():
    cfg = stochpe.resolved_config(preset="linear-decay", overrides=["domain.N1=3"])
    assert cfg["domain.N1"] == "3"
    assert len(cfg) == len(stochpe.schema())
    with pytest.raises(stochpe.ConfigError):
        stochpe.resolved_config(preset="linear-decay", overrides=["domain.N7=1"])
    with pytest.raises(ValueError):
        stochpe.resolved_config(preset="no-such-preset")


def test_linear_decay_trajectory():
    tr = stochpe.simulate(preset="linear-decay")
    h = tr["columns"].index("H_norm2")
    first, last = tr["records"][0][h], tr["records"][-1][h]
    assert not tr["blew_up"]
    assert math.sqrt(last) < 1e-3 * math.sqrt(first)
    assert tr["records"][-1][0] == pytest.approx(1.0)


def test_verify_and_growth_constants():
    rep = stochpe.verify("operators", preset="small-noise", overrides=["verify.samples=5"])
    assert rep["pass"]
    assert rep["suites"][0]["suite"] == "operators"
    good = stochpe.growth_constants(preset="small-noise")
    bad = stochpe.growth_constants(preset="large-theta1")
    assert good["maximal_pass"] and not bad["maximal_pass"]
    assert good["eta1"]["value"] <= 1e-3


def test_ou_ensemble_against_closed_form():
    rep = stochpe.ensemble(preset="ou-additive", overrides=["ensemble.paths=400"])
    m = rep["columns"]["H_norm2"]["final"]
    exact = stochpe.ou_mean_square(preset="ou-additive")
    assert abs(m["mean"] - exact) <= 3 * m["se"]


def test_command_exit_codes(tmp_path):
    code, out, _ = stochpe.command("run", preset="linear-decay", output_root=str(tmp_path))
    assert code == 0
    assert (tmp_path / "linear-decay" / "diagnostics.csv").exists()
    code, _, err = stochpe.command("verify", "nope", preset="small-noise", output_root=str(tmp_path))
    assert code == 2 and "unknown suite" in err
    code, _, _ = stochpe.command("verify", "noise", preset="large-theta1", output_root=str(tmp_path))
    assert code == 4


def test_output_root_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("STOCHPE_OUTPUT_ROOT", str(tmp_path))
    code, _, _ = stochpe.command("run", preset="linear-decay", overrides=["run.name=envtest"])
    assert code == 0
    assert (tmp_path / "envtest" / "manifest.json").exists()
