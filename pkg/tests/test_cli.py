"""Config validation, output files, determinism and exit codes."""

import json
from pathlib import Path

import numpy as np
import pytest

from spinvl.cli import (
    ConfigError,
    EXIT_BREAKDOWN,
    EXIT_CONFIG,
    EXIT_OK,
    main,
    parse_config,
    preset,
)


def tiny_simulate(**over):
    cfg = {
        "schema": 1,
        "mode": "simulate",
        "chain": {"s": 3, "J": -0.25, "K": 0.0},
        "initial": {"kind": "single_site", "x": 1},
        "grid": {"t_end": 0.5, "step": 0.01},
        "backend": "sector",
    }
    cfg.update(over)
    return cfg


def write_cfg(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def test_presets_parse():
    for name in ("fig2", "fig3", "fig4", "fig5"):
        cfg = parse_config(preset(name))
        assert cfg["mode"] in (
            "invert_closed", "mimic_dephasing", "compensate_dephasing", "compensate_bath",
        )
    with pytest.raises(ConfigError):
        preset("fig9")


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError, match="bogus"):
        parse_config(tiny_simulate(bogus=1))
    with pytest.raises(ConfigError, match="grid"):
        parse_config(tiny_simulate(grid={"t_end": 1.0, "step": 0.1, "oops": 2}))
    with pytest.raises(ConfigError, match="chain"):
        parse_config(tiny_simulate(chain={"s": 3, "J": -0.25, "Q": 1.0}))


def test_schema_and_mode_validation():
    with pytest.raises(ConfigError, match="schema"):
        parse_config(tiny_simulate(schema=2))
    with pytest.raises(ConfigError, match="mode"):
        parse_config(tiny_simulate(mode="explode"))
    with pytest.raises(ConfigError, match="step"):
        parse_config(tiny_simulate(grid={"t_end": 1.0, "step": 0.3}))
    with pytest.raises(ConfigError, match="backend"):
        parse_config(tiny_simulate(backend="tensor-network"))


def test_mode_constraints():
    with pytest.raises(ConfigError, match="target_chain"):
        parse_config(tiny_simulate(target_chain={"s": 3, "J": -0.25}))
    cfg = tiny_simulate(mode="compensate_bath", bath={"epsilon": 0.1, "mu": -1.0})
    with pytest.raises(ConfigError, match="full"):
        parse_config(cfg)  # bath demands the full backend
    big = tiny_simulate(chain={"s": 12, "J": -0.25}, backend="full")
    with pytest.raises(ConfigError, match="s <= 10"):
        parse_config(big)
    closed = tiny_simulate(deph={"eta": 0.1})
    with pytest.raises(ConfigError, match="closed"):
        parse_config(closed)


def test_engineered_coupling_expansion():
    cfg = parse_config(preset("fig2"))
    J = np.array(cfg["target_chain"].J)
    x = np.arange(1, 6)
    ratio = J / np.sqrt(x * (6 - x))
    assert np.allclose(ratio, ratio[0])


def test_simulate_run_outputs(tmp_path):
    path = write_cfg(tmp_path, tiny_simulate())
    out = tmp_path / "run"
    assert main(["simulate", "--config", path, "--out", str(out)]) == EXIT_OK
    for f in ("config.json", "trajectory.csv", "residuals.csv", "manifest.json"):
        assert (out / f).exists()
    man = json.loads((out / "manifest.json").read_text())
    assert man["status"] == "completed"
    assert man["continuity_ok"] is True
    header = (out / "trajectory.csv").read_text().splitlines()[0]
    assert header == "t,x,m3,j,T,h"
    # bond columns are blank on the last site
    row_last_site = (out / "trajectory.csv").read_text().splitlines()[3]
    assert ",,," in row_last_site


def test_reruns_are_byte_identical(tmp_path):
    path = write_cfg(tmp_path, tiny_simulate())
    out1, out2 = tmp_path / "a", tmp_path / "b"
    main(["simulate", "--config", path, "--out", str(out1)])
    main(["simulate", "--config", path, "--out", str(out2)])
    assert (out1 / "trajectory.csv").read_bytes() == (out2 / "trajectory.csv").read_bytes()
    assert (out1 / "residuals.csv").read_bytes() == (out2 / "residuals.csv").read_bytes()


def test_flag_overrides(tmp_path):
    path = write_cfg(tmp_path, tiny_simulate())
    out = tmp_path / "o"
    assert main(["simulate", "--config", path, "--step", "0.05",
                 "--out", str(out)]) == EXIT_OK
    man = json.loads((out / "manifest.json").read_text())
    assert man["config"]["grid"]["step"] == 0.05
    assert man["nodes_completed"] == 11


def test_invert_run_and_metrics(tmp_path):
    cfg = {
        "schema": 1,
        "mode": "invert_closed",
        "chain": {"s": 3, "J": -0.25, "K": 0.0},
        "target_chain": {"s": 3, "J": -0.25, "K": 0.0},
        "initial": {"kind": "uniform_superposition"},
        "grid": {"t_end": 0.5, "step": 0.01},
        "reg": {"alpha": 1e-6, "handle_floor": 1e-9, "max_field": 1e3},
        "backend": "sector",
    }
    out = tmp_path / "inv"
    assert main(["invert", "--config", write_cfg(tmp_path, cfg),
                 "--out", str(out)]) == EXIT_OK
    man = json.loads((out / "manifest.json").read_text())
    assert man["status"] == "completed"
    assert man["m3_deviation_max"] < 1e-6
    assert man["max_tracking_error"] < 1e-6


def test_expected_breakdown_exits_zero(tmp_path):
    cfg = {
        "schema": 1,
        "mode": "compensate_dephasing",
        "chain": {"s": 3, "J": -0.25, "K": 0.0},
        "deph": {"eta": 0.3},
        "initial": {"kind": "uniform_superposition"},
        "grid": {"t_end": 6.0, "step": 0.01},
        "reg": {"alpha": 1e-4, "handle_floor": 2e-2, "max_field": 1e4},
        "backend": "sector",
    }
    out = tmp_path / "comp"
    assert main(["compensate", "--config", write_cfg(tmp_path, cfg),
                 "--out", str(out)]) == EXIT_OK
    man = json.loads((out / "manifest.json").read_text())
    assert man["status"] == "breakdown"
    assert man["breakdown"]["reason"] == "handle"
    assert 0 < man["breakdown"]["time"] < 6.0


def test_unexpected_breakdown_exits_four(tmp_path):
    cfg = {
        "schema": 1,
        "mode": "invert_closed",
        "chain": {"s": 3, "J": -0.25, "K": 0.0},
        "target_chain": {"s": 3, "J": -0.3, "K": 0.0},
        "initial": {"kind": "uniform_superposition"},
        "grid": {"t_end": 2.0, "step": 0.01},
        "reg": {"alpha": 1e-6, "handle_floor": 1e-9, "max_field": 1e-5},
        "backend": "sector",
    }
    out = tmp_path / "bad"
    assert main(["invert", "--config", write_cfg(tmp_path, cfg),
                 "--out", str(out)]) == EXIT_BREAKDOWN
    man = json.loads((out / "manifest.json").read_text())
    assert man["status"] == "breakdown"


def test_config_errors_exit_two(tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "missing.json"),
                 "--out", str(tmp_path / "x")]) == EXIT_CONFIG
    bad = write_cfg(tmp_path, tiny_simulate(bogus=1), "bad.json")
    assert main(["simulate", "--config", bad,
                 "--out", str(tmp_path / "y")]) == EXIT_CONFIG
    wrongmode = write_cfg(tmp_path, tiny_simulate(), "sim.json")
    assert main(["invert", "--config", wrongmode,
                 "--out", str(tmp_path / "z")]) == EXIT_CONFIG


def test_preset_subcommand_prints_json(capsys):
    assert main(["preset", "fig4"]) == EXIT_OK
    out = capsys.readouterr().out
    cfg = json.loads(out)
    assert cfg["mode"] == "compensate_dephasing"
    assert main(["preset", "nope"]) == EXIT_CONFIG


def test_identities_subcommand(capsys, tmp_path):
    assert main(["identities", "--out", str(tmp_path / "id")]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.count("[pass]") >= 8
    assert (tmp_path / "id" / "identities.csv").exists()


def test_multi_run_jobs(tmp_path):
    a = write_cfg(tmp_path, tiny_simulate(), "a.json")
    b = write_cfg(tmp_path, tiny_simulate(grid={"t_end": 0.4, "step": 0.01}), "b.json")
    out = tmp_path / "multi"
    assert main(["simulate", "--config", a, "--config", b, "--jobs", "2",
                 "--out", str(out)]) == EXIT_OK
    assert (out / "a" / "manifest.json").exists()
    assert (out / "b" / "manifest.json").exists()


def test_out_env_default(tmp_path, monkeypatch):
    monkeypatch.setenv("SPINVL_OUT", str(tmp_path / "envroot"))
    path = write_cfg(tmp_path, tiny_simulate())
    assert main(["simulate", "--config", path]) == EXIT_OK
    assert (tmp_path / "envroot" / "manifest.json").exists()
