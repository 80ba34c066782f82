import json
import os

import numpy as np
import pytest

from deltaflow import (
    ConfigError,
    ScenarioPreset,
    generate,
    parse_config,
    read_diagnostics,
    read_snapshot,
    render_config,
    run_steps,
    write_snapshot,
)
from deltaflow.cli import main
from deltaflow.config import ScenarioConfig, validate_config
from deltaflow.scenarios import preset_defaults
from deltaflow.snapshots import emit_diagnostics_stream, snapshot_columns


MINIMAL = "[run]\npreset = riemann_1d\n"


# ---------------------------------------------------------------- config text

def test_minimal_config_resolves_all_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.preset == "riemann_1d"
    assert cfg.seed == 0
    assert dict(cfg.parameters) == preset_defaults("riemann_1d")
    assert cfg.steps == preset_defaults("riemann_1d")["steps"]


def test_run_steps_key_wins_over_parameters():
    cfg = parse_config("[run]\npreset = riemann_1d\nsteps = 7\n"
                       "[parameters]\nsteps = 99\n")
    assert cfg.steps == 7


@pytest.mark.parametrize("text,fragment", [
    ("[run]\npreset = riemann_1d\nsteps = -3\n", "steps"),
    ("[run]\npreset = riemann_1d\nflavour = hot\n", "flavour"),
    ("[run]\npreset = riemann_1d\n[extras]\nx = 1\n", "extras"),
    ("[parameters]\nn = 10\n", "run"),
    ("[run]\nseed = 4\n", "preset"),
    ("[run]\npreset = warm_inflation\n", "warm_inflation"),
    ("[run]\npreset = riemann_1d\n[parameters]\ngamma = 1.4\n", "gamma"),
])
def test_config_errors_name_the_offender(text, fragment):
    with pytest.raises(ConfigError, match=fragment):
        parse_config(text)


def test_oversized_r_is_rejected_against_initial_data():
    # default data moves at |u| = 1, so r = 2 puts the displacement past one cell
    with pytest.raises(ConfigError, match="'r'"):
        parse_config("[run]\npreset = riemann_1d\n[parameters]\nr = 2.0\n")


def test_render_parse_round_trip():
    cfg = parse_config("[run]\npreset = dust_collision\nseed = 3\n"
                       "snapshot_every = 50\nout_dir = scratch\n"
                       "[parameters]\nn = 60\nsteps = 20\ncloud_u = 0.75\n")
    again = parse_config(render_config(cfg))
    assert again == cfg


def test_parameter_names_keep_their_case():
    # G would collide with a lowercased whitelist and break echo re-parsing
    cfg = parse_config("[run]\npreset = gravity_static_1d\n[parameters]\nG = 5.0\n")
    assert cfg.parameters["G"] == 5.0
    assert parse_config(render_config(cfg)) == cfg


def test_validate_config_returns_a_usable_setup():
    cfg = parse_config("[run]\npreset = riemann_1d\nsteps = 3\n")
    setup = validate_config(cfg)
    assert setup.steps == 3
    assert setup.run.grid.dim == 1


def test_config_rejects_negative_counters():
    with pytest.raises(ConfigError):
        ScenarioConfig(preset="riemann_1d", snapshot_every=-1)
    with pytest.raises(ConfigError):
        ScenarioConfig(preset="riemann_1d", diagnostics_every=-2)


def test_out_dir_falls_back_to_environment(monkeypatch):
    cfg = parse_config(MINIMAL)
    monkeypatch.delenv("DELTAFLOW_OUT", raising=False)
    assert cfg.resolved_out_dir() == os.path.join("runs", "riemann_1d")
    monkeypatch.setenv("DELTAFLOW_OUT", "/data/out")
    assert cfg.resolved_out_dir() == os.path.join("/data/out", "riemann_1d")
    assert ScenarioConfig(preset="riemann_1d", out_dir="x").resolved_out_dir() == "x"


# ------------------------------------------------------------------ snapshots

def test_snapshot_column_order():
    assert snapshot_columns(2, 1, False) == ["i", "j", "rho0", "u0x", "u0y"]
    assert snapshot_columns(1, 2, True) == ["i", "rho0", "u0x", "rho1", "u1x", "phi"]


def _short_run(name, n, steps, **extra):
    params = {"n": n, "steps": steps, **extra}
    setup = generate(ScenarioPreset(name, seed=2, parameters=params))
    return run_steps(setup.run, setup.params, steps, record_every=1)


def test_snapshot_round_trip_1d_with_vacuum(tmp_path):
    run = _short_run("dust_collision", 60, 5)
    path = tmp_path / "snap.csv"
    write_snapshot(run, str(path))
    back = read_snapshot(str(path))

    assert back.t == run.t and back.n == run.n
    assert back.grid == run.grid
    orig, got = run.fluids[0].state, back.fluids[0].state
    assert np.array_equal(got.rho, orig.rho)  # repr is lossless
    np.testing.assert_array_equal(got.defined(), orig.defined())
    u0, u1 = orig.velocity(), got.velocity()
    np.testing.assert_allclose(u1[np.isfinite(u1)], u0[np.isfinite(u0)], rtol=1e-14)

    header = json.loads(path.read_text().splitlines()[0])
    assert header["model"] == "pressureless_static_gravity"
    assert header["columns"] == ["i", "rho0", "u0x"]
    assert header["grid"]["n"] == [60]


def test_snapshot_round_trip_2d_with_phi(tmp_path):
    run = _short_run("gravity_static_2d", 16, 2)
    assert run.phi is not None  # gravity step caches the potential
    path = tmp_path / "snap.csv"
    write_snapshot(run, str(path))
    back = read_snapshot(str(path))
    assert np.array_equal(back.phi, run.phi)
    assert np.array_equal(back.fluids[0].state.rho, run.fluids[0].state.rho)

    # row-major: the second data row is cell (0, 1)
    rows = path.read_text().splitlines()
    assert rows[2].split(",")[:2] == ["0", "1"]
    assert rows[1 + 16].split(",")[:2] == ["1", "0"]


def test_snapshot_rejects_malformed_files(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("not json\n1,2,3\n")
    with pytest.raises(ConfigError, match="malformed"):
        read_snapshot(str(bad))
    with pytest.raises(ConfigError):
        read_snapshot(str(tmp_path / "absent.csv"))


def test_snapshot_row_count_must_match_grid(tmp_path):
    run = _short_run("dust_collision", 60, 1)
    path = tmp_path / "snap.csv"
    write_snapshot(run, str(path))
    lines = path.read_text().splitlines()
    (tmp_path / "short.csv").write_text("\n".join(lines[:-4]) + "\n")
    with pytest.raises(ConfigError, match="rows"):
        read_snapshot(str(tmp_path / "short.csv"))


# ---------------------------------------------------------------- diagnostics

def test_diagnostics_stream_round_trip(tmp_path):
    run = _short_run("dust_collision", 60, 4)
    path = tmp_path / "diag.jsonl"
    emit_diagnostics_stream(run.history, str(path))
    back = read_diagnostics(str(path))
    assert back == [json.loads(json.dumps(e)) for e in run.history]
    assert [e["n"] for e in back] == [0, 1, 2, 3, 4]


def test_empty_history_is_an_error(tmp_path):
    with pytest.raises(ConfigError, match="empty"):
        emit_diagnostics_stream([], str(tmp_path / "diag.jsonl"))


# ------------------------------------------------------------------------ CLI

def _write_cfg(tmp_path, text):
    p = tmp_path / "run.ini"
    p.write_text(text)
    return str(p)


def test_cli_check_reports_and_passes(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, "[run]\npreset = riemann_1d\nsteps = 10\n")
    assert main(["check", "--config", cfg]) == 0
    out = capsys.readouterr().out
    assert "config OK" in out
    assert "admissible r" in out


def test_cli_preset_list_names_everything(capsys):
    from deltaflow import PRESET_NAMES
    assert main(["preset", "list"]) == 0
    out = capsys.readouterr().out
    for name in PRESET_NAMES:
        assert name in out


def test_cli_errors_are_machine_readable(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, "[run]\npreset = warm_inflation\n")
    assert main(["check", "--config", cfg]) == 1
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["kind"] == "ConfigError"
    assert "warm_inflation" in err["error"]
    assert main(["run", "--config", str(tmp_path / "missing.ini")]) == 1
    assert json.loads(capsys.readouterr().err.strip())["kind"] == "ConfigError"


def test_cli_run_writes_the_advertised_artifacts(tmp_path, capsys):
    out = tmp_path / "out"
    cfg = _write_cfg(tmp_path,
                     "[run]\npreset = dust_collision\nsteps = 40\n"
                     f"snapshot_every = 20\nout_dir = {out}\n"
                     "[parameters]\nn = 80\n")
    assert main(["run", "--config", cfg]) == 0
    stdout = capsys.readouterr().out
    assert "dust_collision: 40 steps" in stdout

    names = sorted(p.name for p in out.iterdir())
    assert names == ["config.ini", "diagnostics.jsonl", "snapshot_000000.csv",
                     "snapshot_000020.csv", "snapshot_000040.csv"]
    echoed = parse_config((out / "config.ini").read_text())
    assert echoed.steps == 40 and echoed.preset == "dust_collision"
    assert read_snapshot(str(out / "snapshot_000040.csv")).n == 40


def test_cli_overrides_take_effect(tmp_path, capsys):
    out = tmp_path / "alt"
    cfg = _write_cfg(tmp_path,
                     "[run]\npreset = dust_collision\nsteps = 40\n"
                     "[parameters]\nn = 80\n")
    rc = main(["run", "--config", cfg, "--out", str(out), "--steps", "6", "--seed", "5"])
    assert rc == 0
    capsys.readouterr()
    echoed = parse_config((out / "config.ini").read_text())
    assert echoed.steps == 6 and echoed.seed == 5
    assert (out / "snapshot_000006.csv").exists()


def test_cli_rerun_is_byte_identical(tmp_path, capsys):
    cfg = _write_cfg(tmp_path,
                     "[run]\npreset = gravity_static_2d\nsteps = 5\n"
                     "snapshot_every = 5\n[parameters]\nn = 24\n")
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--config", cfg, "--out", str(a)]) == 0
    assert main(["run", "--config", cfg, "--out", str(b)]) == 0
    capsys.readouterr()
    for name in ("diagnostics.jsonl", "snapshot_000000.csv", "snapshot_000005.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_cli_report_renders_figures(tmp_path, capsys):
    out = tmp_path / "out"
    cfg = _write_cfg(tmp_path,
                     "[run]\npreset = dust_collision\nsteps = 10\n"
                     f"snapshot_every = 10\nout_dir = {out}\n"
                     "[parameters]\nn = 80\n")
    assert main(["run", "--config", cfg]) == 0
    assert main(["report", str(out)]) == 0
    capsys.readouterr()
    for fig in ("growth.png", "contrast.png", "density.png"):
        assert (out / fig).stat().st_size > 0
    assert main(["report", str(tmp_path / "nothing")]) == 1
