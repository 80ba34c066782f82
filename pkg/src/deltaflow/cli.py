"""Command-line driver.

    deltaflow run --config FILE [--out DIR] [--seed S] [--steps N]
    deltaflow preset list
    deltaflow check --config FILE
    deltaflow report RUN_DIR

``run`` leaves delimited artifacts in the output directory: the fully
resolved config (config.ini), diagnostics.jsonl, and snapshot_<step>.csv
files.  ``report`` renders figures next to them.  Exit code 0 on success;
failures print one machine-readable JSON line to stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from .config import ScenarioConfig, load_config, render_config, validate_config
from .core import SchemeError, ConfigError, diagnostics
from .orchestrator import RunAborted, admissible_r, run_steps
from .scenarios import PRESET_NAMES, preset_description
from .snapshots import emit_diagnostics_stream, write_snapshot

__all__ = ["main"]


def _fail(exc: Exception) -> int:
    print(json.dumps({"error": str(exc), "kind": type(exc).__name__}), file=sys.stderr)
    return 1


def _apply_overrides(cfg: ScenarioConfig, args) -> ScenarioConfig:
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if args.steps is not None:
        if args.steps < 0:
            raise ConfigError("--steps must be >= 0")
        params = dict(cfg.parameters)
        params["steps"] = args.steps
        cfg = dataclasses.replace(cfg, parameters=params)
    if args.out is not None:
        cfg = dataclasses.replace(cfg, out_dir=args.out)
    return dataclasses.replace(cfg, out_dir=cfg.resolved_out_dir())


def _write_outputs(run, out_dir: str, diagnostics_on: bool, written: set) -> None:
    if diagnostics_on and run.history:
        emit_diagnostics_stream(run.history, os.path.join(out_dir, "diagnostics.jsonl"))
    if run.n not in written:
        write_snapshot(run, os.path.join(out_dir, f"snapshot_{run.n:06d}.csv"))
        written.add(run.n)


def cmd_run(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    setup = validate_config(cfg)  # overrides may change the initial data
    out_dir = cfg.out_dir
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "config.ini"), "w", encoding="utf-8") as fh:
        fh.write(render_config(cfg))

    written: set[int] = set()
    every = cfg.snapshot_every

    def observer(state):
        if every and state.n % every == 0:
            write_snapshot(state, os.path.join(out_dir, f"snapshot_{state.n:06d}.csv"))
            written.add(state.n)

    run = setup.run
    if every:
        _write_outputs(run, out_dir, diagnostics_on=False, written=written)
    try:
        run = run_steps(run, setup.params, cfg.steps,
                        record_every=cfg.diagnostics_every, observer=observer)
    except RunAborted as exc:
        _write_outputs(exc.last_valid, out_dir, cfg.diagnostics_every > 0, written)
        print(f"aborted after step {exc.last_valid.n}; partial output in {out_dir}",
              file=sys.stderr)
        return _fail(exc)

    _write_outputs(run, out_dir, cfg.diagnostics_every > 0, written)
    a = run.bg.scale_at(run.t)
    final = diagnostics(run.fluids[0].state, run.grid, run.bg, run.t)
    print(f"{cfg.preset}: {run.n} steps, t = {run.t:.6g}, a = {a:.6g}, "
          f"max rho = {final.max_rho:.6g}, contrast = {final.contrast:.6g}")
    print(f"output in {out_dir} ({len(written)} snapshot(s))")
    return 0


def cmd_preset(args) -> int:
    if args.action == "list":
        width = max(len(name) for name in PRESET_NAMES)
        for name in PRESET_NAMES:
            print(f"{name:<{width}}  {preset_description(name)}")
        return 0
    raise ConfigError(f"unknown preset action {args.action!r}")


def cmd_check(args) -> int:
    cfg = load_config(args.config)
    setup = cfg.setup()
    run, params = setup.run, setup.params
    bound = admissible_r(run, params)
    umax = max(abs(f.state.velocity()).max() for f in run.fluids)
    print(f"preset            {cfg.preset}")
    print(f"model             {params.model}")
    print(f"grid              {'x'.join(str(k) for k in run.grid.n)}, "
          f"h = {run.grid.h:.6g}, boundary = {run.grid.boundary}")
    print(f"fluids            {len(run.fluids)}")
    print(f"steps             {cfg.steps}")
    print(f"seed              {cfg.seed}")
    print(f"gravity           {'on (G = %.6g)' % params.gravity.G if params.gravity else 'off'}")
    print(f"r                 {params.r:.6g}")
    print(f"max |u| initial   {umax:.6g}")
    print(f"admissible r      {bound:.6g}")
    print("config OK")
    return 0


def cmd_report(args) -> int:
    from .report import render_report  # defer: pulls in matplotlib

    for path in render_report(args.run_dir):
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deltaflow",
        description="Delta-wave projection solver for pressureless and "
                    "self-gravitating cosmological flows.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a configured scenario")
    p_run.add_argument("--config", required=True, help="path to the config file")
    p_run.add_argument("--out", help="output directory (overrides config)")
    p_run.add_argument("--seed", type=int, help="random seed (overrides config)")
    p_run.add_argument("--steps", type=int, help="step count (overrides config)")
    p_run.set_defaults(func=cmd_run)

    p_preset = sub.add_parser("preset", help="preset utilities")
    p_preset.add_argument("action", choices=["list"], help="what to do")
    p_preset.set_defaults(func=cmd_preset)

    p_check = sub.add_parser("check", help="validate a config without running")
    p_check.add_argument("--config", required=True, help="path to the config file")
    p_check.set_defaults(func=cmd_check)

    p_report = sub.add_parser("report", help="render figures from a run directory")
    p_report.add_argument("run_dir", help="directory a previous run wrote into")
    p_report.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SchemeError, ConfigError, OSError) as exc:
        return _fail(exc)


if __name__ == "__main__":
    sys.exit(main())
