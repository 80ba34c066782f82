"""Run configuration: line-oriented ``key = value`` text with two sections.

``[run]`` selects a preset and the output plan, ``[parameters]`` overrides
the preset's physics and grid constants.  Parsing resolves every default so
the echoed file pins the run completely.
"""

from __future__ import annotations

import ast
import configparser
import os
from dataclasses import dataclass, field
from typing import Mapping

from .core import ConfigError
from .orchestrator import admissible_r
from .scenarios import ScenarioPreset, Setup, generate, preset_defaults

__all__ = ["ScenarioConfig", "parse_config", "load_config", "render_config"]

ENV_OUT_DIR = "DELTAFLOW_OUT"

# [run] keys and their parsed types; everything else is a preset parameter.
_RUN_KEYS = ("preset", "seed", "steps", "out_dir", "snapshot_every", "diagnostics_every")


@dataclass(frozen=True)
class ScenarioConfig:
    """A fully resolved run: preset + seed + every parameter pinned.

    parameters always carries the complete mapping (defaults merged with
    overrides), so rendering this object reproduces the run exactly.
    """

    preset: str
    seed: int = 0
    parameters: Mapping = field(default_factory=dict)
    out_dir: str = ""
    snapshot_every: int = 0
    diagnostics_every: int = 1

    def __post_init__(self):
        if self.seed < 0:
            raise ConfigError("seed must be >= 0")
        if self.snapshot_every < 0:
            raise ConfigError("snapshot_every must be >= 0")
        if self.diagnostics_every < 0:
            raise ConfigError("diagnostics_every must be >= 0")

    @property
    def steps(self) -> int:
        return int(self.parameters["steps"])

    def scenario(self) -> ScenarioPreset:
        return ScenarioPreset(self.preset, seed=self.seed, parameters=dict(self.parameters))

    def setup(self) -> Setup:
        return generate(self.scenario())

    def resolved_out_dir(self) -> str:
        """Output directory: explicit value, else $DELTAFLOW_OUT, else runs/<preset>."""
        if self.out_dir:
            return self.out_dir
        env = os.environ.get(ENV_OUT_DIR, "")
        if env:
            return os.path.join(env, self.preset)
        return os.path.join("runs", self.preset)


def _parse_value(raw: str):
    # numbers / tuples / quoted strings via literal syntax, bare words as-is
    try:
        return ast.literal_eval(raw)
    except (ValueError, SyntaxError):
        return raw


def _parse_int(section: Mapping, key: str, default: int, minimum: int = 0) -> int:
    raw = section.get(key)
    if raw is None:
        return default
    try:
        value = int(str(raw).strip())
    except ValueError:
        raise ConfigError(f"key {key!r} must be an integer, got {raw!r}") from None
    if value < minimum:
        raise ConfigError(f"key {key!r} must be >= {minimum}, got {value}")
    return value


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate config text, resolving all preset defaults.

    Raises ConfigError naming the offending key for unknown keys, invalid
    values, and an r that violates the transport bound on the initial data.
    """
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str  # parameter names are case-sensitive (e.g. G)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc

    unknown_sections = set(cp.sections()) - {"run", "parameters"}
    if unknown_sections:
        raise ConfigError(f"unknown section(s) {sorted(unknown_sections)}; "
                          "expected [run] and optional [parameters]")
    if not cp.has_section("run"):
        raise ConfigError("missing [run] section")

    run = cp["run"]
    for key in run:
        if key not in _RUN_KEYS:
            raise ConfigError(f"unknown key {key!r} in [run]; known: {', '.join(_RUN_KEYS)}")
    name = run.get("preset")
    if not name:
        raise ConfigError("key 'preset' is required in [run]")
    name = name.strip().strip("\"'")
    defaults = preset_defaults(name)  # raises for unknown preset

    params = dict(defaults)
    if cp.has_section("parameters"):
        for key, raw in cp["parameters"].items():
            if key not in defaults:
                raise ConfigError(
                    f"preset {name!r} has no parameter {key!r}; "
                    f"known: {', '.join(sorted(defaults))}")
            params[key] = _parse_value(raw.strip())

    # [run] steps is a convenience alias for parameters.steps and wins over it
    steps = _parse_int(run, "steps", int(params["steps"]))
    if steps < 0:
        raise ConfigError(f"key 'steps' must be >= 0, got {steps}")
    params["steps"] = steps

    cfg = ScenarioConfig(
        preset=name,
        seed=_parse_int(run, "seed", 0),
        parameters=params,
        out_dir=run.get("out_dir", "").strip(),
        snapshot_every=_parse_int(run, "snapshot_every", 0),
        diagnostics_every=_parse_int(run, "diagnostics_every", 1),
    )
    validate_config(cfg)
    return cfg


def validate_config(cfg: ScenarioConfig) -> Setup:
    """Build the initial state and check r against it; returns the Setup."""
    setup = cfg.setup()  # validates enums, fractions, grid, state law
    bound = admissible_r(setup.run, setup.params)
    if setup.params.r > bound:
        raise ConfigError(
            f"key 'r': value {setup.params.r} exceeds the transport bound "
            f"{bound:.6g} for this preset's initial data")
    return setup


def load_config(path: str) -> ScenarioConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    return parse_config(text)


def _format_value(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return repr(value)
    return str(value)


def render_config(cfg: ScenarioConfig) -> str:
    """Config text that parses back to an identical ScenarioConfig."""
    lines = [
        "[run]",
        f"preset = {cfg.preset}",
        f"seed = {cfg.seed}",
        f"out_dir = {cfg.out_dir}",
        f"snapshot_every = {cfg.snapshot_every}",
        f"diagnostics_every = {cfg.diagnostics_every}",
        "",
        "[parameters]",
    ]
    lines += [f"{key} = {_format_value(cfg.parameters[key])}"
              for key in sorted(cfg.parameters)]
    return "\n".join(lines) + "\n"
