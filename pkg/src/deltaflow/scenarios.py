"""Canonical initial conditions and reference solutions, as seeded presets.

Every preset builds a complete run setup (initial fluids, model, background,
CFL ratio, step count) from a name, a seed and an overridable parameter
dict.  Random fields use the counter-based Philox generator so states
reproduce bit-for-bit across platforms for a fixed seed; the draw order
(density first, then one velocity component per axis) is part of the
contract.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from scipy.ndimage import uniform_filter

from .core import (
    Background,
    ConfigError,
    FluidState,
    Grid,
    PowerLawBackground,
    StateLaw,
    StaticBackground,
)
from .gravity import GravityParams
from .orchestrator import Fluid, PhysicsParams, RunState
from .riemann import RiemannData, delta_wave, expanding_riemann

__all__ = [
    "ScenarioPreset",
    "Setup",
    "ReferenceSolution",
    "PRESET_NAMES",
    "preset_description",
    "preset_defaults",
    "generate",
    "reference_solution",
    "expansion_background",
]

NEWTON_FACTOR = 4.0 * np.pi
RADIATION_FACTOR = 8.0 * np.pi


@dataclass(frozen=True)
class ScenarioPreset:
    """A named recipe plus the seed and parameter overrides that pin it down."""

    name: str
    seed: int = 0
    parameters: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in _REGISTRY:
            raise ConfigError(f"unknown preset {self.name!r}; known: {', '.join(PRESET_NAMES)}")
        if self.seed < 0:
            raise ConfigError("seed must be >= 0")


@dataclass(frozen=True)
class Setup:
    """Everything needed to run a preset: initial run state, physics, steps."""

    run: RunState
    params: PhysicsParams
    steps: int


@dataclass(frozen=True)
class ReferenceSolution:
    """Exact field or caption-level summary for a preset at a given time."""

    kind: str  # "field", "delta" or "summary"
    rho: np.ndarray | None = None
    u: np.ndarray | None = None  # nan where velocity is undefined
    peak_mass: float | None = None
    peak_x: float | None = None
    summary: dict | None = None


def expansion_background(factor: float, total_time: float) -> Background:
    """Background whose scale factor grows by `factor` over `total_time`.

    Matter-era power law a = (1 + t/t0)^(2/3) with t0 chosen to hit the
    requested factor; factor 1 degenerates to the static background.
    """
    if factor < 1:
        raise ConfigError("expansion factor must be >= 1")
    if factor == 1.0:
        return StaticBackground()
    t0 = total_time / (factor ** 1.5 - 1.0)
    return PowerLawBackground(p=2.0 / 3.0, t0=t0)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _smooth(arr: np.ndarray, size: int) -> np.ndarray:
    if size <= 1:
        return arr
    return uniform_filter(arr, size=size, mode="nearest")


def _random_cloud(rng, grid: Grid, p: Mapping) -> FluidState:
    """The recurring random recipe: rho in [rho_lo, rho_hi], u in [u_lo, u_hi].

    fill="compact" confines it to the central box (fraction `fill_fraction`
    per axis) with vacuum outside, for conservation runs that must keep the
    margins empty.  smooth > 1 applies a moving-average of that many cells.
    """
    shape = grid.shape
    rho = rng.uniform(p["rho_lo"], p["rho_hi"], size=shape)
    u = np.stack([rng.uniform(p["u_lo"], p["u_hi"], size=shape)
                  for _ in range(grid.dim)])
    smooth = int(p.get("smooth", 0))
    if smooth > 1:
        rho = _smooth(rho, smooth)
        u = np.stack([_smooth(u[ax], smooth) for ax in range(grid.dim)])
    if p.get("fill", "full") == "compact":
        frac = float(p.get("fill_fraction", 0.6))
        inside = np.ones(shape, dtype=bool)
        for ax, n in enumerate(grid.n):
            lo = int(round(n * (1 - frac) / 2))
            hi = n - lo
            idx = np.arange(n)
            band = (idx >= lo) & (idx < hi)
            sl = [np.newaxis] * grid.dim
            sl[ax] = slice(None)
            inside &= band[tuple(sl)]
        rho = np.where(inside, rho, 0.0)
        u = np.where(inside, u, 0.0)
    elif grid.boundary == "zero_margin":
        _clear_margins(grid, rho, u)
    return FluidState.from_primitive(rho, u)


def _clear_margins(grid: Grid, rho: np.ndarray, u: np.ndarray):
    """Empty the margin ring: those cells are dead under zero_margin anyway."""
    m = grid.margin
    for ax in range(grid.dim):
        sl = [slice(None)] * grid.dim
        for cut in (slice(0, m), slice(grid.n[ax] - m, None)):
            sl[ax] = cut
            rho[tuple(sl)] = 0.0
            u[(slice(None),) + tuple(sl)] = 0.0


def _two_state_field(grid: Grid, data: RiemannData, x_jump: float) -> FluidState:
    x = grid.centers(0)
    rho = np.where(x < x_jump, data.rho_l, data.rho_r)
    u = np.where(x < x_jump, data.u_l, data.u_r)
    return FluidState.from_primitive(rho, u[np.newaxis])


def _gravity(p: Mapping, factor: float = NEWTON_FACTOR) -> GravityParams | None:
    g = float(p["G"])
    if g == 0.0:
        return None
    return GravityParams(G=g, source_factor=factor,
                         solver_tol=float(p.get("solver_tol", 1e-10)),
                         max_iter=int(p.get("max_iter", 20000)),
                         bc=str(p.get("gravity_bc", "dirichlet")))


def _steps(p: Mapping) -> int:
    steps = int(p["steps"])
    if steps < 0:
        raise ConfigError("steps must be >= 0")
    return steps


# ---------------------------------------------------------------- builders

def _build_riemann_1d(p, grid, seed):
    data = RiemannData(p["rho_l"], p["u_l"], p["rho_r"], p["u_r"])
    state = _two_state_field(grid, data, p["x_jump"])
    fluid = Fluid(state, "pressureless_static_gravity", StateLaw.pressureless())
    run = RunState([fluid], grid, StaticBackground())
    return Setup(run, PhysicsParams("pressureless_static_gravity", p["r"]), _steps(p))


def _grid_riemann(p):
    n = int(p["n"])
    return Grid((n,), 2.0 / n, origin=(-1.0,))


def _build_dust_collision(p, grid, seed):
    x = grid.centers(0)
    lo, hi = grid.extent(0)
    length = hi - lo
    width = length / 9.0
    c1 = lo + 0.25 * length
    c2 = lo + 0.75 * length
    rho = np.full(grid.shape, p["vacuum"])
    u = np.zeros(grid.shape)
    left = np.abs(x - c1) <= width / 2
    right = np.abs(x - c2) <= width / 2
    rho[left] = p["cloud_rho"]
    rho[right] = p["cloud_rho"]
    u[left] = p["cloud_u"]
    u[right] = -p["cloud_u"]
    state = FluidState.from_primitive(rho, u[np.newaxis])
    fluid = Fluid(state, "pressureless_static_gravity", StateLaw.pressureless())
    run = RunState([fluid], grid, StaticBackground())
    return Setup(run, PhysicsParams("pressureless_static_gravity", p["r"]), _steps(p))


def _grid_dust(p):
    n = int(p["n"])
    return Grid((n,), 9.0 / n, origin=(0.0,))


def _build_chertock_test4(p, grid, seed):
    x = grid.centers(0)
    rho = 1.0 + p["amp"] * np.sin(2.0 * np.pi * x)
    u = 1.0 - x  # linear profile: every characteristic reaches x=1 at t=1
    state = FluidState.from_primitive(rho, u[np.newaxis])
    fluid = Fluid(state, "pressureless_static_gravity", StateLaw.pressureless())
    run = RunState([fluid], grid, StaticBackground())
    return Setup(run, PhysicsParams("pressureless_static_gravity", p["r"]), _steps(p))


def _grid_chertock(p):
    n = int(p["n"])
    return Grid((n,), 2.0 / n, origin=(0.0,))


def _build_gravity_static(p, grid, seed):
    state = _random_cloud(_rng(seed), grid, p)
    fluid = Fluid(state, "pressureless_static_gravity", StateLaw.pressureless())
    run = RunState([fluid], grid, StaticBackground())
    params = PhysicsParams("pressureless_static_gravity", p["r"], gravity=_gravity(p))
    return Setup(run, params, _steps(p))


def _grid_unit(p, dim):
    # random-field presets default to outflow: the medium continues past the
    # box, so neither a vacuum rim nor a pressure cliff forms at the edge
    n = int(p["n"])
    return Grid((n,) * dim, 1.0 / n, origin=(0.0,) * dim,
                boundary=str(p.get("boundary", "outflow")))


def _build_newtonian_expanding(p, grid, seed, law=None, kind="newtonian_expanding"):
    state = _random_cloud(_rng(seed), grid, p)
    law = law or StateLaw.pressureless()
    fluid = Fluid(state, kind, law)
    steps = _steps(p)
    total_time = steps * p["r"] * grid.h
    bg = expansion_background(p["expansion_factor"], total_time)
    run = RunState([fluid], grid, bg)
    params = PhysicsParams("newtonian_expanding", p["r"], gravity=_gravity(p))
    return Setup(run, params, steps)


def _build_meszaros_freeze(p, grid, seed):
    from .orchestrator import run_steps  # deferred: avoids import-time cycle risk

    # grow the structure first on a static background with this preset's
    # own field recipe and gravity, then restart the clock under expansion
    grav = _gravity(p)
    state = _random_cloud(_rng(seed), grid, p)
    prep_run = RunState([Fluid(state, "newtonian_expanding", StateLaw.pressureless())],
                        grid, StaticBackground())
    prep_params = PhysicsParams("newtonian_expanding", p["r"], gravity=grav)
    done = run_steps(prep_run, prep_params, int(p["prep_steps"]), record_every=0)
    structure = done.fluids[0].state
    fluid = Fluid(structure.copy(), "newtonian_expanding", StateLaw.pressureless())
    steps = _steps(p)
    total_time = steps * p["r"] * grid.h
    bg = expansion_background(p["expansion_factor"], total_time)
    run = RunState([fluid], grid, bg)
    params = PhysicsParams("newtonian_expanding", p["r"], gravity=grav)
    return Setup(run, params, steps)


def _build_jeans_sweep(p, grid, seed):
    return _build_newtonian_expanding(p, grid, seed, law=StateLaw.linear(p["kappa"]))


def _build_relativistic_2d(p, grid, seed):
    state = _random_cloud(_rng(seed), grid, p)
    c = float(p["c_light"])
    law = StateLaw.radiation(c)
    fluid = Fluid(state, "relativistic_expanding", law, source_factor=RADIATION_FACTOR)
    steps = _steps(p)
    # The explicit pressure kick oscillates grid modes at (c/2)k.  Keeping
    # (c/2)(pi/h)(r h) at or below 1/4 stops the kick/transport loop from
    # pumping cell-scale noise, so large c runs with a smaller ratio (and
    # covers less time -- exactly the "demands a smaller value of r" regime).
    r = min(float(p["r"]), 0.5 / (np.pi * c))
    total_time = steps * r * grid.h
    bg = expansion_background(p["expansion_factor"], total_time)
    run = RunState([fluid], grid, bg)
    params = PhysicsParams("relativistic_expanding", r,
                           gravity=_gravity(p, RADIATION_FACTOR))
    return Setup(run, params, steps)


def _parse_fractions(p) -> tuple[float, ...]:
    raw = p["fractions"]
    if isinstance(raw, str):
        parts = tuple(float(s) for s in raw.replace(",", " ").split())
    else:
        parts = tuple(float(v) for v in raw)
    if len(parts) < 2:
        raise ConfigError("multifluid needs at least two mass fractions")
    if any(f <= 0 for f in parts):
        raise ConfigError("mass fractions must be positive")
    if abs(sum(parts) - 1.0) > 1e-12:
        raise ConfigError(f"mass fractions must sum to 1, got {sum(parts)}")
    return parts


def _build_multifluid_equivalence(p, grid, seed):
    fractions = _parse_fractions(p)
    base = _random_cloud(_rng(seed), grid, p)
    u = base.velocity()
    fluids = [Fluid(FluidState.from_primitive(f * base.rho, u), "newtonian_expanding",
                    StateLaw.pressureless()) for f in fractions]
    steps = _steps(p)
    total_time = steps * p["r"] * grid.h
    bg = expansion_background(p["expansion_factor"], total_time)
    run = RunState(fluids, grid, bg)
    params = PhysicsParams("multifluid", p["r"], gravity=_gravity(p))
    return Setup(run, params, steps)


def _build_multifluid_decoupling(p, grid, seed):
    fractions = _parse_fractions(p)
    if len(fractions) != 2:
        raise ConfigError("multifluid_decoupling uses exactly two fluids (dark, baryon)")
    rng = _rng(seed)
    # dark component: uniform background plus one preformed gaussian peak
    centers = [grid.centers(ax) for ax in range(grid.dim)]
    lo0, hi0 = grid.extent(0)
    width = p["peak_width_cells"] * grid.h
    r2 = np.zeros(grid.shape)
    for ax, c in enumerate(centers):
        alo, ahi = grid.extent(ax)
        mid = 0.5 * (alo + ahi)
        sl = [np.newaxis] * grid.dim
        sl[ax] = slice(None)
        r2 = r2 + ((c - mid) ** 2)[tuple(sl)]
    dark_profile = 1.0 + p["peak_amp"] * np.exp(-r2 / (2.0 * width * width))
    dark_profile /= dark_profile.mean()
    dark_rho = fractions[0] * dark_profile
    dark_u = np.zeros((grid.dim,) + grid.shape)
    baryon_profile = rng.uniform(p["rho_lo"], p["rho_hi"], size=grid.shape)
    baryon_profile /= baryon_profile.mean()
    baryon_rho = fractions[1] * baryon_profile
    baryon_u = np.zeros((grid.dim,) + grid.shape)
    if grid.boundary == "zero_margin":
        _clear_margins(grid, dark_rho, dark_u)
        _clear_margins(grid, baryon_rho, baryon_u)
    dark = FluidState.from_primitive(dark_rho, dark_u)
    baryon = FluidState.from_primitive(baryon_rho, baryon_u)
    fluids = [Fluid(dark, "newtonian_expanding", StateLaw.pressureless()),
              Fluid(baryon, "newtonian_expanding", StateLaw.pressureless())]
    steps = _steps(p)
    total_time = steps * p["r"] * grid.h
    bg = expansion_background(p["expansion_factor"], total_time)
    run = RunState(fluids, grid, bg)
    params = PhysicsParams("multifluid", p["r"], gravity=_gravity(p))
    return Setup(run, params, steps)


def _build_expanding_riemann_delta(p, grid, seed):
    data = RiemannData(p["rho_l"], p["u_l"], p["rho_r"], p["u_r"])
    state = _two_state_field(grid, data, p["x_jump"])
    fluid = Fluid(state, "newtonian_expanding", StateLaw.pressureless())
    steps = _steps(p)
    total_time = steps * p["r"] * grid.h
    bg = expansion_background(p["expansion_factor"], total_time)
    run = RunState([fluid], grid, bg)
    return Setup(run, PhysicsParams("newtonian_expanding", p["r"]), steps)


@dataclass(frozen=True)
class _PresetSpec:
    builder: Callable
    grid_builder: Callable
    dims: tuple[int, ...]
    defaults: dict
    description: str


_REGISTRY: dict[str, _PresetSpec] = {
    "riemann_1d": _PresetSpec(
        _build_riemann_1d, _grid_riemann, (1,),
        {"rho_l": 1.0, "u_l": -1.0, "rho_r": 1.0, "u_r": 1.0, "x_jump": 0.0,
         "n": 200, "r": 0.25, "steps": 200},
        "two-state 1D data; defaults open a vacuum fan, swap speeds for a collision"),
    "dust_collision": _PresetSpec(
        _build_dust_collision, _grid_dust, (1,),
        {"cloud_rho": 1.0, "cloud_u": 1.0, "vacuum": 1e-300,
         "n": 450, "r": 1.0, "steps": 300},
        "two compact clouds approach at unit speed and merge into one peak"),
    "chertock_test4": _PresetSpec(
        _build_chertock_test4, _grid_chertock, (1,),
        {"amp": 0.3, "n": 400, "r": 0.5, "steps": 400},
        "sign-changing velocity over varying density, collapse at x=1, t=1"),
    "gravity_static_1d": _PresetSpec(
        _build_gravity_static, lambda p: _grid_unit(p, 1), (1,),
        {"boundary": "outflow", "rho_lo": 0.9, "rho_hi": 1.1, "u_lo": -0.5, "u_hi": 0.5, "smooth": 0,
         "fill": "full", "fill_fraction": 0.6,
         "G": 5.0, "n": 200, "r": 0.125, "steps": 250},
        "random near-uniform dust on a static background collapses under self-gravity"),
    "gravity_static_2d": _PresetSpec(
        _build_gravity_static, lambda p: _grid_unit(p, 2), (2,),
        {"boundary": "outflow", "rho_lo": 0.9, "rho_hi": 1.1, "u_lo": -0.5, "u_hi": 0.5, "smooth": 0,
         "fill": "full", "fill_fraction": 0.6,
         "G": 4.0, "n": 200, "r": 0.2, "steps": 100},
        "2D static self-gravity collapse from random near-uniform initial data"),
    "newtonian_expanding_2d": _PresetSpec(
        _build_newtonian_expanding, lambda p: _grid_unit(p, 2), (2,),
        {"boundary": "outflow", "rho_lo": 0.9, "rho_hi": 1.1, "u_lo": -0.1, "u_hi": 0.1, "smooth": 5,
         "fill": "full", "fill_fraction": 0.6, "expansion_factor": 3.5, "gravity_bc": "periodic",
         "G": 10000.0, "n": 200, "r": 0.05, "steps": 100},
        "expanding-background structure formation; expansion_factor sets a-growth"),
    "meszaros_freeze": _PresetSpec(
        _build_meszaros_freeze, lambda p: _grid_unit(p, 2), (2,),
        {"boundary": "outflow", "rho_lo": 0.9, "rho_hi": 1.1, "u_lo": -0.1, "u_hi": 0.1, "smooth": 5,
         "fill": "full", "fill_fraction": 0.6, "expansion_factor": 128.0, "gravity_bc": "periodic",
         "prep_steps": 30, "G": 10000.0, "n": 200, "r": 0.05, "steps": 100},
        "preformed structure under fast expansion stays frozen in comoving cells"),
    "jeans_sweep": _PresetSpec(
        _build_jeans_sweep, lambda p: _grid_unit(p, 2), (2,),
        {"boundary": "outflow", "rho_lo": 0.9, "rho_hi": 1.1, "u_lo": -0.1, "u_hi": 0.1, "smooth": 5,
         "fill": "full", "fill_fraction": 0.6, "expansion_factor": 3.5, "gravity_bc": "periodic",
         "kappa": 1.0, "G": 10000.0, "n": 200, "r": 0.05, "steps": 100},
        "linear-pressure fluid; raising kappa suppresses collapse below Jeans scale"),
    "relativistic_2d": _PresetSpec(
        _build_relativistic_2d, lambda p: _grid_unit(p, 2), (2,),
        {"boundary": "outflow", "rho_lo": 0.9, "rho_hi": 1.1, "u_lo": -0.1, "u_hi": 0.1, "smooth": 5,
         "fill": "full", "fill_fraction": 0.6, "expansion_factor": 3.5, "gravity_bc": "periodic",
         "c_light": 0.1, "G": 600.0, "n": 200, "r": 0.1, "steps": 100},
        "radiation-era fluid; small c forms structures, large c does not"),
    "multifluid_equivalence": _PresetSpec(
        _build_multifluid_equivalence, lambda p: _grid_unit(p, 2), (1, 2),
        {"boundary": "outflow", "rho_lo": 0.9, "rho_hi": 1.1, "u_lo": -0.5, "u_hi": 0.5, "smooth": 0,
         "fill": "full", "fill_fraction": 0.6, "expansion_factor": 3.5,
         "fractions": (0.5, 0.5), "G": 5.0, "n": 64, "r": 0.2, "steps": 20},
        "identical fluids split 50/50; each half must track half the single fluid"),
    "multifluid_decoupling": _PresetSpec(
        _build_multifluid_decoupling, lambda p: _grid_unit(p, 2), (2,),
        {"boundary": "outflow", "rho_lo": 0.9, "rho_hi": 1.1, "peak_amp": 2.0, "peak_width_cells": 8.0,
         "expansion_factor": 3.5, "fractions": (0.8, 0.2), "gravity_bc": "periodic",
         "G": 2000.0, "n": 200, "r": 0.05, "steps": 100},
        "80% dark fluid with a preformed peak pulls 20% random baryons onto it"),
    "expanding_riemann_delta": _PresetSpec(
        _build_expanding_riemann_delta, _grid_riemann, (1,),
        {"rho_l": 1.0, "u_l": 1.0, "rho_r": 1.0, "u_r": -1.0, "x_jump": 0.0,
         "expansion_factor": 4.0, "n": 200, "r": 0.5, "steps": 200},
        "compressive two-state data under expansion grows a localized delta peak"),
}

PRESET_NAMES = tuple(_REGISTRY)


def preset_description(name: str) -> str:
    return _REGISTRY[name].description


def preset_defaults(name: str) -> dict:
    if name not in _REGISTRY:
        raise ConfigError(f"unknown preset {name!r}")
    return dict(_REGISTRY[name].defaults)


def _resolve_parameters(preset: ScenarioPreset) -> dict:
    spec = _REGISTRY[preset.name]
    params = dict(spec.defaults)
    for key, value in preset.parameters.items():
        if key not in params:
            raise ConfigError(f"preset {preset.name!r} has no parameter {key!r}")
        params[key] = value
    return params


def generate(preset: ScenarioPreset, grid: Grid | None = None) -> Setup:
    """Build the fully initialized run setup for a preset.

    grid=None uses the preset's default grid; an explicit grid must match the
    preset's dimensionality.
    """
    spec = _REGISTRY[preset.name]
    params = _resolve_parameters(preset)
    if grid is None:
        grid = spec.grid_builder(params)
    if grid.dim not in spec.dims:
        raise ConfigError(
            f"preset {preset.name!r} needs a grid of dimension {spec.dims}, got {grid.dim}")
    return spec.builder(params, grid, preset.seed)


def _exact_two_state(data: RiemannData, bg: Background, t: float,
                     x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Exact entropy solution of two-state data at time t, sampled at x.

    Fan case only (u_l < u_r); density and velocity arrays, velocity nan in
    the vacuum opening.
    """
    rho = np.empty_like(x)
    u = np.empty_like(x)
    for i, xi in enumerate(x):
        r, v = expanding_riemann(data, bg, t, xi)
        rho[i] = r
        u[i] = np.nan if v is None else v
    return rho, u


def reference_solution(preset: ScenarioPreset, t: float,
                       grid: Grid | None = None) -> ReferenceSolution:
    """Analytic field or caption-level summary a preset can be checked against."""
    spec = _REGISTRY[preset.name]
    params = _resolve_parameters(preset)
    if grid is None:
        grid = spec.grid_builder(params)

    if preset.name in ("riemann_1d", "expanding_riemann_delta"):
        data = RiemannData(params["rho_l"], params["u_l"], params["rho_r"], params["u_r"])
        if preset.name == "riemann_1d":
            bg: Background = StaticBackground()
        else:
            total_time = int(params["steps"]) * params["r"] * grid.h
            bg = expansion_background(params["expansion_factor"], total_time)
        x = grid.centers(0) - params["x_jump"]
        if data.u_l < data.u_r:
            if t <= 0:
                raise ConfigError("fan reference needs t > 0")
            rho, u = _exact_two_state(data, bg, t, x)
            return ReferenceSolution("field", rho=rho, u=u)
        wave = delta_wave(data)
        if not wave.physical:
            raise ConfigError("two-state reference needs u_l != u_r")
        # the discontinuity moves along the stretched time; static bg gives c*t
        stretch = bg.scale_at(0.0) * bg.inv_sq_integral(0.0, t)
        static = isinstance(bg, StaticBackground)
        rho = np.where(x < wave.c * stretch, data.rho_l, data.rho_r)
        u = np.where(x < wave.c * stretch, data.u_l, data.u_r)
        return ReferenceSolution("delta", rho=rho, u=u,
                                 peak_mass=wave.alpha * t if static else None,
                                 peak_x=params["x_jump"] + wave.c * stretch)

    if preset.name == "chertock_test4":
        return ReferenceSolution("summary", summary={"collapse_x": 1.0, "collapse_t": 1.0})
    if preset.name == "dust_collision":
        lo, hi = grid.extent(0)
        return ReferenceSolution("summary", summary={"peak_x": 0.5 * (lo + hi)})
    raise NotImplementedError(f"preset {preset.name!r} has no reference solution")
