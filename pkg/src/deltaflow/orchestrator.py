"""Splitting drivers composing transport and gravity into full time steps.

Four model families share one pattern: transport first, then the Poisson
solve and momentum kick, with no Strang symmetrization.  The radiation-era
model adds a third sub-step that translates the velocity field itself.
Multifluid runs advance each fluid independently and couple them through a
single shared Poisson solve on the (per-fluid weighted) total density.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .core import (
    Background,
    ConfigError,
    FluidState,
    Grid,
    SchemeError,
    StateLaw,
    diagnostics,
    replace_state,
)
from .gravity import (
    GravityParams,
    newtonian_kick,
    relativistic_kick,
    solve_poisson_source,
)
from .transport import (
    advect_fields,
    max_speed,
    step_1d,
    step_2d,
    step_3d,
    step_expanding,
)

__all__ = [
    "MODEL_KINDS",
    "FLUID_KINDS",
    "Fluid",
    "PhysicsParams",
    "RunState",
    "RunAborted",
    "step_static_gravity",
    "step_newtonian",
    "step_relativistic",
    "step_multifluid",
    "advance",
    "run_steps",
    "admissible_r",
]

FLUID_KINDS = (
    "pressureless_static_gravity",
    "newtonian_expanding",
    "relativistic_expanding",
)
MODEL_KINDS = FLUID_KINDS + ("multifluid",)

RADIATION_SPEED_SCALE = 4.0 / 3.0


@dataclass(frozen=True)
class Fluid:
    """One fluid component: its state, model kind, law and Poisson weight."""

    state: FluidState
    kind: str = "pressureless_static_gravity"
    law: StateLaw = field(default_factory=StateLaw.pressureless)
    source_factor: float = 4.0 * np.pi

    def __post_init__(self):
        if self.kind not in FLUID_KINDS:
            raise ConfigError(f"fluid kind must be one of {FLUID_KINDS}, got {self.kind!r}")
        if self.kind == "relativistic_expanding" and self.law.kind != "radiation":
            raise ConfigError("relativistic fluids need a radiation state law")
        if not self.source_factor > 0:
            raise ConfigError("source_factor must be positive")

    @property
    def speed_scale(self) -> float:
        return RADIATION_SPEED_SCALE if self.kind == "relativistic_expanding" else 1.0


@dataclass(frozen=True)
class PhysicsParams:
    """Step controls: model family, CFL ratio, optional gravity coupling.

    gravity=None disables the gravity sub-step entirely (pressure kicks still
    run where the state law has pressure).  uniform_source makes multifluid
    runs weight every fluid by gravity.source_factor instead of each fluid's
    own factor.
    """

    model: str
    r: float
    gravity: GravityParams | None = None
    uniform_source: bool = False

    def __post_init__(self):
        if self.model not in MODEL_KINDS:
            raise ConfigError(f"model must be one of {MODEL_KINDS}, got {self.model!r}")
        if not self.r > 0:
            raise ConfigError("CFL ratio r must be positive")


@dataclass
class RunState:
    """Everything a step needs plus the recorded history.

    phi caches the last solved potential for snapshots and to warm-start the
    next iterative Poisson solve.
    """

    fluids: list
    grid: Grid
    bg: Background
    t: float = 0.0
    n: int = 0
    history: list = field(default_factory=list)
    phi: np.ndarray | None = None

    def __post_init__(self):
        if not self.fluids:
            raise ConfigError("a run needs at least one fluid")
        for f in self.fluids:
            if f.state.rho.shape != self.grid.shape:
                raise ConfigError("all fluids must live on the run's grid")


class RunAborted(SchemeError):
    """A sub-step failed; last_valid holds the state before the failed step."""

    def __init__(self, message: str, last_valid: RunState):
        super().__init__(message)
        self.last_valid = last_valid


_STATIC_STEP = {1: step_1d, 2: step_2d, 3: step_3d}


def _single_fluid(run: RunState, model: str) -> Fluid:
    if len(run.fluids) != 1:
        raise ConfigError(f"{model} expects exactly one fluid, got {len(run.fluids)}")
    return run.fluids[0]


def _solve_shared_potential(run: RunState, fluids, params: PhysicsParams, a: float):
    """Shared Poisson solve on the weighted total density of stepped fluids."""
    gp = params.gravity
    source = np.zeros(run.grid.shape)
    for f in fluids:
        factor = gp.source_factor if params.uniform_source else f.source_factor
        source += factor * f.state.rho
    source *= gp.G * (a * a)
    return solve_poisson_source(source, run.grid, gp, phi0=run.phi)


def _velocity_correction(state: FluidState, grid: Grid, a: float, r: float) -> FluidState:
    """Translate the velocity field by (-u/2) dt / (3a) via overlap projection."""
    u = state.velocity()
    shift = -r / (6.0 * a)  # (-u/2) * dt / (3a) over h, with dt = r*h
    disps = [shift * u[ax] for ax in range(grid.dim)]
    new_u = advect_fields([u[ax] for ax in range(grid.dim)], disps, grid)
    mom = np.stack([state.rho * new_u[ax] for ax in range(grid.dim)])
    return replace_state(state, mom=mom)


def _kick_fluid(fluid: Fluid, grid: Grid, phi: np.ndarray | None, a: float,
                dt: float, have_gravity: bool) -> Fluid:
    """Apply this fluid's momentum kick against the (possibly absent) potential."""
    if fluid.kind == "relativistic_expanding":
        c = fluid.law.c_light
        if not have_gravity and c == 0.0:
            return fluid
        phi_arr = phi if phi is not None else np.zeros(grid.shape)
        return replace(fluid, state=relativistic_kick(fluid.state, grid, phi_arr, c, a, dt))
    has_pressure = fluid.law.kind != "pressureless"
    if not have_gravity and not has_pressure:
        return fluid
    phi_arr = phi if phi is not None else np.zeros(grid.shape)
    return replace(fluid, state=newtonian_kick(fluid.state, grid, phi_arr, fluid.law, a, dt))


def _finish(run: RunState, fluids, phi, dt: float) -> RunState:
    return RunState(list(fluids), run.grid, run.bg, run.t + dt, run.n + 1,
                    run.history, phi)


def step_static_gravity(run: RunState, params: PhysicsParams) -> RunState:
    """Static-background split step: transport, then Poisson + kick at a = 1."""
    fluid = _single_fluid(run, "pressureless_static_gravity")
    dt = params.r * run.grid.h
    state = _STATIC_STEP[run.grid.dim](fluid.state, run.grid, params.r)
    stepped = replace(fluid, state=state)
    phi = run.phi
    if params.gravity is not None:
        pot = _solve_shared_potential(run, [stepped], params, 1.0)
        phi = pot.phi
        stepped = _kick_fluid(stepped, run.grid, phi, 1.0, dt, True)
    elif fluid.law.kind != "pressureless":
        stepped = _kick_fluid(stepped, run.grid, None, 1.0, dt, False)
    return _finish(run, [stepped], phi, dt)


def step_newtonian(run: RunState, params: PhysicsParams) -> RunState:
    """Expanding split step: decaying transport, then Poisson + kick at a(t_n)."""
    fluid = _single_fluid(run, "newtonian_expanding")
    if fluid.law.kind == "radiation":
        raise ConfigError("newtonian step cannot evolve a radiation-law fluid")
    dt = params.r * run.grid.h
    a = run.bg.scale_at(run.t)
    state = step_expanding(fluid.state, run.grid, run.bg, run.t, params.r)
    stepped = replace(fluid, state=state)
    phi = run.phi
    if params.gravity is not None:
        pot = _solve_shared_potential(run, [stepped], params, a)
        phi = pot.phi
        stepped = _kick_fluid(stepped, run.grid, phi, a, dt, True)
    elif fluid.law.kind != "pressureless":
        stepped = _kick_fluid(stepped, run.grid, None, a, dt, False)
    return _finish(run, [stepped], phi, dt)


def step_relativistic(run: RunState, params: PhysicsParams) -> RunState:
    """Radiation-era split step: 4/3-speed transport, kick, velocity correction."""
    fluid = _single_fluid(run, "relativistic_expanding")
    if fluid.law.kind != "radiation":
        raise ConfigError("relativistic step needs a radiation state law")
    dt = params.r * run.grid.h
    a = run.bg.scale_at(run.t)
    state = step_expanding(fluid.state, run.grid, run.bg, run.t, params.r,
                           speed_scale=fluid.speed_scale)
    stepped = replace(fluid, state=state)
    phi = run.phi
    if params.gravity is not None:
        pot = _solve_shared_potential(run, [stepped], params, a)
        phi = pot.phi
        stepped = _kick_fluid(stepped, run.grid, phi, a, dt, True)
    else:
        stepped = _kick_fluid(stepped, run.grid, None, a, dt, False)
    corrected = _velocity_correction(stepped.state, run.grid, a, params.r)
    return _finish(run, [replace(stepped, state=corrected)], phi, dt)


def step_multifluid(run: RunState, params: PhysicsParams) -> RunState:
    """Independent transport per fluid, one shared Poisson solve, per-kind kicks."""
    if len(run.fluids) < 2:
        raise ConfigError("multifluid expects at least two fluids")
    dt = params.r * run.grid.h
    a = run.bg.scale_at(run.t)
    stepped = []
    for fluid in run.fluids:
        state = step_expanding(fluid.state, run.grid, run.bg, run.t, params.r,
                               speed_scale=fluid.speed_scale)
        stepped.append(replace(fluid, state=state))
    phi = run.phi
    have_gravity = params.gravity is not None
    if have_gravity:
        pot = _solve_shared_potential(run, stepped, params, a)
        phi = pot.phi
    kicked = [_kick_fluid(f, run.grid, phi if have_gravity else None, a, dt, have_gravity)
              for f in stepped]
    final = []
    for fluid in kicked:
        if fluid.kind == "relativistic_expanding":
            fluid = replace(fluid, state=_velocity_correction(fluid.state, run.grid, a, params.r))
        final.append(fluid)
    return _finish(run, final, phi if have_gravity else run.phi, dt)


_STEPPERS = {
    "pressureless_static_gravity": step_static_gravity,
    "newtonian_expanding": step_newtonian,
    "relativistic_expanding": step_relativistic,
    "multifluid": step_multifluid,
}


def advance(run: RunState, params: PhysicsParams) -> RunState:
    """One full split step of whichever model params selects."""
    return _STEPPERS[params.model](run, params)


def record_history(run: RunState) -> dict:
    """Append one history record (per-fluid diagnostics at the current time)."""
    entry = {
        "t": run.t,
        "n": run.n,
        "a": run.bg.scale_at(run.t),
        "fluids": [diagnostics(f.state, run.grid, run.bg, run.t).as_dict()
                   for f in run.fluids],
    }
    run.history.append(entry)
    return entry


def run_steps(run: RunState, params: PhysicsParams, steps: int,
              record_every: int = 1, observer=None) -> RunState:
    """Advance the run a fixed number of steps, recording diagnostics.

    record_every=0 disables history; the initial state is always recorded
    when recording is on.  observer(run) is called after every step (used by
    the CLI for snapshot emission).  A failing sub-step raises RunAborted
    carrying the last valid state.
    """
    if steps < 0:
        raise ConfigError("steps must be >= 0")
    if record_every < 0:
        raise ConfigError("record_every must be >= 0")
    if record_every and not run.history:
        record_history(run)
    for _ in range(steps):
        try:
            run = advance(run, params)
        except SchemeError as exc:
            raise RunAborted(f"step {run.n + 1} failed: {exc}", run) from exc
        if record_every and run.n % record_every == 0:
            record_history(run)
        if observer is not None:
            observer(run)
    return run


def admissible_r(run: RunState, params: PhysicsParams) -> float:
    """Largest CFL ratio admissible for the initial data (advisory, at t=0).

    Velocities change during a run, so this is a starting bound, not a
    guarantee; steps re-check the actual displacements.
    """
    factor = run.bg.velocity_factor(run.t, run.t)
    worst = 0.0
    for fluid in run.fluids:
        worst = max(worst, fluid.speed_scale * max_speed(fluid.state) * factor)
    return float("inf") if worst == 0 else 1.0 / worst
