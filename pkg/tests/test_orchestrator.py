import numpy as np
import pytest

from deltaflow import (
    ConfigError,
    Fluid,
    FluidState,
    Grid,
    GravityParams,
    PhysicsParams,
    PowerLawBackground,
    RunAborted,
    RunState,
    StateLaw,
    StaticBackground,
    admissible_r,
    advance,
    run_steps,
    step_1d,
)
from deltaflow.orchestrator import record_history

from conftest import uniform_state


def _compact_run(grid, rng, kind="pressureless_static_gravity", bg=None, umax=0.3,
                 inset=10):
    rho = np.zeros(grid.shape)
    inner = tuple(slice(inset, k - inset) for k in grid.shape)
    rho[inner] = rng.uniform(0.5, 2.0, rho[inner].shape)
    u = np.zeros((grid.dim,) + grid.shape)
    u[(slice(None),) + inner] = rng.uniform(-umax, umax, (grid.dim,) + rho[inner].shape)
    state = FluidState(rho, u * rho[np.newaxis])
    return RunState([Fluid(state, kind, StateLaw.pressureless())], grid,
                    bg or StaticBackground())


def test_fluid_and_params_validation():
    state = FluidState(np.ones(8), np.zeros((1, 8)))
    with pytest.raises(ConfigError):
        Fluid(state, "warm_dark_matter")
    with pytest.raises(ConfigError):
        Fluid(state, "relativistic_expanding", StateLaw.pressureless())
    with pytest.raises(ConfigError):
        PhysicsParams("unknown_model", 0.5)
    with pytest.raises(ConfigError):
        PhysicsParams("newtonian_expanding", 0.0)


def test_run_state_checks_fluid_shapes():
    grid = Grid(n=(8,), h=0.1)
    state = FluidState(np.ones(9), np.zeros((1, 9)))
    with pytest.raises(ConfigError):
        RunState([Fluid(state)], grid, StaticBackground())
    with pytest.raises(ConfigError):
        RunState([], grid, StaticBackground())


def test_static_model_without_gravity_is_pure_transport():
    rng = np.random.default_rng(21)
    grid = Grid(n=(64,), h=0.1, boundary="zero_margin", margin=2)
    run = _compact_run(grid, rng)
    params = PhysicsParams("pressureless_static_gravity", 0.5, gravity=None)
    out = advance(run, params)
    oracle = step_1d(run.fluids[0].state, grid, 0.5)
    assert np.array_equal(out.fluids[0].state.rho, oracle.rho)
    assert np.array_equal(out.fluids[0].state.mom, oracle.mom)
    assert out.n == 1 and out.t == 0.5 * grid.h


def test_newtonian_model_reduces_to_transport_on_static_background():
    rng = np.random.default_rng(22)
    grid = Grid(n=(64,), h=0.1, boundary="zero_margin", margin=2)
    run = _compact_run(grid, rng, kind="newtonian_expanding")
    params = PhysicsParams("newtonian_expanding", 0.5, gravity=None)
    out = advance(run, params)
    oracle = step_1d(run.fluids[0].state, grid, 0.5)
    assert np.array_equal(out.fluids[0].state.rho, oracle.rho)
    assert np.array_equal(out.fluids[0].state.mom, oracle.mom)


def test_gravity_pulls_tails_inward():
    grid = Grid(n=(65,), h=1.0 / 65, boundary="outflow")
    x = grid.centers(0)
    rho = 1.0 + 4.0 * np.exp(-((x - 0.5) ** 2) / 0.005)
    run = RunState([Fluid(FluidState(rho, np.zeros((1, 65))))], grid, StaticBackground())
    params = PhysicsParams("pressureless_static_gravity", 0.25,
                           gravity=GravityParams(G=5.0))
    out = advance(run, params)
    u = out.fluids[0].state.velocity()[0]
    assert u[10] > 0 and u[54] < 0
    assert out.phi is not None and out.phi.min() < 0


def test_expanding_comoving_mass_conserved():
    rng = np.random.default_rng(23)
    grid = Grid(n=(192,), h=0.1, boundary="zero_margin", margin=2)
    bg = PowerLawBackground(p=2.0 / 3.0, t0=1.0)
    # inset > steps + margin: the spreading support never reaches the margin
    run = _compact_run(grid, rng, kind="newtonian_expanding", bg=bg, umax=0.2, inset=40)
    params = PhysicsParams("newtonian_expanding", 0.5, gravity=None)
    done = run_steps(run, params, 20, record_every=1)
    masses = [rec["fluids"][0]["mass"] for rec in done.history]
    np.testing.assert_allclose(masses, masses[0], rtol=1e-12)


def test_run_aborted_carries_last_valid_state():
    grid = Grid(n=(16,), h=0.1, boundary="outflow")
    run = RunState([Fluid(uniform_state(grid, 1.0, 0.9))], grid, StaticBackground())
    params = PhysicsParams("pressureless_static_gravity", 0.5, gravity=None)
    ok = run_steps(run, params, 3, record_every=0)
    assert ok.n == 3
    bad = RunState([Fluid(uniform_state(grid, 1.0, 2.5))], grid, StaticBackground())
    with pytest.raises(RunAborted) as info:
        run_steps(bad, params, 3, record_every=0)
    assert info.value.last_valid.n == 0


def test_run_steps_recording_cadence():
    grid = Grid(n=(16,), h=0.1, boundary="outflow")
    run = RunState([Fluid(uniform_state(grid, 1.0, 0.1))], grid, StaticBackground())
    params = PhysicsParams("pressureless_static_gravity", 0.5, gravity=None)
    done = run_steps(run, params, 10, record_every=3)
    assert [rec["n"] for rec in done.history] == [0, 3, 6, 9]
    silent = RunState([Fluid(uniform_state(grid, 1.0, 0.1))], grid, StaticBackground())
    assert run_steps(silent, params, 5, record_every=0).history == []


def test_record_history_entry_shape():
    grid = Grid(n=(8,), h=0.5, boundary="outflow")
    run = RunState([Fluid(uniform_state(grid, 2.0, 0.0))], grid, StaticBackground())
    entry = record_history(run)
    assert entry["t"] == 0.0 and entry["n"] == 0 and entry["a"] == 1.0
    f = entry["fluids"][0]
    assert f["mass"] == pytest.approx(2.0 * 8 * 0.5)
    assert set(f) == {"mass", "momentum", "max_rho", "min_rho", "contrast"}


def test_observer_sees_every_step():
    grid = Grid(n=(16,), h=0.1, boundary="outflow")
    run = RunState([Fluid(uniform_state(grid, 1.0, 0.1))], grid, StaticBackground())
    params = PhysicsParams("pressureless_static_gravity", 0.5, gravity=None)
    seen = []
    run_steps(run, params, 4, record_every=0, observer=lambda s: seen.append(s.n))
    assert seen == [1, 2, 3, 4]


def test_admissible_r_bound():
    grid = Grid(n=(16,), h=0.1, boundary="outflow")
    run = RunState([Fluid(uniform_state(grid, 1.0, 0.5))], grid, StaticBackground())
    params = PhysicsParams("pressureless_static_gravity", 0.5, gravity=None)
    assert admissible_r(run, params) == pytest.approx(2.0, rel=1e-12)


def test_multifluid_split_halves_track_full_run_bitwise():
    # two identical half-density fluids share the Poisson source, so every
    # update scales by exact powers of two: halves equal half of the single
    # fluid bit for bit, step after step
    rng = np.random.default_rng(31)
    grid = Grid(n=(32, 32), h=1.0 / 32, boundary="outflow")
    rho = rng.uniform(0.9, 1.1, (32, 32))
    u = rng.uniform(-0.3, 0.3, (2, 32, 32))
    bg = PowerLawBackground(p=2.0 / 3.0, t0=1.0)
    grav = GravityParams(G=4.0, solver_tol=1e-12)

    single = RunState([Fluid(FluidState.from_primitive(rho, u), "newtonian_expanding")],
                      grid, bg)
    halves = RunState([Fluid(FluidState.from_primitive(0.5 * rho, u), "newtonian_expanding"),
                       Fluid(FluidState.from_primitive(0.5 * rho, u), "newtonian_expanding")],
                      grid, bg)
    done_single = run_steps(single, PhysicsParams("newtonian_expanding", 0.25, gravity=grav),
                            5, record_every=0)
    done_halves = run_steps(halves, PhysicsParams("multifluid", 0.25, gravity=grav),
                            5, record_every=0)
    full = done_single.fluids[0].state
    for half in done_halves.fluids:
        assert np.array_equal(half.state.rho, 0.5 * full.rho)
        assert np.array_equal(half.state.mom, 0.5 * full.mom)


def test_multifluid_requires_two_fluids():
    grid = Grid(n=(8,), h=0.1, boundary="outflow")
    run = RunState([Fluid(uniform_state(grid, 1.0, 0.0), "newtonian_expanding")],
                   grid, StaticBackground())
    with pytest.raises(ConfigError):
        advance(run, PhysicsParams("multifluid", 0.5, gravity=None))
