"""Finite-volume solver for pressureless self-gravitating flows.

Cell contents move by their own velocity and are redistributed by exact
geometric overlap, which keeps delta-shaped concentrations sharp.  Model
families: pure transport, static self-gravity, Newtonian flows on expanding
backgrounds, a radiation-era variant, and gravitationally coupled mixtures.
"""

from .core import (
    Background,
    CflError,
    ConfigError,
    Diagnostics,
    FluidState,
    Grid,
    PowerLawBackground,
    SchemeError,
    SolverError,
    StateLaw,
    StaticBackground,
    TabulatedBackground,
    comoving_displacement,
    diagnostics,
)
from .config import ScenarioConfig, load_config, parse_config, render_config
from .gravity import GravityParams, Potential, newtonian_kick, relativistic_kick, solve_poisson
from .orchestrator import (
    Fluid,
    PhysicsParams,
    RunAborted,
    RunState,
    admissible_r,
    advance,
    run_steps,
)
from .riemann import DeltaWave, RiemannData, SharingCoefficients, VacuumFan, delta_wave, sharing, vacuum_fan
from .scenarios import PRESET_NAMES, ScenarioPreset, Setup, generate, reference_solution
from .snapshots import emit_diagnostics_stream, read_diagnostics, read_snapshot, write_snapshot
from .transport import (
    CflParams,
    ShiftParams,
    leroux_step,
    overlap_area,
    overlap_length,
    overlap_volume,
    peak_support,
    step_1d,
    step_1d_expanding,
    step_2d,
    step_2d_expanding,
    step_3d,
    step_3d_expanding,
    step_shifted,
    viscosity_step,
)

__version__ = "0.1.0"
