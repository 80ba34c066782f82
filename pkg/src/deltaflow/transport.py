"""Overlap-projection transport kernels.

One step moves every cell's content by its own displacement r*u (in cell
units) and redistributes it over the up-to-3^dim receiving cells by exact
geometric overlap.  The three 1D weights of a donor with displacement d are
L(d-1, d), L(d, 1+d) and L(1+d, 2+d) toward the right neighbor, itself and
the left neighbor; they sum to 1 for |d| <= 1, which is the CFL condition.
Multi-dimensional weights are tensor products of the 1D ones.

Variants: expanding-background steps (fields decayed by scale-factor ratios,
displacement from the trapezoid comoving factor), the frame-shifted scheme
(all speeds made nonnegative by adding c), the baseline Godunov scheme with
interface states picked by a sign table, and an optional diffusion pass.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import (
    Background,
    CflError,
    ConfigError,
    FluidState,
    Grid,
    SchemeError,
    replace_state,
)

__all__ = [
    "CflParams",
    "ShiftParams",
    "overlap_length",
    "overlap_area",
    "overlap_volume",
    "step_1d",
    "step_2d",
    "step_3d",
    "step_expanding",
    "step_1d_expanding",
    "step_2d_expanding",
    "step_3d_expanding",
    "step_shifted",
    "leroux_step",
    "viscosity_step",
    "advect_fields",
    "max_speed",
    "peak_support",
]

# FP slack on the hard CFL precondition: velocity ratios rho*u/rho can sit a
# few ulps above an exact bound; anything past the slack is a real violation.
_CFL_SLACK = 1e-12


@dataclass(frozen=True)
class CflParams:
    """Time step ratio r = dt/h and the safety factor used by drivers."""

    r: float
    safety: float = 1.0

    def __post_init__(self):
        if not self.r > 0:
            raise ConfigError("CFL ratio r must be positive")
        if not 0 < self.safety <= 1:
            raise ConfigError("CFL safety factor must be in (0, 1]")


@dataclass(frozen=True)
class ShiftParams:
    """Velocity shift of the frame-shifted scheme.

    With reindex_every_two the product r * c_shift must be exactly 1/2 and
    the scheme relabels i -> i-1 after every second step, so results are
    directly comparable to the unshifted scheme without a final translation.
    """

    c_shift: float
    reindex_every_two: bool = False


def overlap_length(a, b):
    """L(a, b): length of [0, 1] intersected with [a, b], clamped to >= 0."""
    return np.maximum(0.0, np.minimum(1.0, b) - np.maximum(0.0, a))


def overlap_area(a, b):
    """A(a, b) = L(a, 1+a) L(b, 1+b): unit square against its (a, b) translate."""
    return overlap_length(a, 1.0 + a) * overlap_length(b, 1.0 + b)


def overlap_volume(a, b, c):
    """V(a, b, c): unit cube against its (a, b, c) translate."""
    return overlap_length(a, 1.0 + a) * overlap_length(b, 1.0 + b) * overlap_length(c, 1.0 + c)


def max_speed(state: FluidState) -> float:
    """Largest |u| over non-vacuum cells (0 if everything is vacuum)."""
    u = state.velocity()
    return float(np.abs(u).max()) if u.size else 0.0


def _pad(arr: np.ndarray, grid: Grid) -> np.ndarray:
    mode = "edge" if grid.boundary == "outflow" else "constant"
    return np.pad(arr, 1, mode=mode)


def _apply_margin(arrays, grid: Grid):
    if grid.boundary != "zero_margin":
        return
    m = grid.margin
    for arr in arrays:
        for ax in range(arr.ndim):
            sl = [slice(None)] * arr.ndim
            sl[ax] = slice(0, m)
            arr[tuple(sl)] = 0.0
            sl[ax] = slice(arr.shape[ax] - m, None)
            arr[tuple(sl)] = 0.0


def _check_displacement(disps, what: str):
    worst = max(float(np.abs(d).max()) for d in disps)
    if worst > 1.0 + _CFL_SLACK:
        raise CflError(f"CFL violated: max |{what}| = {worst:.6g} > 1")
    return [np.clip(d, -1.0, 1.0) for d in disps]


def _advect(fields, disps, grid: Grid):
    """Overlap update of each field by per-cell displacement ratios per axis."""
    padded = [_pad(f, grid) for f in fields]
    pdisp = [_pad(d, grid) for d in disps]
    weights = []
    for d in pdisp:
        weights.append({
            1: overlap_length(d - 1.0, d),
            0: overlap_length(d, 1.0 + d),
            -1: overlap_length(1.0 + d, 2.0 + d),
        })
    out = [np.zeros(grid.shape) for _ in fields]
    for offs in itertools.product((-1, 0, 1), repeat=grid.dim):
        # receiver i gets donor i - offs; donors live at padded index i+1-offs
        sl = tuple(slice(1 - o, 1 - o + grid.n[ax]) for ax, o in enumerate(offs))
        w = weights[0][offs[0]][sl]
        for ax in range(1, grid.dim):
            w = w * weights[ax][offs[ax]][sl]
        for acc, f in zip(out, padded):
            acc += f[sl] * w
    _apply_margin(out, grid)
    return out


def advect_fields(fields, disps, grid: Grid):
    """Overlap-project arbitrary cell fields by a per-cell displacement field.

    Used for sub-steps that translate non-conserved quantities (e.g. the
    radiation-era velocity correction); the same CFL bound |d| <= 1 applies.
    """
    disps = _check_displacement(list(disps), "field displacement")
    return _advect(list(fields), disps, grid)


def _check_grid(state: FluidState, grid: Grid, dim: int | None = None):
    if state.rho.shape != grid.shape:
        raise ConfigError(f"state shape {state.rho.shape} does not match grid {grid.shape}")
    if dim is not None and grid.dim != dim:
        raise ConfigError(f"expected a {dim}d grid, got {grid.dim}d")


def _step_static(state: FluidState, grid: Grid, r: float) -> FluidState:
    if not r > 0:
        raise ConfigError("r must be positive")
    u = state.velocity()
    disps = _check_displacement([r * u[ax] for ax in range(grid.dim)], "r*u")
    new = _advect([state.rho, *state.mom], disps, grid)
    return replace_state(state, rho=new[0], mom=np.stack(new[1:]))


def step_1d(state: FluidState, grid: Grid, r: float) -> FluidState:
    """One overlap-projection step in 1D; requires r * max|u| <= 1."""
    _check_grid(state, grid, 1)
    return _step_static(state, grid, r)


def step_2d(state: FluidState, grid: Grid, r: float) -> FluidState:
    """One overlap-projection step in 2D (9-cell tensor-product weights)."""
    _check_grid(state, grid, 2)
    return _step_static(state, grid, r)


def step_3d(state: FluidState, grid: Grid, r: float) -> FluidState:
    """One overlap-projection step in 3D (27-cell tensor-product weights)."""
    _check_grid(state, grid, 3)
    return _step_static(state, grid, r)


def step_expanding(state: FluidState, grid: Grid, bg: Background, t: float,
                   r: float, speed_scale: float = 1.0) -> FluidState:
    """Transport step over [t, t + r*h] on an expanding background.

    Fields are first decayed by (a(t)/a(t+dt))^3 (density) and ^4 (momentum),
    then advected with displacement ratio r * u * velocity_factor, the
    trapezoid approximation of the comoving displacement over the step.
    speed_scale multiplies the advection velocity (the radiation-era system
    transports with 4/3 of the fluid velocity).  Static backgrounds reduce
    bit-for-bit to the static step.
    """
    _check_grid(state, grid)
    if not r > 0:
        raise ConfigError("r must be positive")
    dt = r * grid.h
    t1 = t + dt
    a0 = bg.scale_at(t)
    a1 = bg.scale_at(t1)
    factor = bg.velocity_factor(t, t1)
    ratio = a0 / a1
    dec3 = ratio * ratio * ratio
    dec4 = dec3 * ratio
    u = state.velocity()
    disps = [r * u[ax] * speed_scale * factor for ax in range(grid.dim)]
    disps = _check_displacement(disps, "comoving displacement / h")
    fields = [state.rho * dec3] + [state.mom[ax] * dec4 for ax in range(grid.dim)]
    new = _advect(fields, disps, grid)
    return replace_state(state, rho=new[0], mom=np.stack(new[1:]))


def step_1d_expanding(state, grid, bg, t, r, speed_scale=1.0):
    _check_grid(state, grid, 1)
    return step_expanding(state, grid, bg, t, r, speed_scale)


def step_2d_expanding(state, grid, bg, t, r, speed_scale=1.0):
    _check_grid(state, grid, 2)
    return step_expanding(state, grid, bg, t, r, speed_scale)


def step_3d_expanding(state, grid, bg, t, r, speed_scale=1.0):
    _check_grid(state, grid, 3)
    return step_expanding(state, grid, bg, t, r, speed_scale)


def step_shifted(state: FluidState, grid: Grid, shift: ShiftParams, r: float,
                 step_index: int = 0) -> FluidState:
    """One step with all speeds shifted by c_shift (1D).

    The shifted field equals the unshifted solution translated by c*t; with
    reindex_every_two the relabeling i -> i-1 applied after every second step
    removes that translation piecewise (r * c_shift = 1/2 exactly required).
    All shifted speeds must be nonnegative.
    """
    _check_grid(state, grid, 1)
    if not r > 0:
        raise ConfigError("r must be positive")
    c = shift.c_shift
    if shift.reindex_every_two and r * c != 0.5:
        raise ConfigError(f"reindex strategy requires r*c_shift == 1/2 exactly, got {r * c}")
    u = state.velocity()[0]
    defined = state.defined()
    if np.any(defined) and float(u[defined].min()) + c < 0:
        raise ConfigError("c_shift too small: some shifted speed u + c is negative")
    disps = _check_displacement([r * (u + c)], "r*(u+c)")
    new = _advect([state.rho, state.mom[0]], disps, grid)
    if shift.reindex_every_two and step_index % 2 == 1:
        fill = "edge" if grid.boundary == "outflow" else "zero"
        new = [_shift_left(arr, fill) for arr in new]
        _apply_margin(new, grid)
    return replace_state(state, rho=new[0], mom=new[1][np.newaxis])


def _shift_left(arr: np.ndarray, fill: str) -> np.ndarray:
    out = np.empty_like(arr)
    out[:-1] = arr[1:]
    out[-1] = arr[-1] if fill == "edge" else 0.0
    return out


def leroux_step(state: FluidState, grid: Grid, r: float) -> FluidState:
    """Baseline Godunov step (1D): interface state by the sign table.

    Both velocities nonnegative take the left state, both negative the right
    state, receding velocities give a vacuum interface, and approaching ones
    are decided by the sign of w = sqrt(rho_i) u_i + sqrt(rho_i+1) u_i+1
    (w == 0 ties to the left branch).
    """
    _check_grid(state, grid, 1)
    if not r > 0:
        raise ConfigError("r must be positive")
    u = state.velocity()[0]
    if r * float(np.abs(u).max()) > 1.0 + _CFL_SLACK:
        raise CflError(f"CFL violated: r*max|u| = {r * float(np.abs(u).max()):.6g} > 1")
    rho_p = _pad(state.rho, grid)
    u_p = _pad(u, grid)
    rl, rr = rho_p[:-1], rho_p[1:]
    ul, ur = u_p[:-1], u_p[1:]
    w = np.sqrt(rl) * ul + np.sqrt(rr) * ur
    take_left = np.where(ur >= 0, True, w >= 0)
    u_half = np.where(ul >= 0, np.where(take_left, ul, ur), np.where(ur >= 0, 0.0, ur))
    rho_half = np.where(ul >= 0, np.where(take_left, rl, rr), np.where(ur >= 0, 0.0, rr))
    fm = rho_half * u_half
    fp = fm * u_half
    rho_new = state.rho - r * (fm[1:] - fm[:-1])
    mom_new = state.mom[0] - r * (fp[1:] - fp[:-1])
    out = [rho_new, mom_new]
    _apply_margin(out, grid)
    return replace_state(state, rho=out[0], mom=out[1][np.newaxis])


def viscosity_step(state: FluidState, grid: Grid, eps: float, r: float) -> FluidState:
    """Overlap step followed by an explicit diffusion pass on rho and mom (1D).

    The diffusion number eps*dt/h^2 must not exceed 1/2.
    """
    _check_grid(state, grid, 1)
    if eps < 0:
        raise ConfigError("eps must be >= 0")
    nu = eps * r / grid.h  # eps * dt / h^2 with dt = r*h
    if nu > 0.5 + _CFL_SLACK:
        raise SchemeError(f"diffusion unstable: eps*dt/h^2 = {nu:.6g} > 1/2")
    stepped = _step_static(state, grid, r)
    out = []
    for f in (stepped.rho, stepped.mom[0]):
        fp = _pad(f, grid)
        out.append(f + nu * (fp[:-2] - 2.0 * f + fp[2:]))
    _apply_margin(out, grid)
    return replace_state(stepped, rho=out[0], mom=out[1][np.newaxis])


def peak_support(rho: np.ndarray, frac: float = 0.99) -> tuple[int, tuple[int, int]]:
    """Smallest contiguous block around the maximum holding >= frac of the mass.

    Grows greedily from the argmax, always taking the larger neighbor (left
    on ties).  Returns (cell count, (lo, hi) inclusive index range).
    """
    rho = np.asarray(rho, dtype=float)
    if rho.ndim != 1:
        raise ConfigError("peak_support expects a 1d density profile")
    total = float(rho.sum())
    if total <= 0:
        raise ConfigError("peak_support needs positive total mass")
    lo = hi = int(np.argmax(rho))
    acc = float(rho[lo])
    n = rho.size
    while acc < frac * total:
        left = rho[lo - 1] if lo > 0 else -np.inf
        right = rho[hi + 1] if hi < n - 1 else -np.inf
        if left == right == -np.inf:
            break
        if left >= right:
            lo -= 1
            acc += float(rho[lo])
        else:
            hi += 1
            acc += float(rho[hi])
    return hi - lo + 1, (lo, hi)
