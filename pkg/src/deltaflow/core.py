"""Grids, fluid states, cosmological backgrounds and run diagnostics.

Everything downstream (transport kernels, gravity, orchestration) is built on
the small value types defined here.  Fields live on uniform cell-centered
grids; a fluid is described by its density ``rho`` and momentum density
``mom`` (velocity is derived, and undefined wherever the cell is vacuum).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "SchemeError",
    "CflError",
    "SolverError",
    "ConfigError",
    "Grid",
    "FluidState",
    "StateLaw",
    "Background",
    "StaticBackground",
    "PowerLawBackground",
    "TabulatedBackground",
    "comoving_displacement",
    "Diagnostics",
    "diagnostics",
    "exact_sum",
]

#: Relative scale of the vacuum floor: cells with rho below
#: 1e-300 * max(1, initial max rho) carry no defined velocity.
VACUUM_SCALE = 1e-300

BOUNDARY_MODES = ("outflow", "zero_margin")


class SchemeError(RuntimeError):
    """A numerical precondition of the scheme was violated."""


class CflError(SchemeError):
    """Time step rejected: the CFL ratio exceeds 1."""


class SolverError(SchemeError):
    """An iterative solver failed to reach its tolerance."""


class ConfigError(ValueError):
    """Invalid configuration input."""


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centered grid in 1, 2 or 3 dimensions.

    Parameters
    ----------
    n : tuple of int
        Cells per axis; one entry per dimension, each >= 3.
    h : float
        Cell size, identical along every axis.
    boundary : str
        "outflow" copies edge cells into a one-cell ghost ring;
        "zero_margin" forces rho = mom = 0 in a margin of ``margin`` cells.
    margin : int
        Width of the forced-vacuum margin (zero_margin mode only).
    origin : tuple of float
        Coordinate of the low edge of the domain along each axis.
    """

    n: tuple[int, ...]
    h: float
    boundary: str = "zero_margin"
    margin: int = 2
    origin: tuple[float, ...] = ()

    def __post_init__(self):
        n = tuple(int(k) for k in self.n)
        object.__setattr__(self, "n", n)
        if not 1 <= len(n) <= 3:
            raise ConfigError(f"grid dimension must be 1, 2 or 3, got {len(n)}")
        if any(k < 3 for k in n):
            raise ConfigError(f"every axis needs at least 3 cells, got n={n}")
        if not self.h > 0:
            raise ConfigError(f"cell size h must be positive, got {self.h}")
        if self.boundary not in BOUNDARY_MODES:
            raise ConfigError(f"boundary must be one of {BOUNDARY_MODES}, got {self.boundary!r}")
        if self.margin < 1:
            raise ConfigError(f"margin must be >= 1, got {self.margin}")
        origin = tuple(float(x) for x in self.origin) if self.origin else (0.0,) * len(n)
        if len(origin) != len(n):
            raise ConfigError("origin must give one coordinate per axis")
        object.__setattr__(self, "origin", origin)

    @property
    def dim(self) -> int:
        return len(self.n)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.n

    def centers(self, axis: int = 0) -> np.ndarray:
        """Cell-center coordinates along one axis."""
        return self.origin[axis] + (np.arange(self.n[axis]) + 0.5) * self.h

    def extent(self, axis: int = 0) -> tuple[float, float]:
        return self.origin[axis], self.origin[axis] + self.n[axis] * self.h


@dataclass
class FluidState:
    """Conserved fields of one fluid: density and momentum density.

    ``mom`` is stored axes-first: shape (dim,) + grid.shape.  Velocity is a
    derived quantity, defined only where rho exceeds the vacuum floor.
    """

    rho: np.ndarray
    mom: np.ndarray
    floor: float = 0.0

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=float)
        self.mom = np.asarray(self.mom, dtype=float)
        if self.mom.shape != (self.dim,) + self.rho.shape:
            raise ConfigError(
                f"mom shape {self.mom.shape} does not match (dim,) + rho shape {self.rho.shape}"
            )
        if np.any(self.rho < 0):
            raise ConfigError("density must be nonnegative")
        if self.floor == 0.0:
            self.floor = VACUUM_SCALE * max(1.0, float(self.rho.max()))

    @property
    def dim(self) -> int:
        return self.rho.ndim

    @classmethod
    def from_primitive(cls, rho, u, floor: float = 0.0) -> "FluidState":
        """Build a state from density and velocity (u may be one array per axis)."""
        rho = np.asarray(rho, dtype=float)
        u = np.asarray(u, dtype=float)
        if u.shape == rho.shape:
            u = u[np.newaxis]
        mom = rho[np.newaxis] * u
        return cls(rho=rho, mom=mom, floor=floor)

    def defined(self) -> np.ndarray:
        """Mask of cells whose velocity is defined (non-vacuum)."""
        return self.rho > self.floor

    def velocity(self) -> np.ndarray:
        """Velocity per axis, zero (and flagged undefined) in vacuum cells."""
        out = np.zeros_like(self.mom)
        mask = self.defined()
        np.divide(self.mom, self.rho[np.newaxis], out=out,
                  where=np.broadcast_to(mask, self.mom.shape))
        return out

    def copy(self) -> "FluidState":
        return FluidState(self.rho.copy(), self.mom.copy(), self.floor)


@dataclass(frozen=True)
class StateLaw:
    """Pressure law p(rho).

    kind is one of "pressureless" (p = 0), "linear" (p = kappa * rho) or
    "radiation" (p = c_light^2 rho / 3).
    """

    kind: str = "pressureless"
    kappa: float = 0.0
    c_light: float = 0.0

    def __post_init__(self):
        if self.kind not in ("pressureless", "linear", "radiation"):
            raise ConfigError(f"unknown state law {self.kind!r}")
        if self.kind == "linear" and self.kappa < 0:
            raise ConfigError("kappa must be >= 0")
        if self.kind == "radiation" and not self.c_light > 0:
            raise ConfigError("radiation law needs c_light > 0")

    @classmethod
    def pressureless(cls) -> "StateLaw":
        return cls("pressureless")

    @classmethod
    def linear(cls, kappa: float) -> "StateLaw":
        return cls("linear", kappa=kappa)

    @classmethod
    def radiation(cls, c_light: float) -> "StateLaw":
        return cls("radiation", c_light=c_light)

    def pressure(self, rho: np.ndarray) -> np.ndarray:
        if self.kind == "pressureless":
            return np.zeros_like(rho)
        if self.kind == "linear":
            return self.kappa * rho
        return (self.c_light * self.c_light / 3.0) * rho


class Background:
    """Scale factor a(t) of the expanding background.

    Sub-classes provide ``scale_at`` and ``hubble_at``; the displacement
    integral of 1/a(s)^2 has a closed form per family.
    """

    kind = "static"

    def scale_at(self, t: float) -> float:
        raise NotImplementedError

    def hubble_at(self, t: float) -> float:
        raise NotImplementedError

    def inv_sq_integral(self, t0: float, t1: float) -> float:
        """Integral of ds / a(s)^2 over [t0, t1] (exact per family)."""
        raise NotImplementedError

    def velocity_factor(self, t0: float, t1: float) -> float:
        """Trapezoid factor a(t0)/2 * (1/a(t1)^2 + 1/a(t0)^2).

        Multiplied by u0 * (t1 - t0) this is the comoving displacement of a
        free-streaming cell over one step; evaluates to exactly 1.0 on a
        static background so the expanding kernels reduce bit-for-bit to the
        static ones.
        """
        a0 = self.scale_at(t0)
        a1 = self.scale_at(t1)
        return a0 * 0.5 * (1.0 / (a1 * a1) + 1.0 / (a0 * a0))


class StaticBackground(Background):
    """a(t) = 1 for all t."""

    kind = "static"

    def scale_at(self, t: float) -> float:
        return 1.0

    def hubble_at(self, t: float) -> float:
        return 0.0

    def inv_sq_integral(self, t0: float, t1: float) -> float:
        return t1 - t0


@dataclass(frozen=True)
class PowerLawBackground(Background):
    """a(t) = (1 + t/t0)^p with p >= 0, normalized so a(0) = 1."""

    p: float
    t0: float = 1.0
    kind: str = field(default="power_law", init=False)

    def __post_init__(self):
        if self.p < 0:
            raise ConfigError("power-law exponent p must be >= 0 (nondecreasing a)")
        if not self.t0 > 0:
            raise ConfigError("power-law time scale t0 must be positive")

    def scale_at(self, t: float) -> float:
        base = 1.0 + t / self.t0
        if base <= 0:
            raise ConfigError(f"scale factor undefined at t={t} (t <= -t0)")
        return base ** self.p

    def hubble_at(self, t: float) -> float:
        return self.p / (self.t0 + t)

    def inv_sq_integral(self, t0: float, t1: float) -> float:
        q = 1.0 - 2.0 * self.p
        b0 = 1.0 + t0 / self.t0
        b1 = 1.0 + t1 / self.t0
        if b0 <= 0 or b1 <= 0:
            raise ConfigError("integral of 1/a^2 undefined for t <= -t0")
        if self.p == 0.5:
            return self.t0 * (math.log(b1) - math.log(b0))
        return self.t0 / q * (b1 ** q - b0 ** q)


class TabulatedBackground(Background):
    """Piecewise-linear a(t) through given (t, a) samples."""

    kind = "tabulated"

    def __init__(self, times, values):
        t = np.asarray(times, dtype=float)
        a = np.asarray(values, dtype=float)
        if t.ndim != 1 or t.shape != a.shape or t.size < 2:
            raise ConfigError("tabulated background needs matching 1d arrays of >= 2 samples")
        if np.any(np.diff(t) <= 0):
            raise ConfigError("sample times must be strictly increasing")
        if np.any(a <= 0):
            raise ConfigError("scale factor samples must be positive")
        if np.any(np.diff(a) < 0):
            raise ConfigError("scale factor samples must be nondecreasing")
        self.times = t
        self.values = a

    def _check(self, t: float):
        if t < self.times[0] or t > self.times[-1]:
            raise ConfigError(
                f"t={t} outside tabulated range [{self.times[0]}, {self.times[-1]}]"
            )

    def scale_at(self, t: float) -> float:
        self._check(t)
        return float(np.interp(t, self.times, self.values))

    def hubble_at(self, t: float) -> float:
        self._check(t)
        # slope of the containing segment (right-continuous at sample points)
        i = int(np.searchsorted(self.times, t, side="right") - 1)
        i = min(max(i, 0), len(self.times) - 2)
        slope = (self.values[i + 1] - self.values[i]) / (self.times[i + 1] - self.times[i])
        return slope / self.scale_at(t)

    def inv_sq_integral(self, t0: float, t1: float) -> float:
        self._check(t0)
        self._check(t1)
        if t1 < t0:
            raise ConfigError("integral needs t1 >= t0")
        total = 0.0
        for i in range(len(self.times) - 1):
            lo = max(t0, self.times[i])
            hi = min(t1, self.times[i + 1])
            if hi <= lo:
                continue
            m = (self.values[i + 1] - self.values[i]) / (self.times[i + 1] - self.times[i])
            a_lo = self.values[i] + m * (lo - self.times[i])
            a_hi = self.values[i] + m * (hi - self.times[i])
            if m == 0.0:
                total += (hi - lo) / (a_lo * a_lo)
            else:
                # closed form for linear a: int dt/a^2 = (1/a_lo - 1/a_hi)/m
                total += (1.0 / a_lo - 1.0 / a_hi) / m
        return total


def comoving_displacement(bg: Background, u0: float, t0: float, t1: float) -> float:
    """Displacement u0 * a(t0) * integral dt/a^2 over [t0, t1], trapezoid rule.

    This is the per-step displacement used by the expanding kernels; on a
    static background it is exactly u0 * (t1 - t0).
    """
    return u0 * bg.velocity_factor(t0, t1) * (t1 - t0)


def exact_sum(arr: np.ndarray) -> float:
    """Exactly rounded sum, independent of traversal order."""
    return math.fsum(arr.ravel())


@dataclass(frozen=True)
class Diagnostics:
    """Conserved-quantity and structure diagnostics of one fluid."""

    mass: float
    momentum: tuple[float, ...]
    max_rho: float
    min_rho: float
    contrast: float

    def as_dict(self) -> dict:
        return {
            "mass": self.mass,
            "momentum": list(self.momentum),
            "max_rho": self.max_rho,
            "min_rho": self.min_rho,
            "contrast": self.contrast,
        }


def diagnostics(state: FluidState, grid: Grid, bg: Background | None = None,
                t: float = 0.0) -> Diagnostics:
    """Comoving mass a^3 h^dim sum(rho), momentum a^4 h^dim sum(mom), contrast.

    Sums are exactly rounded (order-independent).  The contrast is the
    two-pass population std over mean of rho restricted to matter-containing
    cells, so vacuum regions and zeroed margins do not register as structure.
    """
    a = bg.scale_at(t) if bg is not None else 1.0
    vol = grid.h ** grid.dim
    mass = a ** 3 * vol * exact_sum(state.rho)
    momentum = tuple(a ** 4 * vol * exact_sum(state.mom[ax]) for ax in range(grid.dim))
    matter = state.rho[state.defined()]
    if matter.size:
        mean = exact_sum(matter) / matter.size
        var = exact_sum((matter - mean) ** 2) / matter.size
        contrast = math.sqrt(var) / mean if mean > 0 else 0.0
    else:
        contrast = 0.0
    return Diagnostics(
        mass=mass,
        momentum=momentum,
        max_rho=float(state.rho.max()),
        min_rho=float(state.rho.min()),
        contrast=contrast,
    )


def replace_state(state: FluidState, **kw) -> FluidState:
    """dataclasses.replace that keeps the vacuum floor."""
    kw.setdefault("floor", state.floor)
    return replace(state, **kw)
