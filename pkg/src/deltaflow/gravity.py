"""Discrete Poisson solves and gravity/pressure momentum kicks.

The potential solves the standard centered Laplacian equation
lap(phi) = source_factor * G * a^2 * rho with phi = 0 ghost cells
(Dirichlet, the default) or on a periodic torus with a mean-zero source.
1D uses a direct tridiagonal solve; 2D/3D use matrix-free conjugate
gradients with a deterministic iteration order, optionally warm-started
from the previous potential.  Kicks are explicit Euler updates of the
momentum with centered gradients; the potential gradient falls back to
one-sided stencils on the boundary ring, while pressure-type gradients
use reflected ghosts there (zero normal force across an open edge).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .core import ConfigError, FluidState, Grid, SolverError, StateLaw, replace_state

__all__ = [
    "GravityParams",
    "Potential",
    "solve_poisson",
    "solve_poisson_source",
    "discrete_laplacian",
    "newtonian_kick",
    "relativistic_kick",
]

BC_MODES = ("dirichlet", "periodic")


@dataclass(frozen=True)
class GravityParams:
    """Gravity coupling and solver controls.

    source_factor is 4*pi for the Newtonian models and 8*pi for the
    relativistic one; multifluid runs may override it per fluid.
    """

    G: float
    source_factor: float = 4.0 * np.pi
    solver_tol: float = 1e-10
    max_iter: int = 10000
    bc: str = "dirichlet"

    def __post_init__(self):
        if not self.G > 0:
            raise ConfigError("G must be positive (disable gravity at the model level instead)")
        if not self.source_factor > 0:
            raise ConfigError("source_factor must be positive")
        if not self.solver_tol > 0:
            raise ConfigError("solver_tol must be positive")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be >= 1")
        if self.bc not in BC_MODES:
            raise ConfigError(f"bc must be one of {BC_MODES}")


@dataclass(frozen=True)
class Potential:
    """Solved potential plus the solver's convergence record."""

    phi: np.ndarray
    residual: float = 0.0
    iterations: int = 0


def discrete_laplacian(phi: np.ndarray, h: float, bc: str = "dirichlet") -> np.ndarray:
    """Apply the 3/5/7-point centered Laplacian with the given boundary rule."""
    mode = "constant" if bc == "dirichlet" else "wrap"
    p = np.pad(phi, 1, mode=mode)
    acc = (-2.0 * phi.ndim) * phi
    inner = [slice(1, -1)] * phi.ndim
    for ax in range(phi.ndim):
        lo = list(inner)
        hi = list(inner)
        lo[ax] = slice(0, -2)
        hi[ax] = slice(2, None)
        acc = acc + p[tuple(lo)] + p[tuple(hi)]
    return acc / (h * h)


def _solve_tridiagonal(source: np.ndarray, h: float) -> np.ndarray:
    n = source.size
    ab = np.zeros((3, n))
    ab[0, 1:] = 1.0
    ab[1, :] = -2.0
    ab[2, :-1] = 1.0
    return solve_banded((1, 1), ab / (h * h), source)


def _solve_cg(source: np.ndarray, h: float, tol: float, max_iter: int,
              phi0: np.ndarray | None) -> tuple[np.ndarray, float, int]:
    """CG on -lap, which is symmetric positive definite under Dirichlet."""
    b = -source
    bnorm = float(np.linalg.norm(b))
    target = tol * bnorm

    def apply_a(x):
        return -discrete_laplacian(x, h, "dirichlet")

    x = np.zeros_like(b) if phi0 is None else phi0.astype(float, copy=True)
    r = b - apply_a(x)
    rnorm = float(np.linalg.norm(r))
    if rnorm <= target:
        return x, rnorm / bnorm, 0
    p = r.copy()
    rs = float(np.vdot(r, r))
    for it in range(1, max_iter + 1):
        ap = apply_a(p)
        alpha = rs / float(np.vdot(p, ap))
        x += alpha * p
        r -= alpha * ap
        rs_new = float(np.vdot(r, r))
        rnorm = np.sqrt(rs_new)
        if rnorm <= target:
            return x, rnorm / bnorm, it
        p = r + (rs_new / rs) * p
        rs = rs_new
    raise SolverError(
        f"Poisson solve did not converge in {max_iter} iterations "
        f"(relative residual {rnorm / bnorm:.3e}, tol {tol:.3e})")


def _solve_periodic(source: np.ndarray, h: float) -> np.ndarray:
    src = source - source.mean()
    shat = np.fft.fftn(src)
    eig = np.zeros(source.shape)
    for ax, n in enumerate(source.shape):
        k = np.fft.fftfreq(n) * 2.0 * np.pi
        shape = [1] * source.ndim
        shape[ax] = n
        eig = eig + (2.0 * np.cos(k) - 2.0).reshape(shape)
    eig /= h * h
    flat = eig.reshape(-1)
    flat[0] = 1.0  # zero mode: source is mean-free, pin phi mean to 0
    phihat = shat / eig
    phihat.reshape(-1)[0] = 0.0
    return np.real(np.fft.ifftn(phihat))


def solve_poisson_source(source: np.ndarray, grid: Grid, params: GravityParams,
                         phi0: np.ndarray | None = None) -> Potential:
    """Solve lap(phi) = source for an already assembled right-hand side.

    phi0 warm-starts the iterative branch; it is ignored by the direct ones.
    """
    if source.shape != grid.shape:
        raise ConfigError("source shape does not match grid")
    if not np.any(source):
        return Potential(np.zeros(grid.shape))
    if params.bc == "periodic":
        return Potential(_solve_periodic(source, grid.h))
    if grid.dim == 1:
        return Potential(_solve_tridiagonal(source, grid.h))
    phi, res, it = _solve_cg(source, grid.h, params.solver_tol, params.max_iter, phi0)
    return Potential(phi, res, it)


def solve_poisson(rho_total: np.ndarray, grid: Grid, params: GravityParams,
                  a: float = 1.0, phi0: np.ndarray | None = None) -> Potential:
    """Solve lap(phi) = source_factor * G * a^2 * rho_total on the grid."""
    if rho_total.shape != grid.shape:
        raise ConfigError("density shape does not match grid")
    if np.any(rho_total < 0):
        raise ConfigError("Poisson source density must be nonnegative")
    source = params.source_factor * params.G * (a * a) * rho_total
    return solve_poisson_source(source, grid, params, phi0)


def _gradient(f: np.ndarray, h: float):
    g = np.gradient(f, h)
    return [g] if f.ndim == 1 else list(g)


def _pressure_gradient(f: np.ndarray, h: float):
    # Reflected ghosts: zero normal gradient at the domain edge.  Without
    # this the one-sided edge stencil reads the interior slope as a force
    # across the open boundary and pressure steadily vents the edge cells.
    padded = np.pad(f, 1, mode="reflect")
    g = np.gradient(padded, h)
    inner = tuple(slice(1, 1 + n) for n in f.shape)
    return [g[inner]] if f.ndim == 1 else [comp[inner] for comp in g]


def newtonian_kick(state: FluidState, grid: Grid, phi: np.ndarray, law: StateLaw,
                   a: float, dt: float) -> FluidState:
    """mom += dt * (-grad(p)/a - rho*grad(phi)/a); rho held constant."""
    if phi.shape != grid.shape:
        raise ConfigError("potential shape does not match grid")
    grad_phi = _gradient(phi, grid.h)
    pressure = law.pressure(state.rho)
    grad_p = _pressure_gradient(pressure, grid.h) if np.any(pressure) else None
    mom = state.mom.copy()
    for ax in range(grid.dim):
        force = -(state.rho / a) * grad_phi[ax]
        if grad_p is not None:
            force -= grad_p[ax] / a
        mom[ax] += dt * force
    return replace_state(state, mom=mom)


def relativistic_kick(state: FluidState, grid: Grid, phi: np.ndarray,
                      c_light: float, a: float, dt: float) -> FluidState:
    """u += dt * (-(c^2/4a) grad(rho)/rho - grad(phi)/a) on non-vacuum cells.

    rho is held constant and the momentum is recomputed as rho*u, so vacuum
    cells stay at zero momentum.
    """
    if phi.shape != grid.shape:
        raise ConfigError("potential shape does not match grid")
    defined = state.defined()
    u = state.velocity()
    grad_phi = _gradient(phi, grid.h)
    grad_rho = _pressure_gradient(state.rho, grid.h)
    csq4 = c_light * c_light / 4.0
    mom = np.empty_like(state.mom)
    for ax in range(grid.dim):
        log_term = np.divide(grad_rho[ax], state.rho,
                             out=np.zeros(grid.shape), where=defined)
        du = dt * (-(csq4 / a) * log_term - grad_phi[ax] / a)
        mom[ax] = state.rho * np.where(defined, u[ax] + du, u[ax])
    return replace_state(state, mom=mom)
