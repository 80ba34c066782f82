"""Exact Riemann solutions of the pressureless system.

Two-state initial data (rho_l, u_l | rho_r, u_r) evolves either into a delta
shock traveling at the weighted speed c (compression, u_l > u_r) or into a
vacuum fan (expansion, u_l < u_r).  The delta peak's mass and momentum grow
linearly in time with rates alpha and beta, and each rate is split between
the two adjacent cells by the sharing coefficients; those splits are what the
transport kernels reproduce through overlap projection.

All functions accept scalars or numpy arrays of matching shape.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Background, ConfigError

__all__ = [
    "RiemannData",
    "DeltaWave",
    "VacuumFan",
    "SharingCoefficients",
    "delta_wave",
    "vacuum_fan",
    "sharing",
    "expanding_riemann",
]


@dataclass(frozen=True)
class RiemannData:
    """Two-state initial data; densities must be positive."""

    rho_l: float
    u_l: float
    rho_r: float
    u_r: float

    def __post_init__(self):
        if np.any(np.asarray(self.rho_l) <= 0) or np.any(np.asarray(self.rho_r) <= 0):
            raise ConfigError("Riemann data needs rho_l, rho_r > 0")


@dataclass(frozen=True)
class DeltaWave:
    """Delta shock: position c*t, mass alpha*t, momentum beta*t.

    physical is True where alpha >= 0 (compressive data u_l >= u_r); data
    with u_l < u_r produces alpha < 0 and is flagged nonphysical (the
    admissible solution there is the vacuum fan).
    """

    c: float
    alpha: float
    beta: float
    physical: bool


@dataclass(frozen=True)
class VacuumFan:
    """Expansion solution for u_l < u_r: two receding states around vacuum."""

    rho_l: float
    u_l: float
    rho_r: float
    u_r: float

    def edges(self, t: float) -> tuple[float, float]:
        return self.u_l * t, self.u_r * t


@dataclass(frozen=True)
class SharingCoefficients:
    """Fractions of the peak rates assigned to the left/right cell.

    lambda_l + lambda_r = 1 and mu_l + mu_r = 1 identically; the products
    lambda * alpha * t and mu * beta * t are the amounts actually deposited.
    """

    lambda_l: float
    lambda_r: float
    mu_l: float
    mu_r: float


def delta_wave(d: RiemannData) -> DeltaWave:
    """Speed and growth rates of the delta shock for the given data.

    c is the square-root-weighted mean velocity; alpha = -sqrt(rho_l rho_r)
    (u_r - u_l) is the mass growth rate and beta = c * alpha the momentum
    growth rate.
    """
    sl = np.sqrt(d.rho_l)
    sr = np.sqrt(d.rho_r)
    c = (sr * d.u_r + sl * d.u_l) / (sr + sl)
    alpha = -(sl * sr) * (d.u_r - d.u_l)
    beta = c * alpha
    physical = alpha >= 0
    if np.ndim(c) == 0:
        return DeltaWave(float(c), float(alpha), float(beta), bool(physical))
    return DeltaWave(c, alpha, beta, physical)


def vacuum_fan(d: RiemannData, t: float, x: float):
    """Pointwise fan state at (t, x): (rho, u) with u None inside the vacuum.

    Requires u_l < u_r and t > 0.  The interval (u_l t, u_r t) is vacuum;
    both edges belong to the adjacent constant states.
    """
    if not d.u_l < d.u_r:
        raise ConfigError("vacuum fan requires u_l < u_r")
    if not t > 0:
        raise ConfigError("vacuum fan requires t > 0")
    if x <= d.u_l * t:
        return d.rho_l, d.u_l
    if x >= d.u_r * t:
        return d.rho_r, d.u_r
    return 0.0, None


def sharing(d: RiemannData) -> SharingCoefficients:
    """Split the peak growth rates between the two cells via the side rule.

    Each of the three waves (speeds u_r, u_l and c) deposits its share on the
    side its speed points to; a wave with exactly zero speed contributes
    nothing to either side.  The mass amounts are -rho_r u_r / alpha,
    rho_l u_l / alpha and c (rho_r - rho_l) / alpha, and the momentum amounts
    replace rho u by rho u^2 (and the c-wave factor by rho_r u_r - rho_l u_l)
    over beta.  Requires u_l != u_r; the momentum fractions are a 0/0 at
    c == 0 exactly (zero momentum peak) and that point is rejected.
    """
    u_l = np.asarray(d.u_l, dtype=float)
    u_r = np.asarray(d.u_r, dtype=float)
    rho_l = np.asarray(d.rho_l, dtype=float)
    rho_r = np.asarray(d.rho_r, dtype=float)
    if np.any(u_l == u_r):
        raise ConfigError("sharing requires u_l != u_r (alpha != 0)")
    w = delta_wave(d)
    c, alpha, beta = np.asarray(w.c), np.asarray(w.alpha), np.asarray(w.beta)
    if np.any(beta == 0):
        raise ConfigError("momentum-peak fractions undefined at c == 0 (beta == 0)")

    def split(amount, speed):
        right = np.where(speed > 0, amount, 0.0)
        left = np.where(speed < 0, amount, 0.0)
        return left, right

    lam_terms = (
        split(-rho_r * u_r / alpha, u_r),
        split(rho_l * u_l / alpha, u_l),
        split(c * (rho_r - rho_l) / alpha, c),
    )
    mu_terms = (
        split(-rho_r * u_r * u_r / beta, u_r),
        split(rho_l * u_l * u_l / beta, u_l),
        split(c * (rho_r * u_r - rho_l * u_l) / beta, c),
    )
    lambda_l = sum(t[0] for t in lam_terms)
    lambda_r = sum(t[1] for t in lam_terms)
    mu_l = sum(t[0] for t in mu_terms)
    mu_r = sum(t[1] for t in mu_terms)
    if np.ndim(lambda_l) == 0:
        return SharingCoefficients(float(lambda_l), float(lambda_r), float(mu_l), float(mu_r))
    return SharingCoefficients(lambda_l, lambda_r, mu_l, mu_r)


def expanding_riemann(d: RiemannData, bg: Background, t: float, x: float):
    """Fan state at (t, x) on an expanding background.

    The fan edges move at c_edge(t) = u * a(0) * integral_0^t ds/a(s)^2 and
    the side states decay as rho (a(0)/a(t))^3, u (a(0)/a(t)).  Reduces
    bit-for-bit to the static fan when a is constant.  Requires u_l < u_r
    and t > 0.
    """
    if not d.u_l < d.u_r:
        raise ConfigError("expanding fan requires u_l < u_r")
    if not t > 0:
        raise ConfigError("expanding fan requires t > 0")
    a0 = bg.scale_at(0.0)
    ratio = a0 / bg.scale_at(t)
    stretch = a0 * bg.inv_sq_integral(0.0, t)
    decay3 = ratio * ratio * ratio
    if x <= d.u_l * stretch:
        return d.rho_l * decay3, d.u_l * ratio
    if x >= d.u_r * stretch:
        return d.rho_r * decay3, d.u_r * ratio
    return 0.0, None
