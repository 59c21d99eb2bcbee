"""Legendre polynomial evaluation, exact and large-degree asymptotic.

The decay pattern depends on the scattering angle only through cos(theta),
so every angle is first reduced to the equivalent polar angle in [0, pi]:
theta_eff = theta for theta <= pi and 2*pi - theta beyond (azimuthal
symmetry of the emission cone).
"""

from __future__ import annotations

import math

import numpy as np

TWO_PI = 2.0 * math.pi


def fold_angle(theta: float) -> float:
    """Reduce any finite angle to the equivalent polar angle in [0, pi]."""
    th = math.fmod(theta, TWO_PI)
    if th < 0.0:
        th += TWO_PI
    return th if th <= math.pi else TWO_PI - th


def legendre_exact(j: int, theta: float) -> float:
    """P_j(cos theta) by the upward three-term recurrence (stable on [-1, 1])."""
    if j < 0:
        raise ValueError(f"degree must be >= 0 (got {j})")
    x = math.cos(fold_angle(theta))
    if j == 0:
        return 1.0
    pm1, p = 1.0, x
    for l in range(2, j + 1):
        pm1, p = p, ((2 * l - 1) * x * p - (l - 1) * pm1) / l
    return p


def legendre_table(j_max: int, thetas) -> np.ndarray:
    """P_j(cos theta) for all degrees 0..j_max, shape (j_max + 1, len(thetas))."""
    if j_max < 0:
        raise ValueError(f"degree must be >= 0 (got {j_max})")
    th = np.asarray(thetas, dtype=float)
    x = np.cos(np.vectorize(fold_angle)(th)) if th.ndim else np.array(
        math.cos(fold_angle(float(th))))
    x = np.atleast_1d(x)
    out = np.empty((j_max + 1, x.size))
    out[0] = 1.0
    if j_max >= 1:
        out[1] = x
    for l in range(2, j_max + 1):
        out[l] = ((2 * l - 1) * x * out[l - 1] - (l - 1) * out[l - 2]) / l
    return out


def asymptotic_validity(j: int, theta: float) -> bool:
    """True where the large-degree form is trustworthy: theta_eff and
    pi - theta_eff both at least 1/j."""
    if j < 1:
        return False
    th = fold_angle(theta)
    lim = 1.0 / j
    return th >= lim and (math.pi - th) >= lim


def legendre_asymptotic(j: int, theta: float) -> tuple[float, bool]:
    """Large-degree form of P_j(cos theta) and its validity flag.

    sqrt(2 / (pi*(j+1/2)*sin(theta_eff))) * cos((j+1/2)*theta_eff - pi/4).
    The half-integer shift keeps the error uniform down to moderate degrees.
    Outside the validity window the value is still returned (soft flag, no
    abort); it degrades gracefully but is not trusted there.
    """
    if j < 0:
        raise ValueError(f"degree must be >= 0 (got {j})")
    th = fold_angle(theta)
    nu = j + 0.5
    s = math.sin(th)
    if s <= 0.0:
        # The prefactor diverges at the poles; report the flagged limit value.
        return math.inf, False
    value = math.sqrt(2.0 / (math.pi * nu * s)) * math.cos(nu * th - 0.25 * math.pi)
    return value, asymptotic_validity(j, theta)
