"""Exact spin-pair route for the decay intensity and its normalization.

The time- and angle-resolved decay intensity of the rotating complex is the
dephasing-damped double sum over total spins

    P(t, theta) = H(t) e^(-Gamma t/hbar) sum_{J,J'} v_J v_J'
                  exp[i (phi - omega t)(J - J') - beta |J - J'| t/hbar]
                  P_J(cos theta) P_J'(cos theta),

evaluated with exact Legendre polynomials so it serves as the in-repo ground
truth at every angle, including the poles where the asymptotic wave-packet
form fails.  Complex arithmetic is internal: terms are accumulated over all
ordered (J, J') pairs and the imaginary residue of the conjugate-paired sum
is asserted small instead of silently dropped.

The energy-averaged differential cross section is the term-wise analytic
time integral of the same sum,

    sigma(theta) = sum_{J,J'} v_J v_J' P_J P_J'
                   Re{ e^(i phi (J-J')) hbar / (Gamma + beta|J-J'|
                                                + i (phi_J - phi_J')) },

and all displayed intensities are A P(t, theta) / sigma(theta) with A fixed
by the condition A P(0, 0) / sigma(0) = 1.  Intensities are otherwise in
arbitrary units; only normalized quantities are comparable across routes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .legendre import legendre_table
from .model import (
    HBAR_MEV_S,
    DephasingScenario,
    InvalidParameters,
    ModelParams,
    ScenarioMode,
    amplitude_weights,
    rotation_period,
    rotational_energies,
    tau_from_seconds,
)

PANEL_FRACTIONS = (0.0, 1 / 16, 1 / 8, 5 / 16, 3 / 8, 7 / 16, 1 / 2, 3 / 4, 1.0)
"""Default snapshot times of the angular maps, as fractions of the period T."""

ROUTE_SPIN_PAIR = "spin_pair_exact"
ROUTE_WAVEPACKET = "wavepacket_approx"
ROUTE_RESONANCE = "resonance_oracle"

_IMAG_RESIDUE_TOL = 1e-12


@dataclass(frozen=True)
class TimeGrid:
    """Sorted evaluation times in seconds (negative entries allowed, field is 0 there)."""

    seconds: np.ndarray

    def __post_init__(self):
        t = np.atleast_1d(np.asarray(self.seconds, dtype=float))
        if t.size == 0:
            raise InvalidParameters("time grid must be non-empty")
        if not np.all(np.isfinite(t)):
            raise InvalidParameters("time grid must be finite")
        if np.any(np.diff(t) < 0):
            raise InvalidParameters("time grid must be sorted ascending")
        object.__setattr__(self, "seconds", t)

    @classmethod
    def from_period_fractions(cls, fractions, period_seconds: float) -> "TimeGrid":
        return cls(np.asarray(fractions, dtype=float) * period_seconds)


@dataclass(frozen=True)
class AngularGrid:
    """Sorted evaluation angles in radians, within [0, 2*pi)."""

    radians: np.ndarray

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.radians, dtype=float))
        if a.size == 0:
            raise InvalidParameters("angle grid must be non-empty")
        if not np.all(np.isfinite(a)):
            raise InvalidParameters("angle grid must be finite")
        if np.any(a < 0.0) or np.any(a >= 2.0 * math.pi):
            raise InvalidParameters("angles must lie in [0, 2*pi)")
        if np.any(np.diff(a) < 0):
            raise InvalidParameters("angle grid must be sorted ascending")
        object.__setattr__(self, "radians", a)

    @classmethod
    def from_step_deg(cls, step_deg: float = 0.5) -> "AngularGrid":
        if step_deg <= 0:
            raise InvalidParameters("angle step must be > 0")
        return cls(np.deg2rad(np.arange(0.0, 360.0, step_deg)))


@dataclass(frozen=True)
class IntensityField:
    """Normalized intensity A*P/sigma on a (time, angle) product grid.

    values[i, j] is the normalized intensity at times[i], angles[j]; route
    names the computation path; norm_a is the normalization constant A;
    gamma_mev is kept so decay-compensated peak heights can be read off.
    """

    times: np.ndarray
    angles: np.ndarray
    values: np.ndarray
    route: str
    norm_a: float
    gamma_mev: float

    def time_index(self, t_seconds: float) -> int:
        idx = int(np.argmin(np.abs(self.times - t_seconds)))
        scale = max(abs(t_seconds), float(np.max(np.abs(self.times))), 1e-300)
        if abs(self.times[idx] - t_seconds) > 1e-9 * scale:
            raise KeyError(f"no grid time near {t_seconds} s")
        return idx

    def time_slice(self, t_seconds: float) -> np.ndarray:
        return self.values[self.time_index(t_seconds)]


def _dephasing_matrix(p: ModelParams, s: DephasingScenario, tau: float) -> np.ndarray:
    """|Delta J|-dependent damping of the pair terms at internal time tau."""
    js = p.spins
    adj = np.abs(js[:, None] - js[None, :]).astype(float)
    if s.mode is ScenarioMode.RMT_LIMIT:
        return np.where(adj == 0.0, 1.0, 0.0)
    return np.exp(-p.beta * adj * tau)


def _pair_sum_grid(taus, ptab: np.ndarray, p: ModelParams, s: DephasingScenario) -> np.ndarray:
    """Raw (unnormalized) pair sum over a tau vector and a Legendre table.

    Returns shape (len(taus), n_theta).  The phase of each pair factorizes
    through u_J = v_J exp(i (phi J - phi_J tau)), so the double sum is the
    quadratic form conj(a)^T B a with a_J = u_J P_J(theta) and B the real
    dephasing kernel; the iteration order of the reduction is fixed.
    """
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    v = amplitude_weights(p)
    phases = rotational_energies(p, s)
    js = p.spins.astype(float)
    scale = float(np.sum(v)) ** 2
    out = np.empty((taus.size, ptab.shape[1]))
    for i, tau in enumerate(taus):
        if tau < 0.0:
            out[i] = 0.0
            continue
        u = v * np.exp(1j * (p.phi * js - phases * tau))
        a = u[:, None] * ptab
        b = _dephasing_matrix(p, s, tau)
        vals = np.einsum("jt,jk,kt->t", np.conj(a), b, a)
        residue = float(np.max(np.abs(vals.imag))) if vals.size else 0.0
        if residue > _IMAG_RESIDUE_TOL * scale:
            raise RuntimeError(
                f"conjugate pairing left imaginary residue {residue:.3e} "
                f"(limit {_IMAG_RESIDUE_TOL * scale:.3e})"
            )
        out[i] = vals.real * math.exp(-p.gamma * tau)
    return out


def decay_intensity(t_seconds: float, theta: float, p: ModelParams,
                    s: DephasingScenario = DephasingScenario.coherent()) -> float:
    """Unnormalized decay intensity P(t, theta) of the exact spin-pair route.

    Zero for t < 0 (the complex cannot decay before it forms); symmetric
    under theta -> 2*pi - theta because only cos(theta) enters.
    """
    if not math.isfinite(t_seconds):
        raise InvalidParameters("time must be finite")
    tau = float(tau_from_seconds(t_seconds))
    ptab = legendre_table(p.j_max, [theta])[p.j_min:]
    return float(_pair_sum_grid([tau], ptab, p, s)[0, 0])


def raw_intensity_grid(t_seconds, thetas, p: ModelParams,
                       s: DephasingScenario = DephasingScenario.coherent()) -> np.ndarray:
    """Unnormalized exact-route intensity on a product grid, shape (nt, ntheta).

    Shared by the verification routes, which compare raw values (all routes
    carry the same arbitrary constant as the spin-pair sum or fix their own
    against it)."""
    taus = tau_from_seconds(np.atleast_1d(np.asarray(t_seconds, dtype=float)))
    ptab = legendre_table(p.j_max, np.atleast_1d(thetas))[p.j_min:]
    return _pair_sum_grid(taus, ptab, p, s)


def _cross_section_matrix(p: ModelParams, s: DephasingScenario) -> np.ndarray:
    """Real (J, J') kernel of the analytic time integral of the pair sum."""
    v = amplitude_weights(p)
    js = p.spins
    dj = js[:, None] - js[None, :]
    if s.mode is ScenarioMode.RMT_LIMIT:
        return np.diag(v * v * (HBAR_MEV_S / p.gamma))
    phases = rotational_energies(p, s)
    beat = phases[:, None] - phases[None, :]
    denom = p.gamma + p.beta * np.abs(dj) + 1j * beat
    kernel = (np.exp(1j * p.phi * dj) * HBAR_MEV_S / denom).real
    return (v[:, None] * v[None, :]) * kernel


def _cross_section_grid(ptab: np.ndarray, p: ModelParams, s: DephasingScenario) -> np.ndarray:
    m = _cross_section_matrix(p, s)
    return np.einsum("jt,jk,kt->t", ptab, m, ptab)


def avg_cross_section(theta: float, p: ModelParams,
                      s: DephasingScenario = DephasingScenario.coherent()) -> float:
    """Energy-averaged differential cross section, the t-integral of P(t, theta).

    Computed term-wise from the exact Lorentzian time integrals rather than
    by quadrature, so the normalization carries no quadrature tolerance.
    """
    ptab = legendre_table(p.j_max, [theta])[p.j_min:]
    sigma = float(_cross_section_grid(ptab, p, s)[0])
    if not sigma > 0.0:
        raise InvalidParameters(
            f"non-positive averaged cross section ({sigma:.3e}) at theta={theta}"
        )
    return sigma


def rmt_cross_section(theta: float, p: ModelParams) -> float:
    """Diagonal-only cross section sum (no spin cross-correlations).

    Proportional version without the lifetime factor: sum_J of the diagonal
    weight times P_J(cos theta)^2, with the degeneracy convention of the
    parameter set.
    """
    v = amplitude_weights(p)
    ptab = legendre_table(p.j_max, [theta])[p.j_min:, 0]
    return float(np.sum((v * ptab) ** 2))


def normalization_const(p: ModelParams,
                        s: DephasingScenario = DephasingScenario.coherent()) -> float:
    """A such that A * P(0, 0) / sigma(0) = 1."""
    p00 = decay_intensity(0.0, 0.0, p, s)
    if p00 <= 0.0:
        raise InvalidParameters("degenerate spin window: P(t=0, theta=0) vanishes")
    return avg_cross_section(0.0, p, s) / p00


def intensity_map(tgrid: TimeGrid, agrid: AngularGrid, p: ModelParams,
                  s: DephasingScenario = DephasingScenario.coherent()) -> IntensityField:
    """Normalized intensity A*P/sigma on the product grid, exact route."""
    ptab = legendre_table(p.j_max, agrid.radians)[p.j_min:]
    sigma = _cross_section_grid(ptab, p, s)
    if np.any(sigma <= 0.0):
        raise InvalidParameters("non-positive averaged cross section on the angle grid")
    taus = tau_from_seconds(tgrid.seconds)
    raw = _pair_sum_grid(taus, ptab, p, s)
    a = normalization_const(p, s)
    return IntensityField(
        times=tgrid.seconds.copy(),
        angles=agrid.radians.copy(),
        values=a * raw / sigma[None, :],
        route=ROUTE_SPIN_PAIR,
        norm_a=a,
        gamma_mev=p.gamma,
    )


def panel_field(p: ModelParams, s: DephasingScenario = DephasingScenario.coherent(),
                theta_step_deg: float = 0.5) -> IntensityField:
    """Convenience map on the default snapshot times and angle step."""
    t = rotation_period(p)
    return intensity_map(TimeGrid.from_period_fractions(PANEL_FRACTIONS, t),
                         AngularGrid.from_step_deg(theta_step_deg), p, s)
