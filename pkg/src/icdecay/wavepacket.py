"""Gaussian wave-packet picture of the rotating decay and fringe analytics.

In the regime of slow dephasing (d*beta/Gamma << 1) and a wide spin window
(d >= 1), the spin-pair sum collapses, via the asymptotic Legendre form and
resummation over revolutions, into two counter-rotating Gaussian packets

    A_k^(s)(t, theta) = exp[-(phi + s*theta + 2*pi*k - omega*t)^2
                            / (2 Delta(t)^2)] / Delta(t),   s = +1, -1,

of angular width Delta(t) = sqrt(1/d^2 + (beta t/hbar)^2) after k
revolutions, and the intensity on the polar angle range (0, pi) is

    P(t, theta) ~ H(t) (1/sin theta) e^(-Gamma t/hbar) sum_k {
        A_k^(+)^2 + A_{k+1}^(-)^2
        + 2 cos[(2I+1) theta - pi/2] A_k^(+) A_{k+1}^(-) },

non-negative because |cos| <= 1 completes the square.  The cosine factor is
the packet interference; its period 2*pi/(2I+1) is the fringe spacing.
Angles beyond pi are folded (azimuthal symmetry), and the route is only
trusted for folded angles in [1/I, pi - 1/I]; the exact spin-pair route is
the reference near the poles, where this form's 1/sin(theta) diverges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .intensity import IntensityField, decay_intensity
from .legendre import TWO_PI, fold_angle
from .model import (
    HBAR_MEV_S,
    DephasingScenario,
    InvalidParameters,
    ModelParams,
    ScenarioMode,
    rotation_period,
    seconds_from_tau,
    tau_from_seconds,
)


@dataclass(frozen=True)
class WavePacketState:
    """One rotating packet: revolution count, sense, centroid and width."""

    k: int
    sign: int
    center: float
    width: float


@dataclass(frozen=True)
class FringeReport:
    """Fringe metrics of one time slice over an angular window.

    visibility is (P_max - P_min)/(P_max + P_min) over the significant
    interior extrema of the window (0 when fewer than two fringe maxima
    stand out); fringe_spacing_rad is the measured peak-to-peak spacing
    (0 when there are no fringes); peak_compensated is the window maximum
    with the decay envelope e^(-Gamma t/hbar) divided out.
    """

    t_seconds: float
    region_center: float
    visibility: float
    fringe_spacing_rad: float
    peak_compensated: float
    n_fringe_maxima: int
    diagnostic: str


def packet_width(t_seconds: float, p: ModelParams) -> float:
    """Angular packet width Delta(t) = sqrt(1/d^2 + (beta t/hbar)^2); grows
    from 1/d by dephasing."""
    if t_seconds < 0.0:
        raise InvalidParameters("packet width is defined for t >= 0")
    bt = p.beta * float(tau_from_seconds(t_seconds))
    return math.hypot(1.0 / p.d, bt)


def packet_amplitude(k: int, sign: int, t_seconds: float, theta: float,
                     p: ModelParams) -> float:
    """Amplitude of the packet of sense `sign` after k revolutions."""
    if k < 0:
        raise InvalidParameters("revolution count k must be >= 0")
    if sign not in (+1, -1):
        raise InvalidParameters("sign must be +1 or -1")
    tau = float(tau_from_seconds(t_seconds))
    width = packet_width(t_seconds, p)
    arg = p.phi + sign * theta + TWO_PI * k - p.hbar_omega * tau
    return math.exp(-arg * arg / (2.0 * width * width)) / width


def packet_state(k: int, sign: int, t_seconds: float, p: ModelParams) -> WavePacketState:
    """Centroid (reduced into [0, 2*pi)) and width of one packet."""
    tau = float(tau_from_seconds(t_seconds))
    center = (-sign) * (p.phi + TWO_PI * k - p.hbar_omega * tau)
    return WavePacketState(k=k, sign=sign, center=center % TWO_PI,
                           width=packet_width(t_seconds, p))


def default_kmax(t_seconds: float, p: ModelParams) -> int:
    """Revolution cutoff with Gaussian tails below 1e-12: ceil(omega t/2 pi) + 3."""
    tau = max(float(tau_from_seconds(t_seconds)), 0.0)
    return int(math.ceil(p.hbar_omega * tau / TWO_PI)) + 3


def wavepacket_intensity(t_seconds: float, theta: float, p: ModelParams,
                         kmax: int | None = None) -> tuple[float, bool]:
    """Packet-sum intensity and a validity flag for the folded angle.

    The flag is False outside [1/I, pi - 1/I]; the value is still returned
    there for continuity studies but is not trusted.
    """
    tau = float(tau_from_seconds(t_seconds))
    th = fold_angle(theta)
    lim = 1.0 / p.i_avg
    valid = lim <= th <= math.pi - lim
    if tau < 0.0:
        return 0.0, valid
    if kmax is None:
        kmax = default_kmax(t_seconds, p)
    elif kmax < p.hbar_omega * tau / TWO_PI + 3.0:
        raise InvalidParameters(
            f"kmax={kmax} below the tail-safe floor for t={t_seconds} s"
        )
    sin_th = math.sin(th)
    if sin_th <= 0.0:
        return math.inf, False
    width = packet_width(t_seconds, p)
    ks = np.arange(0, kmax + 1, dtype=float)
    arg_p = p.phi + th + TWO_PI * ks - p.hbar_omega * tau
    arg_m = p.phi - th + TWO_PI * (ks + 1.0) - p.hbar_omega * tau
    a_p = np.exp(-arg_p * arg_p / (2.0 * width * width)) / width
    a_m = np.exp(-arg_m * arg_m / (2.0 * width * width)) / width
    cross = 2.0 * math.cos((2.0 * p.i_avg + 1.0) * th - 0.5 * math.pi)
    total = float(np.sum(a_p * a_p + a_m * a_m + cross * a_p * a_m))
    return total * math.exp(-p.gamma * tau) / sin_th, valid


def fringe_spacing(p: ModelParams) -> float:
    """Angular period of the interference factor, 2*pi/(2I+1) rad."""
    if p.i_avg < 1.0:
        raise InvalidParameters("fringe spacing needs average spin >= 1")
    return TWO_PI / (2.0 * p.i_avg + 1.0)


def overlap_schedule(p: ModelParams, n_periods: int) -> list[tuple[float, float]]:
    """Times and angles where the two packet centroids coincide.

    The centroids +/-(|phi| - omega t) meet whenever omega t = |phi| + m*pi,
    alternating between the forward (0) and backward (pi) directions; the
    first 2*n_periods + 1 events are returned as (seconds, radians) pairs.
    """
    if n_periods < 0:
        raise InvalidParameters("n_periods must be >= 0")
    events = []
    for m in range(2 * n_periods + 1):
        tau = (abs(p.phi) + m * math.pi) / p.hbar_omega
        angle = 0.0 if m % 2 == 0 else math.pi
        events.append((float(seconds_from_tau(tau)), angle))
    return events


def washout_time(p: ModelParams, s: DephasingScenario) -> float:
    """Time after which spin-dependent rotation spreads the packets apart.

    For the j_dependent_omega scenario this is t = pi*hbar / (d * omega_dot);
    with omega_dot = 0 (and in the other scenarios) the packets persist for
    as long as the dephasing phase stays below pi (beta*t/hbar < pi), so the
    washout time is infinite.
    """
    if s.mode is ScenarioMode.J_DEPENDENT_OMEGA and s.omega_dot_mev > 0.0:
        return math.pi * HBAR_MEV_S / (p.d * s.omega_dot_mev)
    return math.inf


def rigid_rotor_washout_time(p: ModelParams) -> float:
    """Washout time for a spin-independent moment of inertia.

    A rigid rotor has omega_dot = omega / I, so the washout condition
    (d/I)*omega*t >= pi gives t = pi*I*hbar / (d*hbar_omega), which is
    (I / 2d) rotation periods.
    """
    return math.pi * p.i_avg * HBAR_MEV_S / (p.d * p.hbar_omega)


def _window_arc(field: IntensityField, lo: float, hi: float):
    """Indices of grid angles inside the (possibly wrapping) window, in arc order."""
    ang = field.angles
    lo = lo % TWO_PI
    hi = hi % TWO_PI
    if lo <= hi:
        idx = np.nonzero((ang >= lo) & (ang <= hi))[0]
        arc = ang[idx]
    else:
        upper = np.nonzero(ang >= lo)[0]
        lower = np.nonzero(ang <= hi)[0]
        idx = np.concatenate([upper, lower])
        arc = np.concatenate([ang[upper] - TWO_PI, ang[lower]])
    return idx, arc


def fringe_visibility(field: IntensityField, t_seconds: float,
                      window: tuple[float, float],
                      min_peak_frac: float = 0.02) -> FringeReport:
    """Measure fringe visibility of one time slice inside an angular window.

    The window should contain at least two fringe periods.  Interior local
    maxima smaller than min_peak_frac of the window maximum are treated as
    noise riding on the smooth packet profile, not as fringes; with fewer
    than two significant maxima the slice is reported fringe-free (V = 0).
    """
    lo, hi = window
    idx, arc = _window_arc(field, lo, hi)
    if idx.size < 5:
        raise InvalidParameters("window contains too few grid angles")
    prof = field.values[field.time_index(t_seconds)][idx]
    center = (arc[0] + arc[-1]) / 2.0 % TWO_PI
    tau = float(tau_from_seconds(t_seconds))
    peak_comp = float(np.max(prof)) * math.exp(field.gamma_mev * tau)

    interior = np.arange(1, prof.size - 1)
    is_max = (prof[interior] > prof[interior - 1]) & (prof[interior] >= prof[interior + 1])
    is_min = (prof[interior] < prof[interior - 1]) & (prof[interior] <= prof[interior + 1])
    max_idx = interior[is_max]
    min_idx = interior[is_min]
    window_max = float(np.max(prof))
    strong = max_idx[prof[max_idx] >= min_peak_frac * window_max]

    if strong.size < 2:
        return FringeReport(t_seconds, center, 0.0, 0.0, peak_comp,
                            int(strong.size), "too-few-extrema")
    inner_min = min_idx[(min_idx > strong[0]) & (min_idx < strong[-1])]
    if inner_min.size == 0:
        return FringeReport(t_seconds, center, 0.0, 0.0, peak_comp,
                            int(strong.size), "no-interior-minimum")
    p_max = float(np.max(prof[strong]))
    p_min = float(np.min(prof[inner_min]))
    vis = (p_max - p_min) / (p_max + p_min)
    spacing = float(np.mean(np.diff(arc[strong])))
    return FringeReport(t_seconds, center, vis, spacing, peak_comp,
                        int(strong.size), "ok")


def route_deviation(p: ModelParams, *,
                    t_frac_lo: float = 0.1, t_frac_hi: float = 0.4, n_t: int = 13,
                    theta_lo: float = 0.3, n_theta: int = 25,
                    ref_t_frac: float = 0.1, ref_theta: float = math.pi / 2,
                    floor_frac: float = 0.01) -> float:
    """Max relative deviation of the packet route from the exact route.

    Both routes carry arbitrary constants, so each is normalized by its own
    value at the common reference point before comparing.  The deviation is
    taken pointwise where the exact-route field exceeds floor_frac of its
    maximum over the compared region (the asymptotic form is meaningless in
    the deep Gaussian tails).
    """
    period = rotation_period(p)
    times = np.linspace(t_frac_lo, t_frac_hi, n_t) * period
    thetas = np.linspace(theta_lo, math.pi - theta_lo, n_theta)
    ref_exact = decay_intensity(ref_t_frac * period, ref_theta, p)
    ref_wp, _ = wavepacket_intensity(ref_t_frac * period, ref_theta, p)
    exact = np.array([[decay_intensity(t, th, p) for th in thetas] for t in times])
    wp = np.array([[wavepacket_intensity(t, th, p)[0] for th in thetas] for t in times])
    exact /= ref_exact
    wp /= ref_wp
    mask = exact >= floor_frac * float(np.max(exact))
    return float(np.max(np.abs(wp[mask] - exact[mask]) / exact[mask]))
