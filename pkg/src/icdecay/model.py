"""Physical parameters and statistical inputs of the rotating intermediate complex.

Houses the parameter set of the decaying complex (deflection angle, spin
window, dephasing width, rotational quantum, decay width, level spacing),
the Gaussian spin window, the cross-spin amplitude correlator, and the unit
conventions shared by every computation route.

Units
-----
Energies are in MeV throughout.  Time is carried internally as
``tau = t / hbar`` in 1/MeV, so every phase and damping factor is a plain
product of an energy and ``tau``; seconds appear only at I/O boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

HBAR_MEV_S = 6.582119e-22
"""hbar in MeV*s, the only conversion constant between internal and wall-clock time."""


class InvalidParameters(ValueError):
    """A parameter set violates a model invariant; the message names the field."""


def tau_from_seconds(t_seconds):
    """Convert wall-clock time to internal time t/hbar (1/MeV)."""
    return np.asarray(t_seconds, dtype=float) / HBAR_MEV_S


def seconds_from_tau(tau):
    """Convert internal time t/hbar (1/MeV) back to seconds."""
    return np.asarray(tau, dtype=float) * HBAR_MEV_S


class ScenarioMode(Enum):
    """Dephasing regime applied to the spin cross-correlations."""

    COHERENT = "coherent"
    RMT_LIMIT = "rmt_limit"
    J_DEPENDENT_OMEGA = "j_dependent_omega"


@dataclass(frozen=True)
class DephasingScenario:
    """How spin cross-correlations evolve.

    COHERENT keeps the dephasing width beta as given.  RMT_LIMIT zeroes every
    correlation between different total spins regardless of beta; it models
    dephasing on the spreading-width scale, much faster than the decay, where
    only the diagonal random-matrix terms survive and the angular pattern
    becomes flat exponential decay.  (The spreading width and the associated
    ergodization time hbar/Gamma_spr are reference scales only; nothing here
    computes them.)  J_DEPENDENT_OMEGA lets the rotation frequency vary
    linearly with spin, omega(J) = omega + omega_dot*(J - I), which spreads
    the packets and suppresses their interference once d*omega_dot*t >= pi.
    """

    mode: ScenarioMode = ScenarioMode.COHERENT
    omega_dot_mev: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.omega_dot_mev):
            raise InvalidParameters("omega_dot_mev must be finite")
        if self.mode is not ScenarioMode.J_DEPENDENT_OMEGA and self.omega_dot_mev != 0.0:
            raise InvalidParameters(
                "omega_dot_mev is only meaningful for the j_dependent_omega mode"
            )

    @classmethod
    def coherent(cls) -> "DephasingScenario":
        return cls(ScenarioMode.COHERENT)

    @classmethod
    def rmt_limit(cls) -> "DephasingScenario":
        return cls(ScenarioMode.RMT_LIMIT)

    @classmethod
    def j_dependent(cls, omega_dot_mev: float) -> "DephasingScenario":
        return cls(ScenarioMode.J_DEPENDENT_OMEGA, omega_dot_mev)


@dataclass(frozen=True)
class ModelParams:
    """Parameter set of the rotating complex.

    phi                       deflection angle (rad); initial packets sit at +/-|phi|
    d                         spin-window width (dimensionless, >= 1)
    i_avg                     average total spin I
    beta                      spin dephasing width (MeV)
    hbar_omega                rotational quantum hbar*omega (MeV)
    gamma                     total decay width Gamma (MeV)
    d_spacing                 mean resonance level spacing D (MeV), D << beta, Gamma
    j_min, j_max              inclusive spin summation window
    window_absorbs_degeneracy when True the fitted Gaussian window is taken to
                              model the full effective weight of each partial
                              wave, degeneracy included; when False every
                              (J, J') term carries the explicit
                              (2J+1)(2J'+1) factor and the diagonal cross
                              section carries (2J+1)^2
    """

    phi: float = 0.0
    d: float = 3.0
    i_avg: float = 14.0
    beta: float = 0.01
    hbar_omega: float = 1.35
    gamma: float = 0.3
    d_spacing: float = 1.0e-5
    j_min: int = -1
    j_max: int = -1
    window_absorbs_degeneracy: bool = True

    def __post_init__(self):
        if not math.isfinite(self.phi):
            raise InvalidParameters("phi must be finite")
        if not self.beta > 0.0:
            raise InvalidParameters(f"beta must be > 0 MeV (got {self.beta})")
        if not self.gamma > 0.0:
            raise InvalidParameters(f"gamma must be > 0 MeV (got {self.gamma})")
        if not self.hbar_omega > 0.0:
            raise InvalidParameters(f"hbar_omega must be > 0 MeV (got {self.hbar_omega})")
        if not self.d >= 1.0:
            raise InvalidParameters(f"d must be >= 1 (got {self.d})")
        if not self.d_spacing > 0.0:
            raise InvalidParameters(f"d_spacing must be > 0 MeV (got {self.d_spacing})")
        if not self.d_spacing < self.beta:
            raise InvalidParameters(
                f"d_spacing must be < beta (got {self.d_spacing} >= {self.beta})"
            )
        if not self.d_spacing < self.gamma:
            raise InvalidParameters(
                f"d_spacing must be < gamma (got {self.d_spacing} >= {self.gamma})"
            )
        # Default window: +/- 5 window widths around I, truncation error < 2e-11.
        if self.j_min < 0:
            object.__setattr__(self, "j_min", max(0, int(math.ceil(self.i_avg - 5.0 * self.d))))
        if self.j_max < 0:
            object.__setattr__(self, "j_max", int(math.floor(self.i_avg + 5.0 * self.d)))
        if self.j_min > self.j_max:
            raise InvalidParameters(f"j_min must be <= j_max (got {self.j_min} > {self.j_max})")
        if not (self.j_min <= self.i_avg <= self.j_max):
            raise InvalidParameters(
                f"i_avg must lie inside [j_min, j_max] (got I={self.i_avg}, "
                f"window [{self.j_min}, {self.j_max}])"
            )

    @classmethod
    def c12_mg24(cls) -> "ModelParams":
        """Parameter set of the 12C + 24Mg elastic-scattering complex."""
        return cls(phi=0.0, d=3.0, i_avg=14.0, beta=0.01, hbar_omega=1.35,
                   gamma=0.3, d_spacing=1.0e-5)

    @property
    def spins(self) -> np.ndarray:
        """Integer total spins of the summation window."""
        return np.arange(self.j_min, self.j_max + 1)

    @property
    def delta_j_max(self) -> int:
        return self.j_max - self.j_min


def spin_window(j: int, p: ModelParams) -> float:
    """Gaussian spin window W(J) = exp(-(J - I)^2 / d^2), peak 1 at J = I."""
    if not (p.j_min <= j <= p.j_max):
        raise InvalidParameters(f"spin {j} outside window [{p.j_min}, {p.j_max}]")
    return math.exp(-((j - p.i_avg) / p.d) ** 2)


def spin_window_weights(p: ModelParams) -> np.ndarray:
    """W(J) over the whole summation window."""
    u = (p.spins - p.i_avg) / p.d
    return np.exp(-u * u)


def amplitude_weights(p: ModelParams) -> np.ndarray:
    """Per-spin amplitude weight v_J with v_J v_J' the (J, J') pair weight.

    v_J = sqrt(W(J)), times (2J+1) when the window does not absorb the
    degeneracy; the diagonal weight v_J^2 is then (2J+1)^2 W(J).
    """
    v = np.sqrt(spin_window_weights(p))
    if not p.window_absorbs_degeneracy:
        v = v * (2.0 * p.spins + 1.0)
    return v


def _correlator_from_delta(delta_j: int, delta_e, beta: float, hbar_omega: float,
                           spacing: float):
    """Lorentzian cross-spin correlator for spin difference delta_j != 0.

    (1/pi) * spacing * beta*|dJ| / [(dE - hbar_omega*dJ)^2 + (beta*dJ)^2],
    centred at dE = hbar_omega*dJ with half-width beta*|dJ|; integrates to
    `spacing` over dE.
    """
    adj = abs(delta_j)
    num = spacing * beta * adj / math.pi
    det = np.asarray(delta_e, dtype=float) - hbar_omega * delta_j
    return num / (det * det + (beta * adj) ** 2)


def spin_correlator(j: int, jp: int, delta_e, p: ModelParams):
    """Ensemble-averaged correlation of reduced amplitudes at spins j != jp.

    The equal-spin case follows the Kronecker rule (unit diagonal) and is the
    caller's responsibility; this function rejects it.
    """
    if j == jp:
        raise InvalidParameters("spin_correlator requires j != jp (diagonal rule is Kronecker)")
    return _correlator_from_delta(j - jp, delta_e, p.beta, p.hbar_omega, p.d_spacing)


def rotation_period(p: ModelParams) -> float:
    """Period of one complete revolution, T = 2*pi*hbar / (hbar*omega), in seconds."""
    return 2.0 * math.pi * HBAR_MEV_S / p.hbar_omega


def rotational_energies(p: ModelParams, s: DephasingScenario) -> np.ndarray:
    """Effective level energies phi_J (MeV) whose differences set pair beat rates.

    phi_J = hbar*omega(J) * J with omega(J) = omega constant except in the
    j_dependent_omega scenario, where hbar*omega(J) = hbar_omega +
    omega_dot_mev * (J - I).  The (J, J') phase advances as
    (phi_J - phi_J') * tau.
    """
    js = p.spins.astype(float)
    if s.mode is ScenarioMode.J_DEPENDENT_OMEGA:
        hw = p.hbar_omega + s.omega_dot_mev * (js - p.i_avg)
    else:
        hw = np.full_like(js, p.hbar_omega)
    return hw * js
