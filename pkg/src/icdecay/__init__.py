"""Decay interference of a rotating, highly excited intermediate complex.

Computes the time- and angle-resolved decay intensity P(t, theta) through
three mutually checking routes: the exact dephasing-damped spin-pair sum,
the Gaussian wave-packet picture with its interference term, and a
first-principles resonance-sum oracle on a picket-fence spectrum, together
with fringe analytics and a deterministic CLI (``simulate``).
"""

from .intensity import (
    PANEL_FRACTIONS,
    ROUTE_RESONANCE,
    ROUTE_SPIN_PAIR,
    ROUTE_WAVEPACKET,
    AngularGrid,
    IntensityField,
    TimeGrid,
    avg_cross_section,
    decay_intensity,
    intensity_map,
    normalization_const,
    panel_field,
    raw_intensity_grid,
    rmt_cross_section,
)
from .legendre import asymptotic_validity, fold_angle, legendre_asymptotic, legendre_exact
from .model import (
    HBAR_MEV_S,
    DephasingScenario,
    InvalidParameters,
    ModelParams,
    ScenarioMode,
    rotation_period,
    spin_correlator,
    spin_window,
)
from .spectral import (
    Autocorrelation,
    ResonanceSpectrum,
    SpectrumError,
    autocorrelation,
    autocorrelation_profile,
    convergence_report,
    default_oracle_spectrum,
    resonance_sum_intensity,
    transform_consistency,
)
from .wavepacket import (
    FringeReport,
    WavePacketState,
    fringe_spacing,
    fringe_visibility,
    overlap_schedule,
    packet_amplitude,
    packet_width,
    rigid_rotor_washout_time,
    route_deviation,
    washout_time,
    wavepacket_intensity,
)

__version__ = "0.1.0"
