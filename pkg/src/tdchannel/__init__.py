"""Simulator of a time-domain frequency-bin qutrit channel.

Photons from a narrowband source are phase-modulated by an EOM (serrodyne or
sinusoidal drives), demodulated by a second EOM and detected behind a
narrowband Lorentzian cavity.
"""

__version__ = "0.1.0"

from .channel import (  # noqa: E402
    BUILTIN_SYMBOLS,
    ONE,
    SMINUS,
    SPLUS,
    TWO,
    ZERO,
    ChannelConfig,
    StateVector3,
    Symbol,
    custom_symbol,
    detection_probability,
    overlap_probability,
    prepare,
    project,
    state_vector,
    storage_loop_propagate,
)
from .errors import (  # noqa: E402
    ChannelError,
    ConfigurationError,
    GridMismatchError,
    UnsupportedSymbolError,
    UsageError,
)
from .experiments import (  # noqa: E402
    ProjectionMatrix,
    classical_baseline,
    compare_measured,
    load_reference_table,
    monte_carlo_counts,
    mutual_information,
    phase_scan,
    spectrum_trace,
    truth_table,
)
from .optics import (  # noqa: E402
    CavityFilter,
    DriveElectronics,
    PhaseProfile,
    SourceModel,
    bessel_coeff,
    carrier_suppression_index,
    emit_photon,
)
from .wavepacket import ComplexEnvelope, Spectrum, TimeGrid, inner_product, to_spectrum, to_time  # noqa: E402

__all__ = [
    "__version__",
    "BUILTIN_SYMBOLS",
    "ONE",
    "SMINUS",
    "SPLUS",
    "TWO",
    "ZERO",
    "ChannelConfig",
    "StateVector3",
    "Symbol",
    "custom_symbol",
    "detection_probability",
    "overlap_probability",
    "prepare",
    "project",
    "state_vector",
    "storage_loop_propagate",
    "ChannelError",
    "ConfigurationError",
    "GridMismatchError",
    "UnsupportedSymbolError",
    "UsageError",
    "ProjectionMatrix",
    "classical_baseline",
    "compare_measured",
    "load_reference_table",
    "monte_carlo_counts",
    "mutual_information",
    "phase_scan",
    "spectrum_trace",
    "truth_table",
    "CavityFilter",
    "DriveElectronics",
    "PhaseProfile",
    "SourceModel",
    "bessel_coeff",
    "carrier_suppression_index",
    "emit_photon",
    "ComplexEnvelope",
    "Spectrum",
    "TimeGrid",
    "inner_product",
    "to_spectrum",
    "to_time",
]
