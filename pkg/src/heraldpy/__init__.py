"""Time-frequency purity and wave functions of heralded single photons."""

__version__ = "0.1.0"

from .errors import (
    AccuracyWarning,
    AliasingError,
    ContractViolation,
    HeraldError,
    IngestionError,
    InvalidParameterError,
    NoOscillationError,
    NumericalError,
)
from .heralding import (
    HeraldedDensityMatrix,
    PurityCurve,
    density_matrix,
    mode_decomposition,
    purity_autocorr,
    purity_curve,
    purity_direct,
    purity_from_matrix,
)
from .numerics import FrequencyGrid, TimeGrid, fourier_to_time, integrate, sinc
from .spectra import (
    JointSpectrum,
    SpectralModulator,
    apply_modulator,
    make_frequency_bin,
    make_gaussian,
    make_lorentzian,
    make_rectangular,
    make_tabulated,
    spectrum_from_csv,
)
from .waveform import (
    TemporalWaveform,
    beat_note_analysis,
    herald_waveform,
    herald_waveform_modulated,
    intensity_fwhm,
    waveform_fidelity,
)
