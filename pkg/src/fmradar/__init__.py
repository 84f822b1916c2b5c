"""FM-broadcast passive radar simulator with IFFT and MUSIC delay estimators."""

__version__ = "0.1.0"

from .constants import SPEED_OF_LIGHT_M_S
from .errors import (
    ConfigError,
    EmptyResultError,
    NumericError,
    ParameterError,
    PipelineError,
)
from .experiments import (
    ErrorCurvePoint,
    ResolutionRow,
    ScenarioConfig,
    monte_carlo_error,
    resolution_sweep,
    resolvability,
    run_scenario,
    run_scenario_detailed,
)
from .frontend import Spectrum, SpectrumQuotient, bandpass, ddc, inverse_spectrum, quotient, spectrum
from .ifft_detector import (
    DetectionResult,
    Peak,
    RangeProfile,
    detect_ifft,
    find_peaks,
    ifft_profile,
    lags_to_result,
)
from .music_detector import (
    CovarianceEstimate,
    MusicInput,
    Pseudospectrum,
    SubspaceDecomposition,
    SyntheticTwoToneModel,
    build_snapshot,
    decimate_snapshot,
    detect_music,
    eig_subspace,
    estimate_covariance,
    music_delays,
    pseudospectrum,
)
from .signal_model import (
    EmitterSpec,
    MessageSignal,
    SampledSignal,
    TargetScene,
    compose_multichannel,
    fm_modulate,
    render_scene,
    synthesize_message,
)

__all__ = [
    "SPEED_OF_LIGHT_M_S",
    "ConfigError",
    "EmptyResultError",
    "NumericError",
    "ParameterError",
    "PipelineError",
    "EmitterSpec",
    "MessageSignal",
    "SampledSignal",
    "TargetScene",
    "compose_multichannel",
    "fm_modulate",
    "render_scene",
    "synthesize_message",
    "Spectrum",
    "SpectrumQuotient",
    "bandpass",
    "ddc",
    "inverse_spectrum",
    "quotient",
    "spectrum",
    "DetectionResult",
    "Peak",
    "RangeProfile",
    "detect_ifft",
    "find_peaks",
    "ifft_profile",
    "lags_to_result",
    "CovarianceEstimate",
    "MusicInput",
    "Pseudospectrum",
    "SubspaceDecomposition",
    "SyntheticTwoToneModel",
    "build_snapshot",
    "decimate_snapshot",
    "detect_music",
    "eig_subspace",
    "estimate_covariance",
    "music_delays",
    "pseudospectrum",
    "ErrorCurvePoint",
    "ResolutionRow",
    "ScenarioConfig",
    "monte_carlo_error",
    "resolution_sweep",
    "resolvability",
    "run_scenario",
    "run_scenario_detailed",
]
