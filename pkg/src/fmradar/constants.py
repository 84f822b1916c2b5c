"""Physical constants and package-wide defaults.

Every tunable default lives here so a run is reproducible from one
documented place. Frequencies are Hz, times seconds, amplitudes linear.
"""

SPEED_OF_LIGHT_M_S = 299_792_458.0

# Emitter defaults (complex-baseband FM broadcast).
DEFAULT_SAMPLE_RATE_HZ = 2.0e6
DEFAULT_CARRIER_OFFSET_HZ = 90.0e3
DEFAULT_FREQ_DEVIATION_HZ = 75.0e3
DEFAULT_CHANNEL_SPACING_HZ = 200.0e3
DEFAULT_AUDIO_BW_HZ = 15.0e3
DEFAULT_N_SAMPLES = 2 ** 16

# The FM broadcast band is 20 MHz wide; a composite emitter may not occupy more.
MAX_COMPOSITE_BANDWIDTH_HZ = 20.0e6

# Scene defaults.
DEFAULT_DIRECT_AMPLITUDE = 1.0
DEFAULT_ECHO_AMPLITUDE = 0.1
DEFAULT_SNR_DB = 20.0
DEFAULT_BASE_DELAY_S = 20.0e-6

# Receiver defaults.
DEFAULT_EPS_REL = 1.0e-3

# IFFT detector defaults.
DEFAULT_MIN_SEP_BINS = 2

# MUSIC detector defaults.
DEFAULT_MUSIC_TARGET_LEN = 256      # snapshot length after decimation
DEFAULT_MUSIC_SUBVECTOR_FRAC = 0.5  # covariance subvector length / snapshot length
DEFAULT_MUSIC_GRID_SIZE = 4096
DEFAULT_MUSIC_MAX_DELAY_S = 1.0e-4  # caps decimation so delays stay unambiguous

# Experiment defaults.
DEFAULT_SEPARATIONS_M = (3000.0, 2000.0, 1000.0, 500.0, 300.0, 150.0)
DEFAULT_SWEEP_TRIALS = 25
DEFAULT_RESOLVE_RATE = 0.9
DEFAULT_TOL_FRAC = 0.5
DEFAULT_VALLEY_DB = -3.0
PAPER_CHANNEL_COUNTS = (1, 3, 7)
