import numpy as np


VERSION = '1.0.0'

# Geometry and potential thresholds
AXIS_THRESHOLD = 1e-12
RHO_MIN = 1e-10
FD_BASE_STEP = float(np.cbrt(np.finfo(float).eps))

# Integrator defaults
STEP_GUARD = 1e-9
MIN_STEP = 1e-13
MAX_STEP = 0.5
SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
PI_ALPHA = 0.7 / 5.0
PI_BETA = 0.4 / 5.0
DEFAULT_REL_TOL = 1e-10
DEFAULT_ABS_TOL = 1e-12
DEFAULT_T_END = 50.0
DEFAULT_SAMPLE_INTERVAL = 0.05
DEFAULT_MAX_STEPS = 5_000_000

# Tolerance profile defaults
TOLERANCE_PROFILE_VERSION = 1
DEFAULT_FD_TOL = 1e-5
DEFAULT_DRIFT_TOL = 1e-6
DEFAULT_IDENTITY_TOL = 1e-9
DEFAULT_MESH_TOL = 1e-9
CLASSIFY_TOL = 1e-9

# Random admissible state box
SAMPLE_R_RANGE = (0.5, 2.0)
SAMPLE_Z_RANGE = (-1.0, 1.0)
SAMPLE_P_RANGE = (-1.0, 1.0)

# Output formats
FLOAT_FORMAT = '{:.17g}'
TRAJECTORY_HEADER = ['t', 'r', 'theta', 'z', 'pR', 'pS', 'x', 'y', 'H', 'F1', 'F2', 'F3', 'reldrift']
MESH_HEADER = ['r', 'theta', 'z', 'branch']
HK_LOG_ENV = 'HK_LOG'

# Sub-Laplacian certificate
GAUGE_COEFFICIENT = 16.0
SUBLAPLACIAN_STEP = float(np.finfo(float).eps ** 0.25)
SUBLAPLACIAN_MARGIN = 10.0

# Surface sampling
DEFAULT_SURFACE_R_MAX = 5.0
DEFAULT_N_R = 60
DEFAULT_N_THETA = 72
ENERGY_SHELL_RTOL = 1e-9

# Verification suites
DEFAULT_BRACKET_TOL = 1e-6
DEFAULT_HARMONIC_TOL = 1e-4
DEFAULT_PROBE_FLOOR = 1e-2
DEFAULT_PROBE_CONTROL = 1e-6
F3_FORMS_TOL = 1e-12
PROBE_RCOND = 1e-10
PROBE_MIN_TRAJECTORIES = 5
PROBE_DEGREE = 2
PROBE_FOURIER_MODES = 2
PROBE_MAX_SAMPLES = 600
