from enum import Enum, IntEnum


class IntegralCase(Enum):
    GENERAL = 1
    MIN_ENERGY = 2
    DEGENERATE = 3


class TerminationReason(Enum):
    COMPLETED = 1
    SINGULARITY_APPROACH = 2
    MAX_STEPS = 3


class ConicKind(Enum):
    ELLIPSE = 1
    PARALLEL_LINES = 2
    HYPERBOLA = 3


class SurfaceBranch(Enum):
    """Label of a z² root found while sampling an invariant surface"""
    REACHABLE = 1              # Unsquared equation holds and kinetic energy is nonnegative
    OUTSIDE_ENERGY_SHELL = 2   # Unsquared equation holds but the point violates the energy bound
    SPURIOUS = 3               # Root of the squared equation only


class InitialStateForm(Enum):
    CARTESIAN = 'cartesian'
    CYLINDRICAL = 'cylindrical'


class SpecialKind(Enum):
    STATIONARY = 'stationary'
    HETEROCLINIC = 'heteroclinic'
    RADIAL = 'radial'


class LogLevel(Enum):
    OFF = 'off'
    INFO = 'info'
    DEBUG = 'debug'


class ExitCode(IntEnum):
    SUCCESS = 0
    VERIFICATION_FAILURE = 1
    CONFIG_ERROR = 2
    SINGULARITY = 3
    INTERNAL_ERROR = 4
