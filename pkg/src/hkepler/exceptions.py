class HeisenbergKeplerError(Exception):
    """Base class of every error raised by hkepler"""


class InvalidArgumentError(HeisenbergKeplerError, ValueError):
    pass


class SingularityError(HeisenbergKeplerError, ArithmeticError):
    """A state or point is too close to a singular set of the system"""


class AxisSingularityError(SingularityError):
    pass


class OriginSingularityError(SingularityError):
    pass


class StepSingularityError(SingularityError):
    pass


class DivergedError(HeisenbergKeplerError, ArithmeticError):
    pass


class InvalidCaseError(HeisenbergKeplerError, ValueError):
    pass


class NoStationarySolutionError(HeisenbergKeplerError, ValueError):
    pass


class OutOfRangeError(HeisenbergKeplerError, ValueError):
    pass


class InconsistentStateError(HeisenbergKeplerError, ValueError):
    pass


class InvalidEnsembleError(HeisenbergKeplerError, ValueError):
    pass


class ConfigError(HeisenbergKeplerError, ValueError):
    pass
