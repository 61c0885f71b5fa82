"""Exception hierarchy.

Every error carries the CLI exit status it maps to, so the driver can
translate library failures without a lookup table.
"""


class SpinStarError(Exception):
    exit_code = 1


class InvalidParameterError(SpinStarError, ValueError):
    pass


class InvalidSectorError(SpinStarError, ValueError):
    pass


class SectorMismatchError(SpinStarError, ValueError):
    pass


class InvalidStateError(SpinStarError, ValueError):
    pass


class InvalidOperatorError(SpinStarError, ValueError):
    pass


class InvalidGridError(SpinStarError, ValueError):
    pass


class InvalidWindowError(SpinStarError, ValueError):
    pass


class UndefinedRatioError(SpinStarError, ZeroDivisionError):
    pass


class InvalidInputError(SpinStarError, ValueError):
    pass


class ResourceLimitError(SpinStarError, MemoryError):
    exit_code = 2


class ValidationFailure(SpinStarError):
    exit_code = 3


class UsageError(SpinStarError):
    exit_code = 1


class OutputError(SpinStarError, OSError):
    exit_code = 4
