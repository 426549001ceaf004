"""Exception types raised across the package."""


class EnoLabError(Exception):
    """Base class for all errors raised by :mod:`enolab`."""


class InvalidRangeError(EnoLabError, ValueError):
    pass


class SemanticsMismatchError(EnoLabError, ValueError):
    """A cell-average operation was given point values, or vice versa."""


class OrderUnsupportedError(EnoLabError, ValueError):
    pass


class LevelTooLargeError(EnoLabError, ValueError):
    pass


class NonuniformUnsupportedError(EnoLabError, ValueError):
    pass


class MeshTooSmallError(EnoLabError, ValueError):
    pass


class DegenerateInputError(EnoLabError, ValueError):
    pass


class UnknownKindError(EnoLabError, ValueError):
    pass


class CFLViolationError(EnoLabError, RuntimeError):
    pass


class ConfigError(EnoLabError, ValueError):
    """Bad experiment configuration: parse errors, unknown keys or ids."""
