"""Exception types shared across the simulator."""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of an operation."""


class CircuitParseError(ValueError):
    """A circuit description (JSON) could not be parsed or validated."""


class NumericError(RuntimeError):
    """A numerical routine failed (decomposition, normalization, ...)."""


class ResourceError(RuntimeError):
    """A request exceeds a hard resource cap (e.g. full-space particle limit)."""


class DegenerateFrameError(NumericError):
    """The mean spin vector is (numerically) zero, so the mean-spin frame and
    the squeezing parameters are undefined for this state."""


class UnsupportedConfigError(RuntimeError):
    """A valid configuration that this implementation deliberately rejects."""
