"""Exception types raised across the package."""


class StaError(Exception):
    """Base class for all package errors."""


class InvalidBladeError(StaError, ValueError):
    pass


class GradeError(StaError, ValueError):
    """Grade outside 0..4, or an input of the wrong grade."""


class IncompatibleStatesError(StaError, ValueError):
    pass


class ResolutionError(StaError, ValueError):
    """Grid too coarse for the finite-difference stencil."""


class StabilityError(StaError, ValueError):
    """Time step violates the CFL limit of the leapfrog scheme."""


class SetupError(StaError, ValueError):
    """Scenario violates a hypothesis of the additivity theorem."""


class ConfigError(StaError, ValueError):
    """Invalid scenario configuration.

    ``key`` and ``line`` locate the offending entry when known.
    """

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        where = []
        if key is not None:
            where.append(f"key {key!r}")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class RawFormatError(StaError, ValueError):
    """Malformed raw field file."""
