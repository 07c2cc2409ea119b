"""Exception hierarchy shared by the library and the command line."""


class FMRepeaterError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(FMRepeaterError, ValueError):
    """Input, configuration or data failed validation (CLI exit code 2)."""


class UnitError(ValidationError):
    """A quantity had a missing, unknown or incompatible unit."""


class ConfigParseError(ValidationError):
    """A scenario or data file could not be parsed.

    ``line`` is the 1-based line number when it is known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class FitSingularError(ValidationError):
    """The least-squares problem is rank deficient for the supplied data."""


class InfeasiblePhysicsError(FMRepeaterError):
    """The requested configuration cannot be realised (CLI exit code 3)."""


class AmplificationInfeasibleError(InfeasiblePhysicsError):
    def __init__(self, input_dbm, min_input_dbm):
        self.deficit_db = min_input_dbm - input_dbm
        super().__init__(
            f"amplifier input {input_dbm:.2f} dBm is {self.deficit_db:.2f} dB "
            f"below the minimum input of {min_input_dbm:.2f} dBm"
        )


class UnreachableShiftError(InfeasiblePhysicsError):
    """The signal/pump/filter triple cannot be matched within the comb span."""


class DegenerateGeometryError(InfeasiblePhysicsError):
    """A zero-width or otherwise degenerate optical geometry."""
