"""Exception hierarchy shared across the package."""


class SurrmetaError(Exception):
    """Base class for all package-specific errors."""


class ParameterizationError(SurrmetaError, ValueError):
    """Arm or joint probabilities violate their invariants."""


class DegenerateDenominatorError(SurrmetaError):
    """A control-arm rate needed as a ratio denominator is zero.

    `which` names the failing denominator, one of
    {"late_control", "deaths_control"}.
    """

    def __init__(self, message, which):
        super().__init__(message)
        self.which = which


class SimulationFailureError(SurrmetaError):
    """Every resampling attempt produced a degenerate trial."""


class NonIdentifiableError(SurrmetaError):
    """Regression inputs carry no variation in the predictor."""


class InsufficientDataError(SurrmetaError):
    """Too few observations for the requested fit or interval."""


class DomainError(SurrmetaError, ValueError):
    """Scalar argument outside its mathematical domain."""


class DegenerateRegionError(SurrmetaError):
    """Confidence-region shape matrix is singular."""


class SchemaError(SurrmetaError):
    """Ingested tabular data violates the declared schema.

    `column` and `row` locate the offense (row is 1-based data row,
    0 for header problems).
    """

    def __init__(self, message, column=None, row=None):
        super().__init__(message)
        self.column = column
        self.row = row
