"""Exception hierarchy shared by every module.

Each class carries an ``exit_code`` so the command-line front end can map a
failure onto the documented process status without inspecting messages.
"""


class FftsError(Exception):
    """Base class for all library errors."""

    exit_code = 3
    kind = "error"


class DataError(FftsError, ValueError):
    """Input data violates a structural requirement."""

    exit_code = 2
    kind = "data_error"


class GridMismatchError(DataError):
    kind = "grid_mismatch"


class InsufficientGridError(DataError):
    kind = "insufficient_grid"


class InvalidDataError(DataError):
    kind = "invalid_data"


class ParseError(DataError):
    kind = "parse_error"

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class DimensionError(FftsError, ValueError):
    exit_code = 2
    kind = "dimension_error"


class InsufficientHistoryError(DimensionError):
    kind = "insufficient_history"


class ConfigError(FftsError, ValueError):
    exit_code = 1
    kind = "config_error"


class NumericalError(FftsError, ArithmeticError):
    exit_code = 3
    kind = "numerical_error"


class SingularFitError(NumericalError):
    kind = "singular_fit"


class DegenerateWeightsError(NumericalError):
    kind = "degenerate_weights"


class ConvergenceError(NumericalError):
    """Fixed-point iteration failed from every start.

    ``best`` holds the iterate with the largest objective seen, so callers can
    still inspect or use it.
    """

    kind = "convergence"

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class ExperimentFailure(FftsError):
    kind = "experiment_failure"
