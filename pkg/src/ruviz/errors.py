"""Exception hierarchy shared across the toolkit."""


class RuvizError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(RuvizError):
    """Bad input data or configuration (CLI exit code 1)."""


class AnalysisError(RuvizError):
    """A computation could not be carried out on valid inputs (CLI exit code 2)."""


class ConvergenceError(AnalysisError):
    """An iterative estimator failed to converge."""
