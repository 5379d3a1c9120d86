"""Exception types shared across the package.

The CLI maps these onto process exit codes: ConfigError -> 2,
NumericalError -> 3, MissingDataError -> 4.
"""

__all__ = [
    "SubquadError",
    "ConfigError",
    "NumericalError",
    "RankDeficiencyError",
    "ModelEvaluationError",
    "MissingDataError",
]


class SubquadError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(SubquadError):
    """Invalid configuration, arguments, or preconditions."""


class NumericalError(SubquadError):
    """A numerical computation failed or left its validity envelope."""


class RankDeficiencyError(NumericalError):
    """Rank deficiency detected during pivoting or solving.

    Carries the iteration index (pivot step) at which the deficiency
    was detected, when applicable.
    """

    def __init__(self, message: str, iteration: int | None = None):
        super().__init__(message)
        self.iteration = iteration


class ModelEvaluationError(SubquadError):
    """A model evaluation failed; carries the offending point(s)."""

    def __init__(self, message: str, points=None):
        super().__init__(message)
        self.points = points


class MissingDataError(SubquadError):
    """Required external data (files, rows) is absent."""
