"""Exception hierarchy.

Every error carries the CLI exit code it maps to, so the command layer can
translate without a lookup table.
"""

from __future__ import annotations


class ExtremalRiskError(Exception):
    exit_code = 4


class ParameterError(ExtremalRiskError, ValueError):
    """A parameter is outside its admissible range."""

    exit_code = 2


class DomainError(ExtremalRiskError, ValueError):
    """Inputs are well-formed but the quantity is not defined for them."""

    exit_code = 4


class UndefinedRiskError(DomainError):
    """The risk denominator is empty; carries both counts for the caller."""

    def __init__(self, numerator_count: int, denominator_count: int):
        self.numerator_count = int(numerator_count)
        self.denominator_count = int(denominator_count)
        super().__init__(
            f"risk undefined: denominator count is {denominator_count} "
            f"(numerator count {numerator_count})"
        )


class UndefinedCoefficientError(DomainError):
    """No target exceedance above the threshold, so tail ratios are undefined."""


class DegenerateSpectralError(DomainError):
    pass


class TrainingError(ExtremalRiskError):
    """A classifier cannot be trained on the supplied data."""

    exit_code = 4


class DegenerateTrainingError(TrainingError):
    """Training labels contain a single class."""


class DataError(ExtremalRiskError):
    """Malformed input file or dataset contents."""

    exit_code = 3
