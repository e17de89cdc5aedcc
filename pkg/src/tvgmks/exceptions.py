"""Exception types raised across the package."""

import numpy as np

__all__ = [
    "DimensionError",
    "ParameterError",
    "DegenerateInputError",
    "RankDeficiencyError",
    "SingularMatrixError",
    "NumericFailureError",
]


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


class ParameterError(ValueError):
    """A scalar parameter is outside its admissible range."""


class DegenerateInputError(ValueError):
    """Input is zero (or otherwise degenerate) where a nonzero value is required."""


class RankDeficiencyError(np.linalg.LinAlgError):
    """A new block lies (numerically) in the span of the existing ones."""


class SingularMatrixError(np.linalg.LinAlgError):
    """A triangular factor has a zero or near-zero diagonal entry."""


class NumericFailureError(RuntimeError):
    """An iterate became non-finite."""
