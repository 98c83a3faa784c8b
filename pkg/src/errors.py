"""Exception hierarchy for the sparsification toolkit."""

from __future__ import annotations

from typing import Optional

import numpy as np


class SparsifyError(Exception):
    """Base class for every error raised by the toolkit."""


class InvalidInputError(SparsifyError, ValueError):
    """Input data or parameters are unusable."""


class ShapeError(InvalidInputError):
    """Operand shapes are incompatible."""


class InvalidParameterError(InvalidInputError):
    """A parameter lies outside its admissible range."""


class UndefinedConditionError(InvalidInputError):
    """A condition number or inverse difference is requested for a zero matrix."""


class MatrixFileError(InvalidInputError):
    """A Matrix Market file could not be read or written."""

    def __init__(self, path: str, message: str) -> None:
        super().__init__(f"{path}: {message}")
        self.path = path


class NumericFailureError(SparsifyError, np.linalg.LinAlgError):
    """A dense factorization failed to converge or lost definiteness."""

    def __init__(self, message: str, context: Optional[str] = None) -> None:
        text = message if context is None else f"{message} ({context})"
        super().__init__(text)
        self.context = context
