from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from ..errors import DegenerateTrainingError, ParameterError

MODEL_KINDS = ("linear", "logistic_lasso", "tree", "forest")


@dataclass(frozen=True)
class ClassifierModel:
    """A trained classifier bound to the threshold its labels were built at.

    ``params`` is the kind-specific payload; every payload exposes
    ``decide(X, threshold) -> bool`` alarms.
    """

    kind: str
    params: Any
    trained_threshold: float | None = None

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ParameterError(f"unknown classifier kind {self.kind!r}")

    def predict(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.where(self.params.decide(X, self.trained_threshold), 1, -1)


def as_labels(y) -> np.ndarray:
    """Validate a +-1 label vector and return it as booleans (True for +1)."""
    y = np.asarray(y)
    if y.ndim != 1 or y.size == 0:
        raise ParameterError("labels must be a nonempty vector")
    if not np.all((y == 1) | (y == -1)):
        raise ParameterError("labels must be +1 or -1")
    return y == 1


def require_both_classes(pos: np.ndarray) -> None:
    if pos.all() or not pos.any():
        raise DegenerateTrainingError("training labels contain a single class")
