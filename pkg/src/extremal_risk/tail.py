"""Tail-equivalence constants and feature selection.

For a feature ``X_i`` and target ``H`` the ratio of exceedance counts above a
common threshold estimates ``c_i = lim P(X_i > u) / P(H > u)``. Features with
``c_i = 0`` have lighter tails than ``H`` and are pinned to zero weight in a
linear extremal classifier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, UndefinedCoefficientError


@dataclass(frozen=True)
class TailCoefficients:
    c_hat: float
    chi_star_hat: float
    h_exceed_count: int
    x_exceed_count: int
    joint_exceed_count: int
    std_error_c: float
    # set when the finite-sample variance radicand went negative and was clipped
    clipped: bool = False

    def to_dict(self) -> dict:
        return {
            "c_hat": self.c_hat,
            "chi_star_hat": self.chi_star_hat,
            "h_exceed_count": self.h_exceed_count,
            "x_exceed_count": self.x_exceed_count,
            "joint_exceed_count": self.joint_exceed_count,
            "std_error_c": self.std_error_c,
            "variance_clipped": self.clipped,
        }


def estimate_tail_coefficients(x, H, u: float) -> TailCoefficients:
    """Estimate ``c`` and ``chi*`` of one feature against the target at level ``u``.

    The standard error uses the asymptotic variance ``c (1 - 2 chi* + c)``
    scaled by the number of target exceedances.
    """
    x = np.asarray(x, dtype=float).ravel()
    H = np.asarray(H, dtype=float).ravel()
    if x.shape != H.shape:
        raise ParameterError("feature and target must have the same length")
    h_exc = H > u
    n_h = int(np.count_nonzero(h_exc))
    if n_h == 0:
        raise UndefinedCoefficientError(f"no target exceedance above u={u}")
    x_exc = x > u
    n_x = int(np.count_nonzero(x_exc))
    n_joint = int(np.count_nonzero(x_exc & h_exc))
    c_hat = n_x / n_h
    chi = n_joint / n_h
    radicand = c_hat * (1.0 - 2.0 * chi + c_hat)
    clipped = radicand < 0
    return TailCoefficients(
        c_hat=c_hat,
        chi_star_hat=chi,
        h_exceed_count=n_h,
        x_exceed_count=n_x,
        joint_exceed_count=n_joint,
        std_error_c=math.sqrt(max(radicand, 0.0) / n_h),
        clipped=clipped,
    )


@dataclass(frozen=True)
class FeatureSelection:
    selected: tuple[int, ...]
    coefficients: tuple[TailCoefficients, ...]
    feature_names: tuple[str, ...]
    threshold_u: float
    min_c: float

    def to_dict(self) -> dict:
        return {
            "threshold_u": self.threshold_u,
            "min_c": self.min_c,
            "selected": [self.feature_names[i] for i in self.selected],
            "selected_indices": list(self.selected),
            "features": [
                {"name": name, "selected": i in self.selected, **coef.to_dict()}
                for i, (name, coef) in enumerate(zip(self.feature_names, self.coefficients))
            ],
        }


def select_features(dataset, u: float, min_c: float = 0.01) -> FeatureSelection:
    """Keep the features whose estimated tail constant reaches ``min_c``."""
    if not (min_c >= 0 and math.isfinite(min_c)):
        raise ParameterError(f"min_c must be nonnegative, got {min_c}")
    coefs = tuple(
        estimate_tail_coefficients(dataset.rows[:, j], dataset.target, u)
        for j in range(dataset.n_features)
    )
    selected = tuple(j for j, c in enumerate(coefs) if c.c_hat >= min_c)
    return FeatureSelection(selected, coefs, tuple(dataset.feature_names), float(u), float(min_c))
