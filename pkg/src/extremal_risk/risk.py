"""Risk functionals for extremal classifiers.

The weighted extremal risk of a classifier ``g`` at level ``u`` is

    P(g != Y) / P(Y = 1 or g = 1),      Y = +1 iff H > u,

i.e. one minus the critical success index. The conditional version restricts
both probabilities to ``{H > eps * u, g(.; eps * u) = 1}``. This module holds
the empirical estimator and its Wald interval, the closed-form limits, and an
exact set-algebra oracle on finite probability tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .errors import (
    DegenerateSpectralError,
    DomainError,
    ParameterError,
    UndefinedRiskError,
)


@dataclass(frozen=True)
class RiskEstimate:
    value: float
    numerator_count: int
    denominator_count: int
    std_error: float
    epsilon: float
    threshold_u: float

    @classmethod
    def from_counts(cls, numerator: int, denominator: int, epsilon: float, threshold_u: float):
        if denominator <= 0:
            raise UndefinedRiskError(numerator, denominator)
        if not 0 <= numerator <= denominator:
            raise DomainError(f"numerator count {numerator} exceeds denominator count {denominator}")
        value = numerator / denominator
        return cls(
            value=value,
            numerator_count=int(numerator),
            denominator_count=int(denominator),
            std_error=math.sqrt(value * (1.0 - value) / denominator),
            epsilon=float(epsilon),
            threshold_u=float(threshold_u),
        )

    def to_dict(self, level: float = 0.95) -> dict:
        lo, hi = confidence_interval(self, level)
        return {
            "value": self.value,
            "numerator_count": self.numerator_count,
            "denominator_count": self.denominator_count,
            "std_error": self.std_error,
            "ci_lo": lo,
            "ci_hi": hi,
            "ci_level": level,
            "epsilon": self.epsilon,
            "threshold_u": self.threshold_u,
        }


def _as_sign_vector(pred, name: str) -> np.ndarray:
    p = np.asarray(pred)
    if p.ndim != 1:
        raise ParameterError(f"{name} must be a vector")
    if not np.all((p == 1) | (p == -1)):
        raise ParameterError(f"{name} must contain only +1 and -1")
    return p == 1


def risk_counts(alarm_u, alarm_eps_u, H, u: float, epsilon: float) -> tuple[int, int]:
    """Numerator and denominator counts of the empirical risk (boolean alarms)."""
    y = H > u
    miss_or_false = alarm_u != y
    flagged = alarm_u | y
    if epsilon > 0:
        cond = (H > epsilon * u) & alarm_eps_u
        miss_or_false = miss_or_false & cond
        flagged = flagged & cond
    return int(np.count_nonzero(miss_or_false)), int(np.count_nonzero(flagged))


def empirical_risk(pred_at_u, pred_at_eps_u, H, u: float, epsilon: float) -> RiskEstimate:
    """Empirical (conditional) extremal risk from +-1 predictions.

    Parameters
    ----------
    pred_at_u, pred_at_eps_u : array of +-1
        Classifier outputs at thresholds ``u`` and ``epsilon * u``. The second
        is ignored when ``epsilon == 0``, where the conditioning is dropped.
    H : array
        Target values; the label is +1 iff ``H > u`` (strict).
    u : float
        Positive threshold.
    epsilon : float
        Conditioning fraction in ``[0, 1)``.

    Raises
    ------
    UndefinedRiskError
        When no row enters the denominator.
    """
    if not (u > 0 and math.isfinite(u)):
        raise ParameterError(f"threshold u must be positive, got {u}")
    if not (0.0 <= epsilon < 1.0):
        raise ParameterError(f"epsilon must lie in [0, 1), got {epsilon}")
    H = np.asarray(H, dtype=float)
    alarm_u = _as_sign_vector(pred_at_u, "pred_at_u")
    if epsilon > 0:
        if pred_at_eps_u is None:
            raise ParameterError("predictions at epsilon * u are required when epsilon > 0")
        alarm_eps = _as_sign_vector(pred_at_eps_u, "pred_at_eps_u")
    else:
        alarm_eps = alarm_u
    if not (H.shape == alarm_u.shape == alarm_eps.shape) or H.size == 0:
        raise ParameterError("predictions and target must share a nonzero length")
    num, den = risk_counts(alarm_u, alarm_eps, H, u, epsilon)
    return RiskEstimate.from_counts(num, den, epsilon, u)


def confidence_interval(est: RiskEstimate, level: float = 0.95) -> tuple[float, float]:
    """Wald interval ``value +- z * std_error`` clipped to [0, 1]."""
    if not (0.0 < level < 1.0):
        raise ParameterError(f"confidence level must lie in (0, 1), got {level}")
    if est.denominator_count <= 0:
        raise UndefinedRiskError(est.numerator_count, est.denominator_count)
    half = norm.ppf((1.0 + level) / 2.0) * est.std_error
    return max(0.0, est.value - half), min(1.0, est.value + half)


# ---------------------------------------------------------------------------
# closed-form limits


def limit_risk_from_c_chi(c: float, chi_star: float) -> float:
    """Limit risk ``1 - chi / (1 + c - chi)`` from tail equivalence and dependence."""
    if not (c > 0 and math.isfinite(c)):
        raise ParameterError(f"tail-equivalence constant must be positive, got {c}")
    if not (0.0 <= chi_star <= 1.0):
        raise ParameterError(f"chi_star must lie in [0, 1], got {chi_star}")
    if chi_star > c:
        raise DomainError(f"chi_star={chi_star} exceeds c={c}")
    return 1.0 - chi_star / (1.0 + c - chi_star)


@dataclass(frozen=True)
class RamosLedfordParams:
    alpha_g: float
    alpha_H: float
    eta: float
    ell_e1: float = 1.0
    ell_1e: float = 1.0

    def __post_init__(self):
        if not (self.alpha_g > 0 and self.alpha_H > 0):
            raise ParameterError("tail indices must be positive")
        if not (0.0 < self.eta <= 1.0):
            raise ParameterError(f"eta must lie in (0, 1], got {self.eta}")
        if not (self.ell_e1 > 0 and self.ell_1e > 0):
            raise ParameterError("slowly varying limits must be positive")


def ramos_ledford_risk(params: RamosLedfordParams, epsilon: float) -> float:
    """Conditional limit risk under the Ramos-Ledford joint survival model.

    Only ``epsilon`` in (0, 1) is accepted; the bracket diverges at 0 when
    ``eta < 1``.
    """
    if not (0.0 < epsilon < 1.0):
        raise ParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    p = params
    bracket = (
        p.ell_e1 * epsilon ** (-p.alpha_g / (2.0 * p.eta))
        + p.ell_1e * epsilon ** (-p.alpha_H / (2.0 * p.eta))
        - 1.0
    )
    return 1.0 - 1.0 / bracket


@dataclass(frozen=True)
class SpectralSample:
    """Draws of the spectral tail vector on the sup-norm unit sphere."""

    gamma: np.ndarray  # (m, d)
    omega: np.ndarray  # (m,)
    alpha: float

    def __post_init__(self):
        gamma = np.atleast_2d(np.asarray(self.gamma, dtype=float))
        omega = np.asarray(self.omega, dtype=float).ravel()
        if gamma.shape[0] != omega.shape[0]:
            raise ParameterError("gamma and omega must have the same number of draws")
        if omega.size == 0:
            raise ParameterError("spectral sample is empty")
        if not self.alpha > 0:
            raise ParameterError(f"alpha must be positive, got {self.alpha}")
        if np.any(gamma < 0) or np.any(omega < 0):
            raise ParameterError("spectral draws must be nonnegative")
        radius = np.maximum(gamma.max(axis=1), omega)
        if not np.allclose(radius, 1.0, rtol=0, atol=1e-12):
            raise ParameterError("spectral draws must lie on the sup-norm unit sphere")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "omega", omega)


def spectral_limit_risk(theta, sample: SpectralSample) -> float:
    """Monte Carlo limit risk of the linear classifier ``theta``.

    ``1 - E[min(theta'G, W)^alpha] / E[max(theta'G, W)^alpha]``.
    """
    theta = np.asarray(theta, dtype=float).ravel()
    if theta.shape[0] != sample.gamma.shape[1]:
        raise ParameterError("theta dimension does not match the spectral sample")
    if not np.all(np.isfinite(theta)) or np.any(theta < 0):
        raise ParameterError("theta must be finite and nonnegative")
    proj = sample.gamma @ theta
    lo = np.minimum(proj, sample.omega) ** sample.alpha
    hi = np.maximum(proj, sample.omega) ** sample.alpha
    denom = hi.mean()
    if denom <= 0:
        raise DegenerateSpectralError("E[max(theta'G, W)^alpha] is zero")
    return float(1.0 - lo.mean() / denom)


# ---------------------------------------------------------------------------
# finite probability tables: exact oracle for the set-ratio identity

_A1, _AE, _B1, _BE = 0, 1, 2, 3


@dataclass(frozen=True)
class JointEventTable:
    """Finite probability space described by atoms.

    ``weights[k]`` is the mass of atom ``k``; ``flags[k]`` holds its
    membership in ``(A1, A_eps, B1, B_eps)``.
    """

    weights: np.ndarray
    flags: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).ravel()
        f = np.asarray(self.flags, dtype=bool)
        if f.shape != (w.size, 4):
            raise ParameterError("flags must have shape (n_atoms, 4)")
        if np.any(w < 0) or not math.isclose(w.sum(), 1.0, abs_tol=1e-9):
            raise ParameterError("atom weights must be nonnegative and sum to 1")
        if np.any(f[:, _A1] & ~f[:, _AE]) or np.any(f[:, _B1] & ~f[:, _BE]):
            raise DomainError("nesting violated: A1 must lie in A_eps and B1 in B_eps")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "flags", f)

    @classmethod
    def from_atoms(cls, atoms):
        """Build from ``(weight, in_A1, in_Aeps, in_B1, in_Beps)`` tuples."""
        atoms = list(atoms)
        return cls([a[0] for a in atoms], [a[1:] for a in atoms])

    @classmethod
    def from_levels(cls, weights, a_level, b_level, eps: float, eps_b: float | None = None):
        """Nested family ``A_s = {a_level >= s}``, ``B_s = {b_level >= s}``.

        Levels live in [0, 1]; ``A1`` is ``{a_level >= 1}``. Shrinking ``eps``
        enlarges the outer sets while leaving the inner ones fixed.
        """
        eps_b = eps if eps_b is None else eps_b
        a = np.asarray(a_level, dtype=float)
        b = np.asarray(b_level, dtype=float)
        flags = np.column_stack([a >= 1.0, a >= eps, b >= 1.0, b >= eps_b])
        return cls(weights, flags)

    def prob(self, mask) -> float:
        return float(self.weights[mask].sum())

    @property
    def a1(self):
        return self.flags[:, _A1]

    @property
    def a_eps(self):
        return self.flags[:, _AE]

    @property
    def b1(self):
        return self.flags[:, _B1]

    @property
    def b_eps(self):
        return self.flags[:, _BE]


def set_ratio_risk(table: JointEventTable) -> float:
    """``P(A1 xor B1 | A_eps & B_eps) / P(A1 | B1 | A_eps & B_eps)`` by direct summation."""
    cond = table.a_eps & table.b_eps
    p_cond = table.prob(cond)
    if p_cond <= 0:
        raise DomainError("conditioning event A_eps & B_eps has zero probability")
    sym = table.prob((table.a1 ^ table.b1) & cond) / p_cond
    union = table.prob((table.a1 | table.b1) & cond) / p_cond
    if union <= 0:
        raise DomainError("A1 | B1 has zero conditional probability")
    return sym / union


def set_ratio_risk_closed_form(table: JointEventTable) -> float:
    """Same ratio through ``1 - [1/P(B1|A1&B_eps) + 1/P(A1|A_eps&B1) - 1]^-1``."""
    p11 = table.prob(table.a1 & table.b1)
    if p11 <= 0:
        raise DomainError("P(A1 & B1) must be positive")
    p_b1_given = p11 / table.prob(table.a1 & table.b_eps)
    p_a1_given = p11 / table.prob(table.a_eps & table.b1)
    return 1.0 - 1.0 / (1.0 / p_b1_given + 1.0 / p_a1_given - 1.0)
