"""Linear extremal classifiers ``theta' x > t`` and their risk-minimizing fit.

The empirical risk is piecewise constant in ``theta``, so the fit is a
derivative-free cyclic coordinate search. Each coordinate move scans a
logarithmic grid window ``{0} U [theta_max * floor_ratio, theta_max]``; inside
the window the risk is evaluated on every constant piece between consecutive
breakpoints, so the move is an exact line search over the window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ParameterError, TrainingError, UndefinedRiskError
from ..prob import RngStream
from ..risk import RiskEstimate, risk_counts
from .base import ClassifierModel


@dataclass(frozen=True)
class LinearWeights:
    theta: np.ndarray
    support: tuple[int, ...]

    def __post_init__(self):
        theta = np.array(self.theta, dtype=float).ravel()
        support = tuple(sorted(int(j) for j in self.support))
        if not np.all(np.isfinite(theta)) or np.any(theta < 0):
            raise ParameterError("linear weights must be finite and nonnegative")
        if any(j < 0 or j >= theta.size for j in support):
            raise ParameterError("support index out of range")
        off = np.ones(theta.size, dtype=bool)
        off[list(support)] = False
        if np.any(theta[off] != 0):
            raise ParameterError("weights outside the support must be zero")
        theta.flags.writeable = False
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "support", support)

    @classmethod
    def full(cls, theta) -> "LinearWeights":
        theta = np.asarray(theta, dtype=float).ravel()
        return cls(theta, tuple(range(theta.size)))

    def scores(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.theta.size:
            raise ParameterError(
                f"dimension mismatch: {X.shape[1]} features for {self.theta.size} weights"
            )
        return X @ self.theta

    def decide(self, X, threshold: float) -> np.ndarray:
        return self.scores(X) > threshold


def linear_predict(weights: LinearWeights, x_row, t: float) -> int:
    """+1 iff ``theta' x > t``; ties are non-exceedances."""
    x = np.asarray(x_row, dtype=float).ravel()
    if x.size != weights.theta.size:
        raise ParameterError(f"dimension mismatch: {x.size} features for {weights.theta.size} weights")
    return 1 if float(x @ weights.theta) > t else -1


def linear_model(weights: LinearWeights, threshold: float) -> ClassifierModel:
    return ClassifierModel("linear", weights, threshold)


@dataclass(frozen=True)
class LinearSearchConfig:
    grid_points: int = 40
    sweeps: int = 5
    restarts: int = 8
    theta_max: float | None = None
    floor_ratio: float = 1e-4
    # "exact" also scans every constant piece between window nodes
    line_search: str = "exact"

    def __post_init__(self):
        if self.grid_points < 2 or self.sweeps < 1 or self.restarts < 1:
            raise ParameterError("grid_points >= 2, sweeps >= 1 and restarts >= 1 are required")
        if self.theta_max is not None and not self.theta_max > 0:
            raise ParameterError("theta_max must be positive")
        if not 0 < self.floor_ratio < 1:
            raise ParameterError("floor_ratio must lie in (0, 1)")
        if self.line_search not in ("exact", "grid"):
            raise ParameterError(f"line_search must be 'exact' or 'grid', got {self.line_search!r}")


@dataclass(frozen=True)
class LinearFit:
    weights: LinearWeights
    objective: float  # training risk; inf when undefined
    risk: RiskEstimate | None
    theta_max: float
    evaluations: int
    start_objectives: tuple[float, ...] = field(default=())

    def to_dict(self, feature_names) -> dict:
        return {
            "theta": {feature_names[j]: float(v) for j, v in enumerate(self.weights.theta)},
            "support": [feature_names[j] for j in self.weights.support],
            "theta_max": self.theta_max,
            "achieved_risk": self.risk.to_dict() if self.risk is not None else None,
            "evaluations": self.evaluations,
        }


def default_theta_max(X_support: np.ndarray, u: float) -> float:
    """``10 * u / median`` of the positive feature values on the support."""
    pos = X_support[X_support > 0]
    if pos.size == 0:
        raise TrainingError("support features are identically zero")
    return 10.0 * u / float(np.median(pos))


class _RiskObjective:
    """Empirical risk of ``g_theta`` on a fixed sample, with line profiles."""

    def __init__(self, X: np.ndarray, H: np.ndarray, u: float, epsilon: float):
        if epsilon > 0:
            # rows at or below eps * u never enter either count
            keep = H > epsilon * u
            X, H = X[keep], H[keep]
        self.X = X
        self.H = H
        self.y = H > u
        self.u = u
        self.eps = epsilon
        self.evaluations = 0

    def value(self, theta: np.ndarray) -> float:
        self.evaluations += 1
        s = self.X @ theta
        num, den = risk_counts(s > self.u, s > self.eps * self.u, self.H, self.u, self.eps)
        return num / den if den > 0 else math.inf

    def _breakpoint(self, rest: np.ndarray, x: np.ndarray, level: float) -> np.ndarray:
        # alarm(c) = rest + c x > level  <=>  c > t
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (level - rest) / x
        flat = x <= 0
        return np.where(flat, np.where(rest > level, -np.inf, np.inf), t)

    def line(
        self, theta: np.ndarray, j: int, window: np.ndarray, exact: bool = True
    ) -> tuple[np.ndarray, np.ndarray]:
        """Candidates along coordinate ``j`` and the risk at each.

        Candidates are the window nodes plus the midpoint of every constant
        piece of the risk that lies inside the window.
        """
        x = self.X[:, j]
        rest = self.X @ theta - theta[j] * x
        t_u = self._breakpoint(rest, x, self.u)
        t_e = self._breakpoint(rest, x, self.eps * self.u) if self.eps > 0 else t_u
        if exact:
            lo, hi = window[1], window[-1]
            bps = np.concatenate([t_u, t_e])
            bps = np.unique(bps[(bps >= lo) & (bps <= hi)])
            mids = 0.5 * (bps[:-1] + bps[1:])
            cands = np.unique(np.concatenate([window, mids]))
        else:
            cands = window
        self.evaluations += cands.size
        return cands, self._profile(cands, t_u, t_e)

    def _profile(self, cands: np.ndarray, t_u: np.ndarray, t_e: np.ndarray) -> np.ndarray:
        K = cands.size
        # index of the first candidate that raises the alarm
        k_u = np.searchsorted(cands, t_u, side="right")
        y = self.y
        num = np.zeros(K + 1, dtype=np.int64)
        den = np.zeros(K + 1, dtype=np.int64)

        def add(arr, start, stop):
            arr += np.bincount(start, minlength=K + 1)
            arr -= np.bincount(stop, minlength=K + 1)

        full = np.full(int(np.count_nonzero(y)), K)
        neg_start, neg_stop = k_u[~y], np.full(int(np.count_nonzero(~y)), K)
        if self.eps > 0:
            k_e = np.searchsorted(cands, t_e, side="right")
            add(den, k_e[y], full)
            add(num, k_e[y], k_u[y])
        else:
            den[0] += int(np.count_nonzero(y))
            den[K] -= int(np.count_nonzero(y))
            add(num, np.zeros_like(full), k_u[y])
        add(num, neg_start, neg_stop)
        add(den, neg_start, neg_stop)
        num = np.cumsum(num)[:K]
        den = np.cumsum(den)[:K]
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(den > 0, num / np.maximum(den, 1), np.inf)


def optimize_linear(
    dataset,
    u: float,
    epsilon: float,
    support,
    config: LinearSearchConfig | None = None,
    rng: RngStream | None = None,
) -> LinearFit:
    """Minimize the empirical (conditional) risk over nonnegative weights on ``support``.

    Undefined risks score as ``inf``. Ties resolve toward the smaller L1 norm,
    both within a coordinate move and across restarts.
    """
    config = config or LinearSearchConfig()
    rng = rng or RngStream(0)
    if not (u > 0 and math.isfinite(u)):
        raise ParameterError(f"threshold u must be positive, got {u}")
    if not 0.0 <= epsilon < 1.0:
        raise ParameterError(f"epsilon must lie in [0, 1), got {epsilon}")
    support = tuple(sorted(set(int(j) for j in support)))
    if not support:
        raise ParameterError("support must be nonempty")
    if any(j < 0 or j >= dataset.n_features for j in support):
        raise ParameterError("support index out of range")
    H = dataset.target
    if not np.any(H > u):
        raise TrainingError(f"no target exceedance above u={u}")
    X = dataset.rows[:, list(support)]
    theta_max = config.theta_max or default_theta_max(X, u)
    window = np.concatenate(
        [[0.0], np.geomspace(theta_max * config.floor_ratio, theta_max, config.grid_points)]
    )
    obj = _RiskObjective(X, H, u, epsilon)
    k = len(support)

    zero = np.zeros(k)
    best_theta, best_f = zero, obj.value(zero)
    starts = []
    log_lo, log_hi = math.log(theta_max * config.floor_ratio), math.log(theta_max)
    for r in range(config.restarts):
        gen = rng.derive(r).generator()
        theta = np.exp(gen.uniform(log_lo, log_hi, size=k))
        f = obj.value(theta)
        starts.append(f)
        for _ in range(config.sweeps):
            moved = False
            for j in range(k):
                cands, vals = obj.line(theta, j, window, config.line_search == "exact")
                m = int(np.argmin(vals))
                if vals[m] < f or (vals[m] == f and cands[m] < theta[j]):
                    if cands[m] != theta[j]:
                        moved = True
                    theta = theta.copy()
                    theta[j] = cands[m]
                    f = float(vals[m])
            if not moved:
                break
        # the line profile can disagree with direct evaluation at exact ties
        f = obj.value(theta)
        if f < best_f or (f == best_f and theta.sum() < best_theta.sum()):
            best_theta, best_f = theta, f

    full = np.zeros(dataset.n_features)
    full[list(support)] = best_theta
    weights = LinearWeights(full, support)
    s = dataset.rows @ full
    try:
        num, den = risk_counts(s > u, s > epsilon * u, H, u, epsilon)
        est = RiskEstimate.from_counts(num, den, epsilon, u)
    except UndefinedRiskError:
        est = None
    return LinearFit(weights, best_f, est, theta_max, obj.evaluations, tuple(starts))
