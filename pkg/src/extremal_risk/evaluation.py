"""Repeated random-split comparison of classifiers under the extremal risk.

Each repetition draws a uniform train/test split, trains every classifier at
the threshold ``u`` and, for each ``eps > 0``, again at ``eps * u``, then
scores the test fold with the empirical (conditional) risk. The threshold is
computed once, on the full dataset, so every repetition evaluates the same
event ``{H > u}``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .classifiers import (
    ForestConfig,
    LassoConfig,
    LinearSearchConfig,
    LinearWeights,
    TreeConfig,
    fit_forest,
    fit_logistic_lasso,
    fit_tree,
    optimize_linear,
)
from .data import Dataset
from .errors import DomainError, ExtremalRiskError, ParameterError
from .prob import RngStream, empirical_quantile
from .risk import RiskEstimate, empirical_risk
from .tail import select_features

SCHEMA_VERSION = "1.0"


def boxplot_stats(values) -> dict:
    """Five-number summary with the order-statistic quantile convention."""
    x = np.asarray(values, dtype=float).ravel()
    if x.size == 0:
        raise DomainError("boxplot of an empty sample")
    return {
        "min": float(x.min()),
        "q1": empirical_quantile(x, 0.25),
        "median": empirical_quantile(x, 0.5),
        "q3": empirical_quantile(x, 0.75),
        "max": float(x.max()),
    }


# ---------------------------------------------------------------------------
# learners: every entry maps a training fold to +-1 predictions on the test
# fold at both thresholds


class Learner:
    name = "learner"

    def predictions(self, train: Dataset, X_test, u, epsilons, rng: RngStream) -> dict:
        """Map each epsilon to ``(pred_at_u, pred_at_eps_u)`` or to the raised error."""
        raise NotImplementedError


def _signs(alarm):
    return np.where(alarm, 1, -1)


@dataclass
class FixedLinear(Learner):
    """Untrained score ``theta' x`` thresholded at both levels."""

    theta: tuple[float, ...]
    name: str = "fixed"

    def predictions(self, train, X_test, u, epsilons, rng):
        w = LinearWeights.full(self.theta)
        s = w.scores(X_test)
        return {e: (_signs(s > u), _signs(s > e * u)) for e in epsilons}


@dataclass
class Constant(Learner):
    sign: int = -1
    name: str = "optimistic"

    def predictions(self, train, X_test, u, epsilons, rng):
        p = np.full(len(X_test), self.sign)
        return {e: (p, p) for e in epsilons}


@dataclass
class OptimizedLinear(Learner):
    """Risk-minimizing linear classifier.

    A single weight vector is fitted per epsilon against the conditional
    risk, which already involves both thresholds.
    """

    config: LinearSearchConfig = field(default_factory=LinearSearchConfig)
    min_c: float = 0.0
    name: str = "linear"

    def predictions(self, train, X_test, u, epsilons, rng):
        out = {}
        if self.min_c > 0:
            support = select_features(train, u, self.min_c).selected
        else:
            support = tuple(range(train.n_features))
        for i, e in enumerate(epsilons):
            try:
                if not support:
                    raise ParameterError("no feature passes the tail-constant cutoff")
                fit = optimize_linear(train, u, e, support, self.config, rng.derive(i))
                s = fit.weights.scores(X_test)
                out[e] = (_signs(s > u), _signs(s > e * u))
            except ExtremalRiskError as exc:
                out[e] = exc
        return out


@dataclass
class Standard(Learner):
    """Off-the-shelf classifier trained once per threshold."""

    kind: str = "tree"
    lam: float = 0.01
    tree: TreeConfig = field(default_factory=TreeConfig)
    forest: ForestConfig = field(default_factory=ForestConfig)
    lasso: LassoConfig = field(default_factory=LassoConfig)
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("logistic_lasso", "tree", "forest"):
            raise ParameterError(f"unknown classifier kind {self.kind!r}")
        self.name = self.name or self.kind

    def _fit_predict(self, train, X_test, t, rng):
        y = np.where(train.target > t, 1, -1)
        if self.kind == "logistic_lasso":
            model = fit_logistic_lasso(train.rows, y, self.lam, self.lasso, threshold=t)
        elif self.kind == "tree":
            model = fit_tree(train.rows, y, self.tree, threshold=t)
        else:
            model = fit_forest(train.rows, y, self.forest, rng, threshold=t)
        return model.predict(X_test)

    def predictions(self, train, X_test, u, epsilons, rng):
        try:
            at_u = self._fit_predict(train, X_test, u, rng.derive(0))
        except ExtremalRiskError as exc:
            return {e: exc for e in epsilons}
        out = {}
        for i, e in enumerate(epsilons):
            if e == 0:
                out[e] = (at_u, at_u)
                continue
            try:
                out[e] = (at_u, self._fit_predict(train, X_test, e * u, rng.derive(i + 1)))
            except ExtremalRiskError as exc:
                out[e] = exc
        return out


def parse_learner(desc: str, feature_names: Sequence[str], **options) -> Learner:
    """Build a learner from a CLI-style description.

    ``linear``, ``logistic_lasso``, ``tree``, ``forest``, ``optimistic``,
    ``crying_wolf``, ``fixed:<w1,w2,...>`` or ``fixed:<name>=<w>,...``.
    """
    kind, _, arg = desc.strip().partition(":")
    if kind == "linear" and not arg:
        return OptimizedLinear(
            options.get("linear_config") or LinearSearchConfig(),
            options.get("linear_min_c", 0.0),
        )
    if kind in ("logistic_lasso", "lasso") and not arg:
        return Standard("logistic_lasso", lam=options.get("lam", 0.01))
    if kind in ("tree", "forest") and not arg:
        return Standard(
            kind,
            tree=options.get("tree_config") or TreeConfig(),
            forest=options.get("forest_config") or ForestConfig(),
        )
    if kind == "optimistic" and not arg:
        return Constant(-1, "optimistic")
    if kind == "crying_wolf" and not arg:
        return Constant(1, "crying_wolf")
    if kind == "fixed" and arg:
        theta = np.zeros(len(feature_names))
        try:
            parts = [p.strip() for p in arg.split(",")]
            if all("=" in p for p in parts):
                for p in parts:
                    name, _, w = p.partition("=")
                    if name not in feature_names:
                        raise ParameterError(f"unknown feature {name!r} in {desc!r}")
                    theta[list(feature_names).index(name)] = float(w)
            else:
                if len(parts) != len(feature_names):
                    raise ParameterError(
                        f"{desc!r} has {len(parts)} weights for {len(feature_names)} features"
                    )
                theta[:] = [float(p) for p in parts]
        except ValueError:
            raise ParameterError(f"malformed weights in {desc!r}") from None
        return FixedLinear(tuple(float(v) for v in theta), desc.strip())
    raise ParameterError(f"unknown classifier {desc!r}")


# ---------------------------------------------------------------------------


@dataclass
class CvResult:
    classifier: str
    epsilon: float
    risks: list  # RiskEstimate or None per repetition

    @property
    def values(self) -> list[float]:
        return [r.value for r in self.risks if r is not None]

    @property
    def missing(self) -> int:
        return sum(r is None for r in self.risks)

    @property
    def boxplot(self) -> dict | None:
        v = self.values
        return boxplot_stats(v) if v else None

    @property
    def median(self) -> float | None:
        b = self.boxplot
        return None if b is None else b["median"]

    def to_dict(self, level: float = 0.95) -> dict:
        return {
            "classifier": self.classifier,
            "epsilon": self.epsilon,
            "missing": self.missing,
            "boxplot": self.boxplot,
            "risks": [None if r is None else r.to_dict(level) for r in self.risks],
        }


@dataclass
class CvReport:
    threshold_u: float
    u_quantile: float | None
    epsilons: tuple[float, ...]
    repeats: int
    train_fraction: float
    seed: int
    n: int
    results: list[CvResult]
    n_eps: dict  # epsilon -> per-repetition test counts of H > eps * u
    n_exceed: list  # per-repetition test counts of H > u
    skipped_repetitions: list[int]

    def result(self, classifier: str, epsilon: float) -> CvResult:
        for r in self.results:
            if r.classifier == classifier and r.epsilon == epsilon:
                return r
        raise KeyError((classifier, epsilon))

    def typical_n_eps(self, epsilon: float) -> float:
        return float(np.median(self.n_eps[epsilon]))

    def to_dict(self, level: float = 0.95) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "cv_report",
            "threshold_u": self.threshold_u,
            "u_quantile": self.u_quantile,
            # u is computed once on the full dataset, never per fold
            "threshold_fixed_across_repeats": True,
            "epsilons": list(self.epsilons),
            "repeats": self.repeats,
            "train_fraction": self.train_fraction,
            "seed": self.seed,
            "n": self.n,
            "n_test": self.n - round(self.train_fraction * self.n),
            "n_eps": [
                {
                    "epsilon": e,
                    "typical": self.typical_n_eps(e),
                    "per_repeat": [int(c) for c in self.n_eps[e]],
                }
                for e in self.epsilons
            ],
            "n_exceed_u": {"typical": float(np.median(self.n_exceed)) if self.n_exceed else None},
            "skipped_repetitions": self.skipped_repetitions,
            "results": [r.to_dict(level) for r in self.results],
        }


def _run_repetition(args):
    dataset, learners, u, epsilons, train_fraction, seed, rep = args
    rng = RngStream(seed).derive(rep)
    n = dataset.n
    perm = rng.derive(0).generator().permutation(n)
    n_train = round(train_fraction * n)
    train = dataset.subset(np.sort(perm[:n_train]))
    test = dataset.subset(np.sort(perm[n_train:]))
    H = test.target
    n_eps = {e: int(np.count_nonzero(H > e * u)) for e in epsilons}
    n_exceed = int(np.count_nonzero(H > u))
    skipped = not np.any(train.target > u)
    out = {}
    for li, learner in enumerate(learners):
        if skipped:
            out.update({(learner.name, e): None for e in epsilons})
            continue
        preds = learner.predictions(train, test.rows, u, epsilons, rng.derive(1 + li))
        for e in epsilons:
            p = preds[e]
            if isinstance(p, Exception):
                out[(learner.name, e)] = None
                continue
            try:
                out[(learner.name, e)] = empirical_risk(p[0], p[1], H, u, e)
            except ExtremalRiskError:
                out[(learner.name, e)] = None
    return out, n_eps, n_exceed, skipped


def run_cv(
    dataset: Dataset,
    classifiers: Sequence,
    u_quantile: float | None = 0.97,
    epsilons: Sequence[float] = (0.0,),
    repeats: int = 50,
    train_fraction: float = 0.7,
    seed: int = 0,
    workers: int = 1,
    threshold_abs: float | None = None,
) -> CvReport:
    """Cross-validated risk distributions for every (classifier, epsilon).

    ``classifiers`` holds :class:`Learner` objects or descriptions accepted by
    :func:`parse_learner`. Repetitions whose training fold has no exceedance
    of ``u``, and (classifier, epsilon) cells whose training or risk is
    undefined, are recorded as missing. The report is identical for any
    ``workers`` value.
    """
    if not classifiers:
        raise ParameterError("at least one classifier is required")
    if int(repeats) != repeats or repeats < 1:
        raise ParameterError(f"repeats must be a positive integer, got {repeats}")
    if not 0 < train_fraction < 1:
        raise ParameterError(f"train fraction must lie in (0, 1), got {train_fraction}")
    epsilons = tuple(float(e) for e in epsilons)
    if not epsilons or any(not 0 <= e < 1 for e in epsilons):
        raise ParameterError("epsilons must be a nonempty list of values in [0, 1)")
    if len(set(epsilons)) != len(epsilons):
        raise ParameterError("epsilons must be distinct")
    learners = [
        c if isinstance(c, Learner) else parse_learner(c, dataset.feature_names) for c in classifiers
    ]
    names = [l.name for l in learners]
    if len(set(names)) != len(names):
        raise ParameterError("classifier names must be distinct")
    if threshold_abs is not None:
        if not (threshold_abs > 0 and math.isfinite(threshold_abs)):
            raise ParameterError("absolute threshold must be positive")
        u, u_quantile = float(threshold_abs), None
    else:
        u = empirical_quantile(dataset.target, u_quantile)
        if not u > 0:
            raise DomainError(f"the {u_quantile} quantile of the target is {u}; threshold must be positive")
    n_train = round(train_fraction * dataset.n)
    if n_train < 1 or n_train >= dataset.n:
        raise ParameterError("train fraction leaves an empty train or test fold")

    tasks = [(dataset, learners, u, epsilons, train_fraction, seed, r) for r in range(int(repeats))]
    if workers > 1 and repeats > 1:
        with ProcessPoolExecutor(max_workers=min(workers, int(repeats))) as pool:
            outcomes = list(pool.map(_run_repetition, tasks))
    else:
        outcomes = [_run_repetition(t) for t in tasks]

    results = [
        CvResult(l.name, e, [o[0][(l.name, e)] for o in outcomes]) for l in learners for e in epsilons
    ]
    return CvReport(
        threshold_u=u,
        u_quantile=u_quantile,
        epsilons=epsilons,
        repeats=int(repeats),
        train_fraction=float(train_fraction),
        seed=int(seed),
        n=dataset.n,
        results=results,
        n_eps={e: [o[1][e] for o in outcomes] for e in epsilons},
        n_exceed=[o[2] for o in outcomes],
        skipped_repetitions=[r for r, o in enumerate(outcomes) if o[3]],
    )
