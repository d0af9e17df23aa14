"""CART classification trees (Gini impurity) and majority-vote forests."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError
from ..prob import RngStream
from .base import ClassifierModel, as_labels


@dataclass(frozen=True)
class TreeConfig:
    max_depth: int = 6
    min_leaf: int = 5

    def __post_init__(self):
        if self.max_depth < 0 or self.min_leaf < 1:
            raise ParameterError("max_depth >= 0 and min_leaf >= 1 are required")


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 50
    bootstrap_fraction: float = 1.0
    # None draws ceil(sqrt(d)) features at each split
    features_per_split: int | None = None
    max_depth: int = 8
    min_leaf: int = 5
    bootstrap: bool = True

    def __post_init__(self):
        if self.n_trees < 1:
            raise ParameterError("n_trees must be at least 1")
        if not 0 < self.bootstrap_fraction <= 1:
            raise ParameterError("bootstrap_fraction must lie in (0, 1]")
        if self.features_per_split is not None and self.features_per_split < 1:
            raise ParameterError("features_per_split must be at least 1")


@dataclass(frozen=True)
class TreeArrays:
    """Flat tree: node ``k`` is a leaf iff ``feature[k] < 0``."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    label: np.ndarray  # bool, leaf prediction

    @property
    def n_nodes(self) -> int:
        return self.feature.size

    def decide(self, X, threshold=None) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        node = np.zeros(X.shape[0], dtype=np.int64)
        rows = np.arange(X.shape[0])
        active = self.feature[node] >= 0
        while active.any():
            r = rows[active]
            k = node[r]
            go_left = X[r, self.feature[k]] <= self.threshold[k]
            node[r] = np.where(go_left, self.left[k], self.right[k])
            active[r] = self.feature[node[r]] >= 0
        return self.label[node]


def _best_split(X, pos, features, min_leaf):
    n = pos.size
    n_pos = int(pos.sum())
    parent = n - (n_pos * n_pos + (n - n_pos) ** 2) / n  # n * gini
    best = (parent, -1, 0.0)
    nl = np.arange(1, n)
    nr = n - nl
    size_ok = (nl >= min_leaf) & (nr >= min_leaf)
    for f in features:
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        pl = np.cumsum(pos[order])[:-1]
        pr = n_pos - pl
        ok = size_ok & (xs[:-1] < xs[1:])
        if not ok.any():
            continue
        # n_l * gini_l + n_r * gini_r
        imp = (nl - (pl * pl + (nl - pl) ** 2) / nl) + (nr - (pr * pr + (nr - pr) ** 2) / nr)
        imp = np.where(ok, imp, np.inf)
        i = int(np.argmin(imp))
        if imp[i] < best[0] - 1e-12:
            best = (float(imp[i]), int(f), 0.5 * (xs[i] + xs[i + 1]))
    return best[1], best[2]


def _grow(X, pos, max_depth, min_leaf, feature_sampler=None) -> TreeArrays:
    feature, threshold, left, right, label = [], [], [], [], []

    def new_node():
        for lst, v in ((feature, -1), (threshold, 0.0), (left, -1), (right, -1), (label, False)):
            lst.append(v)
        return len(feature) - 1

    root = new_node()
    stack = [(root, np.arange(pos.size), 0)]
    d = X.shape[1]
    while stack:
        k, idx, depth = stack.pop()
        p = pos[idx]
        n_pos = int(p.sum())
        # majority vote, ties to the negative class
        label[k] = n_pos * 2 > idx.size
        if depth >= max_depth or n_pos == 0 or n_pos == idx.size or idx.size < 2 * min_leaf:
            continue
        feats = range(d) if feature_sampler is None else feature_sampler()
        f, thr = _best_split(X[idx], p, feats, min_leaf)
        if f < 0:
            continue
        go_left = X[idx, f] <= thr
        lk, rk = new_node(), new_node()
        feature[k], threshold[k], left[k], right[k] = f, thr, lk, rk
        stack.append((rk, idx[~go_left], depth + 1))
        stack.append((lk, idx[go_left], depth + 1))
    return TreeArrays(
        np.array(feature, dtype=np.int64),
        np.array(threshold, dtype=float),
        np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64),
        np.array(label, dtype=bool),
    )


def _check_xy(X, y):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    pos = as_labels(y)
    if X.shape[0] != pos.size:
        raise ParameterError("X and y must have the same number of rows")
    return X, pos


def fit_tree(X, y, config: TreeConfig | None = None, threshold: float | None = None) -> ClassifierModel:
    """Grow a CART tree.

    Splits are axis-aligned at midpoints between consecutive distinct sorted
    values and minimize the size-weighted Gini impurity of the children;
    growth stops at ``max_depth``, at pure nodes, or when no split leaves
    ``min_leaf`` rows on both sides with a strict impurity decrease.
    """
    config = config or TreeConfig()
    X, pos = _check_xy(X, y)
    return ClassifierModel("tree", _grow(X, pos, config.max_depth, config.min_leaf), threshold)


@dataclass(frozen=True)
class Forest:
    trees: tuple[TreeArrays, ...]

    def decide(self, X, threshold=None) -> np.ndarray:
        votes = sum(t.decide(X).astype(np.int64) for t in self.trees)
        return votes * 2 > len(self.trees)


def fit_forest(
    X,
    y,
    config: ForestConfig | None = None,
    rng: RngStream | None = None,
    threshold: float | None = None,
) -> ClassifierModel:
    """Bagged CART trees with per-split random feature subsets; majority vote, ties to -1."""
    config = config or ForestConfig()
    rng = rng or RngStream(0)
    X, pos = _check_xy(X, y)
    n, d = X.shape
    m = config.features_per_split or math.ceil(math.sqrt(d))
    m = min(m, d)
    n_boot = max(1, round(config.bootstrap_fraction * n))
    trees = []
    for b in range(config.n_trees):
        gen = rng.derive(b).generator()
        if config.bootstrap:
            idx = gen.integers(0, n, size=n_boot)
        else:
            idx = np.arange(n)
        if m == d:
            sampler = None
        else:
            def sampler(gen=gen):
                return np.sort(gen.choice(d, size=m, replace=False))
        trees.append(_grow(X[idx], pos[idx], config.max_depth, config.min_leaf, sampler))
    return ClassifierModel("forest", Forest(tuple(trees)), threshold)
