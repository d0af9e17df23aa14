import numpy as np
import pytest

from extremal_risk import Dataset, RngStream, ScenarioSpec, empirical_quantile, empirical_risk, generate
from extremal_risk.classifiers import (
    ForestConfig,
    LassoConfig,
    LinearSearchConfig,
    LinearWeights,
    TreeConfig,
    fit_forest,
    fit_logistic_lasso,
    fit_tree,
    linear_model,
    linear_predict,
    optimize_linear,
)
from extremal_risk.classifiers.linear import _RiskObjective
from extremal_risk.errors import DegenerateTrainingError, ParameterError, TrainingError

# ---------------------------------------------------------------- linear rule


def test_linear_predict_examples():
    assert linear_predict(LinearWeights.full([0.0, 0.0]), [5.0, 9.0], 0.1) == -1
    assert linear_predict(LinearWeights.full([2.0, 0.0]), [3.0, 100.0], 5.0) == 1
    assert linear_predict(LinearWeights.full([1.0, 1.0]), [2.0, 3.0], 5.0) == -1


def test_linear_predict_dimension_mismatch():
    with pytest.raises(ParameterError):
        linear_predict(LinearWeights.full([1.0, 1.0]), [1.0], 1.0)


def test_linear_weights_validation():
    with pytest.raises(ParameterError):
        LinearWeights.full([-1.0])
    with pytest.raises(ParameterError):
        LinearWeights(np.array([1.0, 2.0]), (0,))
    w = LinearWeights(np.array([1.0, 0.0]), (0,))
    assert w.support == (0,)


def test_linear_model_predicts_signs():
    m = linear_model(LinearWeights.full([1.0]), 2.0)
    assert m.predict([[1.0], [3.0]]).tolist() == [-1, 1]
    assert m.trained_threshold == 2.0


# ----------------------------------------------------------------- optimizer


def brute_risk(ds, theta, u, eps):
    s = ds.rows @ theta
    return empirical_risk(np.where(s > u, 1, -1), np.where(s > eps * u, 1, -1), ds.target, u, eps)


def test_profile_matches_direct_evaluation():
    ds = generate(ScenarioSpec("linear_heavy_noise", {"n": 3000}, seed=5))
    u = empirical_quantile(ds.target, 0.95)
    gen = RngStream(1).generator()
    for eps in (0.0, 0.5):
        obj = _RiskObjective(ds.rows, ds.target, u, eps)
        window = np.concatenate([[0.0], np.geomspace(1e-3, 10, 15)])
        for _ in range(5):
            theta = gen.uniform(0, 2, size=4)
            j = int(gen.integers(4))
            cands, vals = obj.line(theta, j, window)
            for c, v in zip(cands[::7], vals[::7]):
                t = theta.copy()
                t[j] = c
                assert v == obj.value(t)


def test_delta0_mixture_optimum():
    ds = generate(ScenarioSpec("delta_mixture", {"delta": 0.0, "n": 200_000}, seed=1))
    u = empirical_quantile(ds.target, 0.99)
    fit = optimize_linear(ds, u, 0.0, (0,), rng=RngStream(1))
    theta = fit.weights.theta[0]
    assert 1.6 <= theta <= 2.6
    assert fit.risk.value < brute_risk(ds, np.array([1.0]), u, 0.0).value - 0.05


def test_column_equal_to_target_is_perfect():
    base = generate(ScenarioSpec("linear_heavy_noise", {"n": 4000}, seed=2))
    ds = Dataset(("X1", "X2", "copy"), np.column_stack([base.rows[:, :2], base.target]), base.target)
    u = empirical_quantile(ds.target, 0.97)
    fit = optimize_linear(ds, u, 0.0, (0, 1, 2), rng=RngStream(3))
    assert fit.risk.value == 0.0
    assert fit.weights.theta[2] > 0
    # no other combination reaches zero on this sample, so the copy carries the rule
    assert brute_risk(ds, np.array([0.0, 0.0, fit.weights.theta[2]]), u, 0.0).value == 0.0


def test_achieved_risk_not_above_starts():
    ds = generate(ScenarioSpec("linear_heavy_noise", {"n": 5000}, seed=4))
    u = empirical_quantile(ds.target, 0.97)
    for eps in (0.0, 0.4):
        fit = optimize_linear(ds, u, eps, (0, 1), LinearSearchConfig(restarts=4), RngStream(9))
        assert fit.objective <= min(fit.start_objectives)
        # never worse than the always-optimistic benchmark
        assert fit.objective <= 1.0


def test_optimizer_deterministic():
    ds = generate(ScenarioSpec("linear_heavy_noise", {"n": 3000}, seed=6))
    u = empirical_quantile(ds.target, 0.97)
    a = optimize_linear(ds, u, 0.4, (0, 1), rng=RngStream(2))
    b = optimize_linear(ds, u, 0.4, (0, 1), rng=RngStream(2))
    assert a.weights.theta.tobytes() == b.weights.theta.tobytes()


def test_optimizer_respects_support():
    ds = generate(ScenarioSpec("linear_heavy_noise", {"n": 3000}, seed=7))
    u = empirical_quantile(ds.target, 0.97)
    fit = optimize_linear(ds, u, 0.0, (1,), rng=RngStream(0))
    assert fit.weights.theta[[0, 2, 3]].tolist() == [0.0, 0.0, 0.0]


def test_optimizer_errors():
    ds = generate(ScenarioSpec("delta_mixture", {"n": 100}, seed=0))
    with pytest.raises(TrainingError):
        optimize_linear(ds, ds.target.max() + 1, 0.0, (0,))
    with pytest.raises(ParameterError):
        optimize_linear(ds, 1.0, 0.0, ())
    with pytest.raises(ParameterError):
        optimize_linear(ds, 1.0, 1.0, (0,))
    with pytest.raises(ParameterError):
        optimize_linear(ds, 1.0, 0.0, (3,))


def test_tie_break_prefers_smaller_theta():
    # every theta in a wide band separates the sample; the smallest minimizer wins
    X = np.array([[1.0], [2.0], [10.0], [20.0]])
    H = np.array([1.0, 2.0, 10.0, 20.0])
    ds = Dataset(("X",), X, H)
    fit = optimize_linear(ds, 5.0, 0.0, (0,), LinearSearchConfig(restarts=3), RngStream(0))
    assert fit.objective == 0.0
    # theta x > 5 must keep 2 theta <= 5 and 10 theta > 5
    assert 0.5 < fit.weights.theta[0] <= 2.5
    # smallest candidate in the band: the first grid node above 0.5
    grid = np.geomspace(fit.theta_max * 1e-4, fit.theta_max, 40)
    assert fit.weights.theta[0] == grid[grid > 0.5][0]


def test_large_theta_risk_tends_to_one():
    ds = generate(ScenarioSpec("delta_mixture", {"delta": 0.5, "n": 200_000}, seed=8))
    u = empirical_quantile(ds.target, 0.99)
    risks = [brute_risk(ds, np.array([k]), u, 0.0).value for k in (10.0, 100.0, 1000.0, 10_000.0)]
    assert all(b >= a for a, b in zip(risks, risks[1:]))
    assert risks[-1] > 0.97


# --------------------------------------------------------------------- lasso


def separable_toy():
    x1 = np.linspace(0.0, 10.0, 100)
    x2 = RngStream(0).generator().random(100)
    return np.column_stack([x1, x2]), np.where(x1 > 5, 1, -1)


def test_lasso_full_shrinkage():
    X, y = separable_toy()
    m = fit_logistic_lasso(X, y, 1e6)
    assert np.all(m.params.coef == 0.0)


def test_lasso_separable_accuracy():
    X, y = separable_toy()
    m = fit_logistic_lasso(X, y, 0.01)
    assert np.mean(m.predict(X) == y) >= 0.95


def test_lasso_objective_non_increasing():
    ds = generate(ScenarioSpec("linear_heavy_noise", {"n": 5000}, seed=3))
    u = empirical_quantile(ds.target, 0.97)
    y = np.where(ds.target > u, 1, -1)
    for standardize in (False, True):
        m = fit_logistic_lasso(ds.rows, y, 0.005, LassoConfig(standardize=standardize))
        h = np.array(m.params.objective_history)
        assert np.all(np.diff(h) <= 1e-12)


def test_lasso_single_class():
    with pytest.raises(DegenerateTrainingError):
        fit_logistic_lasso(np.ones((5, 2)), -np.ones(5), 0.1)


def test_lasso_negative_lambda():
    X, y = separable_toy()
    with pytest.raises(ParameterError):
        fit_logistic_lasso(X, y, -1.0)


def test_lasso_x4_zero_more_often_than_x1():
    zeros = {0.01: [0, 0], 0.1: [0, 0]}
    for seed in range(50):
        ds = generate(ScenarioSpec("linear_heavy_noise", {}, seed=seed))
        u = empirical_quantile(ds.target, 0.97)
        y = np.where(ds.target > u, 1, -1)
        for lam in zeros:
            coef = fit_logistic_lasso(ds.rows, y, lam, LassoConfig(max_iter=300)).params.coef
            zeros[lam][0] += coef[0] == 0
            zeros[lam][1] += coef[3] == 0
    assert zeros[0.01][1] > zeros[0.01][0]
    # at lambda = 0.1 the penalty exceeds the largest score gradient: all coefficients vanish
    assert zeros[0.1] == [50, 50]


# ---------------------------------------------------------------------- tree


def test_tree_pure_labels_single_leaf():
    m = fit_tree(np.arange(10.0)[:, None], np.ones(10))
    assert m.params.n_nodes == 1
    assert np.all(m.predict(np.arange(10.0)[:, None]) == 1)


def test_tree_root_split_example():
    X = np.array([[1.0], [2.0], [3.0], [4.0]])
    y = np.array([-1, -1, 1, 1])
    m = fit_tree(X, y, TreeConfig(min_leaf=1))
    assert m.params.feature[0] == 0 and m.params.threshold[0] == 2.5
    assert np.array_equal(m.predict(X), y)


def test_tree_tie_leaf_is_negative():
    m = fit_tree(np.array([[1.0], [1.0]]), np.array([1, -1]))
    assert m.predict([[1.0]]).tolist() == [-1]


def rank_transform(X):
    return np.argsort(np.argsort(X, axis=0, kind="stable"), axis=0).astype(float)


def test_tree_rank_invariance():
    ds = generate(ScenarioSpec("linear_heavy_noise", {"n": 3000}, seed=5))
    u = empirical_quantile(ds.target, 0.9)
    y = np.where(ds.target > u, 1, -1)
    a = fit_tree(ds.rows, y).predict(ds.rows)
    R = rank_transform(ds.rows)
    b = fit_tree(R, y).predict(R)
    assert np.array_equal(a, b)
    L = np.log1p(ds.rows) ** 3
    assert np.array_equal(a, fit_tree(L, y).predict(L))


def test_tree_depth_zero():
    X, y = separable_toy()
    m = fit_tree(X, y, TreeConfig(max_depth=0))
    assert m.params.n_nodes == 1


def test_tree_config_validation():
    with pytest.raises(ParameterError):
        TreeConfig(min_leaf=0)


# -------------------------------------------------------------------- forest


def test_forest_single_tree_without_bootstrap_equals_tree():
    ds = generate(ScenarioSpec("linear_heavy_noise", {"n": 2000}, seed=2))
    u = empirical_quantile(ds.target, 0.9)
    y = np.where(ds.target > u, 1, -1)
    tcfg = TreeConfig(max_depth=5, min_leaf=3)
    fcfg = ForestConfig(n_trees=1, bootstrap=False, features_per_split=4, max_depth=5, min_leaf=3)
    a = fit_tree(ds.rows, y, tcfg).predict(ds.rows)
    b = fit_forest(ds.rows, y, fcfg, RngStream(0)).predict(ds.rows)
    assert np.array_equal(a, b)


def test_forest_deterministic():
    ds = generate(ScenarioSpec("linear_heavy_noise", {"n": 2000}, seed=2))
    u = empirical_quantile(ds.target, 0.9)
    y = np.where(ds.target > u, 1, -1)
    cfg = ForestConfig(n_trees=10)
    a = fit_forest(ds.rows, y, cfg, RngStream(4)).predict(ds.rows)
    b = fit_forest(ds.rows, y, cfg, RngStream(4)).predict(ds.rows)
    assert np.array_equal(a, b)


def test_forest_separable_example():
    X = np.array([[1.0], [2.0], [3.0], [4.0]])
    y = np.array([-1, -1, 1, 1])
    m = fit_forest(X, y, ForestConfig(n_trees=25, min_leaf=1), RngStream(0))
    assert np.array_equal(m.predict(X), y)


def test_forest_rank_invariance():
    # without resampling every row is in-bag, so midpoint splits route all rows
    # identically after a monotone transform; random feature subsets stay active
    ds = generate(ScenarioSpec("linear_heavy_noise", {"n": 2000}, seed=3))
    u = empirical_quantile(ds.target, 0.9)
    y = np.where(ds.target > u, 1, -1)
    cfg = ForestConfig(n_trees=8, bootstrap=False)
    a = fit_forest(ds.rows, y, cfg, RngStream(1)).predict(ds.rows)
    R = rank_transform(ds.rows)
    assert np.array_equal(a, fit_forest(R, y, cfg, RngStream(1)).predict(R))


def test_forest_even_vote_tie_is_negative():
    from extremal_risk.classifiers import ClassifierModel, Forest
    from extremal_risk.classifiers.tree import TreeArrays

    def leaf(label):
        return TreeArrays(np.array([-1]), np.array([0.0]), np.array([-1]), np.array([-1]), np.array([label]))

    m = ClassifierModel("forest", Forest((leaf(True), leaf(False))))
    assert m.predict([[0.0]]).tolist() == [-1]
