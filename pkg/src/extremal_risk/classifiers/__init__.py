from .base import MODEL_KINDS, ClassifierModel
from .lasso import LassoConfig, LogisticCoefficients, fit_logistic_lasso
from .linear import (
    LinearFit,
    LinearSearchConfig,
    LinearWeights,
    linear_model,
    linear_predict,
    optimize_linear,
)
from .tree import Forest, ForestConfig, TreeArrays, TreeConfig, fit_forest, fit_tree

__all__ = [
    "MODEL_KINDS",
    "ClassifierModel",
    "Forest",
    "ForestConfig",
    "LassoConfig",
    "LinearFit",
    "LinearSearchConfig",
    "LinearWeights",
    "LogisticCoefficients",
    "TreeArrays",
    "TreeConfig",
    "fit_forest",
    "fit_logistic_lasso",
    "fit_tree",
    "linear_model",
    "linear_predict",
    "optimize_linear",
]
