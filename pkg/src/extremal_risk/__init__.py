"""Evaluate, compare and optimize binary classifiers of extreme events.

The central quantity is the weighted extremal risk of a classifier ``g`` for
the event ``{H > u}``::

    R(g) = P(g != Y) / P(Y = 1 or g = 1),    Y = sign(H - u),

and its conditional version, which restricts attention to rows where both the
target and the alarm clear the lower level ``eps * u``.
"""

from .data import Dataset, load_csv, write_csv
from .errors import (
    DataError,
    DomainError,
    ExtremalRiskError,
    ParameterError,
    TrainingError,
    UndefinedRiskError,
)
from .evaluation import CvReport, boxplot_stats, run_cv
from .prob import ParetoLaw, RngStream, empirical_quantile, sample_exponential, sample_pareto
from .risk import (
    JointEventTable,
    RamosLedfordParams,
    RiskEstimate,
    SpectralSample,
    confidence_interval,
    empirical_risk,
    limit_risk_from_c_chi,
    ramos_ledford_risk,
    set_ratio_risk,
    set_ratio_risk_closed_form,
    spectral_limit_risk,
)
from .scenarios import ScenarioSpec, generate, reference_risk
from .tail import TailCoefficients, estimate_tail_coefficients, select_features

__version__ = "0.1.0"

__all__ = [
    "CvReport",
    "DataError",
    "Dataset",
    "DomainError",
    "ExtremalRiskError",
    "JointEventTable",
    "ParameterError",
    "ParetoLaw",
    "RamosLedfordParams",
    "RiskEstimate",
    "RngStream",
    "ScenarioSpec",
    "SpectralSample",
    "TailCoefficients",
    "TrainingError",
    "UndefinedRiskError",
    "boxplot_stats",
    "confidence_interval",
    "empirical_quantile",
    "empirical_risk",
    "estimate_tail_coefficients",
    "generate",
    "limit_risk_from_c_chi",
    "load_csv",
    "ramos_ledford_risk",
    "reference_risk",
    "run_cv",
    "sample_exponential",
    "sample_pareto",
    "select_features",
    "set_ratio_risk",
    "set_ratio_risk_closed_form",
    "spectral_limit_risk",
    "write_csv",
]
