"""Generative scenarios with known limit risks.

Four kinds ship:

``linear_heavy_noise``
    ``X1 ~ Pareto(3), X2 ~ Pareto(2), X3 ~ Exp(1), X4 ~ Exp(2)`` and
    ``H = X1 + N`` with independent noise ``N ~ Pareto(2)``. The noise
    dominates the tail, so every threshold classifier has unconditional
    limit risk 1.
``delta_mixture``
    ``X ~ Pareto(1)``; ``H`` equals ``delta * X`` or ``(2 - delta) * X`` with
    probability 1/2 each, on an independent coin.
``independent_pareto`` / ``comonotone_pareto``
    ``(X, H)`` with Pareto(alpha) margins, independent or identical.

Exponential laws are parameterized by their rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .data import Dataset
from .errors import ParameterError
from .prob import ParetoLaw, RngStream, sample_exponential, sample_pareto
from .risk import RamosLedfordParams, SpectralSample, ramos_ledford_risk

SCENARIO_KINDS = ("linear_heavy_noise", "delta_mixture", "independent_pareto", "comonotone_pareto")

_DEFAULTS: dict[str, dict[str, Any]] = {
    "linear_heavy_noise": {"n": 10_000},
    "delta_mixture": {"n": 10_000, "delta": 0.5},
    "independent_pareto": {"n": 10_000, "alpha": 1.0},
    "comonotone_pareto": {"n": 10_000, "alpha": 1.0},
}


@dataclass(frozen=True)
class ScenarioSpec:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise ParameterError(
                f"unknown scenario {self.kind!r}; choose from {', '.join(SCENARIO_KINDS)}"
            )
        unknown = set(self.params) - set(_DEFAULTS[self.kind])
        if unknown:
            raise ParameterError(f"unknown parameter(s) for {self.kind}: {', '.join(sorted(unknown))}")
        merged = {**_DEFAULTS[self.kind], **self.params}
        n = merged["n"]
        if int(n) != n or n < 1:
            raise ParameterError(f"n must be a positive integer, got {n}")
        merged["n"] = int(n)
        if "delta" in merged and not (0.0 <= merged["delta"] <= 1.0):
            raise ParameterError(f"delta must lie in [0, 1], got {merged['delta']}")
        if "alpha" in merged and not merged["alpha"] > 0:
            raise ParameterError(f"alpha must be positive, got {merged['alpha']}")
        object.__setattr__(self, "params", merged)

    @property
    def n(self) -> int:
        return self.params["n"]


def generate(spec: ScenarioSpec) -> Dataset:
    """Draw the scenario's dataset; each column uses its own substream."""
    rng = RngStream(spec.seed)
    n = spec.n
    p = spec.params
    if spec.kind == "linear_heavy_noise":
        x1 = sample_pareto(ParetoLaw(3.0), n, rng.derive(1))
        x2 = sample_pareto(ParetoLaw(2.0), n, rng.derive(2))
        x3 = sample_exponential(1.0, n, rng.derive(3))
        x4 = sample_exponential(2.0, n, rng.derive(4))
        noise = sample_pareto(ParetoLaw(2.0), n, rng.derive(5))
        return Dataset(("X1", "X2", "X3", "X4"), np.column_stack([x1, x2, x3, x4]), x1 + noise)
    if spec.kind == "delta_mixture":
        x = sample_pareto(ParetoLaw(1.0), n, rng.derive(1))
        heads = rng.derive(2).generator().random(n) < 0.5
        factor = np.where(heads, p["delta"], 2.0 - p["delta"])
        return Dataset(("X",), x[:, None], factor * x)
    law = ParetoLaw(p["alpha"])
    x = sample_pareto(law, n, rng.derive(1))
    if spec.kind == "comonotone_pareto":
        return Dataset(("X",), x[:, None], x.copy())
    return Dataset(("X",), x[:, None], sample_pareto(law, n, rng.derive(2)))


def delta_mixture_survival(u, delta: float):
    """Exact ``P(H > u)`` for the delta mixture."""
    u = np.asarray(u, dtype=float)
    hi = 2.0 - delta
    return np.where(u >= hi, np.minimum(1.0, 1.0 / np.maximum(u, 1e-300)),
                    np.where(u > delta, 0.5 * (1.0 + delta / np.maximum(u, 1e-300)), 1.0))


def _scaled_joint(a: float, s: float, t: float, factors, alpha: float) -> float:
    # u^alpha * P(aX > s u, H > t u) for H = b X with b drawn uniformly from
    # ``factors`` and X ~ Pareto(alpha); a zero level means "no constraint"
    total = 0.0
    for b in factors:
        x_bound = a / s if s > 0 else math.inf
        h_bound = b / t if t > 0 else math.inf
        total += min(x_bound, h_bound) ** alpha / len(factors)
    return total


def scaled_pareto_linear_risk(a: float, factors, alpha: float, epsilon: float) -> float:
    """Limit (conditional) risk of ``g(X) = a X`` when ``H = b X``.

    ``X ~ Pareto(alpha)`` and ``b`` is an independent uniform pick from
    ``factors``. Every event probability scales exactly like ``u^-alpha`` once
    all levels exceed the Pareto lower endpoint, so the ratio is exact at
    large finite ``u``.
    """
    if not a > 0:
        raise ParameterError(f"classifier slope must be positive, got {a}")
    both = _scaled_joint(a, 1.0, 1.0, factors, alpha)
    if both <= 0:
        return 1.0
    inv_b1 = _scaled_joint(a, 1.0, epsilon, factors, alpha) / both
    inv_a1 = _scaled_joint(a, epsilon, 1.0, factors, alpha) / both
    return 1.0 - 1.0 / (inv_b1 + inv_a1 - 1.0)


def delta_mixture_linear_risk(a: float, delta: float, epsilon: float) -> float:
    """Limit risk of ``a X`` in the delta mixture (see :func:`scaled_pareto_linear_risk`)."""
    return scaled_pareto_linear_risk(a, (delta, 2.0 - delta), 1.0, epsilon)


def _parse_classifier(desc: str) -> tuple[str, float | None]:
    kind, _, arg = desc.partition(":")
    if kind == "identity":
        return kind, 1.0
    if kind == "linear" and arg:
        try:
            return kind, float(arg)
        except ValueError:
            pass
    if kind == "any":
        return kind, None
    raise ParameterError(f"unknown analytic classifier {desc!r}; use 'identity', 'linear:<a>' or 'any'")


def reference_risk(spec: ScenarioSpec, classifier_desc: str, epsilon: float) -> float | None:
    """Analytic limit risk of an analytic classifier, or ``None`` if unknown.

    ``classifier_desc`` is ``"identity"``, ``"linear:<a>"`` (the score ``a X``)
    or ``"any"`` (only meaningful where every classifier shares the limit).
    """
    if not (0.0 <= epsilon < 1.0):
        raise ParameterError(f"epsilon must lie in [0, 1), got {epsilon}")
    kind, a = _parse_classifier(classifier_desc)
    if spec.kind == "linear_heavy_noise":
        return 1.0 if epsilon == 0 else None
    if a is None:
        return None
    if spec.kind == "delta_mixture":
        return delta_mixture_linear_risk(a, spec.params["delta"], epsilon)
    alpha = spec.params["alpha"]
    if spec.kind == "comonotone_pareto":
        return scaled_pareto_linear_risk(a, (1.0,), alpha, epsilon)
    if a != 1.0:
        return None
    if epsilon == 0:
        return 1.0
    return ramos_ledford_risk(RamosLedfordParams(alpha, alpha, eta=0.5), epsilon)


def spectral_sample(spec: ScenarioSpec, m: int, rng: RngStream) -> SpectralSample:
    """Draws of the spectral tail vector of ``(X, H)`` for the scenario."""
    gen = rng.generator()
    p = spec.params
    if spec.kind == "delta_mixture":
        d = p["delta"]
        # norm exceedances come from the (2 - d) component with weight (2 - d) : 1
        second = gen.random(m) < (2.0 - d) / (3.0 - d)
        gamma = np.where(second, 1.0 / (2.0 - d), 1.0)[:, None]
        omega = np.where(second, 1.0, d)
        return SpectralSample(gamma, omega, 1.0)
    if spec.kind == "comonotone_pareto":
        return SpectralSample(np.ones((m, 1)), np.ones(m), p["alpha"])
    if spec.kind == "independent_pareto":
        on_h = gen.random(m) < 0.5
        return SpectralSample((~on_h).astype(float)[:, None], on_h.astype(float), p["alpha"])
    # linear_heavy_noise: X2 and N share the tail index 2, X1 and X3, X4 are lighter
    on_h = gen.random(m) < 0.5
    gamma = np.zeros((m, 4))
    gamma[~on_h, 1] = 1.0
    return SpectralSample(gamma, on_h.astype(float), 2.0)
