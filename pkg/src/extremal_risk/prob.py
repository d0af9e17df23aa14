"""Seeded random streams, heavy/light-tailed samplers and empirical quantiles."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One round of the splitmix64 finalizer on a 64-bit integer."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


@dataclass(frozen=True)
class RngStream:
    """Deterministic random substream keyed by ``(master_seed, stream_id)``.

    A stream is a value, not a stateful generator: :meth:`generator` returns
    a fresh generator each call, so every consumer of the same stream sees
    the same sequence. Independent draws come from :meth:`derive`.
    """

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_id"):
            value = getattr(self, name)
            if not (0 <= int(value) <= _MASK64):
                raise ParameterError(f"{name} must be a 64-bit unsigned integer, got {value}")
            object.__setattr__(self, name, int(value))

    def derive(self, *keys: int) -> "RngStream":
        """Child stream whose id mixes this stream's id with ``keys``."""
        sid = self.stream_id
        for key in keys:
            sid = splitmix64(sid ^ splitmix64(int(key) & _MASK64))
        return RngStream(self.master_seed, sid)

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.master_seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(seq))

    def int_seed(self) -> int:
        """A 32-bit seed for libraries that only accept small integers."""
        return int(self.generator().integers(0, 2**32 - 1))


@dataclass(frozen=True)
class ParetoLaw:
    """Pareto law with survival ``(x / scale) ** -alpha`` for ``x >= scale``."""

    alpha: float
    scale: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ParameterError(f"Pareto tail index must be positive, got {self.alpha}")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ParameterError(f"Pareto scale must be positive, got {self.scale}")

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= self.scale, (np.maximum(x, self.scale) / self.scale) ** -self.alpha, 1.0)

    def cdf(self, x):
        return 1.0 - self.sf(x)

    def ppf(self, p):
        p = np.asarray(p, dtype=float)
        return self.scale * (1.0 - p) ** (-1.0 / self.alpha)


def _check_count(n: int) -> int:
    if int(n) != n or n < 0:
        raise ParameterError(f"sample size must be a nonnegative integer, got {n}")
    return int(n)


def _open_uniform(n: int, rng: RngStream) -> np.ndarray:
    # 1 - [0, 1) lies in (0, 1], so powers and logs below stay finite
    return 1.0 - rng.generator().random(n)


def sample_pareto(law: ParetoLaw, n: int, rng: RngStream) -> np.ndarray:
    """Inverse-transform Pareto draws ``scale * U ** (-1 / alpha)``."""
    n = _check_count(n)
    return law.scale * _open_uniform(n, rng) ** (-1.0 / law.alpha)


def sample_exponential(rate: float, n: int, rng: RngStream) -> np.ndarray:
    """Inverse-transform exponential draws with mean ``1 / rate``."""
    if not (rate > 0 and math.isfinite(rate)):
        raise ParameterError(f"exponential rate must be positive, got {rate}")
    n = _check_count(n)
    return -np.log(_open_uniform(n, rng)) / rate


def quantile_rank(n: int, p: float) -> int:
    """1-based order statistic index ``ceil(n * p)`` used by :func:`empirical_quantile`."""
    if not (0.0 < p < 1.0):
        raise ParameterError(f"quantile level must lie in (0, 1), got {p}")
    # guard against n * p landing a few ulps above an integer
    k = math.ceil(n * p - 1e-9 * max(1.0, n * p))
    return min(max(k, 1), n)


def empirical_quantile(values, p: float) -> float:
    """Left-continuous inverse of the empirical CDF.

    Returns the ``ceil(n * p)``-th order statistic, so the threshold is always
    an observed value and exceedance counts stay integer-exact.

    >>> empirical_quantile([1, 2, 3, 4], 0.97)
    4.0
    >>> empirical_quantile([3, 1, 2], 1 / 3)
    1.0
    """
    x = np.asarray(values, dtype=float).ravel()
    if x.size == 0:
        raise DomainError("empirical quantile of an empty sample")
    k = quantile_rank(x.size, p)
    return float(np.partition(x, k - 1)[k - 1])
