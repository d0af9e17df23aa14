import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from extremal_risk.errors import DomainError, ParameterError
from extremal_risk.prob import (
    ParetoLaw,
    RngStream,
    empirical_quantile,
    quantile_rank,
    sample_exponential,
    sample_pareto,
    splitmix64,
)


# regression lock on the sampler: master seed 0, stream 0
FROZEN_PARETO = [17.524660271710765, 1.462709292291208, 3.601560625150484]


def binom_ok(k, n, p, z=3.0):
    return abs(k / n - p) <= z * math.sqrt(p * (1 - p) / n)


# ---------------------------------------------------------------- rng streams


def test_splitmix64_reference_values():
    # first outputs of the reference splitmix64 generator seeded with 0
    assert splitmix64(0) == 0xE220A8397B1DCDAF
    assert splitmix64(0x9E3779B97F4A7C15) == 0x6E789E6AA1B965F4


def test_stream_reproducible_bit_identical():
    a = RngStream(42, 7).generator().random(1000)
    b = RngStream(42, 7).generator().random(1000)
    assert a.tobytes() == b.tobytes()


def test_distinct_streams_differ():
    root = RngStream(42)
    draws = {root.derive(k).generator().random() for k in range(50)}
    assert len(draws) == 50
    assert root.derive(1).generator().random() != RngStream(43).derive(1).generator().random()


def test_derive_is_pure():
    root = RngStream(5)
    assert root.derive(1, 2) == root.derive(1).derive(2)
    assert root.derive(1) == root.derive(1)


@pytest.mark.parametrize("seed", [-1, 2**64])
def test_stream_rejects_out_of_range_seed(seed):
    with pytest.raises(ParameterError):
        RngStream(seed)


# -------------------------------------------------------------------- pareto


def test_pareto_law_survival():
    law = ParetoLaw(2.0, scale=3.0)
    assert law.sf(3.0) == 1.0
    assert law.sf(6.0) == pytest.approx(0.25)
    assert law.ppf(0.75) == pytest.approx(6.0)


@pytest.mark.parametrize("alpha, scale", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (1.0, -2.0)])
def test_pareto_rejects_bad_parameters(alpha, scale):
    with pytest.raises(ParameterError):
        ParetoLaw(alpha, scale)


def test_sample_pareto_empty():
    assert sample_pareto(ParetoLaw(1.0), 0, RngStream(0)).shape == (0,)


def test_sample_pareto_tail_fraction():
    x = sample_pareto(ParetoLaw(3.0), 10**6, RngStream(1))
    assert binom_ok(np.count_nonzero(x > 2), x.size, 0.125)
    assert x.min() >= 1.0


def test_sample_pareto_median():
    x = sample_pareto(ParetoLaw(2.0), 10**6, RngStream(2))
    assert abs(np.median(x) - math.sqrt(2)) < 0.01


def test_sample_pareto_scale_lower_endpoint():
    x = sample_pareto(ParetoLaw(1.5, scale=4.0), 10_000, RngStream(3))
    assert x.min() >= 4.0


def test_sample_pareto_frozen_values():
    x = sample_pareto(ParetoLaw(1.0), 3, RngStream(0))
    np.testing.assert_allclose(x, FROZEN_PARETO, rtol=1e-15)


# ---------------------------------------------------------------- exponential


def test_sample_exponential_empty():
    assert sample_exponential(1.0, 0, RngStream(0)).shape == (0,)


def test_sample_exponential_mean():
    x = sample_exponential(1.0, 10**6, RngStream(4))
    assert abs(x.mean() - 1.0) < 0.01


def test_sample_exponential_rate_two_tail():
    x = sample_exponential(2.0, 10**6, RngStream(5))
    assert binom_ok(np.count_nonzero(x > 1), x.size, math.exp(-2))


@pytest.mark.parametrize("rate", [0.0, -1.0])
def test_sample_exponential_rejects_rate(rate):
    with pytest.raises(ParameterError):
        sample_exponential(rate, 10, RngStream(0))


def test_negative_count_rejected():
    with pytest.raises(ParameterError):
        sample_pareto(ParetoLaw(1.0), -1, RngStream(0))


@pytest.mark.parametrize(
    "draw, cdf",
    [
        (lambda r: sample_pareto(ParetoLaw(3.0), 10**5, r), lambda x: 1 - x**-3.0),
        (lambda r: sample_pareto(ParetoLaw(0.7, 2.0), 10**5, r), lambda x: 1 - (x / 2.0) ** -0.7),
        (lambda r: sample_exponential(2.0, 10**5, r), lambda x: 1 - np.exp(-2 * x)),
    ],
)
def test_inverse_transform_ks(draw, cdf):
    x = draw(RngStream(11))
    assert stats.kstest(x, cdf).statistic < 0.01


# ------------------------------------------------------------------ quantiles


def test_quantile_examples():
    assert empirical_quantile([5.0], 0.5) == 5.0
    assert empirical_quantile([1, 2, 3, 4], 0.97) == 4.0
    assert empirical_quantile([3, 1, 2], 1 / 3) == 1.0


def test_quantile_rank_exact_products():
    # n p lands on an integer up to rounding
    assert quantile_rank(100, 0.97) == 97
    assert quantile_rank(10_000, 0.97) == 9700
    assert quantile_rank(200_000, 0.995) == 199_000


def test_quantile_errors():
    with pytest.raises(DomainError):
        empirical_quantile([], 0.5)
    for p in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(ParameterError):
            empirical_quantile([1.0, 2.0], p)


values = st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=1, max_size=60)
probs = st.floats(0.001, 0.999)


@settings(max_examples=200, deadline=None)
@given(values, probs, probs)
def test_quantile_monotone_in_p(xs, p, q):
    lo, hi = sorted((p, q))
    assert empirical_quantile(xs, lo) <= empirical_quantile(xs, hi)


@settings(max_examples=200, deadline=None)
@given(values, probs, st.integers(-1000, 1000))
def test_quantile_shift_equivariant(xs, p, c):
    assert empirical_quantile(np.array(xs) + c, p) == pytest.approx(empirical_quantile(xs, p) + c)


@settings(max_examples=200, deadline=None)
@given(values, probs)
def test_quantile_is_an_observation_with_right_rank(xs, p):
    q = empirical_quantile(xs, p)
    assert q in xs
    n = len(xs)
    assert np.count_nonzero(np.array(xs) <= q) >= math.ceil(n * p - 1e-9)

