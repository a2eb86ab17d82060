import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from sparse_detect.binomial import (
    log_pmf,
    sample_binomial_half,
    standardized_binomial,
    standardized_deviation,
    standardized_survival,
    two_sided_pvalue,
)
from sparse_detect.exceptions import InvalidConfigurationError


def exact_pmf(r):
    return [Fraction(math.comb(r, z), 2 ** r) for z in range(r + 1)]


def exact_survival(r, z_obs):
    """P(|R - r/2| > |z_obs - r/2|) with R ~ Bin(r, 1/2), as a Fraction."""
    pmf = exact_pmf(r)
    ref = abs(2 * z_obs - r)
    return sum((pmf[z] for z in range(r + 1) if abs(2 * z - r) > ref), Fraction(0))


def stirling_log_factorial(n):
    n = float(n)
    return (n * math.log(n) - n + 0.5 * math.log(2 * math.pi * n)
            + 1 / (12 * n) - 1 / (360 * n ** 3) + 1 / (1260 * n ** 5))


@pytest.mark.parametrize("r", range(1, 21))
def test_pmf_survival_pvalue_match_rational_enumeration(r):
    pmf = exact_pmf(r)
    z = np.arange(r + 1)
    np.testing.assert_allclose(np.exp(log_pmf(r, z)), [float(f) for f in pmf], rtol=0, atol=1e-12)
    kern = standardized_binomial(r)
    for zo in range(r + 1):
        want = float(exact_survival(r, zo))
        t = float(standardized_deviation(zo, r))
        assert abs(two_sided_pvalue(r, zo) - want) <= 1e-12
        assert abs(standardized_survival(r, t) - want) <= 1e-12
        assert abs(kern.pvalue(zo) - want) <= 1e-12


@pytest.mark.parametrize("r, z, want", [
    (2, 1, math.log(0.5)),
    (20, 10, math.log(184756 / 2 ** 20)),
])
def test_log_pmf_values(r, z, want):
    assert log_pmf(r, z) == pytest.approx(want, rel=1e-13)


def test_log_pmf_mode_at_figure_five_scale_matches_stirling():
    r, m = 66280, 33140
    oracle = stirling_log_factorial(r) - 2 * stirling_log_factorial(m) - r * math.log(2)
    got = log_pmf(r, m)
    assert math.isfinite(got) and got < 0
    assert math.exp(got) == pytest.approx(math.exp(oracle), rel=1e-6)
    assert math.exp(got) == pytest.approx(0.0031, abs=5e-5)


@pytest.mark.parametrize("r", [1, 7, 64, 1000, 10_000])
def test_pmf_sums_to_one(r):
    assert abs(np.exp(log_pmf(r, np.arange(r + 1))).sum() - 1.0) < 1e-12


@pytest.mark.parametrize("bad", [-1, 5, 2.5])
def test_log_pmf_domain(bad):
    with pytest.raises(InvalidConfigurationError):
        log_pmf(4, bad)


def test_two_sided_pvalue_domain():
    with pytest.raises(InvalidConfigurationError):
        two_sided_pvalue(4, 5)


@pytest.mark.parametrize("r, t, want", [
    (2, 1.0, 0.5),
    (7, -0.3, 1.0),
    (9, 3.0, 0.0),
])
def test_standardized_survival_examples(r, t, want):
    assert standardized_survival(r, t) == pytest.approx(want, abs=1e-15)


@pytest.mark.parametrize("r, z, want", [(2, 1, 0.5), (4, 3, 0.125), (6, 6, 0.0), (6, 0, 0.0)])
def test_pvalue_examples(r, z, want):
    assert two_sided_pvalue(r, z) == pytest.approx(want, abs=1e-15)


@pytest.mark.parametrize("r", [1, 2, 3, 10, 11, 500])
def test_achievable_values(r):
    kern = standardized_binomial(r)
    vals = kern.achievable_values
    assert vals.size == r // 2 + 1
    assert np.all(np.diff(vals) > 0)
    assert vals[-1] == pytest.approx(math.sqrt(r))
    if r % 2 == 0:
        assert vals[0] == 0.0
    else:
        assert vals[0] == pytest.approx(1 / math.sqrt(r))
    assert kern.survival(vals[-1]) == 0.0


@given(st.integers(1, 400), st.data())
@settings(max_examples=100, deadline=None)
def test_survival_is_a_right_continuous_step(r, data):
    kern = standardized_binomial(r)
    vals = kern.achievable_values
    i = data.draw(st.integers(0, vals.size - 1))
    lo = vals[i]
    hi = vals[i + 1] if i + 1 < vals.size else lo + 1.0
    mid = lo + (hi - lo) * data.draw(st.floats(0.0, 0.999))
    assert kern.survival(mid) == kern.survival(lo)
    assert kern.survival(lo) <= kern.survival(lo - 1e-9)


@given(st.integers(1, 2000), st.data())
@settings(max_examples=100, deadline=None)
def test_pvalue_symmetry(r, data):
    z = data.draw(st.integers(0, r))
    assert two_sided_pvalue(r, z) == two_sided_pvalue(r, r - z)


@given(st.integers(1, 300))
@settings(max_examples=60, deadline=None)
def test_survival_nonincreasing(r):
    ts = np.linspace(-1, math.sqrt(r) + 1, 257)
    s = standardized_survival(r, ts)
    assert np.all(np.diff(s) <= 0)


def test_pvalue_stochastically_smaller_than_uniform():
    r = 30
    pmf = np.exp(log_pmf(r, np.arange(r + 1)))
    q = two_sided_pvalue(r, np.arange(r + 1))
    for u in np.linspace(0.01, 0.99, 50):
        assert pmf[q <= u].sum() >= u - 1e-12


def test_kernel_tables_are_read_only_and_cached():
    a = standardized_binomial(12)
    assert a is standardized_binomial(12)
    with pytest.raises(ValueError):
        a.values[0] = 0.0


@pytest.mark.parametrize("r", [7, 64])
def test_sampler_chi_square_against_exact_pmf(r):
    draws = sample_binomial_half(r, np.random.default_rng(r), size=10 ** 6)
    counts = np.bincount(draws, minlength=r + 1)
    expected = np.exp(log_pmf(r, np.arange(r + 1))) * draws.size
    keep = expected >= 5
    obs = np.append(counts[keep], counts[~keep].sum())
    exp = np.append(expected[keep], expected[~keep].sum())
    if exp[-1] == 0:
        obs, exp = obs[:-1], exp[:-1]
    _, pval = stats.chisquare(obs, exp * obs.sum() / exp.sum())
    assert pval > 1e-3


def test_sampler_moments():
    rng = np.random.default_rng(11)
    assert abs(sample_binomial_half(1, rng, size=10 ** 6).mean() - 0.5) < 0.002
    assert abs(sample_binomial_half(64, rng, size=10 ** 6).var() - 16.0) < 0.1
    big = sample_binomial_half(66280, rng, size=10 ** 6)
    assert abs(big.mean() - 33140) < 3 * math.sqrt(66280 / 4) / 1e3
