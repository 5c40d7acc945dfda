import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from levyfit.stable import c_alpha, sample_standard, tail_slope


def c_alpha_mp(alpha):
    mpmath.mp.dps = 40
    a = mpmath.mpf(alpha)
    return float(a / (2 ** (1 - a) * mpmath.sqrt(mpmath.pi)) * mpmath.gamma((1 + a) / 2) / mpmath.gamma(1 - a / 2))


def test_c_alpha_cauchy_closed_form():
    assert c_alpha(1.0) == pytest.approx(1.0 / math.pi, rel=1e-14)


@pytest.mark.parametrize("alpha", [0.5, 1.7, 0.01, 1.99])
def test_c_alpha_matches_arbitrary_precision_gamma(alpha):
    assert c_alpha(alpha) == pytest.approx(c_alpha_mp(alpha), rel=1e-12)


@pytest.mark.parametrize("bad", [0.0, 2.0, -0.3, 2.5, float("nan")])
def test_c_alpha_rejects_out_of_range(bad):
    with pytest.raises(ValueError):
        c_alpha(bad)


def test_c_alpha_positive_and_continuous():
    grid = np.arange(1e-4, 2.0, 1e-4)
    vals = np.array([c_alpha(a) for a in grid])
    assert np.all(vals > 0)
    # derivative stays bounded away from the endpoints
    assert np.max(np.abs(np.diff(vals))) < 1e-3


@given(st.floats(min_value=1e-3, max_value=2 - 1e-3))
def test_c_alpha_positive_property(alpha):
    assert c_alpha(alpha) > 0


def test_cauchy_median_is_zero():
    x = sample_standard(1.0, 10**6, seed=11)
    assert abs(np.median(x)) < 0.01


@pytest.mark.parametrize("alpha", [0.8, 1.2, 1.5, 1.8])
def test_tail_slope_matches_alpha(alpha):
    x = sample_standard(alpha, 10**6, seed=3)
    assert tail_slope(x, 10.0, 100.0) == pytest.approx(-alpha, abs=0.1)


def test_seeded_determinism():
    a = sample_standard(1.9, 1000, seed=5)
    b = sample_standard(1.9, 1000, seed=5)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, sample_standard(1.9, 1000, seed=6))


def test_symmetry_two_sample_ks():
    n = 10**5
    x = sample_standard(1.3, n, seed=21)
    y = sample_standard(1.3, n, seed=22)
    res = stats.ks_2samp(x, -y)
    crit = 1.628 * math.sqrt(2.0 / n)  # 1% two-sample critical value
    assert res.statistic < crit


@pytest.mark.parametrize("alpha", [0.7, 1.0, 1.5, 1.9])
def test_scale_matches_unit_characteristic_function(alpha):
    # scipy's S1 parameterisation with scale 1 has characteristic function exp(-|t|^alpha)
    x = sample_standard(alpha, 3000, seed=8)
    res = stats.kstest(x, stats.levy_stable(alpha, 0.0).cdf)
    assert res.pvalue > 0.01


def test_count_validation():
    with pytest.raises(ValueError):
        sample_standard(1.5, 0, seed=1)
