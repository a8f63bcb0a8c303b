import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phirl.stats import (
    TestResult,
    dagostino_k2,
    kendall,
    mannwhitney,
    mannwhitney_brute_force,
    spearman,
)


# ---------------------------------------------------------------------------
# spearman
# ---------------------------------------------------------------------------

def test_spearman_examples():
    assert spearman([1, 2, 3], [3, 2, 1]).statistic == pytest.approx(-1.0)
    assert spearman([1, 2, 3, 4], [1, 3, 2, 4]).statistic == pytest.approx(0.8)
    assert spearman([1, 1, 2], [1, 2, 3]).statistic == pytest.approx(0.866, abs=1e-3)


def test_spearman_constant_errors():
    with pytest.raises(ValueError, match="constant"):
        spearman([1, 1, 1], [1, 2, 3])


def test_spearman_p_value_behaves(rng):
    x = rng.normal(size=50)
    strong = spearman(x, x + 0.1 * rng.normal(size=50))
    weak = spearman(x, rng.normal(size=50))
    assert strong.p_value < 1e-10
    assert weak.p_value > 0.001


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_spearman_monotone_invariance(seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=20)
    y = rng.normal(size=20)
    base = spearman(x, y)
    transformed = spearman(np.exp(x), np.arctan(y) * 5.0)
    assert transformed.statistic == pytest.approx(base.statistic, abs=1e-12)
    assert transformed.p_value == pytest.approx(base.p_value, abs=1e-12)


# ---------------------------------------------------------------------------
# kendall
# ---------------------------------------------------------------------------

def test_kendall_examples():
    assert kendall(np.arange(10.0), np.arange(10.0)) == pytest.approx(1.0)
    assert kendall([1, 3, 2], [0, 1, 2]) == pytest.approx(1.0 / 3.0)


def test_kendall_tie_conventions():
    assert kendall([5.0, 5.0, 5.0], [0, 1, 2]) == 0.0
    with pytest.raises(ValueError, match="tied"):
        kendall([1.0, 1.0], [2.0, 2.0])


def test_kendall_matches_scipy(rng):
    from scipy.stats import kendalltau

    for _ in range(10):
        x = rng.integers(0, 6, size=25).astype(float)
        y = rng.integers(0, 6, size=25).astype(float)
        if np.all(x == x[0]) or np.all(y == y[0]):
            continue
        assert kendall(x, y) == pytest.approx(kendalltau(x, y).statistic, abs=1e-12)


# ---------------------------------------------------------------------------
# mannwhitney
# ---------------------------------------------------------------------------

def test_mannwhitney_small_example():
    res = mannwhitney([1.0, 2.0], [3.0, 4.0])
    assert res.statistic == 0.0
    assert res.p_value == pytest.approx(1.0 / 3.0)
    one_sided = mannwhitney([1.0, 2.0], [3.0, 4.0], alternative="less")
    assert one_sided.p_value == pytest.approx(1.0 / 6.0)


def test_mannwhitney_identical_samples():
    a = [1.0, 2.0, 3.0] * 10
    assert mannwhitney(a, list(a)).p_value >= 0.99


def test_mannwhitney_shifted_gaussians(rng):
    a = rng.normal(size=100)
    b = rng.normal(size=100) + 1.0
    assert mannwhitney(a, b).p_value < 1e-6


def test_mannwhitney_exact_matches_brute_force(rng):
    for na in range(1, 7):
        for nb in range(1, 13 - na):
            a = rng.normal(size=na)
            b = rng.normal(size=nb) + 0.5
            assert mannwhitney(a, b).p_value == mannwhitney_brute_force(a, b)


def test_mannwhitney_validation():
    with pytest.raises(ValueError, match="non-empty"):
        mannwhitney([], [1.0])
    with pytest.raises(ValueError, match="alternative"):
        mannwhitney([1.0], [2.0], alternative="sideways")


def test_mannwhitney_matches_scipy_asymptotic(rng):
    from scipy.stats import mannwhitneyu

    a = rng.normal(size=40)
    b = rng.normal(size=35) + 0.3
    ours = mannwhitney(a, b)
    ref = mannwhitneyu(a, b, alternative="two-sided", method="asymptotic")
    assert ours.statistic == pytest.approx(float(ref.statistic))
    assert ours.p_value == pytest.approx(float(ref.pvalue), rel=1e-9)


# ---------------------------------------------------------------------------
# dagostino_k2
# ---------------------------------------------------------------------------

def test_dagostino_p_is_exp_half_k2(rng):
    for _ in range(5):
        res = dagostino_k2(rng.normal(size=200))
        assert res.p_value == pytest.approx(math.exp(-res.statistic / 2.0), rel=1e-12)
    # K^2 = 0 would give p = exp(0) = 1 by the same formula
    assert math.exp(-0.0 / 2.0) == 1.0


def test_dagostino_matches_scipy(rng):
    from scipy.stats import normaltest

    for _ in range(5):
        x = rng.normal(size=500) + rng.exponential(size=500)
        ours = dagostino_k2(x)
        ref = normaltest(x)
        assert ours.statistic == pytest.approx(float(ref.statistic), rel=1e-9)
        assert ours.p_value == pytest.approx(float(ref.pvalue), rel=1e-9)


def test_dagostino_rejects_exponential(rng):
    assert dagostino_k2(rng.exponential(size=1000)).p_value < 1e-4


def test_dagostino_validation(rng):
    with pytest.raises(ValueError, match="length >= 20"):
        dagostino_k2(rng.normal(size=10))
    with pytest.raises(ValueError, match="constant"):
        dagostino_k2(np.ones(30))


def test_result_p_value_range():
    with pytest.raises(ValueError):
        TestResult(0.0, 1.5, (3,))
