import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats as sps

from oracles import wilcoxon_bruteforce_p
from sbsa import (
    DegenerateInputError,
    InsufficientDataError,
    linear_regression,
    significance_stars,
    summarize,
    wilcoxon_signed_rank,
)
from sbsa.pipeline import BrsPair


def test_regression_exact_line():
    r = linear_regression([(x, 3 - 0.5 * x) for x in range(6)])
    assert r.slope == pytest.approx(-0.5) and r.intercept == pytest.approx(3.0)
    assert r.r_squared == pytest.approx(1.0) and r.n == 6


def test_regression_matches_scipy():
    rng = np.random.default_rng(2)
    x = rng.normal(size=40)
    y = 2 * x + rng.normal(size=40)
    r = linear_regression([BrsPair(a, b) for a, b in zip(x, y)])
    ref = sps.linregress(x, y)
    assert r.slope == pytest.approx(ref.slope, rel=1e-12)
    assert r.r_squared == pytest.approx(ref.rvalue**2, rel=1e-12)
    assert r.slope_stderr == pytest.approx(ref.stderr, rel=1e-10)


def test_regression_errors():
    with pytest.raises(InsufficientDataError):
        linear_regression([(0, 1), (1, 2)])
    with pytest.raises(DegenerateInputError):
        linear_regression([(1, 1), (1, 2), (1, 3)])


def test_constant_response_r2_zero():
    assert linear_regression([(0, 5), (1, 5), (2, 5)]).r_squared == 0.0


def test_wilcoxon_all_positive_five():
    r = wilcoxon_signed_rank(np.zeros(5), np.arange(1, 6))
    assert r.exact and r.p_value == 0.0625


def test_wilcoxon_drops_zero_differences():
    with pytest.raises(InsufficientDataError):
        wilcoxon_signed_rank([1, 2, 3, 4, 5, 6], [1, 2, 3, 5, 6, 7])


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(5, 12))
def test_wilcoxon_exact_matches_enumeration(seed, n):
    d = np.round(np.random.default_rng(seed).normal(0.2, 1.0, n), 1)  # ties and zeros
    if np.count_nonzero(d) < 5:
        return
    r = wilcoxon_signed_rank(np.zeros(n), d, method="exact")
    assert r.p_value == pytest.approx(wilcoxon_bruteforce_p(d), rel=1e-12)


def test_wilcoxon_matches_scipy_without_ties():
    rng = np.random.default_rng(5)
    a, b = rng.normal(size=15), rng.normal(0.5, 1, 15)
    ref = sps.wilcoxon(b - a, method="exact").pvalue
    assert wilcoxon_signed_rank(a, b).p_value == pytest.approx(ref, rel=1e-12)
    ref = sps.wilcoxon(b - a, method="approx", correction=True).pvalue
    assert wilcoxon_signed_rank(a, b, method="approx").p_value == pytest.approx(ref, rel=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=30), st.randoms())
def test_summary_permutation_invariant(values, rnd):
    shuffled = list(values)
    rnd.shuffle(shuffled)
    assert summarize(values) == summarize(shuffled)


def test_summary_and_stars():
    s = summarize([1.0, 2.0, 3.0])
    assert s.mean == 2.0 and s.sem == pytest.approx(1 / np.sqrt(3))
    assert str(s) == "2 ± 0.58"
    assert [significance_stars(p) for p in (0.0005, 0.001, 0.005, 0.01, 0.2)] == ["***", "***", "**", "**", "NS"]
