from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import norm, rankdata

from .errors import DegenerateInputError, InsufficientDataError

# largest number of non-zero differences handled by exact enumeration
EXACT_MAX_N = 20


@dataclass(frozen=True)
class RegressionResult:
    slope: float
    intercept: float
    r_squared: float
    n: int
    slope_stderr: float = math.nan


@dataclass(frozen=True)
class PairedTestResult:
    statistic: float
    p_value: float
    n_effective: int
    exact: bool = True


@dataclass(frozen=True)
class SummaryStat:
    mean: float
    sem: float
    n: int

    def __str__(self) -> str:
        return f"{self.mean:.4g} ± {self.sem:.2g}"


def _xy(pairs) -> tuple[np.ndarray, np.ndarray]:
    pairs = list(pairs)
    if pairs and hasattr(pairs[0], "x"):
        x = np.array([p.x for p in pairs], dtype=float)
        y = np.array([p.y for p in pairs], dtype=float)
    else:
        arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
        x, y = arr[:, 0], arr[:, 1]
    return x, y


def linear_regression(pairs: Iterable) -> RegressionResult:
    """Ordinary least squares of y on x.

    ``pairs`` holds objects with ``x``/``y`` attributes (e.g. BrsPair) or
    plain (x, y) tuples.
    """
    x, y = _xy(pairs)
    n = x.size
    if n < 3:
        raise InsufficientDataError(f"regression needs at least 3 pairs, got {n}")
    xc = x - x.mean()
    sxx = float(np.dot(xc, xc))
    if sxx == 0.0:
        raise DegenerateInputError("predictor has zero variance")
    yc = y - y.mean()
    slope = float(np.dot(xc, yc)) / sxx
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (intercept + slope * x)
    ss_res = float(np.dot(resid, resid))
    ss_tot = float(np.dot(yc, yc))
    r2 = 0.0 if ss_tot == 0.0 else min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    stderr = math.sqrt(ss_res / (n - 2) / sxx)
    return RegressionResult(slope, intercept, r2, n, stderr)


def _exact_upper_lower(ranks2: np.ndarray, w2: int) -> tuple[float, float]:
    # distribution of the (doubled) positive-rank sum over all 2^n sign patterns
    total = int(ranks2.sum())
    counts = np.zeros(total + 1, dtype=np.int64)
    counts[0] = 1
    for r in ranks2:
        counts[r:] = counts[r:] + counts[: total + 1 - r].copy()
    denom = float(2 ** ranks2.size)
    lower = counts[: w2 + 1].sum() / denom
    upper = counts[w2:].sum() / denom
    return lower, upper


def wilcoxon_signed_rank(before: Sequence[float], after: Sequence[float],
                         method: str = "auto") -> PairedTestResult:
    """Two-sided Wilcoxon signed-rank test on paired samples.

    Zero differences are dropped. The statistic is the sum of ranks of the
    positive differences ``after - before``. ``method`` is ``"auto"`` (exact
    up to 20 non-zero differences), ``"exact"`` or ``"approx"`` (normal with
    tie and continuity correction).
    """
    a = np.asarray(before, dtype=float)
    b = np.asarray(after, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise InsufficientDataError("before and after must be 1-D and equally long")
    diff = b - a
    diff = diff[diff != 0]
    n = diff.size
    if n < 5:
        raise InsufficientDataError(f"only {n} non-zero differences; need at least 5")
    ranks = rankdata(np.abs(diff))
    w = float(ranks[diff > 0].sum())
    exact = method == "exact" or (method == "auto" and n <= EXACT_MAX_N)
    if exact:
        ranks2 = np.rint(2 * ranks).astype(np.int64)
        lower, upper = _exact_upper_lower(ranks2, int(round(2 * w)))
        p = min(1.0, 2.0 * min(lower, upper))
    else:
        _, tie_counts = np.unique(ranks, return_counts=True)
        var = n * (n + 1) * (2 * n + 1) / 24.0 - np.sum(tie_counts**3 - tie_counts) / 48.0
        dev = max(0.0, abs(w - n * (n + 1) / 4.0) - 0.5)
        p = min(1.0, 2.0 * float(norm.sf(dev / math.sqrt(var))))
    p = max(p, np.finfo(float).tiny)
    return PairedTestResult(w, float(p), n, exact)


def summarize(values: Iterable[float]) -> SummaryStat:
    """Mean and standard error of the mean (n - 1 variance)."""
    v = np.asarray(list(values), dtype=float)
    if v.size < 2:
        raise InsufficientDataError(f"need at least 2 values, got {v.size}")
    v = np.sort(v)  # summation order independent of input order
    return SummaryStat(float(v.mean()), float(v.std(ddof=1) / math.sqrt(v.size)), int(v.size))


def significance_stars(p: float) -> str:
    if p <= 0.001:
        return "***"
    if p <= 0.01:
        return "**"
    return "NS"
