"""Independent reference implementations used only by the tests."""
from __future__ import annotations

import itertools
import math

import numpy as np


def _round_robin(n: int):
    # n even; each round pairs every index exactly once (circle method)
    idx = list(range(n))
    for _ in range(n - 1):
        yield np.array(idx[: n // 2]), np.array(idx[n // 2:][::-1])
        idx = [idx[0], idx[-1]] + idx[1:-1]


def jacobi_eigenvalues(a: np.ndarray, tol: float = 1e-15, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues of a dense symmetric matrix by cyclic two-sided Jacobi.

    Disjoint rotations of one round-robin stage are applied together. No
    LAPACK routine is involved.
    """
    a = np.array(a, dtype=float)
    n0 = a.shape[0]
    n = n0 + (n0 % 2)
    if n != n0:  # pad with a decoupled zero row/column
        b = np.zeros((n, n))
        b[:n0, :n0] = a
        a = b
    scale = np.linalg.norm(a)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            break
        for p, q in _round_robin(n):
            apq = a[p, q]
            app, aqq = a[p, p], a[q, q]
            active = apq != 0.0
            theta = np.where(active, (aqq - app) / (2.0 * np.where(active, apq, 1.0)), 0.0)
            t = np.where(active, np.sign(theta) / (np.abs(theta) + np.sqrt(theta**2 + 1.0)), 0.0)
            t = np.where(active & (theta == 0.0), 1.0, t)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            cp, cq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = c * cp - s * cq
            a[:, q] = s * cp + c * cq
            rp, rq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * rp - s[:, None] * rq
            a[q, :] = s[:, None] * rp + c[:, None] * rq
            a[p, q] = 0.0
            a[q, p] = 0.0
    w = np.sort(np.diag(a))
    if n != n0:
        # drop the padding eigenvalue (exactly 0 because it never mixes)
        w = np.delete(w, np.argmin(np.abs(w)))
    return w


def wilcoxon_bruteforce_p(diff) -> float:
    """Two-sided exact p by enumerating all 2^n sign patterns of the ranks."""
    diff = np.asarray(diff, dtype=float)
    diff = diff[diff != 0]
    absd = np.abs(diff)
    ranks = np.array([np.sum(absd < v) + (np.sum(absd == v) + 1) / 2.0 for v in absd])
    w = ranks[diff > 0].sum()
    lower = upper = 0
    for signs in itertools.product((0, 1), repeat=diff.size):
        s = np.dot(signs, ranks)
        lower += s <= w + 1e-9
        upper += s >= w - 1e-9
    return min(1.0, 2.0 * min(lower, upper) / 2**diff.size)


def random_bump(rng: np.random.Generator, t: np.ndarray) -> np.ndarray:
    """Smooth nonnegative bump: sum of one to three gaussians."""
    y = np.zeros_like(t)
    for _ in range(int(rng.integers(1, 4))):
        amp = rng.uniform(0.3, 1.5)
        centre = rng.uniform(-2.0, 2.0)
        width = rng.uniform(0.4, 1.5)
        y += amp * np.exp(-0.5 * ((t - centre) / width) ** 2)
    return y


def sech2(t: np.ndarray) -> np.ndarray:
    return 1.0 / np.cosh(t) ** 2


def bound_state_threshold(count, k: int, lo: float = 1e-4, hi: float = 1e4, rel: float = 1e-4) -> float:
    """Smallest chi (to ``rel``) at which ``count(chi) >= k``."""
    while hi / lo - 1.0 > rel:
        mid = math.sqrt(lo * hi)
        if count(mid) >= k:
            hi = mid
        else:
            lo = mid
    return hi
