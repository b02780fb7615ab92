"""Negative spectrum of the discretized Schrodinger operator H(-chi*y).

The operator -d^2/dt^2 - chi*y(t) is discretized with second-order central
differences on the sample grid, with zero (Dirichlet) values just outside the
window. Eigenvalues below zero are located by Sturm-sequence bisection and
their eigenvectors by inverse iteration (LAPACK ``stebz``/``stein``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.linalg import LinAlgError
from scipy.linalg import eigh_tridiagonal

from .errors import DomainError, InvalidInputError, NumericError
from .signal import Signal

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is optional
    njit = None

# eigenvalues within this fraction of 2/dt^2 from zero are treated as zero
ZERO_TOL = 1e-12
# relative kappa gap below which eigenvectors get re-orthogonalized
DEGENERACY_TOL = 1e-9


def _readonly(a) -> np.ndarray:
    out = np.array(a, dtype=np.float64)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class TridiagonalOperator:
    diagonal: np.ndarray
    off_diagonal: np.ndarray
    dt: float
    chi: float
    t0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "diagonal", _readonly(self.diagonal))
        object.__setattr__(self, "off_diagonal", _readonly(self.off_diagonal))
        if self.off_diagonal.size != self.diagonal.size - 1:
            raise InvalidInputError("off_diagonal must have one entry fewer than diagonal")

    @property
    def size(self) -> int:
        return self.diagonal.size

    def to_dense(self) -> np.ndarray:
        return (
            np.diag(self.diagonal)
            + np.diag(self.off_diagonal, 1)
            + np.diag(self.off_diagonal, -1)
        )

    @property
    def zero_tolerance(self) -> float:
        return ZERO_TOL * 2.0 / self.dt**2


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Bound states of H(-chi*y) on the sample grid.

    ``kappas`` are sorted descending (so eigenvalues -kappa^2 ascend) and row
    ``n`` of ``eigenfunctions`` is the bound state for ``kappas[n]``,
    normalized so that ``sum(psi**2) * dt == 1``.
    """

    chi: float
    kappas: np.ndarray
    eigenfunctions: np.ndarray
    dt: float
    signal_length: int
    t0: float = 0.0

    def __post_init__(self):
        kappas = _readonly(self.kappas).reshape(-1)
        psi = _readonly(self.eigenfunctions).reshape(kappas.size, self.signal_length)
        if kappas.size and (np.any(kappas <= 0) or np.any(np.diff(kappas) > 0)):
            raise InvalidInputError("kappas must be positive and sorted descending")
        object.__setattr__(self, "kappas", kappas)
        object.__setattr__(self, "eigenfunctions", psi)

    @classmethod
    def empty(cls, chi: float, dt: float, signal_length: int, t0: float = 0.0):
        return cls(chi, np.empty(0), np.empty((0, signal_length)), dt, signal_length, t0)

    @property
    def n(self) -> int:
        return self.kappas.size

    def __len__(self) -> int:
        return self.n

    @property
    def eigenvalues(self) -> np.ndarray:
        """lambda_n = -kappa_n^2, ascending."""
        return -self.kappas**2

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.signal_length)


def discretize_operator(y: Signal, chi: float) -> TridiagonalOperator:
    """Three-point discretization of H(-chi*y).

    Negative samples are passed through unchanged; keeping the potential
    well-signed is the caller's business.
    """
    if not isinstance(y, Signal):
        y = Signal(y, 1.0)
    chi = float(chi)
    if not (math.isfinite(chi) and chi > 0):
        raise DomainError(f"chi must be positive and finite, got {chi!r}")
    inv_h2 = 1.0 / y.dt**2
    diagonal = 2.0 * inv_h2 - chi * y.samples
    off = np.full(y.samples.size - 1, -inv_h2)
    return TridiagonalOperator(diagonal, off, y.dt, chi, y.t0)


def _sturm_count_impl(d, e, sigma, pivmin):
    # LDL^T pivots of (T - sigma*I); the number of negative pivots is the
    # number of eigenvalues below sigma.
    count = 0
    q = d[0] - sigma
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0.0:
        count += 1
    for i in range(1, d.shape[0]):
        q = (d[i] - sigma) - e[i - 1] * e[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0.0:
            count += 1
    return count


if njit is not None:
    _sturm_count_kernel = njit(cache=True, nogil=True)(_sturm_count_impl)
else:  # pragma: no cover
    def _sturm_count_kernel(d, e, sigma, pivmin):
        return _sturm_count_impl(d.tolist(), e.tolist(), sigma, pivmin)


def sturm_count(op: TridiagonalOperator, sigma: float) -> int:
    """Number of eigenvalues of ``op`` strictly below ``sigma``."""
    e = op.off_diagonal
    emax2 = float(np.max(e * e)) if e.size else 0.0
    pivmin = np.finfo(np.float64).tiny * max(1.0, emax2)
    return int(_sturm_count_kernel(op.diagonal, e, float(sigma), pivmin))


def _negative_count(op: TridiagonalOperator) -> int:
    return sturm_count(op, -op.zero_tolerance)


def count_negative_eigenvalues(y: Signal, chi: float) -> int:
    """N_chi, the number of bound states, without computing eigenvectors."""
    return _negative_count(discretize_operator(y, chi))


def _reorthogonalize(vectors: np.ndarray, kappas: np.ndarray) -> None:
    # modified Gram-Schmidt inside runs of near-equal kappas, in place
    start = 0
    for i in range(1, kappas.size + 1):
        if i < kappas.size and kappas[i - 1] - kappas[i] <= DEGENERACY_TOL * kappas[i - 1]:
            continue
        for j in range(start + 1, i):
            for k in range(start, j):
                vectors[j] -= np.dot(vectors[k], vectors[j]) * vectors[k]
            vectors[j] /= np.linalg.norm(vectors[j])
        start = i


def negative_spectrum(op: TridiagonalOperator) -> SpectralDecomposition:
    n = _negative_count(op)
    if n == 0:
        return SpectralDecomposition.empty(op.chi, op.dt, op.size, op.t0)
    try:
        w, v = eigh_tridiagonal(
            op.diagonal,
            op.off_diagonal,
            select="i",
            select_range=(0, n - 1),
            lapack_driver="stebz",
            check_finite=False,
        )
    except LinAlgError as exc:
        raise NumericError(
            f"inverse iteration failed for {n} eigenpairs of a {op.size}x{op.size} "
            f"operator (chi={op.chi:g}): {exc}"
        ) from exc
    if w.size != n or np.any(w >= 0):
        raise NumericError(
            f"bisection returned {w.size} eigenvalues, max {w.max():.3e}; "
            f"Sturm count was {n}"
        )
    kappas = np.sqrt(-w)
    vectors = np.ascontiguousarray(v.T)
    _reorthogonalize(vectors, kappas)
    peak = np.argmax(np.abs(vectors), axis=1)
    signs = np.sign(vectors[np.arange(n), peak])
    vectors *= signs[:, None]
    vectors /= math.sqrt(op.dt)
    return SpectralDecomposition(op.chi, kappas, vectors, op.dt, op.size, op.t0)


def decompose(y: Signal, chi: float) -> SpectralDecomposition:
    """Shorthand for ``negative_spectrum(discretize_operator(y, chi))``."""
    return negative_spectrum(discretize_operator(y, chi))
