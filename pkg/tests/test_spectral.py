import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import jacobi_eigenvalues, sech2
from sbsa import (
    DomainError,
    InvalidInputError,
    Signal,
    count_negative_eigenvalues,
    decompose,
    discretize_operator,
    negative_spectrum,
)
from sbsa.spectral import SpectralDecomposition, sturm_count


def pt_signal(dt=0.01, half=15.0):
    t = np.arange(-round(half / dt), round(half / dt) + 1) * dt
    return Signal(sech2(t), dt, t[0])


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_poschl_teller_kappas(n):
    d = decompose(pt_signal(), n * (n + 1))
    assert d.n == n
    np.testing.assert_allclose(d.kappas, np.arange(n, 0, -1), rtol=1e-3)


def test_eigenfunctions_orthonormal():
    d = decompose(pt_signal(), 20)
    gram = d.eigenfunctions @ d.eigenfunctions.T * d.dt
    np.testing.assert_allclose(gram, np.eye(d.n), atol=1e-10)


def test_eigenfunctions_satisfy_operator():
    y = pt_signal(dt=0.05)
    op = discretize_operator(y, 12)
    d = negative_spectrum(op)
    h = op.to_dense()
    for lam, psi in zip(d.eigenvalues, d.eigenfunctions):
        np.testing.assert_allclose(h @ psi, lam * psi, atol=1e-8 * np.abs(psi).max() / y.dt**2)


def test_sign_convention_peak_positive():
    d = decompose(pt_signal(), 20)
    for psi in d.eigenfunctions:
        assert psi[np.argmax(np.abs(psi))] > 0


def test_grid_refinement_second_order():
    # kappa error for sech^2 at chi=6 should drop ~4x when dt halves
    errs = [abs(decompose(pt_signal(dt), 6).kappas[0] - 2.0) for dt in (0.04, 0.02, 0.01)]
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.all((ratios > 3.5) & (ratios < 4.5)), ratios


def test_zero_signal_has_no_bound_states():
    d = decompose(Signal(np.zeros(50), 0.1), 3.0)
    assert d.n == 0 and d.eigenfunctions.shape == (0, 50)


@pytest.mark.parametrize("chi", [0.0, -1.0, np.inf, np.nan])
def test_bad_chi(chi):
    with pytest.raises(DomainError):
        decompose(pt_signal(), chi)


def test_decomposition_rejects_unsorted_kappas():
    with pytest.raises(InvalidInputError):
        SpectralDecomposition(1.0, [1.0, 2.0], np.zeros((2, 4)), 0.1, 4)


def test_sturm_count_matches_dense():
    rng = np.random.default_rng(3)
    y = Signal(rng.uniform(0, 1, 80), 0.2)
    op = discretize_operator(y, 7.0)
    w = np.linalg.eigvalsh(op.to_dense())
    for sigma in (-5.0, -1.0, -0.1, 0.0, 3.0):
        assert sturm_count(op, sigma) == np.sum(w < sigma)


def test_dense_oracle_small():
    rng = np.random.default_rng(11)
    y = Signal(rng.uniform(0, 2, 60), 0.15)
    op = discretize_operator(y, 5.0)
    ref = jacobi_eigenvalues(op.to_dense())
    d = negative_spectrum(op)
    np.testing.assert_allclose(d.eigenvalues, ref[ref < 0], atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    chis=st.lists(st.floats(1e-2, 1e3), min_size=2, max_size=8),
)
def test_count_nondecreasing_in_chi(seed, chis):
    y = Signal(np.random.default_rng(seed).uniform(0, 1, 120), 0.05)
    counts = [count_negative_eigenvalues(y, c) for c in sorted(chis)]
    assert counts == sorted(counts)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), chi=st.floats(0.5, 200))
def test_spectrum_length_matches_count(seed, chi):
    y = Signal(np.random.default_rng(seed).uniform(0, 1, 100), 0.05)
    d = decompose(y, chi)
    assert d.n == count_negative_eigenvalues(y, chi)
    assert np.all(np.diff(d.kappas) <= 0)
    np.testing.assert_allclose(np.sum(d.eigenfunctions**2, axis=1) * y.dt, 1.0, rtol=1e-10)
