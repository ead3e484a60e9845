import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nhsense.core import cmatrix as cm
from nhsense.core.errors import NotHermitian, NotPSD, ShapeMismatch, SingularMatrix

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=1, max_value=6)


def _random(seed: int, m: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))


def _random_hermitian(seed: int, m: int) -> np.ndarray:
    a = _random(seed, m)
    return (a + a.conj().T) / 2


@settings(max_examples=60, deadline=None)
@given(seed=seeds, m=dims)
def test_adjugate_identity(seed, m):
    a = _random(seed, m)
    adj = cm.adjugate(a)
    expected = cm.determinant(a) * np.eye(m)
    np.testing.assert_allclose(a @ adj, expected, atol=1e-9 * max(1.0, cm.frobenius(a)) ** m)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, m=st.integers(min_value=2, max_value=5))
def test_adjugate_of_singular_matrix(seed, m):
    a = _random(seed, m)
    a[:, -1] = a[:, 0]
    adj = cm.adjugate(a)
    assert np.all(np.isfinite(adj))
    np.testing.assert_allclose(a @ adj, np.zeros((m, m)), atol=1e-8 * max(1.0, cm.frobenius(a)) ** m)


@settings(max_examples=60, deadline=None)
@given(seed=seeds, m=dims)
def test_herm_eig_reconstructs(seed, m):
    a = _random_hermitian(seed, m)
    u, values = cm.herm_eig(a)
    assert np.all(np.diff(values) >= 0)
    np.testing.assert_allclose((u * values) @ u.conj().T, a, atol=1e-12 * max(1.0, cm.frobenius(a)))
    # Largest component of each eigenvector is real and positive.
    for k in range(m):
        pivot = u[np.argmax(np.abs(u[:, k])), k]
        assert pivot.real > 0
        assert abs(pivot.imag) < 1e-12


@settings(max_examples=60, deadline=None)
@given(seed=seeds, m=dims)
def test_psd_split_parts(seed, m):
    a = _random_hermitian(seed, m)
    plus, minus = cm.psd_split(a)
    np.testing.assert_allclose(plus - minus, a, atol=1e-12 * max(1.0, cm.frobenius(a)))
    assert cm.is_psd(plus)
    assert cm.is_psd(minus)


@settings(max_examples=60, deadline=None)
@given(seed=seeds, m=dims, rank=st.integers(min_value=0, max_value=6))
def test_psd_factor_reconstructs(seed, m, rank):
    rng = np.random.default_rng(seed)
    r = min(rank, m)
    y = rng.standard_normal((m, r)) + 1j * rng.standard_normal((m, r))
    g = y @ y.conj().T
    factor = cm.psd_factor(g)
    assert factor.shape[0] == m
    assert factor.shape[1] <= r
    np.testing.assert_allclose(cm.gram(factor), g, atol=1e-9 * max(1.0, cm.frobenius(g)))


def test_psd_factor_of_zero_is_empty():
    factor = cm.psd_factor(np.zeros((3, 3), dtype=complex))
    assert factor.shape == (3, 0)
    np.testing.assert_array_equal(cm.gram(factor), np.zeros((3, 3)))


def test_psd_factor_rejects_negative():
    with pytest.raises(NotPSD):
        cm.psd_factor(np.diag([1.0, -0.5]).astype(complex))


def test_inverse_of_singular_matrix_raises():
    with pytest.raises(SingularMatrix):
        cm.inverse(np.array([[1.0, 2.0], [2.0, 4.0]], dtype=complex))


@settings(max_examples=40, deadline=None)
@given(seed=seeds, m=dims)
def test_inverse(seed, m):
    a = _random(seed, m) + 3 * m * np.eye(m)
    np.testing.assert_allclose(a @ cm.inverse(a), np.eye(m), atol=1e-10)


def test_require_hermitian():
    with pytest.raises(NotHermitian):
        cm.require_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex))
    cm.require_hermitian(np.array([[1.0, 1j], [-1j, 2.0]]))


def test_as_cmat_shapes():
    assert cm.as_cmat(2.5).shape == (1, 1)
    assert cm.as_cmat([[1, 2], [3, 4]]).dtype == np.complex128
    with pytest.raises(ShapeMismatch):
        cm.as_cmat(np.zeros((2, 2, 2)))
    with pytest.raises(ShapeMismatch):
        cm.require_square(np.zeros((2, 3), dtype=complex))


def test_basis_matrix():
    e = cm.basis_matrix(3, 1, 2)
    assert e[1, 2] == 1
    assert np.count_nonzero(e) == 1
