"""Vectorization, exchange, and positive-definite kernel checks."""

import numpy as np
import pytest

from covstruct.linalg import (
    NotPositiveDefiniteError,
    cholesky_pd,
    exchange,
    hermitian_part,
    inverse_from_cholesky,
    invert_pd,
    kron,
    logdet_pd,
    unvec,
    vec,
)
from covstruct.scenario import complex_normal

from conftest import random_pd_matrix


def test_vec_is_column_stacking():
    a = np.arange(6.0).reshape(2, 3)
    expected = np.empty(6)
    pos = 0
    for col in range(3):
        for row in range(2):
            expected[pos] = a[row, col]
            pos += 1
    np.testing.assert_array_equal(vec(a), expected)


def test_unvec_round_trip(rng):
    a = complex_normal(rng, (4, 5))
    np.testing.assert_array_equal(unvec(vec(a), 4, 5), a)


def test_kron_vec_trace_identity(rng):
    # Tr{A V B W} style identity in vec form: (A (x) B) vec(V) = vec(B V A^T).
    for _ in range(50):
        a = complex_normal(rng, (4, 4))
        b = complex_normal(rng, (4, 4))
        v = complex_normal(rng, (4, 4))
        lhs = kron(a, b) @ vec(v)
        rhs = vec(b @ v @ a.T)
        scale = max(1.0, float(np.abs(rhs).max()))
        assert np.abs(lhs - rhs).max() / scale <= 1e-9


def test_exchange_matrix():
    j = exchange(4)
    np.testing.assert_array_equal(j, np.eye(4)[::-1])
    np.testing.assert_array_equal(j @ j, np.eye(4))
    v = np.arange(4.0)
    np.testing.assert_array_equal(j @ v, v[::-1])


def test_hermitian_part(rng):
    a = complex_normal(rng, (5, 5))
    h = hermitian_part(a)
    np.testing.assert_array_equal(h, h.conj().T)
    np.testing.assert_allclose(h, 0.5 * (a + a.conj().T))


def test_logdet_matches_eigenvalue_oracle(rng):
    for _ in range(10):
        m = random_pd_matrix(rng, 6)
        oracle = float(np.sum(np.log(np.linalg.eigvalsh(m))))
        assert abs(logdet_pd(m) - oracle) <= 1e-9 * max(1.0, abs(oracle))


def test_invert_pd_residual(rng):
    for _ in range(10):
        m = random_pd_matrix(rng, 7)
        x = invert_pd(m)
        residual = np.abs(m @ x - np.eye(7)).max()
        assert residual <= 1e-10 * max(1.0, float(np.abs(m).max()))
        np.testing.assert_array_equal(x, x.conj().T)


def test_inverse_from_cholesky_matches_invert(rng):
    m = random_pd_matrix(rng, 5)
    low = cholesky_pd(m)
    x1 = inverse_from_cholesky(low)
    x2 = invert_pd(m)
    np.testing.assert_allclose(x1, x2, rtol=0, atol=1e-12 * float(np.abs(x2).max()))


def test_cholesky_reconstruction(rng):
    m = random_pd_matrix(rng, 6)
    low = cholesky_pd(m)
    np.testing.assert_allclose(low @ low.conj().T, m, atol=1e-10 * float(np.abs(m).max()))


def test_cholesky_rejects_indefinite():
    m = np.diag([1.0, -1.0, 2.0]).astype(complex)
    with pytest.raises(NotPositiveDefiniteError):
        cholesky_pd(m)


def test_cholesky_rejects_tiny_pivot():
    # Relative pivot floor: a 1e-14 eigenvalue next to an O(1) diagonal fails.
    m = np.diag([1.0, 1e-14, 2.0]).astype(complex)
    with pytest.raises(NotPositiveDefiniteError):
        cholesky_pd(m)


def test_logdet_rejects_non_pd():
    with pytest.raises(NotPositiveDefiniteError):
        logdet_pd(np.diag([1.0, 0.0]).astype(complex))
