import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from milac.numerics import (
    ShapeError,
    SingularMatrixError,
    as_matrix,
    inverse,
    mat_mul,
    relative_residual,
    solve_linear,
)

from conftest import crandn


def triple_loop(a, b):
    out = np.zeros((a.shape[0], b.shape[1]), dtype=complex)
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            s = 0j
            for k in range(a.shape[1]):
                s += a[i, k] * b[k, j]
            out[i, j] = s
    return out


def test_as_matrix_promotes_vectors_to_columns():
    assert as_matrix([1, 2, 3]).shape == (3, 1)
    assert as_matrix(2.0).shape == (1, 1)
    assert as_matrix(np.ones((2, 3))).dtype == np.complex128


def test_as_matrix_rejects_nonfinite_and_3d():
    with pytest.raises(ValueError):
        as_matrix([1, np.nan])
    with pytest.raises(ShapeError):
        as_matrix(np.zeros((2, 2, 2)))


def test_mat_mul_identity(rng):
    a = crandn(rng, 2, 2)
    assert np.array_equal(mat_mul(np.eye(2), a), a)


def test_mat_mul_small_example():
    out = mat_mul([[1, 1j], [0, 1]], [[1], [1]])
    assert np.array_equal(out, [[1 + 1j], [1]])


def test_mat_mul_matches_triple_loop(rng):
    a, b = crandn(rng, 8, 8), crandn(rng, 8, 8)
    ref = triple_loop(a, b)
    assert np.linalg.norm(mat_mul(a, b) - ref) <= 1e-12 * np.linalg.norm(ref)


def test_mat_mul_shape_mismatch():
    with pytest.raises(ShapeError):
        mat_mul(np.ones((2, 3)), np.ones((2, 3)))


def test_mat_mul_associative(rng):
    for _ in range(20):
        a, b, c = crandn(rng, 5, 7), crandn(rng, 7, 3), crandn(rng, 3, 6)
        left, right = mat_mul(mat_mul(a, b), c), mat_mul(a, mat_mul(b, c))
        assert np.linalg.norm(left - right) <= 1e-11 * np.linalg.norm(left)


def test_solve_identity_and_diagonal(rng):
    b = crandn(rng, 3, 2)
    assert np.allclose(solve_linear(np.eye(3), b), b, rtol=0, atol=0)
    x = solve_linear([[2, 0], [0, 4]], [[2], [8]])
    assert np.allclose(x, [[1], [2]], rtol=0, atol=1e-15)


def test_solve_residual_16(rng):
    a = crandn(rng, 16, 16) + 4 * np.eye(16)
    b = crandn(rng, 16, 3)
    x = solve_linear(a, b)
    assert np.linalg.norm(mat_mul(a, x) - b) <= 1e-10 * np.linalg.norm(b)


def test_solve_residual_many_sizes():
    for seed in range(1000):
        r = np.random.default_rng(seed)
        n = int(r.integers(1, 65))
        a, b = crandn(r, n, n), crandn(r, n, 2)
        x = solve_linear(a, b)
        assert relative_residual(a, x, b) <= 1e-10


def test_solve_1d_rhs_returns_column():
    assert solve_linear(np.eye(2), [1, 2]).shape == (2, 1)


def test_singular_reports_pivot_index():
    a = np.array([[1, 2, 0], [2, 4, 0], [0, 0, 1]], dtype=complex)
    with pytest.raises(SingularMatrixError) as info:
        solve_linear(a, np.ones(3), label="A")
    assert info.value.index == 1
    assert info.value.label == "A"
    assert "A is singular" in str(info.value)


def test_zero_matrix_is_singular_at_first_pivot():
    with pytest.raises(SingularMatrixError) as info:
        inverse(np.zeros((3, 3)))
    assert info.value.index == 0


def test_solve_shape_errors():
    with pytest.raises(ShapeError):
        solve_linear(np.ones((2, 3)), np.ones(2))
    with pytest.raises(ShapeError):
        solve_linear(np.eye(2), np.ones(3))


def test_inverse_examples(rng):
    assert np.array_equal(inverse(np.eye(3)), np.eye(3))
    swap = np.array([[0, 1], [1, 0]])
    assert np.allclose(inverse(swap), swap, rtol=0, atol=0)
    g = crandn(rng, 8, 8)
    spd = g @ g.conj().T + np.eye(8)
    assert np.linalg.norm(spd @ inverse(spd) - np.eye(8)) <= 1e-9


def test_inverse_is_deterministic(rng):
    a = crandn(rng, 12, 12)
    assert np.array_equal(inverse(a), inverse(a.copy()))


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 24), seed=st.integers(0, 2**32 - 1))
def test_double_inverse(n, seed):
    r = np.random.default_rng(seed)
    a = crandn(r, n, n)
    if np.linalg.cond(a) > 1e6:
        return
    back = inverse(inverse(a))
    assert np.linalg.norm(back - a) <= 1e-8 * np.linalg.norm(a)
