import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from tvgmks import (
    DimensionError,
    GlobalQR,
    RankDeficiencyError,
    SingularMatrixError,
    diamond_product,
    frobenius_inner,
    frobenius_norm,
    global_qr_append,
    mat,
    upper_triangular_solve,
    vec,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
shapes = st.tuples(st.integers(1, 6), st.integers(1, 6))


def test_inner_identity_is_trace():
    assert frobenius_inner(np.eye(2), np.eye(2)) == 2.0


def test_inner_matches_trace_oracle(rng):
    a, b = rng.standard_normal((2, 5, 3))
    assert np.isclose(frobenius_inner(a, b), np.trace(a.T @ b), rtol=1e-13)
    assert np.isclose(frobenius_inner(a, b), vec(a) @ vec(b), rtol=1e-13)


def test_inner_shape_mismatch():
    with pytest.raises(DimensionError):
        frobenius_inner(np.ones((2, 3)), np.ones((3, 2)))


@given(arrays(float, shapes, elements=finite))
def test_inner_self_nonnegative(a):
    val = frobenius_inner(a, a)
    assert val >= 0
    if not a.any():
        assert val == 0
    elif val == 0:
        assert np.abs(a).max() < 1e-150  # squares underflow


def test_norm_matches_vec_norm(rng):
    a = rng.standard_normal((4, 7))
    assert np.isclose(frobenius_norm(a), np.linalg.norm(vec(a)), rtol=1e-14)
    assert frobenius_norm(np.array([[3.0, 4.0]])) == 5.0


def test_vec_is_column_major():
    a = np.array([[1, 2], [3, 4]])
    assert vec(a).tolist() == [1, 3, 2, 4]


@given(arrays(float, shapes, elements=finite))
def test_vec_mat_round_trip(a):
    assert np.array_equal(mat(vec(a), *a.shape), a)


def test_mat_bad_size():
    with pytest.raises(DimensionError):
        mat(np.arange(5.0), 2, 3)
    with pytest.raises(DimensionError):
        vec(np.ones(3))


def test_diamond_product_loop_oracle(rng):
    a = rng.standard_normal((3, 4, 5))
    b = [rng.standard_normal((4, 5)) for _ in range(2)]
    expected = np.array([[np.trace(ai.T @ bj) for bj in b] for ai in a])
    assert np.allclose(diamond_product(a, b), expected, rtol=1e-13)


def test_diamond_product_shape_mismatch():
    with pytest.raises(DimensionError):
        diamond_product([np.ones((2, 2))], [np.ones((2, 3))])
    with pytest.raises(DimensionError):
        diamond_product([np.ones((2, 2)), np.ones((3, 2))], [np.ones((2, 2))])


def test_global_qr_two_orthonormal_blocks():
    e1 = np.zeros((2, 2))
    e1[0, 0] = 1
    e2 = np.zeros((2, 2))
    e2[1, 1] = 1
    qr = GlobalQR((2, 2))
    qr.append(e1)
    qr.append(e2)
    assert np.allclose(qr.r_factor, np.eye(2))


def test_global_qr_prefix_reconstruction(rng):
    blocks = rng.standard_normal((6, 5, 4))
    qr = GlobalQR((5, 4), capacity=2)
    for k, blk in enumerate(blocks, 1):
        qr, r_col, r_diag = global_qr_append(qr, blk)
        assert r_col.shape == (k - 1,)
        assert r_diag > 0
        rec = qr.reconstruct()
        assert np.linalg.norm(rec - blocks[:k]) <= 1e-10 * np.linalg.norm(blocks[:k])
        gram = diamond_product(qr.q_blocks, qr.q_blocks)
        assert np.allclose(gram, np.eye(k), atol=1e-10)
        r = qr.r_factor
        assert np.allclose(np.tril(r, -1), 0)
        assert np.all(np.diag(r) >= 0)


def test_global_qr_rejects_dependent_block(rng):
    a, b = rng.standard_normal((2, 3, 3))
    qr = GlobalQR((3, 3))
    qr.append(a)
    qr.append(b)
    with pytest.raises(RankDeficiencyError):
        qr.append(2 * a - 3 * b)
    assert len(qr) == 2
    with pytest.raises(RankDeficiencyError):
        qr.append(np.zeros((3, 3)))


def test_global_qr_shape_check():
    with pytest.raises(DimensionError):
        GlobalQR((2, 2)).append(np.ones((2, 3)))


def test_triangular_solve_examples(rng):
    assert np.allclose(upper_triangular_solve(np.array([[2.0]]), np.array([4.0])), [2.0])
    r = np.triu(rng.standard_normal((6, 6))) + 4 * np.eye(6)
    rhs = rng.standard_normal(6)
    y = upper_triangular_solve(r, rhs)
    assert np.linalg.norm(r @ y - rhs) < 1e-12


def test_triangular_solve_singular():
    with pytest.raises(SingularMatrixError):
        upper_triangular_solve(np.array([[1.0, 2.0], [0.0, 0.0]]), np.ones(2))
    with pytest.raises(DimensionError):
        upper_triangular_solve(np.ones((2, 3)), np.ones(2))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 8), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_qr_orthonormality_property(k, n, seed):
    gen = np.random.default_rng(seed)
    qr = GlobalQR((n, 3))
    for _ in range(k):
        try:
            qr.append(gen.standard_normal((n, 3)))
        except RankDeficiencyError:
            pass
    gram = diamond_product(qr.q_blocks, qr.q_blocks) if len(qr) else np.zeros((0, 0))
    assert np.allclose(gram, np.eye(len(qr)), atol=1e-10)
    assert len(qr) <= 3 * n
