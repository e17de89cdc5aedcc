import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from conftest import kron_matrix
from tvgmks import (
    DifferenceOperator,
    DimensionError,
    ImageGradient,
    KroneckerImageOperator,
    ParameterError,
    StackedImageGradient,
    SylvesterOperator,
    blur_operator,
    build_normal_operator,
    cross_channel_matrix,
    difference_adjoint_apply,
    difference_stack_apply,
    frobenius_inner,
    gaussian_toeplitz,
    phillips_f1,
    phillips_problem,
    vec,
)


def test_sylvester_apply_matches_kronecker(rng):
    terms = [(rng.standard_normal((4, 3)), rng.standard_normal((5, 2))),
             (rng.standard_normal((4, 3)), rng.standard_normal((5, 2)))]
    op = SylvesterOperator(terms)
    assert op.in_shape == (3, 5) and op.out_shape == (4, 2)
    x = rng.standard_normal((3, 5))
    dense = kron_matrix(terms, (3, 5))
    assert np.allclose(vec(op.apply(x)), dense @ vec(x), rtol=1e-12)


def test_sylvester_identity_factors_need_shape():
    op = SylvesterOperator([(None, None)], shape=(2, 3))
    x = np.arange(6.0).reshape(2, 3)
    assert np.array_equal(op(x), x)
    with pytest.raises(DimensionError):
        SylvesterOperator([(None, None)])


def test_sylvester_inconsistent_terms(rng):
    with pytest.raises(DimensionError):
        SylvesterOperator([(np.ones((3, 3)), None), (np.ones((4, 4)), None)])
    with pytest.raises(ParameterError):
        SylvesterOperator([])
    op = SylvesterOperator([(np.ones((3, 3)), np.ones((2, 2)))])
    with pytest.raises(DimensionError):
        op.apply(np.ones((2, 3)))
    with pytest.raises(DimensionError):
        op.adjoint_apply(np.ones((2, 3)))


def test_sylvester_adjoint_and_transpose(rng):
    terms = [(rng.standard_normal((4, 3)), rng.standard_normal((5, 6))), (None, rng.standard_normal((5, 6)))]
    with pytest.raises(DimensionError):
        SylvesterOperator(terms)  # identity on the left forces square terms
    terms = [(rng.standard_normal((4, 3)), rng.standard_normal((5, 6))),
             (rng.standard_normal((4, 3)), sp.random(5, 6, density=0.5, random_state=1, format="csr"))]
    op = SylvesterOperator(terms)
    u = rng.standard_normal(op.in_shape)
    v = rng.standard_normal(op.out_shape)
    assert np.isclose(frobenius_inner(op(u), v), frobenius_inner(u, op.adjoint_apply(v)), rtol=1e-12)
    assert np.allclose(op.T.apply(v), op.adjoint_apply(v))


def test_blur_operator_is_two_sided_product(rng):
    h1, h2 = rng.standard_normal((2, 5, 5))
    x = rng.standard_normal((5, 5))
    assert np.allclose(blur_operator(h1, h2)(x), h2 @ x @ h1.T)


def test_gaussian_toeplitz_loop_oracle():
    sigma, r, d = 1.3, 2, 7
    h = gaussian_toeplitz(sigma, r, d)
    for i in range(d):
        for j in range(d):
            want = np.exp(-((i - j) ** 2) / (2 * sigma**2)) / (sigma * np.sqrt(2 * np.pi)) if abs(i - j) <= r else 0
            assert np.isclose(h[i, j], want, rtol=1e-15, atol=0)
    assert np.all(h >= 0) and np.all(np.diag(h) > 0)
    assert np.array_equal(h, h.T)


def test_gaussian_toeplitz_bad_parameters():
    for args in [(0.0, 2, 5), (1.0, 5, 5), (1.0, -1, 5), (1.0, 1, 0)]:
        with pytest.raises(ParameterError):
            gaussian_toeplitz(*args)


def test_cross_channel_matrix_rows_sum_to_one():
    c = cross_channel_matrix()
    assert c.shape == (3, 3)
    assert np.allclose(c.sum(axis=1), 1)


def test_difference_operator_rows():
    c = DifferenceOperator(4).matrix
    assert np.array_equal(c, [[-1, 1, 0, 0], [0, -1, 1, 0], [0, 0, -1, 1], [0, 0, 0, 0]])
    d = DifferenceOperator(5)
    assert np.allclose(d.apply(np.full(5, 3.2)), 0)
    assert np.allclose(d.gram, d.matrix.T @ d.matrix)
    with pytest.raises(ParameterError):
        DifferenceOperator(0)
    with pytest.raises(DimensionError):
        d.apply(np.ones(4))


def test_gradient_loop_oracle(rng):
    x = rng.standard_normal((5, 4))
    g = ImageGradient(5, 4).forward(x)
    for i in range(5):
        for j in range(4):
            assert g[0, i, j] == (x[i + 1, j] - x[i, j] if i < 4 else 0)
            assert g[1, i, j] == (x[i, j + 1] - x[i, j] if j < 3 else 0)
    cm, cn = DifferenceOperator(5).matrix, DifferenceOperator(4).matrix
    vert, horiz = difference_stack_apply(DifferenceOperator(5), DifferenceOperator(4), x)
    assert np.allclose(vert, cm @ x) and np.allclose(horiz, x @ cn.T)


def test_gradient_adjoint(rng):
    grad = ImageGradient(6, 3)
    x = rng.standard_normal((6, 3))
    y = rng.standard_normal((2, 6, 3))
    assert np.isclose(frobenius_inner(grad.forward(x), y), frobenius_inner(x, grad.adjoint(y)), rtol=1e-12)
    cm, cn = DifferenceOperator(6).matrix, DifferenceOperator(3).matrix
    assert np.allclose(difference_adjoint_apply(DifferenceOperator(6), DifferenceOperator(3), y),
                       cm.T @ y[0] + y[1] @ cn)


def test_stacked_gradient_matches_per_channel(rng):
    m, n, k = 4, 5, 3
    imgs = rng.standard_normal((m, n, k))
    stacked = StackedImageGradient(m, n, k)
    xs = imgs.reshape((m * n, k), order="F")
    g = stacked.forward(xs)
    for c in range(k):
        ref = ImageGradient(m, n).forward(imgs[:, :, c])
        assert np.allclose(stacked.image_view(g[0])[:, :, c], ref[0])
        assert np.allclose(stacked.image_view(g[1])[:, :, c], ref[1])
    y = rng.standard_normal((2, m * n, k))
    assert np.isclose(frobenius_inner(g, y), frobenius_inner(xs, stacked.adjoint(y)), rtol=1e-12)
    lap = stacked.normal_terms(1.0)[0][0]
    assert np.allclose(lap @ xs, stacked.adjoint(g))


def test_kronecker_image_operator(rng):
    left, right = rng.standard_normal((3, 4)), rng.standard_normal((2, 5))
    op = KroneckerImageOperator(left, right)
    assert op.shape == (6, 20)
    img = rng.standard_normal((4, 5))
    assert np.allclose(op.matvec(vec(img)), vec(left @ img @ right.T))
    assert np.allclose(op.toarray(), np.kron(right, left))
    cols = rng.standard_normal((20, 3))
    assert np.allclose(op.matmat(cols), op.toarray() @ cols)
    assert np.allclose(op.rmatvec(np.ones(6)), op.toarray().T @ np.ones(6))
    assert np.allclose(op.gram().toarray(), op.toarray().T @ op.toarray())


def test_normal_operator_equals_adjoint_composition(rng):
    h1, h2 = rng.standard_normal((4, 4)), rng.standard_normal((5, 5))
    beta, rho = 2.5, 0.7
    a = build_normal_operator(h1, h2, beta, rho)
    x = rng.standard_normal((5, 4))
    hop, grad = blur_operator(h1, h2), ImageGradient(5, 4)
    want = rho * hop.adjoint_apply(hop(x)) + beta * grad.adjoint(grad.forward(x))
    assert np.allclose(a(x), want, rtol=1e-12)
    assert len(build_normal_operator(h1, h2, 0.0).terms) == 1
    with pytest.raises(ParameterError):
        build_normal_operator(h1, h2, -1.0)
    with pytest.raises(ParameterError):
        build_normal_operator(h1, h2, 1.0, rho=0.0)


def test_normal_operator_stacked_channels(rng):
    m, n, k = 4, 3, 3
    within = KroneckerImageOperator(rng.standard_normal((m, m)), rng.standard_normal((n, n)))
    cross = cross_channel_matrix()
    grad = StackedImageGradient(m, n, k)
    a = build_normal_operator(cross, within, 1.5, 2.0, grad)
    x = rng.standard_normal((m * n, k))
    hop = blur_operator(cross, within)
    want = 2.0 * hop.adjoint_apply(hop(x)) + 1.5 * grad.adjoint(grad.forward(x))
    assert np.allclose(a(x), want, rtol=1e-12)


def _regtools_first_row(n):
    # closed form of the phillips Galerkin matrix from Regularization Tools
    h = 12.0 / n
    n4 = n // 4
    c = np.cos(np.arange(-1, n4 + 1) * 4 * np.pi / n)
    r1 = np.zeros(n)
    r1[:n4] = h + 9 / (h * np.pi**2) * (2 * c[1 : n4 + 1] - c[:n4] - c[2 : n4 + 2])
    r1[n4] = h / 2 + 9 / (h * np.pi**2) * (np.cos(4 * np.pi / n) - 1)
    return r1


def _regtools_solution(n):
    h = 12.0 / n
    n4 = n // 4
    c = np.pi / 3
    x = np.zeros(n)
    grid = np.arange(n4 + 1) * h
    x[2 * n4 : 3 * n4] = (h + np.diff(np.sin(grid * c)) / c) / np.sqrt(h)
    x[n4 : 2 * n4] = x[3 * n4 - 1 : 2 * n4 - 1 : -1]
    return x


@pytest.mark.parametrize("n", [16, 64, 500])
def test_phillips_matches_closed_form(n):
    h1, h2, x_true = phillips_problem(n)
    assert np.array_equal(h1, h2)
    # the closed form cancels a second difference of cosines, ~1e-13 accurate
    assert np.allclose(h1[0], _regtools_first_row(n), rtol=1e-10, atol=1e-13)
    assert np.allclose(h1, h1.T)
    x1 = _regtools_solution(n)
    assert np.allclose(x_true, np.outer(x1, x1), rtol=1e-12, atol=1e-15)


def test_phillips_data_approximates_g():
    n = 64
    h = 12.0 / n
    a, _, x_true = phillips_problem(n)

    def g1(s):
        return (6 - abs(s)) * (1 + 0.5 * np.cos(np.pi * s / 3)) + 9 / (2 * np.pi) * np.sin(np.pi * abs(s) / 3)

    edges = -6 + h * np.arange(n + 1)
    g_coef = np.array([quad(g1, edges[i], edges[i + 1])[0] for i in range(n)]) / np.sqrt(h)
    x1 = np.sqrt(np.diag(x_true))
    assert np.linalg.norm(a @ x1 - g_coef) < 1e-3 * np.linalg.norm(g_coef)


def test_phillips_f1_support():
    assert phillips_f1(0.0) == 2.0
    assert phillips_f1(3.0) == 0.0 and phillips_f1(-3.5) == 0.0
    assert np.isclose(phillips_f1(1.5), 1.0)
    with pytest.raises(ParameterError):
        phillips_problem(4)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_adjoint_identity_property(m, n, seed):
    gen = np.random.default_rng(seed)
    terms = [(gen.standard_normal((m + 1, m)), gen.standard_normal((n, n + 2))) for _ in range(2)]
    op = SylvesterOperator(terms)
    u, v = gen.standard_normal(op.in_shape), gen.standard_normal(op.out_shape)
    lhs, rhs = frobenius_inner(op(u), v), frobenius_inner(u, op.adjoint_apply(v))
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs)) * 10
