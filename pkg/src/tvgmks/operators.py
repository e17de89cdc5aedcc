"""Structured linear operators for separable deblurring.

The blur model is ``H(X) = H2 @ X @ H1.T`` acting on an image ``X`` of shape
``(m, n)`` (or on a stack of vectorized channels of shape ``(m*n, k)``).
Everything that the solvers need is expressed as a :class:`SylvesterOperator`,
a sum of two-sided matrix products.
"""

import numpy as np
import scipy.sparse as sp
from scipy.linalg import toeplitz
from scipy.sparse.linalg import LinearOperator

from .exceptions import DimensionError, ParameterError

__all__ = [
    "SylvesterOperator",
    "KroneckerImageOperator",
    "blur_operator",
    "gaussian_toeplitz",
    "cross_channel_matrix",
    "DifferenceOperator",
    "difference_stack_apply",
    "difference_adjoint_apply",
    "ImageGradient",
    "StackedImageGradient",
    "build_normal_operator",
    "phillips_f1",
    "phillips_problem",
]


def _left_mul(a, x):
    return x if a is None else a @ x


def _right_mul(x, b):
    if b is None:
        return x
    if isinstance(b, np.ndarray):
        return x @ b
    return (b.T @ x.T).T


def _transpose(a):
    return None if a is None else a.T


class SylvesterOperator:
    r"""Linear map ``X -> sum_i L_i @ X @ R_i``.

    Parameters
    ----------
    terms : sequence of (left, right)
        Coefficient pairs. Each factor is a dense array, a scipy sparse
        matrix, a :class:`scipy.sparse.linalg.LinearOperator`, or ``None``
        for the identity.
    shape : tuple of int, optional
        Input shape ``(m, n)``; only needed when it cannot be inferred from
        the terms (e.g. all factors are ``None``).
    """

    def __init__(self, terms, shape=None):
        terms = [tuple(t) for t in terms]
        if not terms:
            raise ParameterError("a Sylvester operator needs at least one term")
        lefts = [l for l, _ in terms]
        rights = [r for _, r in terms]
        m, p = _infer_dim([(f.shape[1], f.shape[0]) for f in lefts if f is not None],
                          None if shape is None else shape[0], any(f is None for f in lefts))
        n, q = _infer_dim([(f.shape[0], f.shape[1]) for f in rights if f is not None],
                          None if shape is None else shape[1], any(f is None for f in rights))
        self.terms = terms
        self.in_shape = (m, n)
        self.out_shape = (p, q)

    def apply(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != self.in_shape:
            raise DimensionError(f"input shape {x.shape} != {self.in_shape}")
        out = np.zeros(self.out_shape)
        for left, right in self.terms:
            out += _right_mul(_left_mul(left, x), right)
        return out

    __call__ = apply

    def adjoint_apply(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != self.out_shape:
            raise DimensionError(f"input shape {x.shape} != {self.out_shape}")
        out = np.zeros(self.in_shape)
        for left, right in self.terms:
            out += _right_mul(_left_mul(_transpose(left), x), _transpose(right))
        return out

    @property
    def T(self):
        return SylvesterOperator(
            [(_transpose(l), _transpose(r)) for l, r in self.terms], shape=self.out_shape
        )

    def __repr__(self):
        return f"SylvesterOperator({len(self.terms)} terms, {self.in_shape} -> {self.out_shape})"


def _infer_dim(pairs, given, has_identity):
    # pairs: (input, output) lengths along one axis for each explicit factor
    ins = {int(a) for a, _ in pairs}
    outs = {int(b) for _, b in pairs}
    if given is not None:
        ins.add(int(given))
    if has_identity:
        ins |= outs
        outs = ins
    if not ins:
        raise DimensionError("cannot infer operator shapes; pass shape=")
    if not outs:
        outs = ins
    if len(ins) > 1 or len(outs) > 1:
        raise DimensionError(f"terms disagree on shapes: inputs {sorted(ins)}, outputs {sorted(outs)}")
    return next(iter(ins)), next(iter(outs))


class KroneckerImageOperator(LinearOperator):
    """The ``(m*n) x (m*n)`` matrix ``kron(right, left)`` applied matrix-free.

    Acting on a column ``vec(img)`` it returns ``vec(left @ img @ right.T)``,
    which is how a separable within-channel blur acts on each column of a
    stacked multichannel image of shape ``(m*n, k)``.
    """

    def __init__(self, left, right):
        self.left = np.asarray(left, dtype=float)
        self.right = np.asarray(right, dtype=float)
        m0, m1 = self.left.shape
        n0, n1 = self.right.shape
        self._in = (m1, n1)
        self._out = (m0, n0)
        super().__init__(dtype=np.float64, shape=(m0 * n0, m1 * n1))

    def _matmat(self, x):
        k = x.shape[1]
        imgs = np.asarray(x).reshape(self._in + (k,), order="F")
        out = np.einsum("ij,jlc,kl->ikc", self.left, imgs, self.right, optimize=True)
        return out.reshape(-1, k, order="F")

    def _matvec(self, x):
        return self._matmat(np.reshape(x, (-1, 1))).ravel()

    def _adjoint(self):
        return KroneckerImageOperator(self.left.T, self.right.T)

    _transpose = _adjoint

    def gram(self):
        """``self.T @ self`` as another :class:`KroneckerImageOperator`."""
        return KroneckerImageOperator(self.left.T @ self.left, self.right.T @ self.right)

    def toarray(self):
        return np.kron(self.right, self.left)


def _gram(a):
    if isinstance(a, KroneckerImageOperator):
        return a.gram()
    if isinstance(a, np.ndarray):
        return a.T @ a
    if sp.issparse(a):
        return (a.T @ a).tocsr()
    return a.T @ a


def blur_operator(h1, h2):
    """The separable blur ``X -> h2 @ X @ h1.T``."""
    return SylvesterOperator([(h2, _transpose(h1))])


def gaussian_toeplitz(sigma, r, d):
    """Banded symmetric Toeplitz matrix of a sampled Gaussian PSF.

    ``h[i, j] = exp(-(i-j)**2 / (2 sigma**2)) / (sigma sqrt(2 pi))`` for
    ``|i - j| <= r`` and zero otherwise.
    """
    if not sigma > 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    if int(d) != d or d < 1:
        raise ParameterError(f"dimension must be a positive integer, got {d}")
    if int(r) != r or not 0 <= r < d:
        raise ParameterError(f"bandwidth must satisfy 0 <= r < d, got r={r}, d={d}")
    k = np.arange(int(d), dtype=float)
    col = np.exp(-(k**2) / (2.0 * sigma**2)) / (sigma * np.sqrt(2.0 * np.pi))
    col[int(r) + 1 :] = 0.0
    return toeplitz(col)


def cross_channel_matrix():
    """Fixed 3x3 RGB channel-mixing matrix (rows sum to one)."""
    return np.array(
        [
            [0.70, 0.20, 0.10],
            [0.25, 0.50, 0.25],
            [0.15, 0.10, 0.75],
        ]
    )


def _fdiff(x, axis):
    out = np.zeros_like(x)
    n = x.shape[axis]
    lo = [slice(None)] * x.ndim
    hi = [slice(None)] * x.ndim
    lo[axis] = slice(0, n - 1)
    hi[axis] = slice(1, n)
    out[tuple(lo)] = x[tuple(hi)] - x[tuple(lo)]
    return out


def _fdiff_adjoint(y, axis):
    # transpose of _fdiff: last slot of y is ignored (zero row of C_sq)
    out = np.zeros_like(y)
    n = y.shape[axis]
    if n == 1:
        return out

    def sl(a, b):
        s = [slice(None)] * y.ndim
        s[axis] = slice(a, b)
        return tuple(s)

    out[sl(1, n)] += y[sl(0, n - 1)]
    out[sl(0, n - 1)] -= y[sl(0, n - 1)]
    return out


class DifferenceOperator:
    """Square forward-difference operator of size ``dim``.

    Rows ``0 .. dim-2`` compute ``x[i+1] - x[i]``; the last row is zero.
    """

    def __init__(self, dim):
        if int(dim) != dim or dim < 1:
            raise ParameterError(f"dim must be a positive integer, got {dim}")
        self.dim = int(dim)

    @property
    def matrix(self):
        c = np.zeros((self.dim, self.dim))
        i = np.arange(self.dim - 1)
        c[i, i] = -1.0
        c[i, i + 1] = 1.0
        return c

    @property
    def gram(self):
        c = self.matrix
        return c.T @ c

    def apply(self, x, axis=0):
        x = np.asarray(x, dtype=float)
        if x.shape[axis] != self.dim:
            raise DimensionError(f"axis {axis} has length {x.shape[axis]}, expected {self.dim}")
        return _fdiff(x, axis)

    def adjoint(self, y, axis=0):
        y = np.asarray(y, dtype=float)
        if y.shape[axis] != self.dim:
            raise DimensionError(f"axis {axis} has length {y.shape[axis]}, expected {self.dim}")
        return _fdiff_adjoint(y, axis)


def difference_stack_apply(d_m, d_n, x):
    """Vertical and horizontal differences ``(C_m @ x, x @ C_n.T)``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (d_m.dim, d_n.dim):
        raise DimensionError(f"image shape {x.shape} != ({d_m.dim}, {d_n.dim})")
    return d_m.apply(x, axis=0), d_n.apply(x, axis=1)


def difference_adjoint_apply(d_m, d_n, y):
    """``C_m.T @ y[0] + y[1] @ C_n``; adjoint of :func:`difference_stack_apply`."""
    vert, horiz = y
    shape = (d_m.dim, d_n.dim)
    if np.shape(vert) != shape or np.shape(horiz) != shape:
        raise DimensionError(f"gradient components must both have shape {shape}")
    return d_m.adjoint(vert, axis=0) + d_n.adjoint(horiz, axis=1)


class ImageGradient:
    """Discrete gradient ``D`` of an ``(m, n)`` image.

    :meth:`forward` returns an array of shape ``(2, m, n)`` holding the
    vertical and horizontal differences.
    """

    def __init__(self, m, n):
        self.d_m = DifferenceOperator(m)
        self.d_n = DifferenceOperator(n)
        self.shape = (int(m), int(n))

    def forward(self, x):
        return np.stack(difference_stack_apply(self.d_m, self.d_n, x))

    def adjoint(self, y):
        return difference_adjoint_apply(self.d_m, self.d_n, y)

    def normal_terms(self, beta):
        """Sylvester terms of ``beta * D.T @ D``."""
        return [(beta * self.d_m.gram, None), (None, beta * self.d_n.gram)]

    def image_view(self, x):
        return np.asarray(x)[..., None]


class StackedImageGradient:
    """Per-channel gradient of ``k`` images of shape ``(m, n)`` stored as
    the columns (column-major vectorized) of an ``(m*n, k)`` matrix.
    """

    def __init__(self, m, n, k):
        self.m, self.n, self.k = int(m), int(n), int(k)
        self.d_m = DifferenceOperator(m)
        self.d_n = DifferenceOperator(n)
        self.shape = (self.m * self.n, self.k)

    def image_view(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != self.shape:
            raise DimensionError(f"stacked shape {x.shape} != {self.shape}")
        return x.reshape((self.m, self.n, self.k), order="F")

    def _flat(self, imgs):
        return imgs.reshape(self.shape, order="F")

    def forward(self, x):
        imgs = self.image_view(x)
        return np.stack([self._flat(_fdiff(imgs, 0)), self._flat(_fdiff(imgs, 1))])

    def adjoint(self, y):
        vert = self.image_view(y[0])
        horiz = self.image_view(y[1])
        return self._flat(_fdiff_adjoint(vert, 0) + _fdiff_adjoint(horiz, 1))

    def normal_terms(self, beta):
        lap = sp.kron(sp.identity(self.n), sp.csr_matrix(self.d_m.gram)) + sp.kron(
            sp.csr_matrix(self.d_n.gram), sp.identity(self.m)
        )
        return [((beta * lap).tocsr(), None)]


def build_normal_operator(h1, h2, beta, rho=1.0, gradient=None):
    """Normal-equation operator of the X-subproblem.

    ``X -> rho * H2.T H2 X H1.T H1 + beta * D.T D X``

    Parameters
    ----------
    h1, h2 : array_like or LinearOperator
        Blur factors of ``H(X) = h2 @ X @ h1.T``.
    beta : float
        Penalty weight of the gradient constraint (``>= 0``; zero is only
        meaningful in tests).
    rho : float, optional
        Penalty weight of the data constraint (1 for TV/L2).
    gradient : ImageGradient or StackedImageGradient, optional
        Defaults to :class:`ImageGradient` over the image shape.
    """
    if beta < 0:
        raise ParameterError(f"beta must be non-negative, got {beta}")
    if not rho > 0:
        raise ParameterError(f"rho must be positive, got {rho}")
    shape = (h2.shape[1], h1.shape[1])
    if gradient is None:
        gradient = ImageGradient(*shape)
    if tuple(gradient.shape) != shape:
        raise DimensionError(f"gradient shape {gradient.shape} != image shape {shape}")
    left = _gram(h2)
    if isinstance(left, KroneckerImageOperator):
        left = KroneckerImageOperator(rho * left.left, left.right)
    else:
        left = rho * left
    terms = [(left, _gram(h1))]
    if beta > 0:
        terms.extend(gradient.normal_terms(beta))
    return SylvesterOperator(terms, shape=shape)


_PHILLIPS_SUPPORT = 3.0


def phillips_f1(s):
    """``1 + cos(pi s / 3)`` on ``|s| < 3``, zero elsewhere."""
    s = np.asarray(s, dtype=float)
    return np.where(np.abs(s) < _PHILLIPS_SUPPORT, 1.0 + np.cos(np.pi * s / 3.0), 0.0)


def _gauss_segments(breaks, npts):
    x, w = np.polynomial.legendre.leggauss(npts)
    nodes, weights = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        if b > a:
            nodes.append(0.5 * (b - a) * x + 0.5 * (a + b))
            weights.append(0.5 * (b - a) * w)
    return np.concatenate(nodes), np.concatenate(weights)


def phillips_problem(n, quad_points=64):
    """Galerkin discretization of the separable 2-D Phillips test problem.

    Uses orthonormal box functions on ``n`` equal cells of ``[-6, 6]``.

    Parameters
    ----------
    n : int
        Number of cells per dimension (``>= 8``).
    quad_points : int, optional
        Gauss-Legendre points per smooth piece of each cell integral.

    Returns
    -------
    h1, h2 : ndarray, shape (n, n)
        The (identical, symmetric Toeplitz) 1-D Galerkin matrix.
    x_true : ndarray, shape (n, n)
        ``x1 x1^T`` where ``x1`` holds the box-function coefficients of the
        1-D solution.
    """
    if int(n) != n or n < 8:
        raise ParameterError(f"n must be an integer >= 8, got {n}")
    n = int(n)
    h = 12.0 / n
    row = np.empty(n)
    for j in range(n):
        # (1/h) int_{-h}^{h} (h - |w|) f1(w - j h) dw, split where the integrand kinks
        shift = j * h
        kinks = [shift + _PHILLIPS_SUPPORT, shift - _PHILLIPS_SUPPORT]
        breaks = sorted({-h, 0.0, h, *[k for k in kinks if -h < k < h]})
        w, wt = _gauss_segments(np.array(breaks), quad_points)
        row[j] = np.sum(wt * (h - np.abs(w)) * phillips_f1(w - shift)) / h
    a = toeplitz(row)

    edges = -6.0 + h * np.arange(n + 1)
    x1 = np.empty(n)
    for i in range(n):
        breaks = sorted({edges[i], edges[i + 1], *[k for k in (-3.0, 3.0) if edges[i] < k < edges[i + 1]]})
        s, wt = _gauss_segments(np.array(breaks), quad_points)
        x1[i] = np.sum(wt * phillips_f1(s)) / np.sqrt(h)
    return a, a.copy(), np.outer(x1, x1)
