"""Generalized matrix Krylov subspace (GMKS) solver for sequences of
generalized Sylvester equations ``A(X) = E_k`` sharing one operator.

The first equation is handled by a few steps of the modified global Arnoldi
process. Every later equation appends the normalized residual of the previous
iterate to the basis and solves a projected least-squares problem through an
updated global QR factorization of the images ``A(V_i)``.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateInputError, RankDeficiencyError
from .linalg import RANK_TOL, GlobalQR, frobenius_norm, upper_triangular_solve

__all__ = [
    "GmksSolution",
    "BlockBasis",
    "global_arnoldi",
    "arnoldi_solve",
    "expand_and_solve",
    "EXPANSION_TOL",
]

#: Residuals below this fraction of ``||E_k||_F`` do not expand the basis.
EXPANSION_TOL = 1e-12


@dataclass
class GmksSolution:
    x: np.ndarray
    coefficients: np.ndarray
    residual_norm: float


class BlockBasis:
    """F-orthonormal block basis ``V_1, ..., V_k`` with cached ``A(V_i)``.

    Parameters
    ----------
    operator : SylvesterOperator
        The (square) operator ``A``.
    max_dim : int, optional
        Dimension cap; :func:`expand_and_solve` restarts the basis when it
        is reached.
    """

    def __init__(self, operator, max_dim=400):
        self.operator = operator
        self.shape = tuple(operator.in_shape)
        self.max_dim = int(max_dim)
        self._v = GlobalQR(self.shape)
        self.qr = GlobalQR(self.shape)
        self._av = np.empty((16, int(np.prod(self.shape))))
        self.restarts = 0

    def __len__(self):
        return len(self._v)

    @property
    def blocks(self):
        return self._v.q_blocks

    @property
    def applied_blocks(self):
        k = len(self)
        return self._av[:k].reshape((k,) + self.shape)

    def reset(self):
        self._v = GlobalQR(self.shape)
        self.qr = GlobalQR(self.shape)
        self.restarts += 1

    def append(self, block, applied=None):
        """Orthonormalize ``block`` against the basis and add it.

        Parameters
        ----------
        block : ndarray
        applied : ndarray, optional
            ``A(block)`` if already known; only valid when ``block`` is
            already F-orthonormal to the basis with unit norm.

        Returns
        -------
        bool
            ``False`` if the block (or its image under ``A``) is numerically
            dependent on the current basis; nothing is changed then.
        """
        norm = frobenius_norm(block)
        if norm == 0.0:
            return False
        if applied is None:
            _, v = self._v.orthogonalize(block)
            vnorm = float(np.linalg.norm(v))
            if vnorm < RANK_TOL * norm:
                return False
            v /= vnorm
            av = np.ravel(self.operator.apply(v.reshape(self.shape)))
        else:
            v = np.ravel(block) / norm
            av = np.ravel(applied) / norm
        try:
            self.qr.append(av.reshape(self.shape))
        except RankDeficiencyError:
            return False
        k = len(self)
        if k == self._av.shape[0]:
            grown = np.empty((2 * k, self._av.shape[1]))
            grown[:k] = self._av[:k]
            self._av = grown
        self._av[k] = av
        self._v._push(v, np.zeros(k), 1.0)
        return True

    def combine(self, coefficients):
        """``sum_i c_i V_i``."""
        k = len(self)
        return (coefficients @ self._v._q[:k]).reshape(self.shape)

    def solve(self, rhs):
        """Least-squares solution of ``A(X) = rhs`` over the span of the basis."""
        rhs = np.asarray(rhs, dtype=float)
        k = len(self)
        if k == 0:
            return GmksSolution(np.zeros(self.shape), np.zeros(0), frobenius_norm(rhs))
        c = self.qr.project(rhs)
        y = upper_triangular_solve(self.qr.r_factor, c, tol=0.0)
        x = self.combine(y)
        fitted = (y @ self._av[:k]).reshape(self.shape)
        return GmksSolution(x, y, frobenius_norm(fitted - rhs))


def global_arnoldi(a, p0, steps=1, max_dim=400, breakdown_tol=RANK_TOL):
    """Modified global Arnoldi process on the matrix Krylov space ``K(A, p0)``.

    Parameters
    ----------
    a : SylvesterOperator
    p0 : ndarray
        Starting block; in the solvers this is the residual ``E - A(X0)``.
    steps : int
        Number of Arnoldi steps ``m``.

    Returns
    -------
    basis : BlockBasis
        ``V_1, ..., V_{m+1}`` (fewer after a breakdown) with their images.
    hess : ndarray, shape (m+1, m)
        Upper Hessenberg matrix with ``A(V_j) = sum_i hess[i, j] V_i``.
        Truncated to ``(j+1, j)`` if a breakdown occurs at step ``j``.
    p0_norm : float
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    p0 = np.asarray(p0, dtype=float)
    p0_norm = frobenius_norm(p0)
    if p0_norm == 0.0:
        raise DegenerateInputError("Arnoldi start block is zero")
    vs = [p0 / p0_norm]
    avs = []
    hess = np.zeros((steps + 1, steps))
    for j in range(steps):
        av = a.apply(vs[j])
        avs.append(av)
        w = av.copy()
        for _ in range(2):
            for i in range(j + 1):
                h = float(np.vdot(vs[i], w))
                hess[i, j] += h
                w -= h * vs[i]
        hess[j + 1, j] = frobenius_norm(w)
        if hess[j + 1, j] <= breakdown_tol * frobenius_norm(av):
            hess[j + 1, j] = 0.0
            hess = hess[: j + 2, : j + 1]
            break
        vs.append(w / hess[j + 1, j])

    basis = BlockBasis(a, max_dim=max_dim)
    for j, v in enumerate(vs):
        applied = avs[j] if j < len(avs) else None
        basis.append(v, applied=applied)
    return basis, hess, p0_norm


def arnoldi_solve(basis, hess, p0_norm, x0):
    """Arnoldi correction ``x0 + sum_i y_i V_i``.

    ``y`` minimizes ``||hess @ y - p0_norm * e_1||``, so that for
    ``p0 = E - A(x0)`` the result minimizes ``||A(X) - E||_F`` over
    ``x0 + K_m(A, p0)``.
    """
    m = hess.shape[1]
    rhs = np.zeros(hess.shape[0])
    rhs[0] = p0_norm
    y, *_ = np.linalg.lstsq(hess, rhs, rcond=None)
    residual = float(np.linalg.norm(hess @ y - rhs))
    x = np.asarray(x0, dtype=float) + basis.combine(np.concatenate([y, np.zeros(len(basis) - m)]))
    return GmksSolution(x, y, residual)


def expand_and_solve(basis, a, e_k, x_prev, expansion_tol=EXPANSION_TOL):
    """One GMKS step for the equation ``A(X) = e_k``.

    Appends the normalized residual ``A(x_prev) - e_k`` to ``basis`` (unless
    it is negligible or dependent) and returns the minimizer of
    ``||A(X) - e_k||_F`` over the span of the basis. When the basis is at its
    dimension cap it is restarted from ``span{x_prev, residual}``.
    """
    e_k = np.asarray(e_k, dtype=float)
    x_prev = np.asarray(x_prev, dtype=float)
    p = a.apply(x_prev) - e_k
    if frobenius_norm(p) > expansion_tol * frobenius_norm(e_k):
        if len(basis) >= basis.max_dim:
            basis.reset()
            basis.append(x_prev)
        basis.append(p)
    if len(basis) == 0:
        return GmksSolution(x_prev.copy(), np.zeros(0), frobenius_norm(p))
    return basis.solve(e_k)
