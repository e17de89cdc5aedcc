"""Dense matrix kernel: Frobenius geometry, vec/mat, the diamond product and
an incrementally updatable global QR factorization.

Matrices are plain 2-D :class:`numpy.ndarray` objects. A *block row* of
``p`` matrices of common shape ``(m, n)`` is either a sequence of such
arrays or a 3-D array of shape ``(p, m, n)``.
"""

import numpy as np
from scipy.linalg import solve_triangular

from .exceptions import DimensionError, RankDeficiencyError, SingularMatrixError

__all__ = [
    "frobenius_inner",
    "frobenius_norm",
    "vec",
    "mat",
    "diamond_product",
    "GlobalQR",
    "global_qr_append",
    "upper_triangular_solve",
    "RANK_TOL",
]

#: Relative threshold below which an orthogonalized block counts as dependent.
RANK_TOL = 1e-12


def frobenius_inner(a, b):
    """Frobenius inner product ``tr(a.T @ b)``.

    Parameters
    ----------
    a, b : ndarray
        Arrays of identical shape.

    Returns
    -------
    float
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.dot(a.ravel(), b.ravel()))


def frobenius_norm(a):
    a = np.asarray(a, dtype=float)
    return float(np.sqrt(np.dot(a.ravel(), a.ravel())))


def vec(a):
    """Stack the columns of ``a`` into a vector (column-major order)."""
    a = np.asarray(a)
    if a.ndim != 2:
        raise DimensionError(f"vec expects a 2-D array, got ndim={a.ndim}")
    return a.reshape(-1, order="F")


def mat(v, rows, cols):
    """Inverse of :func:`vec`."""
    v = np.asarray(v)
    if v.ndim != 1 or v.size != rows * cols:
        raise DimensionError(f"cannot reshape {v.shape} to ({rows}, {cols})")
    return v.reshape((rows, cols), order="F")


def _as_block_stack(blocks):
    if isinstance(blocks, np.ndarray):
        if blocks.ndim == 2:
            return blocks[None]
        if blocks.ndim == 3:
            return blocks
        raise DimensionError(f"block row must be 2-D or 3-D, got ndim={blocks.ndim}")
    blocks = list(blocks)
    if not blocks:
        raise DimensionError("empty block row")
    shape = np.shape(blocks[0])
    for blk in blocks:
        if np.shape(blk) != shape:
            raise DimensionError(f"inconsistent block shapes: {shape} vs {np.shape(blk)}")
    return np.stack([np.asarray(blk, dtype=float) for blk in blocks])


def diamond_product(a, b):
    r"""Block Gram matrix :math:`A^T \diamond B`.

    Entry ``(i, j)`` is ``frobenius_inner(a[i], b[j])``.

    Parameters
    ----------
    a : sequence of ndarray or ndarray, shape (p, m, n)
    b : sequence of ndarray or ndarray, shape (l, m, n)

    Returns
    -------
    ndarray, shape (p, l)
    """
    sa = _as_block_stack(a)
    sb = _as_block_stack(b)
    if sa.shape[1:] != sb.shape[1:]:
        raise DimensionError(f"block shapes differ: {sa.shape[1:]} vs {sb.shape[1:]}")
    return sa.reshape(sa.shape[0], -1) @ sb.reshape(sb.shape[0], -1).T


class GlobalQR:
    r"""Global QR factorization of a block row, grown one block at a time.

    After ``k`` appends the block row ``[A_1, ..., A_k]`` equals
    ``Q (R \otimes I)``, i.e. ``A_j = sum_i R[i, j] Q_i``, with
    ``Q^T \diamond Q = I_k`` and ``R`` upper triangular with positive
    diagonal.

    Parameters
    ----------
    shape : tuple of int
        Common shape ``(m, n)`` of the blocks.
    capacity : int, optional
        Initial storage capacity; grows geometrically as needed.
    """

    def __init__(self, shape, capacity=16):
        self.shape = tuple(shape)
        self._size = int(np.prod(self.shape))
        self._q = np.empty((max(capacity, 1), self._size))
        self._r = np.zeros((max(capacity, 1),) * 2)
        self.k = 0

    def __len__(self):
        return self.k

    @property
    def q_blocks(self):
        """View of the F-orthonormal blocks, shape ``(k, m, n)``."""
        return self._q[: self.k].reshape((self.k,) + self.shape)

    @property
    def r_factor(self):
        return self._r[: self.k, : self.k]

    def _grow(self):
        cap = 2 * self._q.shape[0]
        q = np.empty((cap, self._size))
        q[: self.k] = self._q[: self.k]
        r = np.zeros((cap, cap))
        r[: self.k, : self.k] = self._r[: self.k, : self.k]
        self._q, self._r = q, r

    def project(self, block):
        """Return ``Q^T \\diamond block`` as a vector of length ``k``."""
        return self._q[: self.k] @ np.ravel(block)

    def orthogonalize(self, block):
        """Orthogonalize ``block`` against the current Q blocks.

        Classical Gram-Schmidt with one reorthogonalization pass.

        Returns
        -------
        coeffs : ndarray, shape (k,)
        residual : ndarray, shape (m*n,)
        """
        v = np.array(block, dtype=float).ravel()
        coeffs = np.zeros(self.k)
        if self.k:
            q = self._q[: self.k]
            for _ in range(2):
                c = q @ v
                v -= q.T @ c
                coeffs += c
        return coeffs, v

    def append(self, block, rank_tol=RANK_TOL):
        """Append ``block`` to the factorization.

        Returns
        -------
        r_column : ndarray, shape (k,)
            Coefficients of ``block`` on the previous Q blocks.
        r_diag : float
            Norm of the orthogonalized remainder.

        Raises
        ------
        RankDeficiencyError
            If ``r_diag < rank_tol * ||block||_F``. The factorization is
            left unchanged.
        """
        if np.shape(block) != self.shape:
            raise DimensionError(f"block shape {np.shape(block)} != {self.shape}")
        norm = frobenius_norm(block)
        r_col, q = self.orthogonalize(block)
        r_diag = float(np.linalg.norm(q))
        if norm == 0.0 or r_diag < rank_tol * norm:
            raise RankDeficiencyError(
                f"block is dependent on the current basis (r_diag={r_diag:.3e}, norm={norm:.3e})"
            )
        self._push(q / r_diag, r_col, r_diag)
        return r_col, r_diag

    def _push(self, q, r_col, r_diag):
        if self.k == self._q.shape[0]:
            self._grow()
        self._q[self.k] = np.ravel(q)
        self._r[: self.k, self.k] = r_col
        self._r[self.k, self.k] = r_diag
        self.k += 1

    def reconstruct(self):
        """Reassemble the factored block row, shape ``(k, m, n)``."""
        blocks = self.r_factor.T @ self._q[: self.k]
        return blocks.reshape((self.k,) + self.shape)


def global_qr_append(qr, new_block, rank_tol=RANK_TOL):
    """Functional form of :meth:`GlobalQR.append`.

    Returns ``(qr, r_column, r_diag)``; ``qr`` is updated in place.
    """
    r_col, r_diag = qr.append(new_block, rank_tol=rank_tol)
    return qr, r_col, r_diag


def upper_triangular_solve(r, rhs, tol=RANK_TOL):
    """Solve ``r @ y = rhs`` for upper-triangular ``r`` by back substitution.

    Raises
    ------
    SingularMatrixError
        If some ``|r[i, i]| <= tol * max|r[i, i]|``.
    """
    r = np.asarray(r, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if r.ndim != 2 or r.shape[0] != r.shape[1]:
        raise DimensionError(f"expected a square matrix, got {r.shape}")
    if rhs.shape[0] != r.shape[0]:
        raise DimensionError(f"rhs length {rhs.shape[0]} != {r.shape[0]}")
    d = np.abs(np.diag(r))
    if d.size and (d.max() == 0.0 or d.min() <= tol * d.max()):
        raise SingularMatrixError("triangular factor is numerically singular")
    return solve_triangular(r, rhs, lower=False, check_finite=False)
