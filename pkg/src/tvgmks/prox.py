"""Closed-form shrinkage operators for the TV and L1 subproblems.

Gradient pairs are arrays of shape ``(2, ...)`` whose first slice holds the
vertical differences and whose second slice holds the horizontal ones.
"""

import numpy as np

from .exceptions import DimensionError, ParameterError

__all__ = ["soft_threshold", "shrink_isotropic", "shrink_anisotropic", "shrink_l1_residual"]


def _check_threshold(threshold):
    if not threshold >= 0:
        raise ParameterError(f"threshold must be non-negative, got {threshold}")


def soft_threshold(x, threshold):
    """``sign(x) * max(|x| - threshold, 0)``, elementwise."""
    _check_threshold(threshold)
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.maximum(np.abs(x) - threshold, 0.0)


def _pair(k, l):
    k = np.asarray(k, dtype=float)
    l = np.asarray(l, dtype=float)
    if k.shape != l.shape:
        raise DimensionError(f"shape mismatch: {k.shape} vs {l.shape}")
    return k, l


def shrink_isotropic(k, l, threshold):
    """Two-dimensional shrinkage, pixel by pixel.

    Each pixel vector ``t = (k_ij, l_ij)`` is mapped to
    ``max(|t| - threshold, 0) * t / |t|`` with ``0 * (0/0) = 0``. This is the
    minimizer of ``threshold * |m|_2 + |m - t|_2**2 / 2``.

    Returns
    -------
    ndarray, shape (2,) + k.shape
    """
    _check_threshold(threshold)
    k, l = _pair(k, l)
    norm = np.hypot(k, l)
    scale = np.zeros_like(norm)
    nz = norm > threshold
    scale[nz] = (norm[nz] - threshold) / norm[nz]
    return np.stack([scale * k, scale * l])


def shrink_anisotropic(k, l, threshold):
    """Componentwise soft thresholding of ``k`` and ``l``.

    Returns
    -------
    ndarray, shape (2,) + k.shape
    """
    k, l = _pair(k, l)
    return np.stack([soft_threshold(k, threshold), soft_threshold(l, threshold)])


def shrink_l1_residual(hx, b, w, rho):
    """Minimizer ``R`` of ``|R - b|_1 + rho/2 |hx - R|^2 + <hx - R, w>``.

    Computed as ``b + soft_threshold(hx - b + w / rho, 1 / rho)``.
    """
    if not rho > 0:
        raise ParameterError(f"rho must be positive, got {rho}")
    hx = np.asarray(hx, dtype=float)
    b = np.asarray(b, dtype=float)
    w = np.asarray(w, dtype=float)
    if not hx.shape == b.shape == w.shape:
        raise DimensionError(f"shape mismatch: {hx.shape}, {b.shape}, {w.shape}")
    return b + soft_threshold(hx - b + w / rho, 1.0 / rho)
