"""Restoration quality measures."""

import numpy as np

from ..exceptions import DegenerateInputError, DimensionError
from ..linalg import frobenius_norm

__all__ = ["snr", "relative_error"]


def _pair(x_k, x_hat):
    x_k = np.asarray(x_k, dtype=float)
    x_hat = np.asarray(x_hat, dtype=float)
    if x_k.shape != x_hat.shape:
        raise DimensionError(f"shape mismatch: {x_k.shape} vs {x_hat.shape}")
    return x_k, x_hat


def snr(x_k, x_hat):
    """Signal-to-noise ratio of a restoration in decibels.

    ``10 log10(||x_hat - mean(x_hat)||_F**2 / ||x_k - x_hat||_F**2)``; the
    mean is the scalar mean of all entries of ``x_hat``.

    Returns ``inf`` when ``x_k == x_hat``.
    """
    x_k, x_hat = _pair(x_k, x_hat)
    err = frobenius_norm(x_k - x_hat)
    if err == 0.0:
        return float("inf")
    signal = frobenius_norm(x_hat - x_hat.mean())
    with np.errstate(divide="ignore"):
        return float(20.0 * np.log10(signal / err))


def relative_error(x_k, x_hat):
    """``||x_hat - x_k||_F / ||x_hat||_F``."""
    x_k, x_hat = _pair(x_k, x_hat)
    ref = frobenius_norm(x_hat)
    if ref == 0.0:
        raise DegenerateInputError("reference is zero; relative error undefined")
    return frobenius_norm(x_hat - x_k) / ref
