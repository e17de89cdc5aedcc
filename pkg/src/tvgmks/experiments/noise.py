"""Noise models used in the restoration experiments."""

import numpy as np

from ..exceptions import DegenerateInputError, ParameterError
from ..linalg import frobenius_norm

__all__ = ["add_salt_pepper", "add_gaussian_white"]


def _check_level(level):
    if not 0.0 < level <= 1.0:
        raise ParameterError(f"noise level must lie in (0, 1], got {level}")


def add_salt_pepper(x, level, seed, lo=0.0, hi=1.0):
    """Corrupt a fraction ``level`` of the pixels of ``x`` with impulses.

    Exactly ``round(level * x.size)`` distinct pixels are drawn uniformly
    without replacement; each is set to ``lo`` or ``hi`` with probability
    1/2. For an ``(m, n, k)`` color array, every channel value counts as a
    pixel.

    Parameters
    ----------
    x : ndarray
    level : float
        Fraction of corrupted pixels, in ``(0, 1]``.
    seed : int or numpy.random.Generator
    lo, hi : float, optional
        Pepper and salt values.

    Returns
    -------
    ndarray
        A corrupted copy of ``x``.
    """
    _check_level(level)
    rng = np.random.default_rng(seed)
    out = np.array(x, dtype=float, copy=True)
    count = int(round(level * out.size))
    idx = rng.choice(out.size, size=count, replace=False)
    salt = rng.random(count) < 0.5
    flat = out.reshape(-1)
    flat[idx] = np.where(salt, hi, lo)
    return out


def add_gaussian_white(b_hat, nu, seed):
    """Add white Gaussian noise of relative level ``nu``.

    The noise ``E`` is a standard normal draw rescaled so that
    ``||E||_F / ||b_hat||_F == nu``.

    Parameters
    ----------
    b_hat : ndarray
        Noise-free data.
    nu : float
        Relative noise level, ``> 0``.
    seed : int or numpy.random.Generator

    Returns
    -------
    ndarray
    """
    if not nu > 0:
        raise ParameterError(f"nu must be positive, got {nu}")
    b_hat = np.asarray(b_hat, dtype=float)
    bnorm = frobenius_norm(b_hat)
    if bnorm == 0.0:
        raise DegenerateInputError("noise-free data is zero; relative noise level undefined")
    e = np.random.default_rng(seed).standard_normal(b_hat.shape)
    e *= nu * bnorm / frobenius_norm(e)
    return b_hat + e
