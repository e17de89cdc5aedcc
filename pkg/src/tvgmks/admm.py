"""Alternating direction solvers for TV/L2 and TV/L1 deblurring.

Both solvers split the gradient (``DX = Y``) and, for TV/L1, the blurred
image (``H(X) = R``), update the split variables by shrinkage, take a
multiplier ascent step and obtain ``X`` from a generalized Sylvester
equation solved over a growing matrix Krylov subspace.
"""

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exceptions import DegenerateInputError, DimensionError, NumericFailureError, ParameterError
from .gmks import BlockBasis, arnoldi_solve, expand_and_solve, global_arnoldi
from .linalg import frobenius_inner, frobenius_norm
from .operators import (
    ImageGradient,
    KroneckerImageOperator,
    StackedImageGradient,
    blur_operator,
    build_normal_operator,
)
from .prox import shrink_anisotropic, shrink_isotropic, shrink_l1_residual

__all__ = [
    "SolverParams",
    "AdmmState",
    "ConvergenceTrace",
    "tv_norm",
    "tv_objective",
    "solve_tvl2",
    "solve_tvl1",
    "multichannel_solve",
]

_TV_ALIASES = {
    "iso": "isotropic",
    "isotropic": "isotropic",
    "tv2": "isotropic",
    "aniso": "anisotropic",
    "anisotropic": "anisotropic",
    "tv1": "anisotropic",
}


def _tv_flavor(tv):
    try:
        return _TV_ALIASES[str(tv).lower()]
    except KeyError:
        raise ParameterError(f"unknown TV flavor {tv!r}") from None


@dataclass
class SolverParams:
    """Parameters shared by both solvers.

    Attributes
    ----------
    mu : float
        Regularization weight of the TV term.
    beta : float
        Penalty on ``DX = Y``.
    rho : float
        Penalty on ``H(X) = R`` (TV/L1 only).
    epsilon : float
        Stop once ``||X_{k+1} - X_k||_F / ||X_k||_F < epsilon``.
    tv : {"anisotropic", "isotropic"}
        ``"anisotropic"`` is TV1, ``"isotropic"`` is TV2.
    max_iter : int
    arnoldi_steps : int
        Global Arnoldi steps for the first Sylvester equation.
    max_basis : int
        Dimension cap of the Krylov basis.
    classic_order : bool
        Solve for X before the shrinkage and multiplier steps in each
        iteration instead of after them.
    absorb_x0 : bool
        Also add the starting image ``X0`` to the Krylov basis. By default
        ``X0`` only enters through the first (correction form) solve and
        later iterates lie in the span of the residual blocks alone.
    """

    mu: float
    beta: float
    rho: float = 1.0
    epsilon: float = 1e-3
    tv: str = "anisotropic"
    max_iter: int = 500
    arnoldi_steps: int = 1
    max_basis: int = 400
    classic_order: bool = False
    absorb_x0: bool = False

    def __post_init__(self):
        self.tv = _tv_flavor(self.tv)
        if not self.mu >= 0:
            raise ParameterError(f"mu must be non-negative, got {self.mu}")
        for name in ("beta", "rho", "epsilon"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive, got {getattr(self, name)}")
        if self.max_iter < 1 or self.arnoldi_steps < 1 or self.max_basis < 2:
            raise ParameterError("max_iter, arnoldi_steps must be >= 1 and max_basis >= 2")


@dataclass
class AdmmState:
    """Iterate bundle. ``y`` and ``z`` are gradient pairs of shape ``(2,) + x.shape``."""

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    r: Optional[np.ndarray] = None
    w: Optional[np.ndarray] = None
    iter: int = 0

    def __post_init__(self):
        if (self.r is None) != (self.w is None):
            raise ParameterError("r and w must both be given or both be absent")

    def copy(self):
        cp = lambda a: None if a is None else a.copy()
        return AdmmState(self.x.copy(), self.y.copy(), self.z.copy(), cp(self.r), cp(self.w), self.iter)


@dataclass
class ConvergenceTrace:
    """Per-iteration diagnostics; one entry per completed iteration."""

    objective: list = field(default_factory=list)
    primal_d: list = field(default_factory=list)
    primal_h: list = field(default_factory=list)
    rel_change: list = field(default_factory=list)
    sylv_residual: list = field(default_factory=list)
    elapsed: list = field(default_factory=list)
    basis_dim: list = field(default_factory=list)
    #: ``<Y_{k+1} - Y_k, Z_{k+1} - Z_k>`` for consecutive shrinkage outputs.
    monotonicity: list = field(default_factory=list)
    converged: bool = False
    state: Optional[AdmmState] = None

    COLUMNS = ("iter", "objective", "primal_d", "primal_h", "rel_change", "sylv_residual", "elapsed_s")

    def __len__(self):
        return len(self.rel_change)

    @property
    def iterations(self):
        return len(self)

    def rows(self):
        for k in range(len(self)):
            yield (
                k + 1,
                self.objective[k],
                self.primal_d[k],
                self.primal_h[k],
                self.rel_change[k],
                self.sylv_residual[k],
                self.elapsed[k],
            )


def tv_norm(dx, tv):
    """TV1 or TV2 of a gradient pair ``dx`` of shape ``(2, ...)``."""
    if _tv_flavor(tv) == "anisotropic":
        return float(np.abs(dx).sum())
    return float(np.hypot(dx[0], dx[1]).sum())


def tv_objective(x, h, b, mu, tv, fidelity="l2", gradient=None):
    """Regularized objective ``fidelity(H(X) - B) + mu * TV(X)``.

    Parameters
    ----------
    x, b : ndarray
    h : SylvesterOperator
        Blur operator.
    mu : float
    tv : {"anisotropic", "isotropic"}
    fidelity : {"l2", "l1"}
        ``"l2"`` uses ``||H(X) - B||_F**2``, ``"l1"`` the entrywise l1 norm.
    gradient : ImageGradient or StackedImageGradient, optional
    """
    x = np.asarray(x, dtype=float)
    b = np.asarray(b, dtype=float)
    if h.in_shape != x.shape or h.out_shape != b.shape:
        raise DimensionError(f"shapes x={x.shape}, b={b.shape} do not match {h!r}")
    if gradient is None:
        gradient = ImageGradient(*x.shape)
    resid = h.apply(x) - b
    fit = float(np.abs(resid).sum()) if fidelity == "l1" else float(np.dot(resid.ravel(), resid.ravel()))
    return fit + mu * tv_norm(gradient.forward(x), tv)


def _admm(h1, h2, gradient, b, params, mode, init=None):
    hop = blur_operator(h1, h2)
    b = np.asarray(b, dtype=float)
    if not np.all(np.isfinite(b)):
        raise NumericFailureError("observation contains non-finite values")
    if hop.out_shape != b.shape:
        raise DimensionError(f"observation shape {b.shape} != {hop.out_shape}")
    l1 = mode == "l1"
    beta, mu = params.beta, params.mu
    rho = params.rho if l1 else 1.0
    shrink = shrink_isotropic if params.tv == "isotropic" else shrink_anisotropic
    a = build_normal_operator(h1, h2, beta, rho, gradient)

    if init is None:
        x = b.copy()
        state = AdmmState(x, gradient.forward(x), np.zeros((2,) + x.shape))
        if l1:
            state.r, state.w = b.copy(), np.zeros_like(b)
    else:
        state = init.copy()
        if l1 and state.r is None:
            state.r, state.w = b.copy(), np.zeros_like(b)
    hb = hop.adjoint_apply(b)

    def rhs():
        e = gradient.adjoint(beta * state.y - state.z)
        if l1:
            return e + hop.adjoint_apply(rho * state.r - state.w)
        return e + hb

    def objective(x):
        return tv_objective(x, hop, b, mu, params.tv, "l1" if l1 else "l2", gradient)

    trace = ConvergenceTrace()
    t0 = time.perf_counter()

    # first Sylvester equation: a few global Arnoldi steps from the residual of x0
    x0 = state.x
    e0 = rhs()
    r0 = e0 - a.apply(x0)
    try:
        if frobenius_norm(r0) <= 1e-14 * max(frobenius_norm(e0), 1e-300):
            raise DegenerateInputError
        basis, hess, r0_norm = global_arnoldi(a, r0, params.arnoldi_steps, params.max_basis)
        x = arnoldi_solve(basis, hess, r0_norm, x0).x
    except DegenerateInputError:
        # x0 already solves the first equation; it seeds the basis instead
        basis, x = BlockBasis(a, params.max_basis), x0.copy()
        basis.append(x0)
    if params.absorb_x0:
        basis.append(x0)

    def split_updates(x):
        dx = gradient.forward(x)
        hx = hop.apply(x) if l1 else None
        if l1:
            state.r = shrink_l1_residual(hx, b, state.w, rho)
        y_new = shrink(dx[0] + state.z[0] / beta, dx[1] + state.z[1] / beta, mu / beta)
        z_new = state.z + beta * (dx - y_new)
        if state.iter > 0:
            trace.monotonicity.append(frobenius_inner(y_new - state.y, z_new - state.z))
        state.y, state.z = y_new, z_new
        pd = frobenius_norm(dx - y_new)
        ph = 0.0
        if l1:
            ph = frobenius_norm(hx - state.r)
            state.w = state.w + rho * (hx - state.r)
        return pd, ph

    for k in range(1, params.max_iter + 1):
        if params.classic_order:
            sol = expand_and_solve(basis, a, rhs(), x)
            x_new = sol.x
            pd, ph = split_updates(x_new)
        else:
            pd, ph = split_updates(x)
            sol = expand_and_solve(basis, a, rhs(), x)
            x_new = sol.x
        if not np.all(np.isfinite(x_new)):
            state.x = x
            trace.state = state
            raise NumericFailureError(f"non-finite iterate at iteration {k}")
        xnorm = frobenius_norm(x)
        rel = frobenius_norm(x_new - x) / xnorm if xnorm > 0 else float(frobenius_norm(x_new) > 0)
        x = x_new
        state.x = x
        state.iter = k
        trace.objective.append(objective(x))
        trace.primal_d.append(pd)
        trace.primal_h.append(ph)
        trace.rel_change.append(rel)
        trace.sylv_residual.append(sol.residual_norm)
        trace.elapsed.append(time.perf_counter() - t0)
        trace.basis_dim.append(len(basis))
        if rel < params.epsilon:
            trace.converged = True
            break
    trace.state = state
    return x, trace


def solve_tvl2(h1, h2, b, params, init=None, gradient=None):
    """Minimize ``1/2 ||H2 X H1^T - B||_F^2 + mu TV(X)``.

    Parameters
    ----------
    h1, h2 : ndarray or LinearOperator
        Blur factors; ``H(X) = h2 @ X @ h1.T``.
    b : ndarray
        Observed image.
    params : SolverParams
        ``rho`` is ignored.
    init : AdmmState, optional
        Warm start; defaults to ``X0 = B, Y0 = D X0, Z0 = 0``.
    gradient : optional
        Gradient operator; defaults to :class:`ImageGradient` of ``b.shape``.

    Returns
    -------
    x : ndarray
    trace : ConvergenceTrace
    """
    gradient = gradient or ImageGradient(h2.shape[1], h1.shape[1])
    return _admm(h1, h2, gradient, b, params, "l2", init)


def solve_tvl1(h1, h2, b, params, init=None, gradient=None):
    """Minimize ``||H2 X H1^T - B||_1 + mu TV(X)``.

    Same interface as :func:`solve_tvl2`; the default start is
    ``X0 = R0 = B``, ``Y0 = D X0``, ``Z0 = W0 = 0``.
    """
    gradient = gradient or ImageGradient(h2.shape[1], h1.shape[1])
    return _admm(h1, h2, gradient, b, params, "l1", init)


def _is_identity(a):
    a = np.asarray(a)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and np.array_equal(a, np.eye(a.shape[0]))


def multichannel_solve(h1, h2, b_channels, params, mode="tvl1"):
    """Restore a ``k``-channel image.

    Parameters
    ----------
    h1 : ndarray, shape (k, k)
        Cross-channel blur; the identity means within-channel blur only.
    h2 : KroneckerImageOperator or array_like, shape (m*n, m*n)
        Within-channel blur acting on vectorized channels.
    b_channels : ndarray, shape (m, n, k)
    params : SolverParams
    mode : {"tvl1", "tvl2"}

    Returns
    -------
    x : ndarray, shape (m, n, k)
    traces : list of ConvergenceTrace
        One per channel for within-channel blur, a single one otherwise.
    """
    b_channels = np.asarray(b_channels, dtype=float)
    if b_channels.ndim != 3:
        raise DimensionError(f"expected an (m, n, k) array, got shape {b_channels.shape}")
    m, n, k = b_channels.shape
    h1 = np.asarray(h1, dtype=float)
    if h1.shape != (k, k):
        raise DimensionError(f"channel blur {h1.shape} does not match {k} channels")
    if h2.shape != (m * n, m * n):
        raise DimensionError(f"within-channel blur {h2.shape} does not match ({m}x{n}) channels")
    solver = {"tvl1": solve_tvl1, "tvl2": solve_tvl2}[mode]

    if _is_identity(h1):
        out = np.empty_like(b_channels)
        traces = []
        for c in range(k):
            if isinstance(h2, KroneckerImageOperator):
                xc, tr = solver(h2.right, h2.left, b_channels[:, :, c], params)
            else:
                grad = StackedImageGradient(m, n, 1)
                bc = b_channels[:, :, c].reshape((m * n, 1), order="F")
                xc, tr = solver(np.eye(1), h2, bc, params, gradient=grad)
                xc = xc.reshape((m, n), order="F")
            out[:, :, c] = xc
            traces.append(tr)
        return out, traces

    grad = StackedImageGradient(m, n, k)
    bs = b_channels.reshape((m * n, k), order="F")
    xs, tr = solver(h1, h2, bs, params, gradient=grad)
    return xs.reshape((m, n, k), order="F"), [tr]
