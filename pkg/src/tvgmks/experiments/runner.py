"""End-to-end restoration experiments: problem generation, solve, report.

A run is described by an :class:`ExperimentConfig`. :func:`run_experiment`
builds the blurred and noisy observation (blur first, then noise), calls the
configured solver and returns an :class:`ExperimentResult`; it optionally
writes the restored image, the per-iteration trace CSV and a one-line
summary CSV.
"""

import csv
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from ..admm import SolverParams, multichannel_solve, solve_tvl1, solve_tvl2
from ..exceptions import DimensionError, ParameterError
from ..operators import KroneckerImageOperator, cross_channel_matrix, gaussian_toeplitz, phillips_problem
from .imageio import load_standin, read_image, write_image
from .metrics import relative_error, snr
from .noise import add_gaussian_white, add_salt_pepper

__all__ = [
    "NoiseSpec",
    "BlurSpec",
    "ExperimentConfig",
    "ExperimentResult",
    "preset",
    "table_configs",
    "run_experiment",
    "write_trace_csv",
    "write_summary_csv",
    "TRACE_HEADER",
    "SUMMARY_HEADER",
    "with_overrides",
    "PROBLEMS",
    "TABLES",
]

TRACE_HEADER = ("iter", "objective", "primal_d", "primal_h", "rel_change", "sylv_residual", "elapsed_s")
SUMMARY_HEADER = ("experiment", "mode", "tv", "mu", "beta", "rho", "noise", "iters", "metric_name", "metric_value")
PROBLEMS = ("example1", "example2", "example3", "example4", "example5", "custom")

_NOISE_KINDS = {"salt-pepper": "salt-pepper", "sp": "salt-pepper", "gaussian-white": "gaussian-white",
                "gaussian": "gaussian-white", "white": "gaussian-white"}


@dataclass
class NoiseSpec:
    """Noise model: ``kind`` is ``"salt-pepper"`` (``level`` = pixel
    fraction) or ``"gaussian-white"`` (``level`` = ``||E||_F / ||B_hat||_F``)."""

    kind: str = "salt-pepper"
    level: float = 0.3
    seed: int = 0

    def __post_init__(self):
        try:
            self.kind = _NOISE_KINDS[str(self.kind).lower()]
        except KeyError:
            raise ParameterError(f"unknown noise kind {self.kind!r}") from None
        if not 0.0 < self.level <= 1.0:
            raise ParameterError(f"noise level must lie in (0, 1], got {self.level}")

    def apply(self, b_hat):
        if self.kind == "salt-pepper":
            return add_salt_pepper(b_hat, self.level, self.seed)
        return add_gaussian_white(b_hat, self.level, self.seed)

    def __str__(self):
        return f"{self.kind}:{self.level:g}"


@dataclass
class BlurSpec:
    """Separable within-image blur.

    ``kind="gaussian-toeplitz"`` gives ``h_ij = exp(-(i-j)^2/(2 sigma^2)) /
    (sigma sqrt(2 pi))`` for ``|i-j| <= band``; ``kind="identity"`` no blur.
    """

    sigma: float = 1.0
    band: int = 4
    kind: str = "gaussian-toeplitz"

    def __post_init__(self):
        if self.kind not in ("gaussian-toeplitz", "identity"):
            raise ParameterError(f"unknown blur kind {self.kind!r}")

    def matrix(self, d):
        if self.kind == "identity":
            return np.eye(d)
        return gaussian_toeplitz(self.sigma, self.band, d)


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one restoration run.

    Attributes
    ----------
    problem : str
        ``"example1"`` .. ``"example5"`` or ``"custom"``; only used for
        labelling once the fields are filled in (see :func:`preset`).
    mode : {"tvl1", "tvl2"}
    solver : SolverParams
    noise : NoiseSpec
    blur : BlurSpec
    image : {"gray", "rgb", "phillips"} or path
        Bundled stand-in, the separable Fredholm test problem, or a file.
    channels : {"within", "cross"}
        Blur model for RGB images: per-channel blur only, or additionally
        mixing channels with :func:`~tvgmks.operators.cross_channel_matrix`.
    phillips_n : int
        Problem size when ``image == "phillips"``.
    output, trace, summary : path, optional
        Where to write the restored image, the trace CSV and the summary CSV.
    """

    problem: str = "custom"
    mode: str = "tvl1"
    solver: SolverParams = field(default_factory=lambda: SolverParams(mu=0.2, beta=50.0, rho=5.0))
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    blur: BlurSpec = field(default_factory=BlurSpec)
    image: str = "gray"
    channels: str = "within"
    phillips_n: int = 500
    output: Optional[str] = None
    trace: Optional[str] = None
    summary: Optional[str] = None

    def __post_init__(self):
        if self.problem not in PROBLEMS:
            raise ParameterError(f"unknown problem {self.problem!r}; choose from {PROBLEMS}")
        if self.mode not in ("tvl1", "tvl2"):
            raise ParameterError(f"mode must be 'tvl1' or 'tvl2', got {self.mode!r}")
        if self.channels not in ("within", "cross"):
            raise ParameterError(f"channels must be 'within' or 'cross', got {self.channels!r}")


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    x: np.ndarray
    x_true: np.ndarray
    b: np.ndarray
    traces: list
    metric_name: str
    metric_value: float
    clamped_snr: Optional[float]
    elapsed: float

    @property
    def iterations(self):
        """Iterations of the run; the maximum over channels for independent
        per-channel solves."""
        return max(t.iterations for t in self.traces)

    @property
    def converged(self):
        return all(t.converged for t in self.traces)

    def summary_row(self):
        c = self.config
        return (
            c.problem,
            c.mode,
            c.solver.tv,
            f"{c.solver.mu:g}",
            f"{c.solver.beta:g}",
            f"{c.solver.rho:g}" if c.mode == "tvl1" else "",
            str(c.noise),
            str(self.iterations),
            self.metric_name,
            f"{self.metric_value:.6g}",
        )


def _params(mu, beta, rho=1.0, eps=1e-3, tv="anisotropic"):
    return SolverParams(mu=mu, beta=beta, rho=rho, epsilon=eps, tv=tv)


def preset(problem, tv="anisotropic", noise_level=None, seed=0):
    """Configuration of one of the five reference experiments.

    Parameters
    ----------
    problem : {"example1", ..., "example5"}
        1: grayscale TV/L1, salt-and-pepper. 2: RGB TV/L1 with within-channel
        blur. 3: RGB TV/L1 with cross-channel blur. 4: grayscale TV/L2 with
        white noise, ``sigma = 2``. 5: the separable Fredholm problem, TV/L2.
    tv : {"anisotropic", "isotropic"}
    noise_level : float, optional
        Selects the matching parameter row; defaults to the first listed.
    seed : int
    """
    rows = _PRESET_ROWS.get(problem)
    if rows is None:
        raise ParameterError(f"no preset for {problem!r}")
    if noise_level is None:
        noise_level = next(iter(rows))
    key = min(rows, key=lambda lvl: abs(lvl - noise_level))
    if not np.isclose(key, noise_level):
        raise ParameterError(f"{problem} has no parameter row for noise level {noise_level}")
    mu, beta, rho = rows[key]
    base = _PRESET_BASE[problem]
    eps = 1e-2 if problem in ("example2", "example3") else 1e-3
    return ExperimentConfig(
        problem=problem,
        mode=base["mode"],
        solver=_params(mu, beta, rho, eps, tv),
        noise=NoiseSpec(base["noise"], key, seed),
        blur=BlurSpec(base["sigma"], 4),
        image=base["image"],
        channels=base.get("channels", "within"),
    )


_PRESET_BASE = {
    "example1": dict(mode="tvl1", noise="salt-pepper", sigma=1.0, image="gray"),
    "example2": dict(mode="tvl1", noise="salt-pepper", sigma=1.0, image="rgb"),
    "example3": dict(mode="tvl1", noise="salt-pepper", sigma=1.0, image="rgb", channels="cross"),
    "example4": dict(mode="tvl2", noise="gaussian-white", sigma=2.0, image="gray"),
    "example5": dict(mode="tvl2", noise="gaussian-white", sigma=1.0, image="phillips"),
}

# noise level -> (mu, beta, rho)
_PRESET_ROWS = {
    "example1": {0.3: (0.2, 50.0, 5.0), 0.1: (0.05, 50.0, 5.0), 0.2: (0.1, 50.0, 5.0)},
    "example2": {0.3: (0.125, 80.0, 5.0), 0.1: (0.1, 80.0, 5.0), 0.2: (0.125, 80.0, 5.0)},
    "example3": {0.3: (0.125, 80.0, 5.0)},
    "example4": {0.01: (0.001, 30.0, 1.0), 0.001: (0.0001, 0.1, 1.0)},
    "example5": {0.001: (0.0001, 0.1, 1.0), 0.01: (0.001, 30.0, 1.0), 0.1: (0.1, 40.0, 1.0)},
}

#: Reference results for the table sweeps: problem -> noise level ->
#: {tv: (iterations, metric value)}.
TABLES = {
    "1": ("example1", {
        0.1: {"anisotropic": (56, 23.55), "isotropic": (141, 22.64)},
        0.2: {"anisotropic": (51, 21.38), "isotropic": (106, 20.16)},
        0.3: {"anisotropic": (48, 19.21), "isotropic": (87, 17.66)},
    }),
    "2-rgb": ("example2", {
        0.1: {"anisotropic": (13, 24.66), "isotropic": (14, 24.32)},
        0.2: {"anisotropic": (17, 23.00), "isotropic": (17, 22.71)},
        0.3: {"anisotropic": (19, 20.90), "isotropic": (19, 21.13)},
    }),
    "2-mrin": ("example4", {
        0.001: {"anisotropic": (53, 18.32), "isotropic": (52, 18.32)},
        0.01: {"anisotropic": (20, 15.70), "isotropic": (21, 15.60)},
    }),
    "3": ("example5", {
        0.001: {"anisotropic": (12, 4.01e-2), "isotropic": (9, 4.71e-2)},
        0.01: {"anisotropic": (13, 3.99e-2), "isotropic": (13, 3.98e-2)},
        0.1: {"anisotropic": (15, 4.07e-2), "isotropic": (15, 4.07e-2)},
    }),
}


def table_configs(table, seed=0, tv=None):
    """Configurations of a table sweep with their reference results.

    Parameters
    ----------
    table : {"1", "2-rgb", "2-mrin", "3"}
    seed : int
    tv : str, optional
        Restrict the sweep to one TV flavor.

    Returns
    -------
    list of (ExperimentConfig, (iterations, metric value))
    """
    try:
        problem, rows = TABLES[str(table)]
    except KeyError:
        raise ParameterError(f"unknown table {table!r}; choose from {sorted(TABLES)}") from None
    flavors = ("anisotropic", "isotropic") if tv is None else (SolverParams(1, 1, tv=tv).tv,)
    out = []
    for level, ref in rows.items():
        for flavor in flavors:
            out.append((preset(problem, flavor, level, seed), ref[flavor]))
    return out


def _load_truth(config):
    if config.image == "phillips":
        h1, h2, x_true = phillips_problem(config.phillips_n)
        return x_true, h1, h2
    if config.image in ("gray", "rgb"):
        x_true = load_standin(config.image)
    else:
        path = Path(config.image)
        if not path.exists():
            raise FileNotFoundError(f"input image not found: {path}")
        x_true = read_image(path)
    return x_true, None, None


def _single(solver, h1, h2):
    def solve(b, params):
        x, trace = solver(h1, h2, b, params)
        return x, [trace]

    return solve


def _blur(config, x_true, h1, h2):
    """Return ``(b_hat, solve)``; ``solve(b, params)`` restores from ``b``."""
    solver = solve_tvl1 if config.mode == "tvl1" else solve_tvl2
    if h1 is not None:
        return h2 @ x_true @ h1.T, _single(solver, h1, h2)
    if x_true.ndim == 2:
        m, n = x_true.shape
        hm, hn = config.blur.matrix(m), config.blur.matrix(n)
        return hm @ x_true @ hn.T, _single(solver, hn, hm)
    if x_true.ndim != 3:
        raise DimensionError(f"unsupported image shape {x_true.shape}")
    m, n, k = x_true.shape
    within = KroneckerImageOperator(config.blur.matrix(m), config.blur.matrix(n))
    cross = cross_channel_matrix() if config.channels == "cross" else np.eye(k)
    if cross.shape != (k, k):
        raise DimensionError(f"cross-channel blur needs {cross.shape[0]} channels, image has {k}")
    stacked = within.matmat(x_true.reshape((m * n, k), order="F")) @ cross.T
    b_hat = stacked.reshape((m, n, k), order="F")
    return b_hat, lambda b, p: multichannel_solve(cross, within, b, p, config.mode)


def run_experiment(config):
    """Generate the degraded data, restore it and report.

    Returns
    -------
    ExperimentResult
        ``metric_name`` is ``"snr"`` for images and ``"relative_error"``
        for the Fredholm problem; ``clamped_snr`` is the SNR of the
        restoration clipped to ``[0, 1]`` (images only).
    """
    x_true, h1, h2 = _load_truth(config)
    b_hat, solve = _blur(config, x_true, h1, h2)
    b = config.noise.apply(b_hat)
    t0 = time.perf_counter()
    x, traces = solve(b, config.solver)
    elapsed = time.perf_counter() - t0
    if config.image == "phillips":
        name, value, clamped = "relative_error", relative_error(x, x_true), None
    else:
        name, value, clamped = "snr", snr(x, x_true), snr(np.clip(x, 0.0, 1.0), x_true)
    result = ExperimentResult(config, x, x_true, b, traces, name, value, clamped, elapsed)
    if config.output:
        if config.image == "phillips":
            np.save(Path(config.output).with_suffix(".npy"), x)
        else:
            write_image(config.output, x)
    if config.trace:
        write_trace_csv(config.trace, traces)
    if config.summary:
        write_summary_csv(config.summary, [result])
    return result


def write_trace_csv(path, traces):
    """Write per-iteration diagnostics.

    A single trace goes to ``path``; several (one per channel) go to
    ``<stem>.c<i><suffix>`` next to it.
    """
    path = Path(path)
    paths = [path] if len(traces) == 1 else [path.with_name(f"{path.stem}.c{i}{path.suffix}") for i in range(len(traces))]
    for p, trace in zip(paths, traces):
        with open(p, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(TRACE_HEADER)
            for row in trace.rows():
                w.writerow([row[0]] + [repr(float(v)) for v in row[1:]])
    return paths


def write_summary_csv(path, results):
    """Write one summary row per result (no wall-time column, so identical
    configurations give identical files)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_HEADER)
        for r in results:
            w.writerow(r.summary_row())


def with_overrides(config, **kw):
    """Copy of ``config`` with solver/noise/blur fields replaced by keyword.

    Recognized keys: ``mode, tv, mu, beta, rho, eps, max_iter, seed,
    noise_kind, noise_level, sigma, band, blur, image, channels, output, trace,
    summary, phillips_n, problem``. ``None`` values are ignored.
    """
    kw = {k: v for k, v in kw.items() if v is not None}
    solver_map = {"tv": "tv", "mu": "mu", "beta": "beta", "rho": "rho", "eps": "epsilon", "max_iter": "max_iter"}
    s = {solver_map[k]: kw.pop(k) for k in list(kw) if k in solver_map}
    n = {}
    if "noise_kind" in kw:
        n["kind"] = kw.pop("noise_kind")
    if "noise_level" in kw:
        n["level"] = float(kw.pop("noise_level"))
    if "seed" in kw:
        n["seed"] = int(kw.pop("seed"))
    bl = {k: kw.pop(k) for k in ("sigma", "band") if k in kw}
    if "blur" in kw:
        bl["kind"] = kw.pop("blur")
    unknown = set(kw) - {"mode", "image", "channels", "output", "trace", "summary", "phillips_n", "problem"}
    if unknown:
        raise ParameterError(f"unknown configuration keys: {sorted(unknown)}")
    return replace(
        config,
        solver=replace(config.solver, **s),
        noise=replace(config.noise, **n),
        blur=replace(config.blur, **bl),
        **kw,
    )
