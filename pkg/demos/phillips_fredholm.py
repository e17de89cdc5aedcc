"""
A separable Fredholm problem
============================

The one-dimensional phillips test problem discretizes a first-kind
integral equation with a smooth, rapidly decaying kernel. Its two
dimensional separable version ``B = H X H^T`` with ``X = x x^T`` is a
compact benchmark for the TV/L2 solver: small enough to solve densely,
ill-conditioned enough to need regularization.

Here the grid is kept at 200 points per dimension so the script runs in
seconds; the reference runs use 500 (``tvgmks phillips --n 500``).
"""

import numpy as np

from tvgmks import phillips_problem
from tvgmks.experiments import preset, run_experiment, with_overrides

h, _, x_true = phillips_problem(200)
s = np.linalg.svd(h, compute_uv=False)
print(f"condition number of the 1-D factor: {s[0] / s[-1]:.2e}")

###############################################################################
# Three noise levels, each with its own reference parameter row.

for level in (0.001, 0.01, 0.1):
    config = with_overrides(preset("example5", noise_level=level), phillips_n=200)
    result = run_experiment(config)
    print(f"noise {level:g}: {result.iterations:3d} iterations, relative error {result.metric_value:.3e}")
