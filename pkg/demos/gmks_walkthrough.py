"""
Solving a sequence of Sylvester equations in one growing subspace
=================================================================

Inside the ADMM loop every iteration asks for the solution of
``A(X) = E_k`` with the same operator ``A`` and a slowly changing
right-hand side. Instead of starting a fresh Krylov method each time, the
solver keeps one F-orthonormal basis and appends a single block per
equation: the normalized residual of the previous iterate.

This script builds a small operator, runs one global Arnoldi step for the
first equation and then feeds perturbed right-hand sides to
``expand_and_solve``, printing how the residual and the basis evolve.
"""

import numpy as np

from tvgmks import (
    SylvesterOperator,
    arnoldi_solve,
    expand_and_solve,
    frobenius_norm,
    global_arnoldi,
)

rng = np.random.default_rng(0)
m, n = 12, 10

###############################################################################
# A self-adjoint positive definite operator ``X -> L1 X R1 + L2 X R2``.

terms = []
for _ in range(2):
    a = rng.standard_normal((m, m))
    b = rng.standard_normal((n, n))
    terms.append((a @ a.T + 0.5 * np.eye(m), b @ b.T + 0.5 * np.eye(n)))
op = SylvesterOperator(terms)

###############################################################################
# The first equation: one global Arnoldi step from the residual of ``X0``.

e = rng.standard_normal((m, n))
x0 = np.zeros((m, n))
basis, hess, p0_norm = global_arnoldi(op, e - op(x0), steps=1)
x = arnoldi_solve(basis, hess, p0_norm, x0).x
print(f"equation 0: residual {frobenius_norm(op(x) - e):.3e}, basis size {len(basis)}")

###############################################################################
# Later equations reuse the basis. Each call adds at most one block, then
# solves the small least-squares problem with the updated global QR factors.
# The right-hand sides settle down geometrically, as they do when ADMM
# converges.

for k in range(1, 41):
    e = e + 0.3 * 0.8**k * rng.standard_normal((m, n))
    sol = expand_and_solve(basis, op, e, x)
    x = sol.x
    if k % 5 == 0:
        print(f"equation {k:2d}: residual {sol.residual_norm:.3e}, basis size {len(basis)}")

###############################################################################
# Compare the last iterate with a dense solve of the vectorized system.

dense = sum(np.kron(r.T, l) for l, r in terms)
x_ref = np.linalg.solve(dense, e.reshape(-1, order="F")).reshape((m, n), order="F")
print(f"relative distance to the exact solution: {frobenius_norm(x - x_ref) / frobenius_norm(x_ref):.3e}")
