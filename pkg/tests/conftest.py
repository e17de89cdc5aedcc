import numpy as np
import pytest

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def record(criterion, passed, detail):
    ACCEPTANCE[criterion] = (bool(passed), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'} - {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def kron_matrix(terms, shape):
    """Dense ``sum_i kron(R_i^T, L_i)`` of ``X -> sum_i L_i X R_i`` acting
    on column-major ``vec(X)``; ``None`` is the identity."""
    m, n = shape
    total = None
    for left, right in terms:
        left = np.eye(m) if left is None else np.asarray(left)
        right = np.eye(n) if right is None else np.asarray(right)
        k = np.kron(right.T, left)
        total = k if total is None else total + k
    return total


def random_spd_terms(rng, m, n, k=2):
    """Terms of a self-adjoint positive definite Sylvester operator."""
    terms = []
    for _ in range(k):
        a = rng.standard_normal((m, m))
        b = rng.standard_normal((n, n))
        terms.append((a @ a.T + 0.1 * np.eye(m), b @ b.T + 0.1 * np.eye(n)))
    return terms
