import numpy as np
import pytest

# Acceptance lines collected by tests/test_acceptance.py and echoed in the
# terminal summary so they survive output capture.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)


def fd_levi_civita(metric, x, h=1e-5):
    """Levi-Civita connection from a metric callable by five-point central
    differences; deliberately independent of the package's FD helpers."""
    x = np.asarray(x, dtype=float)
    n = x.size
    g = metric(x)
    ginv = np.linalg.inv(g)
    dg = np.empty((n, n, n))  # dg[k, i, j] = d_k g_ij
    for k in range(n):
        e = np.zeros(n)
        e[k] = h
        dg[k] = (-metric(x + 2 * e) + 8 * metric(x + e) - 8 * metric(x - e) + metric(x - 2 * e)) / (12 * h)
    gamma = np.empty((n, n, n))
    for c in range(n):
        for a in range(n):
            for b in range(n):
                gamma[c, a, b] = 0.5 * sum(
                    ginv[c, d] * (dg[a, d, b] + dg[b, d, a] - dg[d, a, b]) for d in range(n)
                )
    return gamma


def random_points(rng, n, dim, scale_index, lo=0.3, hi=3.0, spread=3.0):
    pts = rng.uniform(-spread, spread, size=(n, dim))
    pts[:, scale_index] = rng.uniform(lo, hi, size=n)
    return pts


@pytest.fixture
def rng():
    return np.random.default_rng(20260915)
