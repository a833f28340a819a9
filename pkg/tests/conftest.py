import numpy as np
import pytest


def sweep_oracle(prior, theta):
    """Hand-indexed reversed sweep over 1-based lags, padding both ends with 0."""
    n = len(prior)
    w = [0.0] + [float(v) for v in prior] + [0.0]
    p = [0.0] * (n + 2)
    c = theta / 3.0
    i = n
    while i >= 1:
        p[i] = w[i] + c * (w[i - 1] + w[i] + p[i + 1])
        i -= 1
    return p[1:n + 1]


def fresh_oracle(prior, theta):
    n = len(prior)
    w = [0.0] + [float(v) for v in prior] + [0.0]
    c = theta / 3.0
    return [w[i] + c * (w[i - 1] + w[i] + w[i + 1]) for i in range(1, n + 1)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def grid_report():
    """All families over the default noise grid, 50 trials per cell."""
    from sdm.metrics import DEFAULT_SIGMA_GRID, run_benchmark

    return run_benchmark(sigma_grid=DEFAULT_SIGMA_GRID, trials=50, seed_base=0)


ACCEPTANCE_LINES = []


@pytest.fixture
def verdict():
    """Record a one-line PASS/FAIL result for an acceptance criterion."""

    def record(name, ok, detail):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
