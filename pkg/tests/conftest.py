import numpy as np
import pytest

from greedycapon.array import ArraySpec, build_grid_deg

FOUR_DOAS_DEG = (-30.1, -20.02, -10.02, 3.02)
FOUR_OFFSETS_DB = (0.0, -1.0, -2.0, -5.0)

# pass/fail lines collected by test_acceptance.py, printed after the run
ACCEPTANCE_LINES = []


def random_hpd(rng, n, cond=10.0):
    """Random Hermitian positive-definite matrix with eigenvalues in [1, cond]."""
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    U, _ = np.linalg.qr(Z)
    w = rng.uniform(1.0, cond, n)
    M = (U * w) @ U.conj().T
    return 0.5 * (M + M.conj().T)


def random_steering(rng, n):
    """Unit-modulus vector (squared norm n) with random phases."""
    return np.exp(2j * np.pi * rng.uniform(size=n))


@pytest.fixture
def rng():
    return np.random.default_rng(20240720)


@pytest.fixture(scope="session")
def full_grid():
    spec = ArraySpec(20, 0.5)
    return spec, build_grid_deg(spec, -90, 90, 1801)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
