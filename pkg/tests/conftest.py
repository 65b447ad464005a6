import numpy as np
import pytest
from scipy.linalg import expm

from anosov_cert.symspace import SpdPoint


def random_sl(rng: np.random.Generator, d: int, scale: float = 0.7) -> np.ndarray:
    """exp of a random trace-free matrix: an element of SL(d, R)."""
    x = rng.normal(scale=scale, size=(d, d))
    x -= np.trace(x) / d * np.eye(d)
    return expm(x)


def random_point(rng: np.random.Generator, d: int, scale: float = 0.7) -> SpdPoint:
    g = random_sl(rng, d, scale)
    return SpdPoint(g @ g.T)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
