import numpy as np
import pytest

ACCEPTANCE_LINES: list[str] = []


def record(criterion: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def random_ball_points(rng, count, n, radius=1.0):
    """Uniform samples from the open ball of the given radius in C^n."""
    g = rng.normal(size=(count, n)) + 1j * rng.normal(size=(count, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = radius * rng.random(count) ** (1.0 / (2 * n))
    return g * r[:, None]


def random_polydisk_points(rng, count, n, radius=1.0):
    rad = radius * np.sqrt(rng.random((count, n)))
    return rad * np.exp(2j * np.pi * rng.random((count, n)))
