import numpy as np
import pytest

from funcsig.funcspace import FunctionalSample, Grid


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def grid():
    return Grid(101)


@pytest.fixture
def random_sample(rng, grid):
    return FunctionalSample(grid, rng.standard_normal((7, grid.m)))


_ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one pass/fail summary line per acceptance criterion."""

    def _report(label, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
