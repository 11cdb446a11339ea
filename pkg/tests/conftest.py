import itertools

import pytest

from dtsp import DtspParams

SHAPES = (0.1, 0.5, 1.0, 2.0, 3.5, 10.0)
WIDTHS = (1, 2, 3, 4, 5, 7, 10, 16, 25, 50, 100, 137, 200)
LOWER_ENDS = (0, -13)

_acceptance_lines = []


def param_grid():
    """Widths 1..200, threshold at/near both ends and the middle, six shapes."""
    out = []
    for w, a, n in itertools.product(WIDTHS, LOWER_ENDS, SHAPES):
        b = a + w
        for m in sorted({a, a + 1, a + w // 2, b - 1, b}):
            if a <= m <= b:
                out.append(DtspParams(a, m, b, n))
    return out


GRID = param_grid()


@pytest.fixture(scope="session")
def grid():
    return GRID


@pytest.fixture
def record():
    """Collect one PASS/FAIL line per acceptance criterion for the summary."""

    def _record(name, ok, detail=""):
        _acceptance_lines.append(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else ""))
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
