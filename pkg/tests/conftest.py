import math

import pytest

from kepler_exact.conic import ConicElements
from kepler_exact.core_types import PhysicalParams, SchemeParams
from kepler_exact.discrete import seed_from_conic


@pytest.fixture
def unit():
    return PhysicalParams(m=1.0, k=1.0)


@pytest.fixture
def sixth():
    """delta = pi/6, alpha = 1: six points per revolution."""
    return SchemeParams(alpha=1.0, delta=math.pi / 6)


@pytest.fixture
def circular_seed(unit, sixth):
    return seed_from_conic(ConicElements.from_shape(1.0, 0.0), 0.0, sixth, unit)


@pytest.fixture
def elliptic_seed(unit, sixth):
    return seed_from_conic(ConicElements.from_shape(1.0, 0.5), 0.0, sixth, unit)


_VERDICTS = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    """Record one pass/fail line per acceptance criterion and return the flag."""
    lines = request.config.stash.setdefault(_VERDICTS, [])

    def record(label, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
