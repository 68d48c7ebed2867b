import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gelu_lab import _backend  # noqa: E402


@pytest.fixture(params=sorted(_backend.BACKENDS))
def backend(request):
    """Run a test once per available kernel backend."""
    prev = _backend.NAME
    _backend.use(request.param)
    yield request.param
    _backend.use(prev)


@pytest.fixture(scope="session")
def erf_grid():
    """10^4 points on [-6, 6] with 30-digit series references."""
    from oracles import erf_taylor

    xs = np.linspace(-6.0, 6.0, 10_000)
    return xs, np.array([erf_taylor(x) for x in xs])


ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(line)
