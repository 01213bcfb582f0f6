import math
import sys

import pytest

from zvl.grid import make_grid


@pytest.fixture(scope="session")
def ref_grid():
    """Reference resolution used by the acceptance thresholds."""
    return make_grid(64.0 * math.pi, 2048)


@pytest.fixture(scope="session")
def box30():
    return make_grid(30.0, 1024)


@pytest.fixture(scope="session")
def small_grid():
    return make_grid(math.pi, 64)


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion that ran."""
    mod = next((m for name, m in list(sys.modules.items()) if name.endswith("test_acceptance")), None)
    verdicts = getattr(mod, "VERDICTS", None)
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(verdicts):
        terminalreporter.write_line(verdicts[num])
