import pytest

from qheat.qcore import QParams
from qheat.spectral import find_eigenvalues


@pytest.fixture(scope="session")
def ctx():
    return QParams()


@pytest.fixture(scope="session")
def spec(ctx):
    return find_eigenvalues(ctx, 6)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
