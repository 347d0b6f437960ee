import pytest

from galmod.delpezzo import picard_preset, weyl_group
from galmod.lattice import GLattice

# filled by test_acceptance, printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def dp5_group():
    return weyl_group(picard_preset(5))


@pytest.fixture(scope="session")
def dp5_lattice(dp5_group):
    return GLattice.natural(dp5_group, name="Pic(dP5)")


@pytest.fixture(scope="session")
def dp6_group():
    return weyl_group(picard_preset(6))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
