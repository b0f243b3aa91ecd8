import random

import pytest

from mvcheck import data_path, load_property, load_system
from mvcheck.lattice import builtin_lattice

# filled by test_acceptance.py, printed at the end of the run
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: (len(k), k)):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def l3():
    return builtin_lattice("l3")


@pytest.fixture(scope="session")
def button():
    """The Button example: crisp system, mv-labeled system and the three properties."""
    def load(name):
        return data_path("button", name)

    ts = load_system(load("button.ts.json"))
    return {
        "ts": ts,
        "ts_mv": load_system(load("button-mv.ts.json")),
        "P": load_property(load("p-regsafe.prop.json")),
        "P1": load_property(load("pprime.prop.json")),
        "P2": load_property(load("pdoubleprime.prop.json")),
    }
