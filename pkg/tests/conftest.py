import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from companionlaw import systems
from companionlaw.grid import Field, make_grid

settings.register_profile("repo", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@pytest.fixture(scope="session")
def burgers():
    return systems.register_system("burgers")


@pytest.fixture(scope="session")
def comp_euler_1d():
    return systems.register_system("comp-euler", k=1, pressure_law=systems.PolytropicPressure(1.0, 2.0))


@pytest.fixture(scope="session")
def euler2():
    return systems.register_system("incomp-euler", k=2)


def line_field(n, fn, periodic=True):
    g = make_grid(1, [n], periodic=[periodic])
    return Field(g, fn(g.coords(0))[None], ("u",))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
