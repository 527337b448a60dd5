import pytest

from rsgame.scenarios import (build_fip_game, build_nonfip_game, build_signaling_game,
                              build_two_vehicle_game)

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def nonfip():
    return build_nonfip_game()


@pytest.fixture(scope="session")
def fip():
    return build_fip_game()


@pytest.fixture(scope="session")
def two_vehicle():
    return build_two_vehicle_game()


@pytest.fixture(scope="session")
def signaling():
    return build_signaling_game()


@pytest.fixture(scope="session")
def idx(fip):
    """Strategy index by label, shared by the three-player games."""
    return {str(s): k for k, s in enumerate(fip.strategies[0])}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
