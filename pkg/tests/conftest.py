import pytest

from spinstar import CentralState, ModelParams


@pytest.fixture
def small_params():
    return ModelParams(omega0=1.0, omega=1.0, g=0.1, n_spins=4, beta=0.5)


INITS = {
    "up": CentralState.up,
    "down": CentralState.down,
    "plus": CentralState.plus,
}


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)
