import pytest

from shiptracks.engine import run
from shiptracks.presets import paper_fig3


@pytest.fixture(scope="session")
def fig3_run():
    cfg, wind, boats = paper_fig3(seed=42)
    return run(cfg, wind, boats)


CRITERIA: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for k in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[k])
