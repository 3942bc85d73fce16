import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from normengine import RunConfig, fixture_paths, run_pipeline  # noqa: E402


def fixture(name):
    for p in fixture_paths():
        if p.name == name:
            return p
    raise KeyError(name)


@pytest.fixture(scope="session")
def worked_run():
    return run_pipeline(RunConfig(facts=str(fixture("worked_example.nfx")), trace=True))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
