import shutil
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import ACCEPTANCE_LINES, bundled_model  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "solver: needs an SMT solver executable")
    config.addinivalue_line("markers", "run_last: run after every other test")


def pytest_collection_modifyitems(config, items):
    if shutil.which("z3") is None:
        skip = pytest.mark.skip(reason="z3 not on PATH")
        for item in items:
            if "solver" in item.keywords:
                item.add_marker(skip)
    items.sort(key=lambda item: "run_last" in item.keywords)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def stopwatch():
    return bundled_model("stopwatch.sfi")


@pytest.fixture(scope="session")
def toggle():
    return bundled_model("toggle.sfi")


@pytest.fixture(scope="session")
def stopwatch_sts(stopwatch):
    from sfbmc.sts import build_sts
    return build_sts(stopwatch)


@pytest.fixture(scope="session")
def toggle_sts(toggle):
    from sfbmc.sts import build_sts
    return build_sts(toggle)
