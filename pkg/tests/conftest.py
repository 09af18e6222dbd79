from __future__ import annotations

import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from confhoch import library  # noqa: E402

# sympy-backed oracles have uneven timings; correctness, not speed, is under test here
settings.register_profile("repo", deadline=None, derandomize=True)
settings.load_profile("repo")


@pytest.fixture(scope="session")
def e1():
    return library.e1()


@pytest.fixture(scope="session")
def m2():
    return library.cur_m2()


@pytest.fixture(scope="session")
def twisted():
    return library.twisted_qxq()


@pytest.fixture(scope="session")
def dual():
    return library.cur_dual()


@pytest.fixture(scope="session")
def qxq():
    return library.cur_qxq()


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    lines = getattr(acceptance, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
