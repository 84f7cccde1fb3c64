import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from hypothesis import settings  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None, derandomize=True)
settings.load_profile("default")


@pytest.fixture
def catalog():
    from eikonal_hl.field import make_field

    return make_field


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
