import os
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

from cosred import families  # noqa: E402
from cosred.phillips import CalcContext  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=30, derandomize=True)
settings.load_profile("default")

ACCEPTANCE_LINES = []

_CONTEXTS = {}


def context(name):
    """One calculus context per shipped family, shared across the session."""
    if name not in _CONTEXTS:
        _CONTEXTS[name] = CalcContext.from_matrix(families.from_spec(families.SHIPPED[name]))
    return _CONTEXTS[name]


@pytest.fixture(params=list(families.SHIPPED))
def family(request):
    return request.param, context(request.param)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
