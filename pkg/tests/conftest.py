import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

_ACCEPTANCE = []


def record_acceptance(number, title, passed, detail=""):
    """Remember a criterion's verdict; printed now and again in the terminal summary."""
    line = f"ACCEPTANCE {number:>2} {'PASS' if passed else 'FAIL'}  {title}"
    if detail:
        line += f"  [{detail}]"
    print(line)
    _ACCEPTANCE.append((number, line))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_ACCEPTANCE):
        terminalreporter.write_line(line)


@pytest.fixture
def gen():
    return np.random.default_rng(12345)
