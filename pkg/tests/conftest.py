import numpy as np
import pytest

from yehfeynman.grid import make_grid
from yehfeynman.sheet import RngStream


@pytest.fixture
def grid64():
    return make_grid(1.0, 1.0, 64, 64)


@pytest.fixture
def grid8():
    return make_grid(1.0, 1.0, 8, 8)


@pytest.fixture
def gen():
    return np.random.default_rng(12345)


@pytest.fixture
def rng():
    return RngStream(2026, 1)


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
