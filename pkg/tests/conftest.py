import numpy as np
import pytest

from qent import smallmat

ACCEPTANCE_LINES = []


@pytest.fixture(params=smallmat.available_backends())
def backend(request):
    prev = smallmat.set_backend(request.param)
    yield request.param
    smallmat.set_backend(prev)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
