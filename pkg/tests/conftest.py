import os

import numpy as np
import pytest

# keep experiment runs in-process unless a test asks for workers explicitly
os.environ.setdefault("EIGENPATH_THREADS", "1")

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
