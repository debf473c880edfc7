import json
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from immersion_kernel.families import builtin  # noqa: E402

METRICS = {}


@pytest.fixture(scope="session")
def theta2():
    return builtin("theta2")


@pytest.fixture(scope="session")
def theta3():
    return builtin("theta3")


@pytest.fixture(scope="session")
def k4fam():
    return builtin("k4")


@pytest.fixture(scope="session")
def metrics():
    """Worst ratios and timings recorded by the acceptance suite."""
    return METRICS


def pytest_terminal_summary(terminalreporter):
    if not METRICS:
        return
    terminalreporter.write_sep("-", "acceptance metrics")
    for key in sorted(METRICS):
        terminalreporter.write_line(f"{key}: {json.dumps(METRICS[key], sort_keys=True)}")
