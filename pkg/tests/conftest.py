import os

import hypothesis
import numpy as np
import pytest

from timecib.core import CrossImpactMatrix, Framework
from timecib.generate import random_cim  # noqa: F401

hypothesis.settings.register_profile("ci", max_examples=60, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))

M = [[3, -3], [-3, 3]]
A = [[-3, 3], [3, -3]]
RULES = ["global", "incremental", "local", "adiabatic"]
MODELS = os.path.join(os.path.dirname(__file__), os.pardir, "models")


def mutual2():
    return CrossImpactMatrix(Framework.from_sizes([2, 2]), {(1, 2): M, (2, 1): M})


def anti2():
    return CrossImpactMatrix(Framework.from_sizes([2, 2]), {(1, 2): A, (2, 1): A})


def agg3():
    return CrossImpactMatrix(
        Framework.from_sizes([2, 2, 2]), {(1, 2): M, (2, 1): M, (2, 3): M, (3, 2): M}
    )


def model_path(name):
    return os.path.join(MODELS, name)


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}")
