import os
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from sblcube.linalg import RationalMatrix

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("quick", deadline=None, max_examples=15)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def random_rational_matrix(rng, m, n=None, num=5, den=4, zero_prob=0.0):
    n = m if n is None else n
    entries = []
    for _ in range(m * n):
        if zero_prob and rng.random() < zero_prob:
            entries.append(Fraction(0))
        else:
            entries.append(Fraction(int(rng.integers(-num, num + 1)), int(rng.integers(1, den + 1))))
    return RationalMatrix(m, n, entries)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one PASS/FAIL line per acceptance criterion, shown after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
