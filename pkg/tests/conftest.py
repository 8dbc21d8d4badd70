import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from qhyp import spgroup as sp

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=2, max_value=3)


def quaternions(lo=-10.0, hi=10.0):
    comp = st.floats(lo, hi, allow_nan=False, allow_infinity=False)
    return st.tuples(comp, comp, comp, comp).map(np.array)


def nonzero_quaternions():
    return quaternions(-5, 5).filter(lambda q: np.linalg.norm(q) > 1e-2)


def contraction_pair():
    """g diagonal with M_g = 0.05 and h close to the identity."""
    g = sp.loxodromic_diagonal(2, 2 * math.asinh(0.025))
    h = (sp.translation(2, [[0.03, 0.01, 0, 0.02]], [0, 0.02, 0, 0.01]) @ sp.swap(2)
         @ sp.translation(2, [[0.02, 0, 0.01, 0]], [0, 0, 0.03, 0]) @ sp.swap(2))
    return g, h


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LOG = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion."""
    log = request.config.stash.setdefault(ACCEPTANCE_LOG, [])

    def record(number, ok, detail):
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        log.append((number, line))
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(ACCEPTANCE_LOG, [])
    if log:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(log):
            terminalreporter.write_line(line)
