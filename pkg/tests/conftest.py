import sys

import numpy as np
import pytest
from hypothesis import strategies as st

from flatsing.series import LaurentSeries

FIXTURES = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def complex_st(lo=-2.0, hi=2.0):
    f = st.floats(lo, hi, allow_nan=False, allow_infinity=False)
    return st.builds(complex, f, f)


@st.composite
def series_st(draw, min_val=-2, max_val=2, min_len=1, max_len=6, order=12, unit=False):
    """Random truncated series with a nonzero leading coefficient."""
    val = 0 if unit else draw(st.integers(min_val, max_val))
    c = draw(st.lists(complex_st(), min_size=min_len, max_size=max_len))
    lead = draw(complex_st(0.5, 2.0))
    return LaurentSeries([lead] + c, val, val + order)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[key])
