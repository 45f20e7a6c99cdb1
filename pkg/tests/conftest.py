import numpy as np
import pytest
from hypothesis import settings, strategies as st

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

# acceptance tests append (name, passed, detail) here for the summary
ACCEPTANCE_LINES = []

finite = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)
complex_numbers = st.builds(complex, finite, finite)


def complex_arrays(n):
    return st.lists(complex_numbers, min_size=n, max_size=n).map(
        lambda v: np.array(v, dtype=complex)
    )


def complex_matrices(n):
    return st.lists(complex_numbers, min_size=n * n, max_size=n * n).map(
        lambda v: np.array(v, dtype=complex).reshape(n, n)
    )


def unit_pairs():
    return complex_arrays(2).filter(lambda v: np.linalg.norm(v) > 1e-3).map(
        lambda v: v / np.linalg.norm(v)
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_LINES:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
