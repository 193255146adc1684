import os
import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from twisted_growth import presets
from twisted_growth import ztlinalg as zl
from twisted_growth.nilgroup import Element

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.register_profile("thorough", deadline=None, max_examples=400)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


# ---------------------------------------------------------------------------
# shared strategies

small_ints = st.integers(min_value=-6, max_value=6)


def int_matrices(rows, cols, lo=-5, hi=5):
    return st.lists(st.lists(st.integers(lo, hi), min_size=cols, max_size=cols),
                    min_size=rows, max_size=rows)


@st.composite
def unimodular(draw, n, steps=6):
    """Product of random elementary integer matrices."""
    M = zl.identity(n)
    for _ in range(draw(st.integers(0, steps))):
        i = draw(st.integers(0, n - 1))
        j = draw(st.integers(0, n - 1))
        if i == j:
            M = [[-x if r == i else x for x in row] for r, row in enumerate(M)]
            continue
        c = draw(st.integers(-2, 2))
        M = [[row[t] + (c * row[j] if t == i else 0) for t in range(n)] for row in M]
    return M


def random_unimodular(rng: random.Random, n, steps=8):
    M = zl.identity(n)
    for _ in range(steps):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            M = [[-x if r == i else x for x in row] for r, row in enumerate(M)]
            continue
        c = rng.choice([-2, -1, 1, 2])
        M = [[row[t] + (c * row[j] if t == i else 0) for t in range(n)] for row in M]
    return M


@st.composite
def elements_of(draw, spec, bound=6):
    a = tuple(draw(st.integers(-bound, bound)) for _ in range(spec.k))
    c = draw(st.integers(-bound * 3, bound * 3))
    # land in G: fix the parity of the center coordinate
    if (c - spec.q(a)) % 2:
        c += 1
    return Element(a, c)


# ---------------------------------------------------------------------------
# fixtures

@pytest.fixture(scope="session")
def h3():
    return presets.h3()


@pytest.fixture(scope="session")
def h5():
    return presets.h5()


@pytest.fixture(scope="session")
def k3():
    return presets.central_k3()


# ---------------------------------------------------------------------------
# acceptance summary lines

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
