import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from hypslit.geometry import Vec2
from hypslit.surface import builtin, random_chain

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

rationals = st.fractions(min_value=-8, max_value=8, max_denominator=6)
nonzero_vecs = st.tuples(rationals, rationals).map(lambda p: Vec2(*p)).filter(lambda v: not v.is_zero())


@st.composite
def chains(draw, k=None):
    """(surface, slit) from a seeded random chain; k parallelograms."""
    if k is None:
        k = draw(st.sampled_from([2, 3, 5]))
    seed = draw(st.integers(0, 10_000))
    return random_chain(random.Random(seed), k)


@pytest.fixture(scope="session")
def slit_torus():
    return builtin("slit-torus")


@pytest.fixture(scope="session")
def hyp2():
    return builtin("hyp2")


@pytest.fixture(scope="session")
def hyp4():
    return builtin("hyp4")


def F(x):
    return Fraction(x)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda x: int(x.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
