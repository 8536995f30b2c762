import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from arithdyn.dynamics import PolyMap
from arithdyn.fields import Place

rationals = st.builds(
    Fraction,
    st.integers(min_value=-(10**6), max_value=10**6),
    st.integers(min_value=1, max_value=10**6),
)
nonzero_rationals = rationals.filter(lambda q: q != 0)

P3 = Place.prime(3)


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def f2559():
    """z^2 - 25/9, bad at 3 with two level-1 components."""
    return PolyMap.of([Fraction(-25, 9), 0, 1])


def rand_q(rng, size=10**4):
    return Fraction(rng.randint(-size, size), rng.randint(1, size))


def rand_nonzero_q(rng, size=10**4):
    while True:
        q = rand_q(rng, size)
        if q:
            return q
