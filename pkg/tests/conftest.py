from fractions import Fraction

import pytest
from hypothesis import strategies as st

from bargain.core import Collection, Point

F = Fraction


def coll(*pts, weights=None) -> Collection:
    return Collection.of(*[(F(a), F(b)) for a, b in pts], weights=weights)


EXAMPLE1 = coll((1, 0), (0, 1), ("99/100", "99/100"), ("2/3", "2/3"))
EXAMPLE2 = coll((1, 1), ("98/100", 0), (0, "98/100"))


@pytest.fixture
def example1():
    return EXAMPLE1


@pytest.fixture
def example2():
    return EXAMPLE2


grid_value = st.integers(0, 8).map(lambda c: F(c, 8))
grid_point = st.tuples(grid_value, grid_value).map(lambda t: Point(*t))


def grid_collections(min_n=1, max_n=6):
    return st.lists(grid_point, min_size=min_n, max_size=max_n).map(lambda ps: Collection(tuple(ps)))


def symmetric_collections(max_half=4):
    return st.lists(grid_point, min_size=1, max_size=max_half).map(
        lambda ps: Collection(tuple(ps) + tuple(p.swapped() for p in ps))
    )
