import random

import pytest

from hgbs.field import PrimeField
from hgbs.keying import DegreePolicy, assign_keying_material
from hgbs.topology import make_grid


@pytest.fixture(scope="session")
def f7():
    return PrimeField(7)


@pytest.fixture(scope="session")
def big():
    return PrimeField()


@pytest.fixture
def rng():
    return random.Random(20240611)


def build(n, k, kind="flat", alpha=0.6, seed=7):
    grid = make_grid(n, k)
    return assign_keying_material(grid, DegreePolicy.from_alpha(kind, alpha, grid.m), PrimeField(), seed)


@pytest.fixture(scope="session")
def dep_3_2():
    return build(3, 2)


@pytest.fixture(scope="session")
def dep_small():
    """n=2, k=1, alpha=0.5: t0 = 2, N = 8."""
    return build(2, 1, alpha=0.5)
