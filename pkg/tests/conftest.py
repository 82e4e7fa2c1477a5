import numpy as np
import pytest
from fractions import Fraction

from clarkkit import (
    ArcInterval,
    BoundarySet,
    CirclePoint,
    RationalMap,
    construct_from_set,
    grid_from_function,
)


def turn(p, q=1):
    return CirclePoint(Fraction(p, q))


@pytest.fixture(scope="session")
def one_minus_cos():
    """w(theta) = 1 - cos theta on the default 2^12 grid."""
    return grid_from_function(lambda t: 1.0 - np.cos(t), 12)


@pytest.fixture(scope="session")
def map_z_over_z_minus_2():
    """f(z) = z/(z - 2), the closed-form oracle map."""
    return RationalMap((0.0, 1.0), (-2.0, 1.0))


@pytest.fixture(scope="session")
def single_point_construction():
    """Polynomial construction for E = {turn 0}: phi = (z-1)/sqrt(2)."""
    return construct_from_set(BoundarySet.from_points(["0/1"]), "polynomial", 12)


@pytest.fixture(scope="session")
def cantor_half_depth4():
    """Endpoint truncation: base arc [0, 1/2], ratio 1/3, depth 4 (32 points)."""
    base = ArcInterval(CirclePoint(Fraction(0)), Fraction(1, 2))
    return BoundarySet.cantor(base, Fraction(1, 3), 4)
