"""Shared fixtures."""

import math

import pytest
from hypothesis import settings

from qineq.qlinalg import QMatrix, QVector, diag
from qineq.quaternion import J

settings.register_profile("qineq", deadline=None, max_examples=50)
settings.load_profile("qineq")


@pytest.fixture
def diag14() -> QMatrix:
    return diag([1.0, 4.0])


@pytest.fixture
def x_half() -> QVector:
    """(1, 1)/sqrt(2)."""
    s = 1.0 / math.sqrt(2.0)
    return QVector(entries=[[s, 0, 0, 0], [s, 0, 0, 0]])


@pytest.fixture
def t_2j() -> QMatrix:
    """[[2, j], [-j, 2]], selfadjoint with spectrum {1, 3}."""
    return QMatrix.from_quaternions([[2.0, J], [-J, 2.0]])

