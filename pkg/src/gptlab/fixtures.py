"""Small named state spaces used in examples and tests."""

import numpy as np

from .core import StateSpace, direct_sum, make_state_space, simplex
from .polygon import polygon_theory


def square() -> StateSpace:
    s = polygon_theory(4).space
    return make_state_space(s.extreme_points, s.unit, name="square", validate=False)


def pentagon() -> StateSpace:
    s = polygon_theory(5).space
    return make_state_space(s.extreme_points, s.unit, name="pentagon", validate=False)


def hexagon() -> StateSpace:
    s = polygon_theory(6).space
    return make_state_space(s.extreme_points, s.unit, name="hexagon", validate=False)


def prism() -> StateSpace:
    """Triangular prism: pure states 0-2 on top, 3-5 below them."""
    ang = 2 * np.pi * np.arange(3) / 3
    top = np.column_stack([np.cos(ang), np.sin(ang), np.ones(3), np.ones(3)])
    bottom = top * np.array([1, 1, -1, 1])
    return make_state_space(np.vstack([top, bottom]), [0, 0, 0, 1], name="prism")


def fixtures() -> dict:
    return {
        "simplex2": simplex(2),
        "simplex3": simplex(3),
        "simplex4": simplex(4),
        "square": square(),
        "pentagon": pentagon(),
        "hexagon": hexagon(),
        "prism": prism(),
        "pentagon+pentagon": direct_sum([pentagon(), pentagon()]),
    }
