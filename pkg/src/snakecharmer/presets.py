"""Built-in snakes and target curves used by the scene gallery and tests."""

from __future__ import annotations

import math

import numpy as np

from .bivalued import BivaluedConfig
from .configuration import Configuration, Partition, smooth_configuration
from .curves import CircleArc, Composite, Curve, Segment


def half_circle_configuration() -> Configuration:
    """Planar half-circle snake: z(s) = (sin s, cos s) on [0, pi], snout (2, 0)."""
    def evaluator(s):
        return np.column_stack([np.sin(s), np.cos(s)])
    return smooth_configuration(evaluator, math.pi)


def full_circle_configuration() -> Configuration:
    """Closed circular snake on [0, 2 pi]: snout at the origin, nomadic."""
    def evaluator(s):
        return np.column_stack([np.cos(s), np.sin(s)])
    return smooth_configuration(evaluator, 2.0 * math.pi)


def planar_circle_in_space() -> Configuration:
    """The full-circle snake embedded in R^3 (values in the equator of S^2)."""
    def evaluator(s):
        return np.column_stack([np.cos(s), np.sin(s), np.zeros_like(s)])
    return smooth_configuration(evaluator, 2.0 * math.pi)


def tetrahedral_configuration() -> Configuration:
    """Polygonal snake in R^3 along the four vertex directions of a regular
    tetrahedron, equal lengths: snout at the origin, spherical dimension 2."""
    from .configuration import polygonal_configuration
    verts = np.array([[1.0, 1.0, 1.0],
                      [1.0, -1.0, -1.0],
                      [-1.0, 1.0, -1.0],
                      [-1.0, -1.0, 1.0]]) / math.sqrt(3.0)
    return polygonal_configuration(list(verts), [1.0] * 4)


def tent_bivalued() -> BivaluedConfig:
    """Two-segment tent of total length 2 sqrt(2): values e^{+-i pi/4}, snout (2, 0)."""
    s2 = math.sqrt(2.0)
    c = math.sqrt(0.5)
    return BivaluedConfig(np.array([c, c]), np.array([c, -c]),
                          Partition((0.0, s2, 2.0 * s2)), (0, 1))


def figure_a_circle(turns: int = 1) -> Curve:
    """The small snout circle: center (2.1875, 0), radius 0.1875, positively
    oriented, starting at the half-circle snout (2, 0)."""
    return CircleArc(center=np.array([2.1875, 0.0]), radius=0.1875,
                     start_angle=math.pi, sweep=turns * 2.0 * math.pi)


def nonconnected_orbit_loop() -> Curve:
    """Half turn of the radius-2 circle followed by the straight return
    through the origin; a loop at (2, 0) that crosses the critical point."""
    arc = CircleArc(center=np.array([0.0, 0.0]), radius=2.0,
                    start_angle=0.0, sweep=math.pi)
    seg = Segment(np.array([-2.0, 0.0]), np.array([2.0, 0.0]))
    return Composite([arc, seg], durations=[0.5, 0.5])
