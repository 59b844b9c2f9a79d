from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from snakecharmer import presets
from snakecharmer.bivalued import to_configuration
from snakecharmer.configuration import (Partition,
                                        act, constant_configuration,
                                        distinct_value_count, endpoint,
                                        gram_defect, integrate_snake, is_lined,
                                        polygonal_configuration, sedentariness,
                                        smooth_configuration,
                                        spherical_dimension, sup_distance)
from snakecharmer.geometry import boost, identity, rotation_element
from snakecharmer.numerics import gauss_legendre_rule


def rot2(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def random_polygonal(rng, d=2, n=5):
    values = [v / np.linalg.norm(v) for v in rng.normal(size=(n, d))]
    lengths = rng.uniform(0.2, 1.0, size=n)
    return polygonal_configuration(values, lengths)


class TestPartition:
    def test_requires_zero_start(self):
        with pytest.raises(ValueError):
            Partition((0.5, 1.0))

    def test_requires_increasing(self):
        with pytest.raises(ValueError):
            Partition((0.0, 1.0, 1.0))


class TestEndpoint:
    def test_constant(self):
        z = constant_configuration([1.0, 0.0], 1.0)
        assert np.allclose(endpoint(z), [1.0, 0.0])

    def test_half_circle(self, half_circle):
        assert np.linalg.norm(endpoint(half_circle) - [2.0, 0.0]) < 1e-12

    def test_bivalued_example(self, tent):
        z = to_configuration(tent)
        assert np.linalg.norm(endpoint(z) - [2.0, 0.0]) < 1e-14

    @given(seed=st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_image_in_closed_ball(self, seed):
        z = random_polygonal(np.random.default_rng(seed))
        assert np.linalg.norm(endpoint(z)) <= z.length + 1e-12


class TestSnakePolyline:
    def test_straight_segment(self):
        z = constant_configuration([0.0, 1.0], 2.0)
        poly = integrate_snake(z, 5)
        assert np.allclose(poly.points[0], 0.0)
        assert np.allclose(poly.points[-1], [0.0, 2.0])

    def test_half_circle_traces_shifted_circle(self, half_circle):
        # S(s) = 1 - e^{-is}: coordinates (1 - cos s, sin s)
        poly = integrate_snake(half_circle, 65)
        expected = np.column_stack([1.0 - np.cos(poly.arclengths),
                                    np.sin(poly.arclengths)])
        assert np.max(np.abs(poly.points - expected)) < 1e-11

    def test_tent_apex(self, tent):
        z = to_configuration(tent)
        poly = integrate_snake(z, 9)
        apex = poly.points[np.argmax(poly.points[:, 1])]
        assert np.allclose(apex, [1.0, 1.0], atol=1e-12)
        assert np.allclose(poly.points[-1], [2.0, 0.0], atol=1e-12)

    def test_one_lipschitz(self, half_circle):
        poly = integrate_snake(half_circle, 33)
        steps = np.diff(poly.arclengths)
        chords = np.linalg.norm(np.diff(poly.points, axis=0), axis=1)
        assert np.all(chords <= steps + 1e-12)

    def test_last_equals_endpoint(self, half_circle):
        poly = integrate_snake(half_circle, 17)
        assert np.linalg.norm(poly.points[-1] - endpoint(half_circle)) < 1e-10


class TestGramDefect:
    def test_constant_is_diagonal(self):
        z = constant_configuration([1.0, 0.0, 0.0], 2.5)
        m = gram_defect(z)
        assert np.allclose(m, np.diag([0.0, 2.5, 2.5]))

    def test_half_circle_analytic(self, half_circle):
        # int sin^2 = int cos^2 = pi/2 and int sin cos = 0 on [0, pi]
        m = gram_defect(half_circle)
        assert np.max(np.abs(m - (math.pi / 2) * np.eye(2))) < 1e-10

    def test_half_circle_quadrature_oracle(self, half_circle):
        # brute-force composite GL on a fresh fine rule must agree to 1e-10
        nodes, weights = gauss_legendre_rule(0.0, math.pi, 64, 8)
        vals = np.column_stack([np.sin(nodes), np.cos(nodes)])
        gram = vals.T @ (weights[:, None] * vals)
        oracle = math.pi * np.eye(2) - gram
        assert np.max(np.abs(gram_defect(half_circle) - oracle)) < 1e-10

    def test_tent(self, tent):
        z = to_configuration(tent)
        s2 = math.sqrt(2.0)
        assert np.max(np.abs(gram_defect(z) - s2 * np.eye(2))) < 1e-14

    @given(seed=st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_psd_trace_and_bounds(self, seed):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(2, 4))
        z = random_polygonal(rng, d=d)
        m = gram_defect(z)
        assert np.allclose(m, m.T)
        eigs = np.linalg.eigvalsh(m)
        assert eigs[0] > -1e-12
        assert eigs[-1] <= z.length + 1e-12
        assert abs(np.trace(m) - (d - 1) * z.length) < 1e-10


class TestLined:
    def test_constant(self):
        assert is_lined(constant_configuration([0.0, 1.0], 1.0))

    def test_antipodal_pair(self):
        p = np.array([0.6, 0.8])
        z = polygonal_configuration([p, -p, p], [0.5, 1.0, 0.25])
        assert is_lined(z)

    def test_half_circle_not(self, half_circle):
        assert not is_lined(half_circle)

    def test_singularity_matches_lined(self, rng):
        # singular M exactly on lined families, nonsingular otherwise
        p = np.array([1.0, 0.0])
        lined = polygonal_configuration([p, -p], [1.0, 1.0])
        assert np.linalg.eigvalsh(gram_defect(lined))[0] < 1e-14
        for _ in range(10):
            z = random_polygonal(rng)
            if not is_lined(z):
                assert np.linalg.eigvalsh(gram_defect(z))[0] > 1e-8 * z.length


class TestSedentariness:
    def test_equal_intervals_distinct_values(self):
        vals = [rot2(k) @ np.array([1.0, 0.0]) for k in range(4)]
        z = polygonal_configuration(vals, [0.75] * 4)
        assert abs(sedentariness(z) - 0.75) < 1e-15

    def test_tent(self, tent):
        z = to_configuration(tent)
        assert abs(sedentariness(z) - math.sqrt(2.0)) < 1e-12

    def test_injective_is_nomadic(self, half_circle):
        assert sedentariness(half_circle) == 0.0

    def test_repeated_value_accumulates(self):
        p, q = np.array([1.0, 0.0]), np.array([0.0, 1.0])
        z = polygonal_configuration([p, q, p], [0.5, 1.0, 0.75])
        assert abs(sedentariness(z) - 1.25) < 1e-15


class TestSphericalDimension:
    def test_constant(self):
        assert spherical_dimension(constant_configuration([1.0, 0.0], 1.0)) == 0

    def test_bivalued(self, tent):
        assert spherical_dimension(to_configuration(tent)) == 0

    def test_half_circle(self, half_circle):
        assert spherical_dimension(half_circle) == 1

    def test_planar_values_in_space(self):
        z = presets.planar_circle_in_space()
        assert spherical_dimension(z) == 1

    def test_generic_space(self):
        assert spherical_dimension(presets.tetrahedral_configuration()) == 2


class TestAction:
    def test_identity(self, half_circle):
        z = act(identity(2), half_circle)
        assert sup_distance(z, half_circle) < 1e-15

    def test_action_law(self, rng, half_circle):
        g = boost(rng.normal(size=2), 0.7)
        h = boost(rng.normal(size=2), -0.4) @ rotation_element(rot2(0.9))
        lhs = act(g, act(h, half_circle))
        rhs = act(g @ h, half_circle)
        assert sup_distance(lhs, rhs) < 1e-12

    def test_preserves_sedentariness_exactly(self, tent, rng):
        z = to_configuration(tent)
        g = boost(rng.normal(size=2), 1.0)
        moved = act(g, z)
        assert sedentariness(moved) == sedentariness(z)
        assert spherical_dimension(moved) == spherical_dimension(z)

    def test_rotation_equivariance_of_endpoint(self, half_circle, rng):
        rot = rot2(rng.uniform(0, 2 * math.pi))
        moved = act(rotation_element(rot), half_circle)
        assert np.linalg.norm(endpoint(moved) - rot @ endpoint(half_circle)) < 1e-10

    def test_periodic_pattern_preserved(self, rng):
        p, q = np.array([1.0, 0.0]), np.array([0.0, 1.0])
        z = polygonal_configuration([p, q, p, q], [0.5, 0.5, 0.5, 0.5])
        g = boost(rng.normal(size=2), 0.8)
        moved = act(g, z)
        v = [piece.value for piece in moved.pieces]
        assert np.array_equal(v[0], v[2]) and np.array_equal(v[1], v[3])

    def test_dimension_mismatch(self, half_circle):
        with pytest.raises(ValueError):
            act(identity(3), half_circle)


class TestSupDistance:
    def test_zero_on_self(self, half_circle):
        assert sup_distance(half_circle, half_circle) == 0.0

    def test_constant_configs(self):
        a = constant_configuration([1.0, 0.0], 1.0)
        b = constant_configuration([0.0, 1.0], 1.0)
        assert abs(sup_distance(a, b) - math.sqrt(2.0)) < 1e-15

    @given(seed=st.integers(0, 2**32 - 1))
    @settings(max_examples=20, deadline=None)
    def test_symmetric(self, seed):
        rng = np.random.default_rng(seed)
        vals1 = [v / np.linalg.norm(v) for v in rng.normal(size=(3, 2))]
        vals2 = [v / np.linalg.norm(v) for v in rng.normal(size=(3, 2))]
        lengths = [0.4, 0.8, 0.3]
        a = polygonal_configuration(vals1, lengths)
        b = polygonal_configuration(vals2, lengths)
        assert sup_distance(a, b) == sup_distance(b, a)

    def test_rejects_mismatched_partitions(self):
        a = constant_configuration([1.0, 0.0], 1.0)
        b = constant_configuration([1.0, 0.0], 2.0)
        with pytest.raises(ValueError):
            sup_distance(a, b)


class TestValueCounting:
    def test_counts(self, tent, half_circle):
        assert distinct_value_count(to_configuration(tent)) == 2
        assert distinct_value_count(half_circle) >= 3
        assert distinct_value_count(constant_configuration([1, 0], 1.0)) == 1

    def test_smooth_configuration_unit_values(self):
        z = smooth_configuration(
            lambda s: np.column_stack([np.cos(2 * s), np.sin(2 * s)]), 1.5)
        vals = z.evaluate(np.linspace(0, 1.5, 40))
        assert np.max(np.abs(np.linalg.norm(vals, axis=1) - 1.0)) < 1e-12
