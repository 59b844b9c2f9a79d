from __future__ import annotations

import math

import numpy as np
import pytest

from snakecharmer import presets
from snakecharmer.bivalued import to_configuration
from snakecharmer.configuration import (act, endpoint, gram_defect,
                                        polygonal_configuration, sedentariness,
                                        spherical_dimension, sup_distance)
from snakecharmer.curves import (CallableCurve, CircleArc, ConstantCurve,
                                 Reparameterized, Segment, derivative_mismatch)
from snakecharmer.geometry import boost, rotation_element
from snakecharmer.solver import (LiftOptions, LiftPreconditionError, LiftResult,
                                 check_horizontal, holonomy, horizontal_lift,
                                 iterated_holonomy, lift_su11,
                                 linmap_matrix_check, parallel_transport_to,
                                 rotation_generating_word, smooth_loop_from_word)


def gradient_flow_curve(z0, v):
    """gamma(t) = f(boost(v, t) . z0) with its analytic derivative M(z_t) v."""
    v = np.asarray(v, dtype=float)

    def point(t):
        return endpoint(act(boost(v, t), z0))

    def velocity(t):
        return gram_defect(act(boost(v, t), z0)) @ v

    return CallableCurve(point, velocity, dim=z0.dim, smoothness="Cinf")


class TestConstantCurve:
    def test_lift_is_constant(self, half_circle):
        curve = ConstantCurve(endpoint(half_circle))
        res = horizontal_lift(half_circle, curve, LiftOptions(step=1e-2))
        assert res.status == "complete"
        assert np.allclose(res.group_path[-1].matrix, np.eye(3))
        assert sup_distance(res.final_config, half_circle) == 0.0

    def test_su11_variant(self, half_circle):
        curve = ConstantCurve(endpoint(half_circle))
        res = lift_su11(half_circle, curve, LiftOptions(step=1e-2))
        assert res.group_path[-1].a == 1.0 + 0.0j
        assert res.group_path[-1].b == 0.0 + 0.0j


@pytest.fixture(scope="module")
def lifted(half_circle):
    return lift_su11(half_circle, presets.figure_a_circle(), LiftOptions(step=1e-3))


class TestFigureA:
    def test_complete_with_tiny_defect(self, lifted):
        assert lifted.status == "complete"
        assert float(np.max(lifted.defects)) < 1e-6

    def test_snake_moved(self, half_circle, lifted):
        # holonomy: the loop closes but the snake does not
        assert sup_distance(lifted.final_config, half_circle) > 10 * 1e-6

    def test_snake_leans_left(self, half_circle, lifted):
        # the apex of the lifted snake tilts toward negative x
        from snakecharmer.configuration import integrate_snake
        before = integrate_snake(half_circle, 65)
        after = integrate_snake(lifted.final_config, 65)
        apex_before = before.points[np.argmax(before.points[:, 1])]
        apex_after = after.points[np.argmax(after.points[:, 1])]
        assert apex_after[0] < apex_before[0]

    def test_agreement_between_models(self, half_circle, lifted):
        res = horizontal_lift(half_circle, presets.figure_a_circle(),
                              LiftOptions(step=1e-3))
        assert sup_distance(res.final_config, lifted.final_config) < 1e-8


class TestGradientFlow:
    def test_lift_reproduces_boost_flow(self, half_circle):
        v = np.array([0.3, 0.4])
        curve = gradient_flow_curve(half_circle, v)
        assert derivative_mismatch(curve) < 1e-6
        res = horizontal_lift(half_circle, curve, LiftOptions(step=1e-3))
        for t in (0.25, 0.5, 1.0):
            i = int(round(t / 1e-3))
            expected = act(boost(v, res.times[i]), half_circle)
            assert sup_distance(res.config_path[i], expected) < 1e-6

    def test_monotone_height(self, half_circle):
        # <f(z_t), v> is nondecreasing along the flow
        v = np.array([0.5, -0.2])
        heights = [endpoint(act(boost(v, t), half_circle)) @ v
                   for t in np.linspace(0, 2, 21)]
        assert np.all(np.diff(heights) > 0)


class TestModelAgreement:
    def test_su11_matches_lorentz_on_random_curves(self, half_circle, rng):
        for _ in range(10):
            c = rng.normal(size=2) * 0.15
            a = endpoint(half_circle)
            curve = CircleArc(center=a - c, radius=float(np.linalg.norm(c)),
                              start_angle=float(math.atan2(c[1], c[0])),
                              sweep=rng.uniform(-2.0, 2.0))
            assert np.linalg.norm(curve.point(0.0) - a) < 1e-12
            opts = LiftOptions(step=2e-3)
            r1 = lift_su11(half_circle, curve, opts)
            r2 = horizontal_lift(half_circle, curve, opts)
            assert sup_distance(r1.final_config, r2.final_config) < 1e-8


class TestPreconditions:
    def test_wrong_start_rejected(self, half_circle):
        with pytest.raises(LiftPreconditionError):
            horizontal_lift(half_circle, ConstantCurve(np.array([0.0, 0.0])))

    def test_bivalued_rejected_by_group_ode(self, tent):
        z = to_configuration(tent)
        with pytest.raises(LiftPreconditionError):
            horizontal_lift(z, ConstantCurve(np.array([2.0, 0.0])))

    def test_ball_enforcement(self, half_circle):
        wild = CircleArc(center=np.array([2.8, 0.0]), radius=0.8)
        with pytest.raises(LiftPreconditionError, match="admissible open ball"):
            horizontal_lift(half_circle, wild)

    def test_near_lined_stop(self):
        # drag a three-valued polygonal snake toward full extension: the
        # configuration approaches a lined one and M degenerates
        z = polygonal_configuration(
            [[1.0, 0.0], [0.0, 1.0], [math.cos(0.2), math.sin(0.2)]],
            [0.9, 0.2, 0.9])
        b = endpoint(z)
        target = 1.995 * z.length * b / np.linalg.norm(b)
        seg = Segment(b, target)
        res = horizontal_lift(z, seg, LiftOptions(
            step=1e-3, enforce_sedentary_ball=False, sigma_min=1e-3))
        assert res.status == "stopped_near_lined"
        assert res.stop_time is not None


class TestOutOfBall:
    def test_target_leaving_the_ball_stops_the_run(self, half_circle):
        # with the lined guard disabled the run halts when the target
        # reaches the boundary of the length ball
        seg = Segment(endpoint(half_circle), np.array([3.5, 0.0]))
        res = horizontal_lift(half_circle, seg, LiftOptions(
            step=1e-3, enforce_sedentary_ball=False, sigma_min=1e-12))
        assert res.status == "stopped_out_of_ball"
        assert res.stop_time is not None
        assert np.linalg.norm(seg.point(res.stop_time)) < half_circle.length


class TestHolonomy:
    def test_constant_loop(self, half_circle):
        z1 = holonomy(half_circle, ConstantCurve(endpoint(half_circle)))
        assert sup_distance(z1, half_circle) == 0.0

    def test_requires_closed(self, half_circle):
        seg = Segment(endpoint(half_circle), np.array([1.0, 0.0]))
        with pytest.raises(LiftPreconditionError):
            holonomy(half_circle, seg)

    def test_bivalued_delegation(self, tent):
        z0 = to_configuration(tent)
        z1 = holonomy(z0, presets.nonconnected_orbit_loop())
        conj = polygonal_configuration(
            [[tent.p[0], -tent.p[1]], [tent.q[0], -tent.q[1]]],
            [tent.length_p, tent.length_q])
        assert sup_distance(z1, conj) < 1e-8

    def test_endpoint_preserved(self, half_circle):
        z1 = holonomy(half_circle, presets.figure_a_circle(), LiftOptions(step=2e-3))
        assert np.linalg.norm(endpoint(z1) - endpoint(half_circle)) < 1e-6


class TestParallelTransport:
    def test_noop_target(self, half_circle):
        z = parallel_transport_to(half_circle, endpoint(half_circle))
        assert sup_distance(z, half_circle) < 1e-12

    def test_round_trip(self, half_circle):
        opts = LiftOptions(step=1e-3)
        there = parallel_transport_to(half_circle, np.zeros(2), opts)
        assert np.linalg.norm(endpoint(there)) < 1e-6
        back = parallel_transport_to(there, endpoint(half_circle), opts)
        assert sup_distance(back, half_circle) < 2 * 1e-6

    def test_reaches_target(self, rng):
        for _ in range(3):
            z = presets.full_circle_configuration()
            target = rng.uniform(-0.8, 0.8, size=2)
            moved = parallel_transport_to(z, target, LiftOptions(step=1e-3))
            assert np.linalg.norm(endpoint(moved) - target) < 1e-6

    def test_ball_violation_rejected(self, tent):
        z = to_configuration(tent)
        with pytest.raises(LiftPreconditionError):
            parallel_transport_to(z, np.zeros(2))


class TestCheckHorizontal:
    def test_constant_lift_residual_zero(self, half_circle):
        res = horizontal_lift(half_circle, ConstantCurve(endpoint(half_circle)),
                              LiftOptions(step=1e-2))
        assert check_horizontal(res) == 0.0

    def test_figure_a_residual_small_and_quadratic(self, half_circle):
        r1 = lift_su11(half_circle, presets.figure_a_circle(), LiftOptions(step=1e-3))
        res1 = check_horizontal(r1)
        assert res1 < 1e-4
        r2 = lift_su11(half_circle, presets.figure_a_circle(), LiftOptions(step=5e-4))
        res2 = check_horizontal(r2)
        assert res2 < res1 / 2.5  # second-order decay of the FD residual

    def test_vertical_perturbation_flagged(self, half_circle):
        # replace the path by rigid rotations: velocity A z is not of the
        # horizontal form u - <z, u> z
        rots = [rotation_element(np.array([[math.cos(a), -math.sin(a)],
                                           [math.sin(a), math.cos(a)]]))
                for a in (0.0, 0.02, 0.04, 0.06)]
        configs = [act(r, half_circle) for r in rots]
        fake = LiftResult(times=np.array([0.0, 0.01, 0.02, 0.03]),
                          group_path=rots, config_path=configs,
                          defects=np.zeros(4), status="complete")
        assert check_horizontal(fake) > 0.1


class TestLinmapCheck:
    def test_half_circle_at_identity(self, half_circle):
        from snakecharmer.geometry import identity
        err = linmap_matrix_check(half_circle, identity(2))
        assert err < 1e-6

    def test_random_trials(self, rng):
        for d in (2, 3):
            for _ in range(5):
                vals = [v / np.linalg.norm(v) for v in rng.normal(size=(5, d))]
                z = polygonal_configuration(vals, rng.uniform(0.3, 1.0, size=5))
                g = boost(rng.normal(size=d) * 0.6, 1.0)
                assert linmap_matrix_check(z, g) < 1e-5

    def test_lined_rejected(self):
        z = polygonal_configuration([[1.0, 0.0], [-1.0, 0.0]], [1.0, 1.0])
        from snakecharmer.geometry import identity
        with pytest.raises(LiftPreconditionError):
            linmap_matrix_check(z, identity(2))


class TestWordLoops:
    def test_empty_word(self, half_circle):
        data = smooth_loop_from_word([], half_circle)
        assert data.curve.is_closed(0.0)
        assert np.allclose(data.final_element.matrix, np.eye(3))

    def test_single_boost_monotone(self, half_circle):
        v = np.array([0.4, 0.1])
        data = smooth_loop_from_word([(v, 1.0)], half_circle)
        assert derivative_mismatch(data.curve) < 1e-6
        heights = [data.curve.point(t) @ v for t in np.linspace(0, 1, 33)]
        assert np.all(np.diff(heights) > -1e-12)

    def test_rotation_word_closes_and_matches_holonomy(self, full_circle):
        word, rho = rotation_generating_word(np.array([0.5, 0.1]), 0.8,
                                             np.array([-0.2, 0.6]), 0.7)
        data = smooth_loop_from_word(word, full_circle)
        assert not np.allclose(rho, np.eye(2))
        assert data.curve.is_closed(1e-9)
        # the final element is the pure rotation
        assert np.max(np.abs(data.final_element.matrix[:2, :2] - rho)) < 1e-9
        z1 = holonomy(full_circle, data.curve, LiftOptions(step=1e-3))
        expected = act(data.final_element, full_circle)
        assert sup_distance(z1, expected) < 1e-5

    def test_lift_reproduces_word_trajectory(self, half_circle):
        v = np.array([0.3, -0.2])
        data = smooth_loop_from_word([(v, 0.8)], half_circle)
        res = horizontal_lift(half_circle, data.curve, LiftOptions(step=1e-3))
        for t in (0.25, 0.75, 1.0):
            i = int(round(t / 1e-3))
            expected = act(data.group_of_t(res.times[i]), half_circle)
            assert sup_distance(res.config_path[i], expected) < 1e-5


class TestInvariantsAlongLifts:
    def test_determinism(self, half_circle):
        opts = LiftOptions(step=2e-3)
        r1 = lift_su11(half_circle, presets.figure_a_circle(), opts)
        r2 = lift_su11(half_circle, presets.figure_a_circle(), opts)
        assert r1.group_path[-1].a == r2.group_path[-1].a
        assert r1.group_path[-1].b == r2.group_path[-1].b
        assert np.array_equal(r1.defects, r2.defects)

    def test_step_halving_agrees(self, half_circle):
        ra = lift_su11(half_circle, presets.figure_a_circle(), LiftOptions(step=2e-3))
        rb = lift_su11(half_circle, presets.figure_a_circle(), LiftOptions(step=1e-3))
        assert sup_distance(ra.final_config, rb.final_config) < 1e-8

    def test_sed_and_spdim_constant(self, rng):
        vals = [v / np.linalg.norm(v) for v in rng.normal(size=(4, 2))]
        z = polygonal_configuration(vals, [0.6, 0.5, 0.7, 0.4])
        curve = CircleArc(center=endpoint(z) - np.array([0.05, 0.0]), radius=0.05,
                          start_angle=0.0)
        res = horizontal_lift(z, curve, LiftOptions(step=1e-3,
                                                    enforce_sedentary_ball=False))
        n = len(res.config_path) - 1
        for i in (0, n // 2, n):
            zt = res.config_path[i]
            assert sedentariness(zt) == sedentariness(z)
            assert spherical_dimension(zt) == spherical_dimension(z)

    def test_periodicity_preserved(self):
        p = np.array([math.cos(0.3), math.sin(0.3)])
        q = np.array([math.cos(1.7), math.sin(1.7)])
        r = np.array([math.cos(2.9), math.sin(2.9)])
        z = polygonal_configuration([p, q, r, p, q, r], [0.4, 0.3, 0.5] * 2)
        curve = CircleArc(center=endpoint(z) - np.array([0.04, 0.0]), radius=0.04,
                          start_angle=0.0)
        res = horizontal_lift(z, curve, LiftOptions(step=2e-3,
                                                    enforce_sedentary_ball=False))
        zt = res.final_config
        v = [piece.value for piece in zt.pieces]
        for i in range(3):
            assert np.array_equal(v[i], v[i + 3])

    def test_reparameterization(self, half_circle):
        opts = LiftOptions(step=1e-3)
        base = presets.figure_a_circle()
        straight = lift_su11(half_circle, base, opts)
        squared = lift_su11(half_circle,
                            Reparameterized(base, lambda u: u * u, lambda u: 2 * u),
                            opts)
        for u in (0.1, 0.2, 0.5, 1.0):
            iu = int(round(u / 1e-3))
            it = int(round(u * u / 1e-3))
            assert sup_distance(squared.config_path[iu],
                                straight.config_path[it]) < 1e-6

    def test_energy_minimality_of_horizontal_velocity(self, half_circle):
        # the horizontal field u - <z,u>z beats any contaminated velocity:
        # adding a vertical component only adds kinetic energy
        from snakecharmer.configuration import _piece_weight_value
        w, vals = _piece_weight_value(half_circle)
        u = np.array([0.4, -0.7])
        horiz = u[None, :] - vals * (vals @ u)[:, None]
        energy = w @ np.einsum("ij,ij->i", horiz, horiz)
        rng = np.random.default_rng(5)
        for _ in range(5):
            a = rng.normal() * 0.3
            vert = a * np.column_stack([-vals[:, 1], vals[:, 0]])
            vert -= vals * np.einsum("ij,ij->i", vals, vert)[:, None]
            proj = np.einsum("i,ij,ij->", w, vert, horiz)
            vert -= (proj / energy) * horiz  # orthogonal contamination only
            mixed = horiz + vert
            assert w @ np.einsum("ij,ij->i", mixed, mixed) >= energy - 1e-12


class TestIteratedHolonomy:
    def test_two_turns_match_composition(self, half_circle):
        opts = LiftOptions(step=2e-3)
        loop = presets.figure_a_circle()
        res = iterated_holonomy(half_circle, loop, 2, opts)
        z1 = holonomy(half_circle, loop, opts)
        z2 = holonomy(z1, loop, opts)
        final = act(res.elements[2], half_circle)
        assert sup_distance(final, z2) < 1e-8

    def test_zero_turns(self, half_circle):
        res = iterated_holonomy(half_circle, presets.figure_a_circle(), 0,
                                LiftOptions(step=2e-3))
        assert res.distances.shape == (1,)
        assert res.distances[0] == 0.0
