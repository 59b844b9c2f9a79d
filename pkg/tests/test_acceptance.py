"""Acceptance suite: one test per release criterion, at pinned tolerances.

Each test prints a single [ACCEPTANCE] pass/fail line (visible with -s or in
the captured output).  Run the whole gate with

    pytest tests/test_acceptance.py -s
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

from snakecharmer import presets
from snakecharmer.bivalued import (BivaluedConfig, HairerError,
                                   _fiber_candidates, horb_bivalued,
                                   lift_bivalued, to_configuration, w_endpoint)
from snakecharmer.configuration import (Partition, act, constant_configuration,
                                        endpoint, gram_defect,
                                        polygonal_configuration, sedentariness,
                                        spherical_dimension, sup_distance)
from snakecharmer.curves import CallableCurve, Parabola, Reparameterized
from snakecharmer.geometry import boost, rotation_element
from snakecharmer.numerics import gauss_legendre_rule
from snakecharmer.orbits import (connectivity_probe, expected_orbit_dimension,
                                 orbit_sample, orbit_tangent_rank, rotation_fit,
                                 small_probe_loops)
from snakecharmer.solver import (LiftOptions, LiftResult, check_horizontal,
                                 horizontal_lift, iterated_holonomy, lift_su11,
                                 linmap_matrix_check, rotation_generating_word,
                                 smooth_loop_from_word)


def report(name: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    print(f"[ACCEPTANCE] {name}: {status}" + (f"  ({detail})" if detail else ""))
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def half_circle():
    return presets.half_circle_configuration()


@pytest.fixture(scope="module")
def figure_a_lift(half_circle):
    return lift_su11(half_circle, presets.figure_a_circle(),
                     LiftOptions(step=1e-3))


def test_endpoint_exactness(half_circle):
    gap_half = np.linalg.norm(endpoint(half_circle) - [2.0, 0.0])
    tent = presets.tent_bivalued()
    gap_tent = np.linalg.norm(w_endpoint(tent) - [2.0, 0.0])
    gap_expanded = np.linalg.norm(endpoint(to_configuration(tent)) - [2.0, 0.0])
    ok = gap_half < 1e-10 and gap_tent < 1e-14 and gap_expanded < 1e-14
    report("endpoint exactness", ok,
           f"half-circle {gap_half:.2e}, tent closed-form {gap_tent:.2e}")


def test_gram_matrix(half_circle):
    # quadrature against the analytic value pi/2 I
    analytic = (math.pi / 2.0) * np.eye(2)
    gap = np.max(np.abs(gram_defect(half_circle) - analytic))
    # independent fine brute-force rule
    nodes, weights = gauss_legendre_rule(0.0, math.pi, 128, 8)
    vals = np.column_stack([np.sin(nodes), np.cos(nodes)])
    oracle = math.pi * np.eye(2) - vals.T @ (weights[:, None] * vals)
    gap_oracle = np.max(np.abs(gram_defect(half_circle) - oracle))
    z_const = constant_configuration([1.0, 0.0, 0.0], 2.5)
    exact = np.array_equal(gram_defect(z_const), np.diag([0.0, 2.5, 2.5]))
    ok = gap < 1e-8 and gap_oracle < 1e-8 and exact
    report("gram matrix", ok, f"analytic gap {gap:.2e}, oracle gap {gap_oracle:.2e}")


def test_linmap_matrix():
    rng = np.random.default_rng(7)
    start = time.time()
    worst = 0.0
    for d in (2, 3):
        for _ in range(10):
            vals = [v / np.linalg.norm(v) for v in rng.normal(size=(5, d))]
            z = polygonal_configuration(vals, rng.uniform(0.3, 1.0, size=5))
            g = boost(rng.normal(size=d) * 0.6, 1.0) @ boost(rng.normal(size=d) * 0.4, 1.0)
            worst = max(worst, linmap_matrix_check(z, g))
    elapsed = time.time() - start
    ok = worst < 1e-5 and elapsed < 10.0
    report("derivative matrix equals gram defect", ok,
           f"worst entry gap {worst:.2e} over 20 trials in {elapsed:.2f}s")


def test_lift_defect_and_order(half_circle, figure_a_lift):
    max_defect = float(np.max(figure_a_lift.defects))
    defects = []
    for h in (1 / 16, 1 / 32, 1 / 64):
        res = lift_su11(half_circle, presets.figure_a_circle(),
                        LiftOptions(step=h, defect_tol=1.0))
        defects.append(float(np.max(res.defects)))
    orders = [math.log2(defects[i] / defects[i + 1]) for i in range(2)]
    ok = max_defect < 1e-6 and min(orders) >= 3.5
    report("lift defect and convergence order", ok,
           f"defect {max_defect:.2e} at h=1e-3, orders {orders[0]:.2f}, {orders[1]:.2f}")


def test_gradient_flow_consistency(half_circle):
    v = np.array([0.3, 0.4])

    def point(t):
        return endpoint(act(boost(v, t), half_circle))

    def velocity(t):
        return gram_defect(act(boost(v, t), half_circle)) @ v

    curve = CallableCurve(point, velocity, dim=2, smoothness="Cinf")
    res = horizontal_lift(half_circle, curve, LiftOptions(step=1e-3))
    worst = 0.0
    for i in (250, 500, 750, 1000):
        expected = act(boost(v, res.times[i]), half_circle)
        worst = max(worst, sup_distance(res.config_path[i], expected))
    report("gradient-flow consistency", worst < 1e-6, f"sup distance {worst:.2e}")


def test_horizontality(half_circle, figure_a_lift):
    residual = check_horizontal(figure_a_lift)
    # hand-built vertical motion: rigid rotations
    rots = [rotation_element(np.array([[math.cos(a), -math.sin(a)],
                                       [math.sin(a), math.cos(a)]]))
            for a in (0.0, 0.02, 0.04, 0.06)]
    fake = LiftResult(times=np.array([0.0, 0.01, 0.02, 0.03]),
                      group_path=rots,
                      config_path=[act(r, half_circle) for r in rots],
                      defects=np.zeros(4), status="complete")
    vertical = check_horizontal(fake)
    ok = residual < 1e-4 and vertical > 0.1
    report("horizontality residuals", ok,
           f"lift residual {residual:.2e}, vertical detector {vertical:.2f}")


def test_invariance_suite(half_circle):
    # periodic piecewise-constant configuration, exact invariants along a lift
    p = np.array([math.cos(0.3), math.sin(0.3)])
    q = np.array([math.cos(1.7), math.sin(1.7)])
    r = np.array([math.cos(2.9), math.sin(2.9)])
    z = polygonal_configuration([p, q, r, p, q, r], [0.4, 0.3, 0.5] * 2)
    from snakecharmer.curves import CircleArc
    loop = CircleArc(center=endpoint(z) - np.array([0.04, 0.0]), radius=0.04,
                     start_angle=0.0)
    res = horizontal_lift(z, loop, LiftOptions(step=1e-3,
                                               enforce_sedentary_ball=False))
    exact = True
    n = len(res.config_path) - 1
    for i in (0, n // 2, n):
        zt = res.config_path[i]
        exact &= sedentariness(zt) == sedentariness(z)
        exact &= spherical_dimension(zt) == spherical_dimension(z)
        vals = [piece.value for piece in zt.pieces]
        exact &= all(np.array_equal(vals[j], vals[j + 3]) for j in range(3))

    # reparameterization by phi(u) = u^2
    base = presets.figure_a_circle()
    opts = LiftOptions(step=1e-3)
    straight = lift_su11(half_circle, base, opts)
    squared = lift_su11(half_circle,
                        Reparameterized(base, lambda u: u * u, lambda u: 2 * u),
                        opts)
    worst = 0.0
    for u in (0.1, 0.2, 0.5, 1.0):
        iu, it = int(round(u / 1e-3)), int(round(u * u / 1e-3))
        worst = max(worst, sup_distance(squared.config_path[iu],
                                        straight.config_path[it]))
    ok = exact and worst < 1e-6
    report("invariance suite", ok,
           f"pattern exact: {exact}, reparameterization gap {worst:.2e}")


def test_326_turn_near_return(half_circle):
    start = time.time()
    result = iterated_holonomy(half_circle, presets.figure_a_circle(), 350,
                               LiftOptions(step=1e-3))
    elapsed = time.time() - start
    d = result.distances
    n_star = int(np.argmin(d[1:])) + 1
    pronounced = d[n_star] < 0.1 * float(np.max(d))
    ok = abs(n_star - 326) <= 5 and pronounced and elapsed < 300.0
    report("326-turn near-return", ok,
           f"n*={n_star}, distance {d[n_star]:.4f}, max {np.max(d):.4f}, "
           f"{elapsed:.0f}s")


def test_bivalued_holonomy_and_hairer_gate():
    tent = presets.tent_bivalued()
    traj = lift_bivalued(tent, presets.nonconnected_orbit_loop(), step=1e-3)
    conj_gap = max(np.linalg.norm(traj.final.p - [tent.p[0], -tent.p[1]]),
                   np.linalg.norm(traj.final.q - [tent.q[0], -tent.q[1]]))
    orbit = horb_bivalued(tent)
    two_components = orbit.component_count == 2 and not orbit.connected

    # curvature gate at a tangential touch, L_p=2, L_q=1, required kappa=1/9
    def touching(kappa, speed=1.2, t0=0.5):
        acc = np.array([-speed * speed * kappa, 0.0])
        vel = np.array([0.0, speed])
        touch = np.array([1.0, 0.0])
        return Parabola(touch - t0 * vel + 0.5 * t0 * t0 * acc,
                        vel - t0 * acc, acc)

    good = touching(1.0 / 9.0)
    (p0, q0), _ = _fiber_candidates(good.point(0.0), 2.0, 1.0)
    c0 = BivaluedConfig(p0, q0, Partition((0.0, 2.0, 3.0)), (0, 1))
    admitted = lift_bivalued(c0, good, step=1e-3)
    gate_ok = len(admitted.crossings) == 1 and admitted.crossings[0].admissible
    bad = touching(1.0 / 9.0 + 0.1)
    (p1, q1), _ = _fiber_candidates(bad.point(0.0), 2.0, 1.0)
    c1 = BivaluedConfig(p1, q1, Partition((0.0, 2.0, 3.0)), (0, 1))
    rejected = False
    try:
        lift_bivalued(c1, bad, step=1e-3)
    except HairerError:
        rejected = True
    ok = conj_gap < 1e-8 and two_components and gate_ok and rejected
    report("bivalued holonomy and curvature gate", ok,
           f"conjugation gap {conj_gap:.2e}, components {orbit.component_count}, "
           f"gate admit/reject {gate_ok}/{rejected}")


def test_orbit_rank_and_rotation_fits():
    cases = [(presets.full_circle_configuration(), 2, 1),
             (presets.planar_circle_in_space(), 3, 1),
             (presets.tetrahedral_configuration(), 3, 2)]
    ranks_ok = True
    details = []
    for z0, d, k in cases:
        rank = orbit_tangent_rank(z0, n_probes=10, opts=LiftOptions(step=2e-3))
        expected = expected_orbit_dimension(d, k)
        ranks_ok &= rank == expected
        details.append(f"({d},{k})->{rank}")

    # every sampled orbit point at snout zero is a pure rotation of the base
    z0 = presets.full_circle_configuration()
    rng = np.random.default_rng(12)
    loops = small_probe_loops(z0, 0.05, 6, rng)
    sampled = orbit_sample(z0, loops, LiftOptions(step=1e-3))
    worst_fit = max(rotation_fit(pt.config, z0)[1] for pt in sampled.points)
    ok = ranks_ok and worst_fit < 1e-6
    report("orbit rank and rotation fits", ok,
           f"ranks {', '.join(details)}, worst Procrustes rms {worst_fit:.2e}")


def test_nomadic_connectivity_witness():
    z0 = presets.full_circle_configuration()
    word, rho = rotation_generating_word(np.array([0.45, 0.1]), 0.7,
                                         np.array([-0.15, 0.5]), 0.6)
    target = act(smooth_loop_from_word(word, z0).final_element, z0)
    path = connectivity_probe(z0, target, word, LiftOptions(step=2e-3),
                              n_scales=16)
    complete = (path.max_gap <= 0.2
                and sup_distance(path.configs[0], z0) < 1e-9
                and sup_distance(path.configs[-1], target) < 1e-5)
    report("nomadic connectivity witness", complete,
           f"{len(path.scales)} stops, max gap {path.max_gap:.3f}")
