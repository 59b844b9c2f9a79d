"""Command line driver: lift / holonomy / orbit / turns over scene files.

Failures print one machine-readable JSON record on stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bivalued as bv
from . import orbits as orb
from . import outputs
from .configuration import endpoint, spherical_dimension, sup_distance
from .scene import Scene, SceneError, load_scene
from .solver import (LiftOptions, holonomy, horizontal_lift, iterated_holonomy,
                     lift_su11)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="snakecharmer",
        description="charm snakes: lift snout curves and inspect holonomy")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("scene", help="scene file (YAML)")
        p.add_argument("--step", type=float, default=None, help="integration step")
        p.add_argument("--tolerance", type=float, default=None, help="defect tolerance")
        p.add_argument("--snap", action="store_true", help="re-anchor the snout each step")
        p.add_argument("--seed", type=int, default=2024, help="seed for random loop families")
        p.add_argument("--out-dir", default=".", help="directory for output files")

    p_lift = sub.add_parser("lift", help="lift the scene curve, write trajectory CSV")
    common(p_lift)
    p_lift.add_argument("--frames", type=int, default=None,
                        help="number of SVG frames (overrides the scene)")

    p_hol = sub.add_parser("holonomy", help="single-loop holonomy")
    common(p_hol)

    p_orb = sub.add_parser("orbit", help="sample the holonomy orbit and estimate its rank")
    common(p_orb)
    p_orb.add_argument("--probes", type=int, default=12, help="number of probe loops")

    p_turns = sub.add_parser("turns", help="iterate the loop N times")
    common(p_turns)
    p_turns.add_argument("--n", type=int, required=True, help="number of turns")

    return parser


def _fail(kind: str, message: str, **extra) -> int:
    record = {"error": kind, "message": message}
    record.update(extra)
    print(json.dumps(record), file=sys.stderr)
    return 1


def _options(scene: Scene, args) -> LiftOptions:
    overrides = {"step": args.step, "defect_tol": args.tolerance}
    if args.snap:
        overrides["snap"] = True
    return scene.build_options(**overrides)


def cmd_lift(args) -> int:
    scene = load_scene(args.scene)
    snake = scene.build_snake()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if isinstance(snake, bv.BivaluedConfig):
        return _lift_bivalued_cmd(scene, snake, args, out)
    curve = (scene.build_word_curve(snake) if scene.curve_spec.get("kind") == "word"
             else scene.build_curve())
    opts = _options(scene, args)
    lift = lift_su11 if snake.dim == 2 else horizontal_lift
    result = lift(snake, curve, opts)
    csv_name = scene.outputs_spec.get("csv", "trajectory.csv")
    (out / csv_name).write_text(outputs.trajectory_csv(result, curve))
    written = [str(out / csv_name)]
    frames = args.frames if args.frames is not None else int(scene.outputs_spec.get("svg_frames", 0))
    if frames > 0:
        idx = np.linspace(0, len(result.config_path) - 1, frames).astype(int)
        for j, i in enumerate(idx):
            name = out / f"frame_{j:03d}.svg"
            name.write_text(outputs.snake_frame_svg(result.config_path[i], curve))
            written.append(str(name))
    print(json.dumps({"status": result.status,
                      "max_defect": float(np.max(result.defects)),
                      "files": written}))
    return 0 if result.status == "complete" else 2


def _lift_bivalued_cmd(scene: Scene, snake, args, out: Path) -> int:
    curve = scene.build_curve()
    opts = _options(scene, args)
    traj = bv.lift_bivalued(snake, curve, step=opts.step)
    csv_name = scene.outputs_spec.get("csv", "trajectory.csv")
    rows = ["t,gamma_1,gamma_2,defect,p_1,p_2,q_1,q_2"]
    for i, t in enumerate(traj.times):
        gamma = curve.point(float(t))
        lp, lq = snake.length_p, snake.length_q
        defect = float(np.linalg.norm(lp * traj.ps[i] + lq * traj.qs[i] - gamma))
        rows.append(",".join(outputs.fmt(x) for x in
                             (t, *gamma, defect, *traj.ps[i], *traj.qs[i])))
    (out / csv_name).write_text("\n".join(rows) + "\n")
    print(json.dumps({"status": "complete",
                      "crossings": [{"t": r.t, "admissible": r.admissible}
                                    for r in traj.crossings],
                      "files": [str(out / csv_name)]}))
    return 0


def cmd_holonomy(args) -> int:
    scene = load_scene(args.scene)
    snake = scene.build_snake()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if isinstance(snake, bv.BivaluedConfig):
        report = bv.horb_bivalued(snake)
        base = bv.to_configuration(snake)
        curve = scene.build_curve()
        z1 = bv.to_configuration(bv.lift_bivalued(snake, curve, step=_options(scene, args).step).final)
        dist = sup_distance(z1, base)
        (out / "config_initial.csv").write_text(outputs.configuration_csv(base))
        (out / "config_final.csv").write_text(outputs.configuration_csv(z1))
        print(json.dumps({"sup_distance": dist, "orbit_kind": report.kind,
                          "components": report.component_count,
                          "connected": report.connected}))
        return 0
    curve = (scene.build_word_curve(snake) if scene.curve_spec.get("kind") == "word"
             else scene.build_curve())
    opts = _options(scene, args)
    z1 = holonomy(snake, curve, opts)
    dist = sup_distance(z1, snake)
    (out / "config_initial.csv").write_text(outputs.configuration_csv(snake))
    (out / "config_final.csv").write_text(outputs.configuration_csv(z1))
    print(json.dumps({"sup_distance": dist}))
    return 0


def cmd_orbit(args) -> int:
    scene = load_scene(args.scene)
    snake = scene.build_snake()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if isinstance(snake, bv.BivaluedConfig):
        report = bv.horb_bivalued(snake)
        print(json.dumps({"classification": "bivalued", "kind": report.kind,
                          "components": report.component_count,
                          "connected": report.connected,
                          "witnesses": len(report.witnesses)}))
        return 0
    opts = _options(scene, args)
    rank = orb.orbit_tangent_rank(snake, n_probes=args.probes, opts=opts, seed=args.seed)
    k = spherical_dimension(snake)
    expected = orb.expected_orbit_dimension(snake.dim, k)
    rng = np.random.default_rng(args.seed)
    loops = orb.small_probe_loops(snake, 1e-2 * snake.length, args.probes, rng)
    report = orb.orbit_sample(snake, loops, opts)
    lines = []
    at_zero = bool(np.linalg.norm(endpoint(snake)) < 1e-6)
    if at_zero:
        header = ["point"] + [f"f_{i+1}{j+1}" for j in range(k + 1)
                              for i in range(snake.dim)] + ["residual"]
        lines.append(",".join(header))
        for i, pt in enumerate(report.points):
            frame = orb.stiefel_frame(pt.config, snake)
            _, rms = orb.rotation_fit(pt.config, snake)
            lines.append(",".join([str(i)] + [outputs.fmt(x) for x in frame.T.ravel()]
                                  + [outputs.fmt(rms)]))
        (out / "frames.csv").write_text("\n".join(lines) + "\n")
    print(json.dumps({"classification": report.classification,
                      "estimated_rank": rank, "expected_dim": expected,
                      "spdim": k, "points": len(report.points),
                      "failures": report.failures,
                      "frames_csv": str(out / "frames.csv") if at_zero else None}))
    return 0


def cmd_turns(args) -> int:
    scene = load_scene(args.scene)
    snake = scene.build_snake()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    curve = scene.build_curve()
    opts = _options(scene, args)
    result = iterated_holonomy(snake, curve, args.n, opts)
    (out / "turns.csv").write_text(
        outputs.turns_csv(result.distances, result.charts, result.defects))
    d = result.distances
    if args.n >= 1:
        n_star = int(np.argmin(d[1:])) + 1
        summary = {"n_star": n_star, "distance": float(d[n_star]),
                   "max_distance": float(np.max(d)),
                   "files": [str(out / "turns.csv")]}
    else:
        summary = {"n_star": 0, "distance": 0.0, "max_distance": 0.0,
                   "files": [str(out / "turns.csv")]}
    print(json.dumps(summary))
    return 0


COMMANDS = {"lift": cmd_lift, "holonomy": cmd_holonomy,
            "orbit": cmd_orbit, "turns": cmd_turns}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except SceneError as exc:
        return _fail("scene", str(exc))
    except FileNotFoundError as exc:
        return _fail("io", str(exc))
    except bv.HairerError as exc:
        return _fail("hairer", str(exc))
    except bv.FiberError as exc:
        return _fail("fiber", str(exc))
    except Exception as exc:
        return _fail(type(exc).__name__, str(exc))


if __name__ == "__main__":
    sys.exit(main())
