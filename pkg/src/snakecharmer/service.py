"""Interactive steering: drag targets in, stream snake states out.

A session owns one snake and an accumulating C^1 target curve.  Dragged
points are smoothed into cubic Hermite segments (central-difference knot
velocities, so one target of look-ahead lag) and the lift is advanced
segment by segment; every state update carries the polyline, snout, defect
and the planar group chart.  The wire protocol is line-delimited JSON over
a local TCP socket with messages {"type", "seq", "payload"}; state sequence
numbers are strictly increasing per session.

Run a server with:  python -m snakecharmer.service --port 8731
"""

from __future__ import annotations

import argparse
import json
import math
import socketserver
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import bivalued as bv
from .configuration import act, endpoint, integrate_snake, sedentariness
from .curves import Hermite
from .geometry import su11_cover_chart
from .outputs import fmt, group_chart, trajectory_header
from .scene import Scene, SceneError, parse_scene
from .solver import _LorentzKernel, _SU11Kernel, _run_lift


class SessionError(RuntimeError):
    pass


def _segment_curve(p0, v0, p1, v1) -> Hermite:
    """One Hermite segment on local time [0, 1] with knot velocities in
    per-segment units (matching hermite_through_points geometrically)."""
    return Hermite([0.0, 1.0], np.array([p0, p1]), np.array([v0, v1]))


@dataclass
class _StateRecord:
    t_index: int
    gamma: np.ndarray
    defect: float
    element: object
    pair: tuple | None = None


class SteeringSession:
    """One snake, one accumulating drag curve, one lift state."""

    def __init__(self, scene: Scene, steps_per_segment: int = 8):
        self.scene = scene
        self.steps_per_segment = int(steps_per_segment)
        snake = scene.build_snake()
        self.bivalued_mode = isinstance(snake, bv.BivaluedConfig)
        self.opts = scene.build_options()
        self.seq = 0
        if self.bivalued_mode:
            self.bsnake0 = snake
            self.length = snake.length
            self.radius = 0.0
            self.inner_radius = abs(snake.length_p - snake.length_q)
        else:
            self.snake0 = snake
            self.length = snake.length
            self.radius = snake.length - 2.0 * sedentariness(snake)
            self.inner_radius = 0.0
            self.kernel = (_SU11Kernel(snake) if snake.dim == 2
                           else _LorentzKernel(snake))
        self.reset()

    # -- state -------------------------------------------------------------

    def reset(self):
        self.targets: list[np.ndarray] = [np.asarray(self._initial_snout(), float)]
        self.integrated_upto = 0      # index of the last knot reached by the lift
        self.records: list[_StateRecord] = []
        self.degraded: str | None = None
        self.turning = 0.0
        self.step_count = 0
        if self.bivalued_mode:
            self.bsnake = self.bsnake0
        else:
            self.gmat = self.kernel.start()

    def _initial_snout(self):
        if self.bivalued_mode:
            return bv.w_endpoint(self.bsnake0)
        return endpoint(self.snake0)

    @property
    def dim(self) -> int:
        return 2 if self.bivalued_mode else self.snake0.dim

    def current_config(self):
        if self.bivalued_mode:
            return bv.to_configuration(self.bsnake)
        return act(self.kernel.element(self.gmat), self.snake0)

    def current_snout(self):
        if self.bivalued_mode:
            return bv.w_endpoint(self.bsnake)
        return self.kernel.snout(self.gmat)

    def _next_seq(self) -> int:
        self.seq += 1
        return self.seq

    # -- messages ----------------------------------------------------------

    def init_payload(self) -> dict:
        z = self.current_config()
        poly = integrate_snake(z, 65)
        return {"dimension": self.dim,
                "length": self.length,
                "ball_radius": self.radius,
                "bivalued_mode": self.bivalued_mode,
                "inner_radius": self.inner_radius,
                "snake": poly.points.tolist(),
                "snout": self.current_snout().tolist(),
                "defect": 0.0}

    def on_target(self, point, timestamp: float | None = None) -> dict:
        """Accept one dragged target; returns the state payload."""
        point = np.asarray(point, dtype=float).ravel()
        if point.shape[0] != self.dim:
            raise SessionError(f"target must have dimension {self.dim}")
        point, clamped = self._clamp(point)
        self.targets.append(point)
        if len(self.targets) >= 3:
            self._advance_segment(len(self.targets) - 2)
        if len(self.targets) >= 3:
            a = self.targets[-2] - self.targets[-3]
            b = self.targets[-1] - self.targets[-2]
            if self.dim == 2 and np.linalg.norm(a) > 0 and np.linalg.norm(b) > 0:
                self.turning += math.atan2(a[0] * b[1] - a[1] * b[0], float(a @ b))
        return self.state_payload(clamped=clamped)

    def finish_drag(self) -> dict:
        """Flush the pending segment (the smoothing lags one target behind)."""
        last = len(self.targets) - 1
        if last >= 1 and self.integrated_upto < last:
            self._advance_segment(last, final=True)
        return self.state_payload(clamped=False)

    def _clamp(self, point):
        clamped = False
        r = np.linalg.norm(point)
        if self.bivalued_mode:
            hi = self.length * 0.99
            lo = self.inner_radius / 0.99 if self.inner_radius > 0 else 0.0
            if r > hi:
                point = point * (hi / r)
                clamped = True
            elif lo > 0.0 and r < lo:
                point = point * (lo / max(r, 1e-12))
                clamped = True
        else:
            hi = self.radius * 0.99
            if r > hi:
                point = point * (hi / r)
                clamped = True
        return point, clamped

    def _knot_velocity(self, j: int, final: bool) -> np.ndarray:
        pts = self.targets
        if j == 0:
            return pts[1] - pts[0]
        if j == len(pts) - 1:
            return pts[j] - pts[j - 1]
        return 0.5 * (pts[j + 1] - pts[j - 1])

    def _advance_segment(self, knot: int, final: bool = False):
        """Integrate the segment from knot-1 to knot (velocities now known)."""
        while self.integrated_upto < knot:
            j = self.integrated_upto
            p0, p1 = self.targets[j], self.targets[j + 1]
            v0 = self._knot_velocity(j, final)
            v1 = self._knot_velocity(j + 1, final)
            seg = _segment_curve(p0, v0, p1, v1)
            if self.degraded is not None:
                return
            try:
                self._lift_segment(seg)
            except Exception as exc:
                self.degraded = f"{type(exc).__name__}: {exc}"
                return
            self.integrated_upto = j + 1

    def _lift_segment(self, seg: Hermite):
        if self.bivalued_mode:
            traj = bv.lift_bivalued(self.bsnake, seg,
                                    step=1.0 / self.steps_per_segment)
            self.bsnake = traj.final
            self.step_count += traj.times.shape[0] - 1
        else:
            opts = replace(self.opts, step=1.0 / self.steps_per_segment,
                           save_stride=10 ** 9, defect_tol=max(self.opts.defect_tol, 1e-6),
                           enforce_sedentary_ball=False)
            start_gap = np.linalg.norm(self.kernel.snout(self.gmat) - seg.point(0.0))
            if start_gap > opts.defect_tol * 10:
                raise SessionError(f"segment does not start at the snout ({start_gap:.3g})")
            times, gmats, defects, status, stop = _run_lift(
                self.kernel, self.gmat, seg, opts)
            if status != "complete":
                raise SessionError(f"lift stopped: {status}")
            self.gmat = self.kernel.renorm(gmats[-1])
            self.step_count += times.shape[0] - 1
        reached = self.targets[self.integrated_upto + 1]
        self.records.append(_StateRecord(
            len(self.records) + 1, reached.copy(), self._current_defect(reached),
            None if self.bivalued_mode else self.kernel.element(self.gmat),
            (self.bsnake.p.copy(), self.bsnake.q.copy()) if self.bivalued_mode else None))

    def _current_defect(self, target) -> float:
        return float(np.linalg.norm(self.current_snout() - target))

    def state_payload(self, clamped: bool = False) -> dict:
        z = self.current_config()
        poly = integrate_snake(z, 65)
        target = self.targets[min(self.integrated_upto, len(self.targets) - 1)]
        payload = {"snake": poly.points.tolist(),
                   "snout": self.current_snout().tolist(),
                   "defect": self._current_defect(target),
                   "step_count": self.step_count,
                   "clamped": bool(clamped),
                   "pending_targets": len(self.targets) - 1 - self.integrated_upto,
                   "winding": self.turning / (2.0 * math.pi),
                   "loop_count": int(round(self.turning / (2.0 * math.pi))),
                   "degraded": self.degraded}
        if not self.bivalued_mode and self.dim == 2:
            v, theta = su11_cover_chart(self.kernel.element(self.gmat)) \
                if isinstance(self.kernel, _SU11Kernel) else (np.zeros(2), 0.0)
            payload["chart"] = {"v": v.tolist(), "theta": theta}
        return payload

    def export_csv(self) -> str:
        """Trajectory CSV in the batch lift format, one row per finished knot."""
        d = self.dim
        if self.bivalued_mode:
            rows = ["t,gamma_1,gamma_2,defect,p_1,p_2,q_1,q_2"]
            if self.integrated_upto == 0:   # nothing lifted yet: header only
                return rows[0] + "\n"
            n = self.integrated_upto
            pairs = [(self.bsnake0.p, self.bsnake0.q)] + [r.pair for r in self.records]
            gammas = [self.targets[0]] + [r.gamma for r in self.records]
            defects = [0.0] + [r.defect for r in self.records]
            for j, ((p, q), gamma, defect) in enumerate(zip(pairs, gammas, defects)):
                rows.append(",".join(fmt(x) for x in (j / n, *gamma, defect, *p, *q)))
            return "\n".join(rows) + "\n"
        charts = [group_chart(self.kernel.element(self.kernel.start()))]
        charts += [group_chart(r.element) for r in self.records]
        rot_len = charts[0][1].shape[0]
        header = ",".join(trajectory_header(d, rot_len))
        if self.integrated_upto == 0:       # nothing lifted yet: header only
            return header + "\n"
        rows = [header]
        n = self.integrated_upto
        gammas = [self.targets[0]] + [r.gamma for r in self.records]
        defects = [0.0] + [r.defect for r in self.records]
        for j, ((v, rot), gamma, defect) in enumerate(zip(charts, gammas, defects)):
            t = j / n
            row = [t, *gamma, defect, *v, *rot]
            rows.append(",".join(fmt(x) for x in row))
        return "\n".join(rows) + "\n"


# ---------------------------------------------------------------------------
# Wire protocol
# ---------------------------------------------------------------------------

class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        session: SteeringSession | None = None
        for raw in self.rfile:
            line = raw.decode("utf-8").strip()
            if not line:
                continue
            try:
                msg = json.loads(line)
            except json.JSONDecodeError as exc:
                self._send("error", 0, {"error": "protocol",
                                        "message": f"bad JSON: {exc}"})
                continue
            mtype = msg.get("type")
            payload = msg.get("payload") or {}
            try:
                if mtype == "init":
                    scene = self._parse_scene(payload)
                    session = SteeringSession(
                        scene, steps_per_segment=int(payload.get("steps_per_segment", 8)))
                    self._send("init", 0, session.init_payload())
                elif session is None:
                    self._send("error", 0, {"error": "protocol",
                                            "message": "session not initialized"})
                elif mtype == "target":
                    state = session.on_target(payload["point"], payload.get("timestamp"))
                    self._send("state", session._next_seq(), state)
                elif mtype == "finish":
                    state = session.finish_drag()
                    self._send("state", session._next_seq(), state)
                elif mtype == "reset":
                    session.reset()
                    self._send("state", session._next_seq(),
                               dict(session.state_payload(), reset=True))
                elif mtype == "export":
                    session.finish_drag()
                    self._send("export", session._next_seq(),
                               {"csv": session.export_csv()})
                else:
                    self._send("error", 0 if session is None else session._next_seq(),
                               {"error": "protocol", "message": f"unknown type {mtype!r}"})
            except (SceneError, SessionError, bv.HairerError, bv.FiberError,
                    ValueError, KeyError) as exc:
                self._send("error", 0 if session is None else session._next_seq(),
                           {"error": type(exc).__name__, "message": str(exc)})

    def _parse_scene(self, payload) -> Scene:
        if "scene_text" in payload:
            return parse_scene(payload["scene_text"])
        if "scene" in payload:
            return parse_scene(json.dumps(payload["scene"]))
        raise SceneError("init needs scene or scene_text")

    def _send(self, mtype: str, seq: int, payload: dict):
        line = json.dumps({"type": mtype, "seq": seq, "payload": payload})
        self.wfile.write(line.encode("utf-8") + b"\n")
        self.wfile.flush()


class SteeringServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True


def serve(host: str = "127.0.0.1", port: int = 0, announce=print) -> SteeringServer:
    server = SteeringServer((host, port), _Handler)
    announce(json.dumps({"listening": server.server_address[1],
                         "host": server.server_address[0]}))
    return server


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="snake steering service")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=0)
    args = parser.parse_args(argv)
    server = serve(args.host, args.port, announce=lambda s: print(s, flush=True))
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    return 0


if __name__ == "__main__":
    sys.exit(main())
