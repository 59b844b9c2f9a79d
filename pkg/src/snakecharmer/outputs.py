"""Trajectory CSV files and SVG frames.

CSV values are IEEE doubles printed with 17 significant digits, so files
round-trip bit-exactly.  Column layout for a lift trajectory:

    t, gamma_1..gamma_d, defect, v_1..v_d, chart rotation

where (v, chart rotation) is the group chart of g(t): theta for d = 2, the
flattened rotation block otherwise.  SVG frames show the snake polyline,
the target curve and the snout marker.
"""

from __future__ import annotations

import io
import math

import numpy as np

from .configuration import Configuration, integrate_snake
from .curves import Curve
from .geometry import MobiusElement, SU11Element, chart_coordinates, su11_cover_chart
from .solver import LiftResult


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def group_chart(element) -> tuple[np.ndarray, np.ndarray]:
    """(v, rotation coordinates) for a group element; theta alone when d = 2."""
    if isinstance(element, SU11Element):
        v, theta = su11_cover_chart(element)
        return v, np.array([theta])
    if isinstance(element, MobiusElement):
        v, rho = chart_coordinates(element)
        if element.dim == 2:
            return v, np.array([math.atan2(rho[1, 0], rho[0, 0])])
        return v, rho.ravel()
    raise TypeError(f"no chart for {type(element).__name__}")


def trajectory_header(d: int, rot_len: int) -> list[str]:
    cols = ["t"] + [f"gamma_{i+1}" for i in range(d)] + ["defect"]
    cols += [f"v_{i+1}" for i in range(d)]
    if rot_len == 1:
        cols.append("theta")
    else:
        cols += [f"rot_{i+1}" for i in range(rot_len)]
    return cols


def trajectory_csv(result: LiftResult, curve: Curve) -> str:
    """CSV of a lift run: one row per saved step."""
    d = result.config_path[0].dim
    charts = [group_chart(g) for g in result.group_path]
    rot_len = charts[0][1].shape[0]
    buf = io.StringIO()
    buf.write(",".join(trajectory_header(d, rot_len)) + "\n")
    for t, defect, (v, rot) in zip(result.times, result.defects, charts):
        gamma = curve.point(float(t))
        row = [t, *gamma, defect, *v, *rot]
        buf.write(",".join(fmt(x) for x in row) + "\n")
    return buf.getvalue()


def turns_csv(distances: np.ndarray, charts: np.ndarray | None,
              defects: np.ndarray) -> str:
    """CSV of an iterated-loop run: one row per completed turn."""
    buf = io.StringIO()
    if charts is not None:
        buf.write("n,distance,defect,v_1,v_2,theta\n")
        for n in range(distances.shape[0]):
            row = [float(n), distances[n], defects[n], *charts[n]]
            buf.write(",".join(fmt(x) for x in row) + "\n")
    else:
        buf.write("n,distance,defect\n")
        for n in range(distances.shape[0]):
            buf.write(",".join(fmt(x) for x in (float(n), distances[n], defects[n])) + "\n")
    return buf.getvalue()


def configuration_csv(z: Configuration, n: int = 256) -> str:
    """Sampled values of a configuration: s, z_1..z_d."""
    s = np.linspace(0.0, z.length, n, endpoint=False) + 0.5 * z.length / n
    vals = z.evaluate(s)
    buf = io.StringIO()
    buf.write(",".join(["s"] + [f"z_{i+1}" for i in range(z.dim)]) + "\n")
    for si, row in zip(s, vals):
        buf.write(",".join(fmt(x) for x in (si, *row)) + "\n")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# SVG frames
# ---------------------------------------------------------------------------

def _svg_path(points: np.ndarray, scale, offset) -> str:
    cmds = []
    for i, p in enumerate(points):
        x = offset[0] + scale * p[0]
        y = offset[1] - scale * p[1]
        cmds.append(f"{'M' if i == 0 else 'L'} {x:.3f} {y:.3f}")
    return " ".join(cmds)


def snake_frame_svg(z: Configuration, curve: Curve | None = None,
                    size: int = 480, n_samples: int = 257) -> str:
    """One frame: snake polyline (projected to the first two coordinates),
    the target curve, and a marker at the snout."""
    poly = integrate_snake(z, n_samples)
    pts = poly.points[:, :2]
    length = z.length
    half = 1.15 * length
    scale = size / (2.0 * half)
    offset = (size / 2.0, size / 2.0)
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
             f'viewBox="0 0 {size} {size}">',
             f'<rect width="{size}" height="{size}" fill="white"/>',
             f'<path d="{_svg_path(pts, scale, offset)}" fill="none" '
             f'stroke="black" stroke-width="1.5"/>']
    if curve is not None:
        ts = np.linspace(0.0, 1.0, 257)
        cpts = np.array([curve.point(t)[:2] for t in ts])
        parts.append(f'<path d="{_svg_path(cpts, scale, offset)}" fill="none" '
                     f'stroke="#888888" stroke-width="0.8" stroke-dasharray="4 3"/>')
    snout = pts[-1]
    parts.append(f'<circle cx="{offset[0] + scale * snout[0]:.3f}" '
                 f'cy="{offset[1] - scale * snout[1]:.3f}" r="3.5" fill="#cc0000"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
