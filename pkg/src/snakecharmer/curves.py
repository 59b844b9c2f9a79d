"""Snout target curves: evaluable paths in R^d with derivatives.

Every curve maps the unit parameter interval [0, 1] into R^d and exposes
point(t) and velocity(t); analytic representations also expose a second
derivative for curvature checks.  Piecewise composites keep track of their
junction parameters so integrators can split steps there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


class Curve:
    """Base class; subclasses fill in point/velocity and a smoothness tag."""

    smoothness = "C1"
    dim: int

    def point(self, t: float) -> np.ndarray:
        raise NotImplementedError

    def velocity(self, t: float) -> np.ndarray:
        raise NotImplementedError

    def acceleration(self, t: float) -> np.ndarray | None:
        """Second derivative when analytically available, else None."""
        return None

    def junctions(self) -> tuple:
        """Interior parameters where smoothness may drop (composites)."""
        return ()

    def is_closed(self, tol: float = 1e-9) -> bool:
        return bool(np.linalg.norm(self.point(1.0) - self.point(0.0)) <= tol)


@dataclass
class ConstantCurve(Curve):
    value: np.ndarray
    smoothness: str = "Cinf"

    def __post_init__(self):
        self.value = np.asarray(self.value, dtype=float).ravel()
        self.dim = self.value.shape[0]

    def point(self, t):
        return self.value.copy()

    def velocity(self, t):
        return np.zeros(self.dim)

    def acceleration(self, t):
        return np.zeros(self.dim)


@dataclass
class Segment(Curve):
    start: np.ndarray
    end: np.ndarray
    smoothness: str = "Cinf"

    def __post_init__(self):
        self.start = np.asarray(self.start, dtype=float).ravel()
        self.end = np.asarray(self.end, dtype=float).ravel()
        self.dim = self.start.shape[0]

    def point(self, t):
        return (1.0 - t) * self.start + t * self.end

    def velocity(self, t):
        return self.end - self.start

    def acceleration(self, t):
        return np.zeros(self.dim)


@dataclass
class CircleArc(Curve):
    """Arc of a circle in the plane spanned by (axis_u, axis_w) through center.

    Parameterized as center + r cos(theta) u + r sin(theta) w with
    theta = start_angle + t * sweep; sweep = 2 pi gives one positively
    oriented turn.
    """

    center: np.ndarray
    radius: float
    start_angle: float = math.pi
    sweep: float = 2.0 * math.pi
    axis_u: np.ndarray | None = None
    axis_w: np.ndarray | None = None
    smoothness: str = "Cinf"

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float).ravel()
        self.dim = self.center.shape[0]
        if self.axis_u is None:
            u = np.zeros(self.dim)
            u[0] = 1.0
            self.axis_u = u
        else:
            self.axis_u = np.asarray(self.axis_u, dtype=float).ravel()
        if self.axis_w is None:
            w = np.zeros(self.dim)
            w[1] = 1.0
            self.axis_w = w
        else:
            self.axis_w = np.asarray(self.axis_w, dtype=float).ravel()

    def _angle(self, t):
        return self.start_angle + t * self.sweep

    def point(self, t):
        a = self._angle(t)
        return self.center + self.radius * (math.cos(a) * self.axis_u
                                            + math.sin(a) * self.axis_w)

    def velocity(self, t):
        a = self._angle(t)
        return self.radius * self.sweep * (-math.sin(a) * self.axis_u
                                           + math.cos(a) * self.axis_w)

    def acceleration(self, t):
        a = self._angle(t)
        return -self.radius * self.sweep ** 2 * (math.cos(a) * self.axis_u
                                                 + math.sin(a) * self.axis_w)


@dataclass
class Parabola(Curve):
    """Quadratic arc p0 + t v0 + t^2/2 a0, for curvature-controlled touches."""

    p0: np.ndarray
    v0: np.ndarray
    a0: np.ndarray
    smoothness: str = "Cinf"

    def __post_init__(self):
        self.p0 = np.asarray(self.p0, dtype=float).ravel()
        self.v0 = np.asarray(self.v0, dtype=float).ravel()
        self.a0 = np.asarray(self.a0, dtype=float).ravel()
        self.dim = self.p0.shape[0]

    def point(self, t):
        return self.p0 + t * self.v0 + 0.5 * t * t * self.a0

    def velocity(self, t):
        return self.v0 + t * self.a0

    def acceleration(self, t):
        return self.a0.copy()


class Composite(Curve):
    """Concatenation of curves on consecutive parameter fractions.

    Continuity of positions at junctions is required; velocity matching is
    recorded in the smoothness tag (C1 when all junctions match, otherwise
    piecewise-C1).
    """

    def __init__(self, parts: Sequence[Curve], durations: Sequence[float] | None = None,
                 tol: float = 1e-9):
        if not parts:
            raise ValueError("composite needs at least one part")
        self.parts = list(parts)
        self.dim = self.parts[0].dim
        if durations is None:
            durations = [1.0] * len(self.parts)
        w = np.asarray(durations, dtype=float)
        if np.any(w <= 0):
            raise ValueError("durations must be positive")
        self.fractions = w / w.sum()
        self.starts = np.concatenate([[0.0], np.cumsum(self.fractions)])
        self.starts[-1] = 1.0
        c1 = True
        for i in range(len(self.parts) - 1):
            p_end = self.parts[i].point(1.0)
            p_next = self.parts[i + 1].point(0.0)
            if np.linalg.norm(p_end - p_next) > tol:
                raise ValueError(f"discontinuous junction after part {i}")
            v_end = self.parts[i].velocity(1.0) / self.fractions[i]
            v_next = self.parts[i + 1].velocity(0.0) / self.fractions[i + 1]
            if np.linalg.norm(v_end - v_next) > tol * (1.0 + np.linalg.norm(v_end)):
                c1 = False
        self.smoothness = "C1" if c1 else "piecewise-C1"

    def _locate(self, t):
        i = int(np.clip(np.searchsorted(self.starts, t, side="right") - 1,
                        0, len(self.parts) - 1))
        local = (t - self.starts[i]) / self.fractions[i]
        return i, float(np.clip(local, 0.0, 1.0))

    def point(self, t):
        i, u = self._locate(t)
        return self.parts[i].point(u)

    def velocity(self, t):
        i, u = self._locate(t)
        return self.parts[i].velocity(u) / self.fractions[i]

    def acceleration(self, t):
        i, u = self._locate(t)
        acc = self.parts[i].acceleration(u)
        if acc is None:
            return None
        return acc / self.fractions[i] ** 2

    def junctions(self):
        return tuple(self.starts[1:-1])


class Hermite(Curve):
    """C^1 cubic Hermite spline through points with prescribed velocities."""

    def __init__(self, times: Sequence[float], points: Sequence, velocities: Sequence):
        t = np.asarray(times, dtype=float)
        p = np.asarray(points, dtype=float)
        v = np.asarray(velocities, dtype=float)
        if t.ndim != 1 or t.shape[0] < 2:
            raise ValueError("need at least two knots")
        if np.any(np.diff(t) <= 0):
            raise ValueError("knot times must increase")
        if p.shape != v.shape or p.shape[0] != t.shape[0]:
            raise ValueError("points/velocities must match the knot count")
        if abs(t[0]) > 1e-12 or abs(t[-1] - 1.0) > 1e-12:
            raise ValueError("knots must span [0, 1]")
        self.times, self.points, self.velocities = t, p, v
        self.dim = p.shape[1]
        self.smoothness = "C1"

    def _locate(self, t):
        i = int(np.clip(np.searchsorted(self.times, t, side="right") - 1,
                        0, self.times.shape[0] - 2))
        h = self.times[i + 1] - self.times[i]
        u = (t - self.times[i]) / h
        return i, float(np.clip(u, 0.0, 1.0)), h

    def point(self, t):
        i, u, h = self._locate(t)
        p0, p1 = self.points[i], self.points[i + 1]
        m0, m1 = self.velocities[i] * h, self.velocities[i + 1] * h
        h00 = 2 * u**3 - 3 * u**2 + 1
        h10 = u**3 - 2 * u**2 + u
        h01 = -2 * u**3 + 3 * u**2
        h11 = u**3 - u**2
        return h00 * p0 + h10 * m0 + h01 * p1 + h11 * m1

    def velocity(self, t):
        i, u, h = self._locate(t)
        p0, p1 = self.points[i], self.points[i + 1]
        m0, m1 = self.velocities[i] * h, self.velocities[i + 1] * h
        d00 = 6 * u**2 - 6 * u
        d10 = 3 * u**2 - 4 * u + 1
        d01 = -6 * u**2 + 6 * u
        d11 = 3 * u**2 - 2 * u
        return (d00 * p0 + d10 * m0 + d01 * p1 + d11 * m1) / h

    def acceleration(self, t):
        i, u, h = self._locate(t)
        p0, p1 = self.points[i], self.points[i + 1]
        m0, m1 = self.velocities[i] * h, self.velocities[i + 1] * h
        dd00 = 12 * u - 6
        dd10 = 6 * u - 4
        dd01 = -12 * u + 6
        dd11 = 6 * u - 2
        return (dd00 * p0 + dd10 * m0 + dd01 * p1 + dd11 * m1) / h**2

    def junctions(self):
        return tuple(self.times[1:-1])


def hermite_through_points(points: Sequence, max_speed: float | None = None) -> Hermite:
    """Catmull-Rom style C^1 interpolation of a target point stream.

    Interior velocities are central differences, endpoint velocities one-sided,
    all optionally clamped to max_speed (in curve-parameter units).  The same
    rule is used by the steering service so scripted drags and batch lifts
    integrate identical curves.
    """
    p = np.asarray(points, dtype=float)
    n = p.shape[0]
    if n < 2:
        raise ValueError("need at least two target points")
    t = np.linspace(0.0, 1.0, n)
    v = np.zeros_like(p)
    v[0] = (p[1] - p[0]) / (t[1] - t[0])
    v[-1] = (p[-1] - p[-2]) / (t[-1] - t[-2])
    if n > 2:
        v[1:-1] = (p[2:] - p[:-2]) / (t[2:] - t[:-2])[:, None]
    if max_speed is not None:
        speeds = np.linalg.norm(v, axis=1)
        over = speeds > max_speed
        v[over] *= (max_speed / speeds[over])[:, None]
    return Hermite(t, p, v)


@dataclass
class ScaledLoop(Curve):
    """Linear shrink of a loop toward its basepoint: (1-s) g(0) + s g(t)."""

    base: Curve
    scale: float

    def __post_init__(self):
        self.dim = self.base.dim
        self.smoothness = self.base.smoothness
        self._anchor = self.base.point(0.0)

    def point(self, t):
        return (1.0 - self.scale) * self._anchor + self.scale * self.base.point(t)

    def velocity(self, t):
        return self.scale * self.base.velocity(t)

    def acceleration(self, t):
        acc = self.base.acceleration(t)
        return None if acc is None else self.scale * acc

    def junctions(self):
        return self.base.junctions()


@dataclass
class Reparameterized(Curve):
    """Curve gamma(phi(u)) for an orientation-preserving C^1 map phi."""

    base: Curve
    phi: Callable[[float], float]
    dphi: Callable[[float], float]

    def __post_init__(self):
        self.dim = self.base.dim
        self.smoothness = self.base.smoothness

    def point(self, t):
        return self.base.point(self.phi(t))

    def velocity(self, t):
        return self.dphi(t) * self.base.velocity(self.phi(t))


@dataclass
class CallableCurve(Curve):
    """Curve from explicit point/velocity callables (analytic composites)."""

    point_fn: Callable[[float], np.ndarray]
    velocity_fn: Callable[[float], np.ndarray]
    dim: int = 0
    smoothness: str = "C1"
    acceleration_fn: Callable[[float], np.ndarray] | None = None
    junction_params: tuple = ()

    def __post_init__(self):
        if self.dim == 0:
            self.dim = np.asarray(self.point_fn(0.0)).ravel().shape[0]

    def point(self, t):
        return np.asarray(self.point_fn(t), dtype=float).ravel()

    def velocity(self, t):
        return np.asarray(self.velocity_fn(t), dtype=float).ravel()

    def acceleration(self, t):
        if self.acceleration_fn is None:
            return None
        return np.asarray(self.acceleration_fn(t), dtype=float).ravel()

    def junctions(self):
        return self.junction_params


def derivative_mismatch(curve: Curve, n: int = 33, h: float = 1e-6) -> float:
    """Largest gap between velocity(t) and central differences of point(t).

    Probe grid stays clear of junctions; used to validate curve constructions
    (the contract is mismatch <= 1e-6 * (1 + |velocity|)).
    """
    ts = np.linspace(h, 1.0 - h, n)
    bad = np.array(curve.junctions(), dtype=float)
    worst = 0.0
    for t in ts:
        if bad.size and np.min(np.abs(bad - t)) < 2 * h:
            continue
        fd = (curve.point(t + h) - curve.point(t - h)) / (2 * h)
        v = curve.velocity(t)
        gap = np.linalg.norm(fd - v) / (1.0 + np.linalg.norm(v))
        worst = max(worst, float(gap))
    return worst


def curvature_2d(velocity: np.ndarray, acceleration: np.ndarray) -> float:
    """Signed planar curvature (x' y'' - y' x'') / |v|^3 in the ambient frame."""
    v, a = velocity, acceleration
    speed = np.linalg.norm(v)
    if speed == 0:
        raise ValueError("curvature undefined at a stationary point")
    return float((v[0] * a[1] - v[1] * a[0]) / speed**3)


def oriented_curvature(velocity: np.ndarray, acceleration: np.ndarray,
                       reference: np.ndarray) -> float:
    """Signed curvature in the plane oriented by (reference, velocity).

    With e1 = reference (unit, orthogonal to the velocity) and
    e2 = velocity/|velocity|, this is -<acc, e1> / |velocity|^2.
    """
    speed = np.linalg.norm(velocity)
    if speed == 0:
        raise ValueError("curvature undefined at a stationary point")
    return float(-(acceleration @ reference) / speed**2)


def numeric_acceleration(curve: Curve, t: float, h: float = 1e-4) -> np.ndarray:
    """Central-difference second derivative with one Richardson step."""
    def second(hh):
        return (curve.point(t + hh) - 2.0 * curve.point(t) + curve.point(t - hh)) / hh**2

    a1 = second(h)
    a2 = second(h / 2.0)
    return (4.0 * a2 - a1) / 3.0
