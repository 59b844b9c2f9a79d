"""Two-valued configurations: compact model, explicit lifting, Hairer gate.

A configuration taking exactly the values {p, q} is determined by the pair
(p, q) on S^{d-1} x S^{d-1}; its snout is the closed form L_p p + L_q q.
Planar lifts are computed by tracking the two-point fiber of that map
(a circle-circle intersection) instead of the group ODE, which does not
apply below three distinct values.  Passing through a lined pair (p, -p)
is admitted only when the target curve meets the critical sphere
tangentially with signed curvature (L_p - L_q) / L^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .configuration import (Configuration, ConstantPiece, Partition,
                            value_samples)
from .curves import Curve, numeric_acceleration, oriented_curvature
from .geometry import sphere_point
from .numerics import DEFAULT_SETTINGS


class HairerError(RuntimeError):
    """A lined crossing failed the second-order admissibility condition."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class FiberError(RuntimeError):
    """The target point has no bivalued preimage (left the annulus)."""


@dataclass(frozen=True)
class BivaluedConfig:
    """Configuration with exactly two values, p on pattern-0 intervals, q on 1."""

    p: np.ndarray
    q: np.ndarray
    partition: Partition
    pattern: tuple

    def __post_init__(self):
        object.__setattr__(self, "p", sphere_point(self.p))
        object.__setattr__(self, "q", sphere_point(self.q))
        pattern = tuple(int(x) for x in self.pattern)
        if len(pattern) != len(self.partition.breakpoints) - 1:
            raise ValueError("pattern must assign every partition interval")
        if any(x not in (0, 1) for x in pattern):
            raise ValueError("pattern entries must be 0 (p) or 1 (q)")
        if 0 not in pattern or 1 not in pattern:
            raise ValueError("both values must occur")
        if np.linalg.norm(self.p - self.q) < 1e-12:
            raise ValueError("p and q must differ")
        object.__setattr__(self, "pattern", pattern)

    @property
    def dim(self) -> int:
        return self.p.shape[0]

    @property
    def length(self) -> float:
        return self.partition.length

    @property
    def length_p(self) -> float:
        return sum(b - a for (a, b), k in
                   zip(self.partition.intervals, self.pattern) if k == 0)

    @property
    def length_q(self) -> float:
        return sum(b - a for (a, b), k in
                   zip(self.partition.intervals, self.pattern) if k == 1)

    def is_lined(self, tol: float = 1e-9) -> bool:
        return bool(np.linalg.norm(self.p + self.q) <= tol)

    def with_values(self, p, q) -> "BivaluedConfig":
        return BivaluedConfig(p, q, self.partition, self.pattern)


def w_endpoint(c: BivaluedConfig) -> np.ndarray:
    """Snout of the two-valued snake in closed form: L_p p + L_q q."""
    return c.length_p * c.p + c.length_q * c.q


def to_configuration(c: BivaluedConfig) -> Configuration:
    pieces = tuple(ConstantPiece(c.p if k == 0 else c.q) for k in c.pattern)
    return Configuration(c.partition, pieces)


def from_configuration(z: Configuration,
                       tol: float = DEFAULT_SETTINGS.value_cluster_tol) -> BivaluedConfig:
    """Recognize a piecewise-constant configuration with exactly two values."""
    if not all(isinstance(p, ConstantPiece) for p in z.pieces):
        raise ValueError("only piecewise-constant configurations can be bivalued")
    vals = value_samples(z)
    reps: list[np.ndarray] = []
    pattern = []
    for v in vals:
        hit = None
        for i, r in enumerate(reps):
            if np.linalg.norm(v - r) <= tol:
                hit = i
                break
        if hit is None:
            reps.append(v)
            hit = len(reps) - 1
        pattern.append(hit)
    if len(reps) != 2:
        raise ValueError(f"configuration takes {len(reps)} distinct values, not 2")
    return BivaluedConfig(reps[0], reps[1], z.partition, tuple(pattern))


# ---------------------------------------------------------------------------
# Planar fiber solving
# ---------------------------------------------------------------------------

def _rot90(v: np.ndarray) -> np.ndarray:
    return np.array([-v[1], v[0]])

def _fiber_candidates(x: np.ndarray, lp: float, lq: float, inside_tol: float = 1e-12):
    """Both unit pairs (p, q) with lp p + lq q = x, for planar x != 0."""
    r = np.linalg.norm(x)
    if r < 1e-300:
        raise FiberError("fiber solve needs a nonzero target")
    cp = (r * r + lp * lp - lq * lq) / (2.0 * lp * r)
    if cp > 1.0 + inside_tol / r or cp < -1.0 - inside_tol / r:
        raise FiberError(f"target at radius {r:.6g} has no bivalued preimage")
    cp = min(max(cp, -1.0), 1.0)
    xhat = x / r
    nhat = _rot90(xhat)
    sp = math.sqrt(max(1.0 - cp * cp, 0.0))
    out = []
    for sign in (1.0, -1.0):
        p = cp * xhat + sign * sp * nhat
        q = (x - lp * p) / lq
        q = q / np.linalg.norm(q)
        out.append((p, q))
    return out


@dataclass
class HairerReport:
    """Record of one lined crossing and its admissibility data."""

    t: float
    point: np.ndarray
    lined_direction: np.ndarray
    orthogonality_defect: float
    kappa_required: float
    kappa_actual: float
    admissible: bool


@dataclass
class BivaluedLift:
    """Trajectory of a planar bivalued lift on the fiber model."""

    times: np.ndarray
    ps: np.ndarray
    qs: np.ndarray
    crossings: list
    final: BivaluedConfig


def hairer_admissible(curve: Curve, t0: float, c: BivaluedConfig,
                      tol: float = 1e-6) -> HairerReport:
    """Second-order test for passing through the lined pair of c at time t0.

    Requires the velocity orthogonal to the lined direction and the signed
    curvature, in the plane oriented by (lined direction, velocity), equal to
    (L_p - L_q) / L^2.
    """
    if not c.is_lined(1e-6):
        raise ValueError("admissibility test applies at a lined configuration")
    p0 = c.p
    vel = curve.velocity(t0)
    speed = np.linalg.norm(vel)
    if speed == 0.0:
        raise HairerError(f"tangency at t = {t0:.12g} carries no transversal data")
    for junction in curve.junctions():
        if abs(junction - t0) < 1e-9:
            raise HairerError(f"no second derivative available at t = {t0:.12g}")
    acc = curve.acceleration(t0)
    if acc is None:
        acc = numeric_acceleration(curve, t0)
    ortho = abs(float(vel @ p0)) / speed
    kappa_req = (c.length_p - c.length_q) / c.length ** 2
    kappa_act = oriented_curvature(vel, acc, p0)
    ok = ortho <= tol and abs(kappa_act - kappa_req) <= tol * (1.0 + abs(kappa_req))
    return HairerReport(t0, curve.point(t0), p0.copy(), ortho,
                        kappa_req, kappa_act, ok)


def _minimize_scalar(fn, a: float, b: float, tol: float = 1e-12) -> float:
    """Golden-section minimum of a unimodal scalar function on [a, b]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = fn(x1), fn(x2)
    while b - a > tol:
        if f1 < f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = fn(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = fn(x2)
    return 0.5 * (a + b)


def lift_bivalued(c0: BivaluedConfig, curve: Curve, step: float = 1e-3,
                  hairer_tol: float = 1e-6) -> BivaluedLift:
    """Lift a snout curve by tracking the two-point fiber (planar snakes).

    The pair (p, q) is solved algebraically at every sample and continued by
    branch proximity to a linear prediction, so the fiber equation holds to
    machine precision along the whole trajectory.  Crossings of the critical
    radius |L_p - L_q| are located by golden-section refinement and admitted
    only when the curvature condition holds; general d falls back to a
    projected spherical ODE away from lined pairs.
    """
    if c0.dim != 2:
        return _lift_bivalued_ode(c0, curve, step)
    if c0.is_lined():
        raise ValueError("lifting from a lined configuration is not supported")
    lp, lq = c0.length_p, c0.length_q
    length = c0.length
    rc = abs(lp - lq)
    start_gap = np.linalg.norm(w_endpoint(c0) - curve.point(0.0))
    if start_gap > 1e-9:
        raise ValueError(f"curve must start at the snout (gap {start_gap:.3g})")

    grid = np.linspace(0.0, 1.0, max(2, int(round(1.0 / step)) + 1))
    if curve.junctions():
        grid = np.unique(np.concatenate([grid, np.asarray(curve.junctions())]))

    def phi(t):
        return float(np.linalg.norm(curve.point(t)) - rc)

    # locate candidate crossings: local minima of the distance to the
    # critical radius that actually reach it
    crossings: list[HairerReport] = []
    crossing_ts: list[float] = []
    values = np.array([phi(t) for t in grid])
    if np.min(values) < -1e-9 * length:
        tmin = grid[int(np.argmin(values))]
        raise FiberError(f"target curve enters the unreachable inner disk near t = {tmin:.6g}")
    for k in range(1, grid.shape[0] - 1):
        if values[k] <= values[k - 1] and values[k] <= values[k + 1]:
            tstar = _minimize_scalar(phi, grid[k - 1], grid[k + 1])
            if phi(tstar) <= 1e-9 * max(length, 1.0) and not any(
                    abs(tstar - t) < 1e-9 for t in crossing_ts):
                crossing_ts.append(tstar)

    ps = [c0.p.copy()]
    qs = [c0.q.copy()]
    # verify the start lies on a fiber branch
    cands = _fiber_candidates(curve.point(0.0), lp, lq)
    if min(np.linalg.norm(c0.p - p) for p, _ in cands) > 1e-9:
        raise ValueError("initial pair does not solve the fiber equation")

    for k in range(1, grid.shape[0]):
        t = grid[k]
        x = curve.point(t)
        r = np.linalg.norm(x)
        if r >= length:
            raise FiberError(f"target curve leaves the outer ball at t = {t:.6g}")
        if r < 1e-13:
            # exact hit of the origin on a grid point (only possible when
            # L_p = L_q); the crossing handling brackets it, so just carry
            # the previous pair forward for this sample
            ps.append(ps[-1].copy())
            qs.append(qs[-1].copy())
            continue
        if len(ps) >= 2:
            dt_prev = grid[k - 1] - grid[k - 2] if k >= 2 else 1.0
            slope = (ps[-1] - ps[-2]) / max(dt_prev, 1e-300)
            predicted = ps[-1] + slope * (t - grid[k - 1])
        else:
            predicted = ps[-1]
        cands = _fiber_candidates(x, lp, lq)
        p, q = min(cands, key=lambda pq: np.linalg.norm(pq[0] - predicted))
        ps.append(p)
        qs.append(q)

    # admissibility of every located crossing
    for tstar in sorted(crossing_ts):
        idx = int(np.searchsorted(grid, tstar))
        i0, i1 = max(idx - 2, 0), max(idx - 1, 0)
        if grid[i1] > grid[i0]:
            slope = (ps[i1] - ps[i0]) / (grid[i1] - grid[i0])
            p0 = ps[i1] + slope * (tstar - grid[i1])
        else:
            p0 = ps[i1]
        n0 = np.linalg.norm(p0)
        p0 = p0 / n0 if n0 > 0 else ps[i1]
        lined = BivaluedConfig(p0, -p0, c0.partition, c0.pattern)
        report = hairer_admissible(curve, tstar, lined, hairer_tol)
        crossings.append(report)
        if not report.admissible:
            raise HairerError(
                f"inadmissible lined crossing at t = {tstar:.9g}: curvature "
                f"{report.kappa_actual:.6g} vs required {report.kappa_required:.6g}, "
                f"orthogonality defect {report.orthogonality_defect:.3g}",
                report)

    final = c0.with_values(ps[-1], qs[-1])
    return BivaluedLift(grid, np.asarray(ps), np.asarray(qs), crossings, final)


def _lift_bivalued_ode(c0: BivaluedConfig, curve: Curve, step: float) -> BivaluedLift:
    """General-d bivalued lift: project the lifting field onto the pair model.

    Classic RK4 on (p, q) with the shared control u = M^{-1} gamma', stopping
    with an error at lined pairs (no crossing theory is attempted here).
    """
    lp, lq = c0.length_p, c0.length_q
    length = c0.length
    d = c0.dim

    def rhs(t, state):
        p, q = state[:d], state[d:]
        gram = lp * np.outer(p, p) + lq * np.outer(q, q)
        m = length * np.eye(d) - gram
        if np.linalg.eigvalsh(m)[0] < 1e-10 * length:
            raise HairerError(f"trajectory reached a lined pair near t = {t:.6g}")
        u = np.linalg.solve(m, curve.velocity(t))
        return np.concatenate([u - (p @ u) * p, u - (q @ u) * q])

    grid = np.linspace(0.0, 1.0, max(2, int(round(1.0 / step)) + 1))
    if curve.junctions():
        grid = np.unique(np.concatenate([grid, np.asarray(curve.junctions())]))
    state = np.concatenate([c0.p, c0.q])
    ps, qs = [c0.p.copy()], [c0.q.copy()]
    for k in range(grid.shape[0] - 1):
        t, h = grid[k], grid[k + 1] - grid[k]
        k1 = rhs(t, state)
        k2 = rhs(t + 0.5 * h, state + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, state + 0.5 * h * k2)
        k4 = rhs(t + h, state + h * k3)
        state = state + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        state[:d] /= np.linalg.norm(state[:d])
        state[d:] /= np.linalg.norm(state[d:])
        ps.append(state[:d].copy())
        qs.append(state[d:].copy())
    final = c0.with_values(ps[-1], qs[-1])
    return BivaluedLift(grid, np.asarray(ps), np.asarray(qs), [], final)


# ---------------------------------------------------------------------------
# Holonomy orbits of bivalued configurations
# ---------------------------------------------------------------------------

@dataclass
class BivaluedOrbit:
    """Classification of horb for a two-valued configuration, with witnesses."""

    kind: str                 # "sphere(d-2)", "point" or "sphere(d-1)"
    witnesses: list
    connected: bool
    component_count: int


def horb_bivalued(c0: BivaluedConfig, n_witnesses: int = 8) -> BivaluedOrbit:
    """Sample the holonomy orbit of a bivalued configuration.

    Not lined: the fiber sphere S^{d-2} over the snout (two points for d = 2,
    where the orbit is disconnected).  Lined with nonzero snout: the single
    pair itself.  Lined with snout zero: the sphere of antipodal pairs.
    """
    d = c0.dim
    b = w_endpoint(c0)
    if c0.is_lined(1e-9):
        if np.linalg.norm(b) > 1e-9:
            return BivaluedOrbit("point", [c0], True, 1)
        witnesses = []
        for p in _sphere_samples(d, n_witnesses):
            witnesses.append(c0.with_values(p, -p))
        return BivaluedOrbit(f"sphere({d - 1})", witnesses, True, 1)

    lp, lq = c0.length_p, c0.length_q
    r = np.linalg.norm(b)
    bhat = b / r
    cp = (r * r + lp * lp - lq * lq) / (2.0 * lp * r)
    sp = math.sqrt(max(1.0 - cp * cp, 0.0))
    witnesses = []
    for n in _orthosphere_samples(bhat, n_witnesses):
        p = cp * bhat + sp * n
        q = (b - lp * p) / lq
        q = q / np.linalg.norm(q)
        witnesses.append(c0.with_values(p, q))
    residual = max(np.linalg.norm(w_endpoint(w) - b) for w in witnesses)
    if residual > 1e-10 * max(1.0, c0.length):
        raise AssertionError(f"witness left the fiber (residual {residual:.3g})")
    if d == 2:
        return BivaluedOrbit("sphere(0)", witnesses, False, 2)
    return BivaluedOrbit(f"sphere({d - 2})", witnesses, True, 1)


def _sphere_samples(d: int, n: int) -> list[np.ndarray]:
    rng = np.random.default_rng(7)
    if d == 2:
        angles = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
        return [np.array([math.cos(a), math.sin(a)]) for a in angles]
    pts = rng.standard_normal((n, d))
    return [p / np.linalg.norm(p) for p in pts]


def _orthosphere_samples(bhat: np.ndarray, n: int) -> list[np.ndarray]:
    """Unit vectors orthogonal to bhat: the S^{d-2} of fiber directions."""
    d = bhat.shape[0]
    if d == 2:
        nperp = _rot90(bhat)
        return [nperp, -nperp][: max(2, min(n, 2))]
    basis = np.linalg.svd(np.eye(d) - np.outer(bhat, bhat))[0][:, : d - 1]
    rng = np.random.default_rng(11)
    out = []
    for _ in range(n):
        c = rng.standard_normal(d - 1)
        v = basis @ (c / np.linalg.norm(c))
        out.append(v / np.linalg.norm(v))
    return out
