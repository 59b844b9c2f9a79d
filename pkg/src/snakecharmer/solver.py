"""Horizontal lifting of snout curves through the group ODE.

A target curve gamma with gamma(0) = f(z0) is lifted by solving

    g'(t) = chi( M(g(t).z0)^{-1} gamma'(t) ) g(t),   g(0) = id

on the Moebius group; z_t = g(t).z0 is then the unique horizontal lift.
Integration is Runge-Kutta-Munthe-Kaas of order 4 (stage increments live in
the Lie algebra, steps are group exponentials), with periodic constraint
renormalization.  For planar snakes the same scheme runs in the SU(1,1)
double cover, which is cheaper and exposes the (v, theta) chart directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from . import bivalued as _bivalued
from . import geometry
from .configuration import (Configuration, _piece_weight_value, act,
                            distinct_value_count, endpoint, gram_defect,
                            is_lined, sedentariness, sup_distance)
from .curves import CallableCurve, Curve, Segment
from .geometry import (MobiusElement, SU11Element, boost, chart_coordinates,
                       identity, renormalize, su11_renormalize)
from .numerics import DEFAULT_SETTINGS, NumericsSettings


class LiftPreconditionError(ValueError):
    """A lift was requested outside its admissibility conditions."""


class LiftDefectError(RuntimeError):
    """A finished integration failed its own defect tolerance."""


STATUS_COMPLETE = "complete"
STATUS_NEAR_LINED = "stopped_near_lined"
STATUS_OUT_OF_BALL = "stopped_out_of_ball"


@dataclass(frozen=True)
class LiftOptions:
    """Integration options for horizontal lifts."""

    step: float = 1e-3
    defect_tol: float = 1e-6
    sigma_min: float = 1e-6
    renorm_every: int = 16
    enforce_sedentary_ball: bool = True
    require_three_values: bool = True
    snap: bool = False
    save_stride: int = 1

    def __post_init__(self):
        if self.step <= 0 or self.defect_tol <= 0 or self.sigma_min <= 0:
            raise ValueError("step, defect_tol and sigma_min must be positive")
        if self.renorm_every < 1 or self.save_stride < 1:
            raise ValueError("cadences must be at least 1")


@dataclass
class LiftResult:
    """Sampled output of one lift: group path, configurations, diagnostics."""

    times: np.ndarray
    group_path: list
    config_path: list
    defects: np.ndarray
    status: str
    stop_time: float | None = None
    snapped: bool = False

    @property
    def final_config(self) -> Configuration:
        return self.config_path[-1]

    @property
    def final_element(self):
        return self.group_path[-1]


# ---------------------------------------------------------------------------
# Integration kernels
# ---------------------------------------------------------------------------

def _commutator(x, y):
    return x @ y - y @ x


def _dexpinv(omega, a):
    """Truncated inverse differential of exp; enough for a fourth-order scheme."""
    c1 = _commutator(omega, a)
    c2 = _commutator(omega, c1)
    return a - 0.5 * c1 + (1.0 / 12.0) * c2


class _LorentzKernel:
    """Lift state for general d: (d+1)x(d+1) Lorentz matrices."""

    def __init__(self, z0: Configuration):
        self.weights, base_values = _piece_weight_value(z0)
        self.cone = np.hstack([base_values, np.ones((base_values.shape[0], 1))])
        self.length = z0.length
        self.dim = z0.dim

    def start(self):
        return np.eye(self.dim + 1)

    def transformed(self, gmat: np.ndarray) -> np.ndarray:
        y = self.cone @ gmat.T
        return y[:, :-1] / y[:, -1:]

    def gram(self, gmat: np.ndarray) -> np.ndarray:
        v = self.transformed(gmat)
        return self.length * np.eye(self.dim) - v.T @ (self.weights[:, None] * v)

    def snout(self, gmat: np.ndarray) -> np.ndarray:
        return self.weights @ self.transformed(gmat)

    def coefficient(self, gmat: np.ndarray, gamma_dot: np.ndarray):
        m = self.gram(gmat)
        w = np.linalg.solve(m, gamma_dot)
        d = self.dim
        a = np.zeros((d + 1, d + 1))
        a[:d, d] = w
        a[d, :d] = w
        return a, m

    def expm(self, x: np.ndarray) -> np.ndarray:
        return scipy.linalg.expm(x)

    def renorm(self, gmat: np.ndarray) -> np.ndarray:
        return renormalize(MobiusElement(gmat, self.dim)).matrix

    def element(self, gmat: np.ndarray) -> MobiusElement:
        return MobiusElement(gmat, self.dim)

    def min_eig(self, m: np.ndarray) -> float:
        return float(np.linalg.eigvalsh(m)[0])


class _SU11Kernel:
    """Planar lift state in the SU(1,1) double cover (2x2 complex matrices)."""

    def __init__(self, z0: Configuration):
        if z0.dim != 2:
            raise ValueError("SU(1,1) kernel requires d = 2")
        self.weights, base_values = _piece_weight_value(z0)
        self.circle = base_values[:, 0] + 1j * base_values[:, 1]
        self.length = z0.length
        self.dim = 2

    def start(self):
        return np.eye(2, dtype=complex)

    def transformed(self, gmat: np.ndarray) -> np.ndarray:
        a, b = gmat[0, 0], gmat[0, 1]
        return (a * self.circle + b) / (b.conjugate() * self.circle + a.conjugate())

    def gram(self, gmat: np.ndarray) -> np.ndarray:
        w = self.transformed(gmat)
        x, y = w.real, w.imag
        wx = self.weights * x
        gxx = wx @ x
        gxy = wx @ y
        gyy = (self.weights * y) @ y
        return np.array([[self.length - gxx, -gxy],
                         [-gxy, self.length - gyy]])

    def snout(self, gmat: np.ndarray) -> np.ndarray:
        w = self.transformed(gmat)
        return np.array([self.weights @ w.real, self.weights @ w.imag])

    def coefficient(self, gmat: np.ndarray, gamma_dot: np.ndarray):
        m = self.gram(gmat)
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        w0 = (m[1, 1] * gamma_dot[0] - m[0, 1] * gamma_dot[1]) / det
        w1 = (m[0, 0] * gamma_dot[1] - m[1, 0] * gamma_dot[0]) / det
        v = 0.5 * complex(w0, w1)
        a = np.array([[0.0, v], [v.conjugate(), 0.0]], dtype=complex)
        return a, m

    def expm(self, x: np.ndarray) -> np.ndarray:
        # traceless 2x2: exp(X) = cosh(l) I + sinhc(l) X with l^2 = -det X
        mu = -(x[0, 0] * x[1, 1] - x[0, 1] * x[1, 0])
        lam = np.sqrt(complex(mu))
        if abs(lam) < 1e-8:
            ch = 1.0 + mu / 2.0 + mu * mu / 24.0
            sc = 1.0 + mu / 6.0 + mu * mu / 120.0
        else:
            ch = np.cosh(lam)
            sc = np.sinh(lam) / lam
        return ch * np.eye(2, dtype=complex) + sc * x

    def renorm(self, gmat: np.ndarray) -> np.ndarray:
        g = su11_renormalize(gmat)
        return np.array([[g.a, g.b], [g.b.conjugate(), g.a.conjugate()]], dtype=complex)

    def element(self, gmat: np.ndarray) -> SU11Element:
        g = su11_renormalize(gmat)
        return SU11Element(g.a, g.b)

    def min_eig(self, m: np.ndarray) -> float:
        tr = m[0, 0] + m[1, 1]
        disc = math.sqrt(max((m[0, 0] - m[1, 1]) ** 2 + 4.0 * m[0, 1] * m[1, 0], 0.0))
        return 0.5 * (tr - disc)


def _time_grid(step: float, junctions) -> np.ndarray:
    n = max(1, int(round(1.0 / step)) if abs(round(1.0 / step) - 1.0 / step) < 1e-9
            else int(math.ceil(1.0 / step)))
    grid = np.linspace(0.0, 1.0, n + 1)
    if junctions:
        grid = np.unique(np.concatenate([grid, np.asarray(junctions, dtype=float)]))
    return grid


def _check_preconditions(z0: Configuration, curve: Curve, opts: LiftOptions):
    if curve.dim != z0.dim:
        raise LiftPreconditionError("curve and configuration dimensions differ")
    gap = np.linalg.norm(endpoint(z0) - curve.point(0.0))
    if gap > opts.defect_tol:
        raise LiftPreconditionError(
            f"curve must start at the snout: |f(z0) - gamma(0)| = {gap:.3g}")
    if opts.require_three_values and distinct_value_count(z0) < 3:
        raise LiftPreconditionError(
            "configuration takes fewer than 3 distinct values; the group ODE "
            "does not apply (use the bivalued lift or singularity-stop mode)")
    if opts.enforce_sedentary_ball:
        radius = z0.length - 2.0 * sedentariness(z0)
        ts = np.linspace(0.0, 1.0, 201)
        ts = np.unique(np.concatenate([ts, np.asarray(curve.junctions(), dtype=float)]))
        reach = max(float(np.linalg.norm(curve.point(t))) for t in ts)
        if reach >= radius:
            raise LiftPreconditionError(
                f"curve leaves the admissible open ball of radius "
                f"L - 2 sed(z0) = {radius:.6g} (reaches {reach:.6g}); "
                f"global existence of the lift is not guaranteed")


def _run_lift(kernel, g0, curve: Curve, opts: LiftOptions,
              settings: NumericsSettings = DEFAULT_SETTINGS):
    """Shared RKMK4 driver; returns (times, gmats, defects, status, stop_time)."""
    grid = _time_grid(opts.step, curve.junctions())
    length = kernel.length
    gmat = g0
    saved_t = [0.0]
    saved_g = [gmat]
    saved_defect = [float(np.linalg.norm(kernel.snout(gmat) - curve.point(0.0)))]
    status = STATUS_COMPLETE
    stop_time = None
    since_renorm = 0

    for k in range(grid.shape[0] - 1):
        t0, t1 = grid[k], grid[k + 1]
        h = t1 - t0

        a1, m = kernel.coefficient(gmat, curve.velocity(t0))
        if kernel.min_eig(m) < opts.sigma_min * length:
            status, stop_time = STATUS_NEAR_LINED, t0
            break
        if np.linalg.norm(curve.point(t1)) >= length * (1.0 - 1e-9):
            status, stop_time = STATUS_OUT_OF_BALL, t0
            break

        k1 = a1
        o2 = (0.5 * h) * k1
        g2 = kernel.expm(o2) @ gmat
        k2 = _dexpinv(o2, kernel.coefficient(g2, curve.velocity(t0 + 0.5 * h))[0])
        o3 = (0.5 * h) * k2
        g3 = kernel.expm(o3) @ gmat
        k3 = _dexpinv(o3, kernel.coefficient(g3, curve.velocity(t0 + 0.5 * h))[0])
        o4 = h * k3
        g4 = kernel.expm(o4) @ gmat
        k4 = _dexpinv(o4, kernel.coefficient(g4, curve.velocity(t1))[0])
        omega = (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        gmat = kernel.expm(omega) @ gmat

        if opts.snap:
            a_corr, m_corr = kernel.coefficient(gmat, curve.point(t1) - kernel.snout(gmat))
            gmat = kernel.expm(a_corr) @ gmat

        since_renorm += 1
        if since_renorm >= opts.renorm_every:
            gmat = kernel.renorm(gmat)
            since_renorm = 0

        if (k + 1) % opts.save_stride == 0 or k + 1 == grid.shape[0] - 1:
            saved_t.append(t1)
            saved_g.append(gmat)
            saved_defect.append(float(np.linalg.norm(kernel.snout(gmat) - curve.point(t1))))

    return (np.asarray(saved_t), saved_g, np.asarray(saved_defect), status, stop_time)


def _build_result(kernel, z0, lifted, opts) -> LiftResult:
    times, gmats, defects, status, stop_time = lifted
    elements = [kernel.element(g) for g in gmats]
    configs = [z0 if i == 0 else act(e, z0) for i, e in enumerate(elements)]
    result = LiftResult(times, elements, configs, defects, status,
                        stop_time, snapped=opts.snap)
    if status == STATUS_COMPLETE and float(np.max(defects)) > opts.defect_tol:
        raise LiftDefectError(
            f"lift finished but drifted to defect {np.max(defects):.3g} "
            f"> tolerance {opts.defect_tol:.3g}; reduce the step")
    return result


def horizontal_lift(z0: Configuration, curve: Curve,
                    opts: LiftOptions = LiftOptions()) -> LiftResult:
    """Lift a snout curve through the group ODE in the Lorentz model."""
    _check_preconditions(z0, curve, opts)
    kernel = _LorentzKernel(z0)
    lifted = _run_lift(kernel, kernel.start(), curve, opts)
    return _build_result(kernel, z0, lifted, opts)


def lift_su11(z0: Configuration, curve: Curve,
              opts: LiftOptions = LiftOptions()) -> LiftResult:
    """Planar lift in the SU(1,1) cover; group_path holds SU11Element values."""
    if z0.dim != 2:
        raise LiftPreconditionError("the SU(1,1) lift requires d = 2")
    _check_preconditions(z0, curve, opts)
    kernel = _SU11Kernel(z0)
    lifted = _run_lift(kernel, kernel.start(), curve, opts)
    return _build_result(kernel, z0, lifted, opts)


def holonomy(z0: Configuration, loop: Curve,
             opts: LiftOptions = LiftOptions(), closure_tol: float = 1e-9) -> Configuration:
    """Final configuration after lifting a closed loop at the snout.

    Bivalued configurations are delegated to the fiber-tracking lift, which
    is the only defined mechanism below three distinct values.
    """
    if not loop.is_closed(closure_tol):
        raise LiftPreconditionError("holonomy requires a closed loop")
    n_values = distinct_value_count(z0)
    if n_values == 2:
        c0 = _bivalued.from_configuration(z0)
        traj = _bivalued.lift_bivalued(c0, loop, step=opts.step)
        return _bivalued.to_configuration(traj.final)
    if n_values < 2:
        speeds = [np.linalg.norm(loop.velocity(t)) for t in np.linspace(0, 1, 33)]
        if max(speeds) == 0.0:
            return z0
        raise LiftPreconditionError("monovalued configurations admit only constant loops")
    result = horizontal_lift(z0, loop, opts)
    if result.status != STATUS_COMPLETE:
        raise LiftPreconditionError(f"loop lift stopped early: {result.status}")
    return result.final_config


def parallel_transport_to(z: Configuration, b_target,
                          opts: LiftOptions = LiftOptions()) -> Configuration:
    """Transport z along the straight segment from its snout to b_target."""
    b_target = np.asarray(b_target, dtype=float).ravel()
    seg = Segment(endpoint(z), b_target)
    opts = replace(opts, enforce_sedentary_ball=True)
    result = horizontal_lift(z, seg, opts)
    if result.status != STATUS_COMPLETE:
        raise LiftPreconditionError(f"transport stopped early: {result.status}")
    return result.final_config


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------

def check_horizontal(result: LiftResult) -> float:
    """Largest relative misfit of the lift velocity against the allowed field.

    Horizontal velocities have the pointwise form s -> u - <z(s), u> z(s) for a
    single u in R^d.  Finite-difference velocities of the sampled path are
    least-squares fitted by such fields; the worst relative residual is O(h^2)
    for a genuine horizontal lift and order one for vertical motion.
    """
    if len(result.config_path) < 3:
        raise ValueError("need at least three samples")
    data = [_piece_weight_value(z) for z in result.config_path]
    weights = data[0][0]
    worst = 0.0
    for i in range(1, len(data) - 1):
        dt = result.times[i + 1] - result.times[i - 1]
        w = (data[i + 1][1] - data[i - 1][1]) / dt
        z = data[i][1]
        d = z.shape[1]
        zw = np.einsum("ij,ij->i", z, w)
        proj_w = w - z * zw[:, None]
        a = np.einsum("i,ij,ik->jk", weights, z, z)
        a = np.sum(weights) * np.eye(d) - a
        rhs = weights @ proj_w
        u = np.linalg.lstsq(a, rhs, rcond=None)[0]
        zu = z @ u
        fitted = u[None, :] - z * zu[:, None]
        num = weights @ np.einsum("ij,ij->i", w - fitted, w - fitted)
        den = weights @ np.einsum("ij,ij->i", w, w)
        if den > 0:
            worst = max(worst, math.sqrt(max(num, 0.0) / den))
    return worst


def linmap_matrix_check(z0: Configuration, g: MobiusElement, eps: float = 1e-5) -> float:
    """Compare the finite-difference derivative of f along boost directions
    at g with the Gram-defect matrix of g.z0; returns the largest entry gap."""
    moved = act(g, z0)
    if is_lined(moved):
        raise LiftPreconditionError("g.z0 is lined; the matrix is singular there")
    d = z0.dim
    fd = np.zeros((d, d))
    for j in range(d):
        e = np.zeros(d)
        e[j] = 1.0
        plus = endpoint(act(boost(e, eps) @ g, z0))
        minus = endpoint(act(boost(e, -eps) @ g, z0))
        fd[:, j] = (plus - minus) / (2.0 * eps)
    return float(np.max(np.abs(fd - gram_defect(moved))))


# ---------------------------------------------------------------------------
# Smooth loops from group words
# ---------------------------------------------------------------------------

def _bump(u: float) -> float:
    if u <= 0.0:
        return 0.0
    if u >= 1.0:
        return 1.0
    su = math.exp(-1.0 / u)
    s1 = math.exp(-1.0 / (1.0 - u))
    return su / (su + s1)


def _bump_derivative(u: float) -> float:
    if u <= 0.0 or u >= 1.0:
        return 0.0
    su = math.exp(-1.0 / u)
    s1 = math.exp(-1.0 / (1.0 - u))
    dsu = su / (u * u)
    ds1 = s1 / ((1.0 - u) * (1.0 - u))
    return (dsu * s1 + su * ds1) / (su + s1) ** 2


@dataclass
class WordLoop:
    """A group word with its smooth curve and sampled trajectory."""

    word: list
    curve: Curve
    group_of_t: callable
    final_element: MobiusElement


def smooth_loop_from_word(word, z0: Configuration) -> WordLoop:
    """Smooth snout curve traced by a word of boost flows applied to z0.

    Each word entry (v_i, lambda_i) contributes the flow along v_i up to time
    lambda_i, reparameterized by a smooth step that is flat at both ends; at
    any instant only one factor moves, so the trajectory is horizontal and
    gamma(t) = f(g(t).z0) has the analytic derivative M(g(t).z0) w(t).
    """
    word = [(np.asarray(v, dtype=float).ravel(), float(lam)) for v, lam in word]
    d = z0.dim
    r = len(word)
    kernel = _LorentzKernel(z0)

    if r == 0:
        base = endpoint(z0)
        curve = CallableCurve(lambda t: base.copy(), lambda t: np.zeros(d),
                              dim=d, smoothness="Cinf",
                              acceleration_fn=lambda t: np.zeros(d))
        return WordLoop([], curve, lambda t: identity(d), identity(d))

    def group_matrix(t: float) -> np.ndarray:
        m = np.eye(d + 1)
        for i, (v, lam) in enumerate(word):
            u = t * r - i
            phi = _bump(u)
            if phi > 0.0:
                m = boost(v, phi * lam).matrix @ m
        return m

    def point_fn(t: float) -> np.ndarray:
        return kernel.snout(group_matrix(t))

    def velocity_fn(t: float) -> np.ndarray:
        i = min(int(t * r), r - 1)
        u = t * r - i
        v, lam = word[i]
        rate = _bump_derivative(u) * r * lam
        if rate == 0.0:
            return np.zeros(d)
        m = kernel.gram(group_matrix(t))
        return m @ (rate * v)

    curve = CallableCurve(point_fn, velocity_fn, dim=d, smoothness="Cinf",
                          junction_params=tuple(i / r for i in range(1, r)))
    final = MobiusElement(group_matrix(1.0), d)
    group_of_t = lambda t: MobiusElement(group_matrix(t), d)
    return WordLoop(word, curve, group_of_t, final)


def rotation_generating_word(u, s: float, w, t: float):
    """Word of three boost flows whose product is a pure rotation.

    The product of two boosts decomposes as boost(v, 1) . rho; undoing the
    boost part with a third flow leaves the rotation rho.
    """
    u = np.asarray(u, dtype=float).ravel()
    w = np.asarray(w, dtype=float).ravel()
    pair = boost(w, t) @ boost(u, s)
    v, rho = chart_coordinates(pair)
    word = [(u, s), (w, t), (v, -1.0)]
    return word, rho


# ---------------------------------------------------------------------------
# Repeated loops
# ---------------------------------------------------------------------------

@dataclass
class TurnsResult:
    """Per-turn record of an iterated loop lift."""

    distances: np.ndarray
    charts: np.ndarray | None
    defects: np.ndarray
    elements: list = field(default_factory=list)

    @property
    def turns(self) -> int:
        return self.distances.shape[0] - 1


def iterated_holonomy(z0: Configuration, loop: Curve, n_turns: int,
                      opts: LiftOptions = LiftOptions(),
                      progress: callable | None = None) -> TurnsResult:
    """Lift n_turns repetitions of a closed loop, chaining group elements.

    Returns sup-distances to the start, the (v, theta) chart per turn for
    planar snakes, and the defect at each turn boundary.
    """
    if not loop.is_closed(1e-9):
        raise LiftPreconditionError("iterated holonomy requires a closed loop")
    _check_preconditions(z0, loop, opts)
    planar = z0.dim == 2
    kernel = _SU11Kernel(z0) if planar else _LorentzKernel(z0)
    run_opts = replace(opts, save_stride=10 ** 9)
    base = loop.point(0.0)

    gmat = kernel.start()
    distances = [0.0]
    defects = [0.0]
    charts = [np.zeros(3)] if planar else None
    elements = [kernel.element(gmat)]
    for n in range(n_turns):
        times, gmats, defs, status, stop = _run_lift(kernel, gmat, loop, run_opts)
        if status != STATUS_COMPLETE:
            raise LiftPreconditionError(f"turn {n + 1} stopped early: {status}")
        gmat = kernel.renorm(gmats[-1])
        element = kernel.element(gmat)
        elements.append(element)
        zn = act(element, z0)
        distances.append(sup_distance(zn, z0))
        defects.append(float(np.linalg.norm(kernel.snout(gmat) - base)))
        if planar:
            v, theta = geometry.su11_cover_chart(element)
            charts.append(np.array([v[0], v[1], theta]))
        if progress is not None:
            progress(n + 1, distances[-1])
    return TurnsResult(np.asarray(distances),
                       np.asarray(charts) if planar else None,
                       np.asarray(defects), elements)
