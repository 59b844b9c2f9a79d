"""Holonomy orbits: sampling, tangent rank, Stiefel frames, connectivity.

The configurations reachable from z0 by lifting loops at the snout form a
manifold whose dimension is sum_{i=1}^{k+1} (d - i) for k the spherical
dimension of z0; at snout zero every orbit point is a pure rotation of z0
and the component is a Stiefel manifold of (k+1)-frames.  Everything here
gathers numerical evidence (displacement ranks, rotation fits, witness
paths); connectedness in general is left open and reported as such.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .configuration import (Configuration, endpoint, sedentariness,
                            spherical_dimension, sup_distance, value_samples,
                            _piece_weight_value)
from .curves import CircleArc, Curve, ScaledLoop
from .solver import (LiftOptions, LiftPreconditionError, holonomy,
                     smooth_loop_from_word)


def expected_orbit_dimension(d: int, k: int) -> int:
    """sum_{i=1}^{k+1} (d - i): the tangent dimension of the holonomy orbit."""
    return sum(d - i for i in range(1, k + 2))


@dataclass
class OrbitPoint:
    config: Configuration
    connected_to_base: bool | None = None   # None = unknown, never "disconnected"
    lift_error: str | None = None


@dataclass
class OrbitReport:
    """Sampled holonomy orbit with rank and classification evidence."""

    base: Configuration
    points: list
    estimated_rank: int
    expected_dim: int
    spdim: int
    classification: str
    failures: list = field(default_factory=list)


def classify(z0: Configuration) -> str:
    k = spherical_dimension(z0)
    if k == 0:
        vals = value_samples(z0)
        spread = np.max(np.linalg.norm(vals - vals[0], axis=1))
        return "point" if spread <= 1e-9 else "bivalued"
    return "circles" if z0.dim == 2 else "stiefel"


def _config_grid_values(z: Configuration, n: int = 64) -> np.ndarray:
    s = np.linspace(0.0, z.length, n, endpoint=False) + 0.5 * z.length / n
    return z.evaluate(s).ravel()


def orbit_sample(z0: Configuration, loops: list[Curve],
                 opts: LiftOptions = LiftOptions()) -> OrbitReport:
    """Holonomy results of the given loops, with z0 itself included.

    Per-loop lift failures are recorded, not fatal.  The tangent rank is
    estimated from the displacement vectors of the successful loops.
    """
    base_b = endpoint(z0)
    points = [OrbitPoint(z0, connected_to_base=True)]
    failures = []
    displacements = []
    base_vals = _config_grid_values(z0)
    for i, loop in enumerate(loops):
        try:
            z1 = holonomy(z0, loop, opts)
            points.append(OrbitPoint(z1))
            displacements.append(_config_grid_values(z1) - base_vals)
        except Exception as exc:  # recorded, not raised
            failures.append((i, f"{type(exc).__name__}: {exc}"))
    for pt in points:
        gap = np.linalg.norm(endpoint(pt.config) - base_b)
        if gap > max(opts.defect_tol, 1e-8):
            raise AssertionError(f"orbit point left the fiber (gap {gap:.3g})")
    k = spherical_dimension(z0)
    rank = _rank_by_gap(np.asarray(displacements)) if len(displacements) >= 2 else 0
    return OrbitReport(z0, points, rank, expected_orbit_dimension(z0.dim, k), k,
                       classify(z0), failures)


def _rank_by_gap(matrix: np.ndarray, ratio: float = 100.0) -> int:
    """Numerical rank: cut the singular spectrum at the first drop > ratio."""
    if matrix.size == 0:
        return 0
    svals = np.linalg.svd(matrix, compute_uv=False)
    svals = svals[svals > 0]
    for i in range(svals.shape[0] - 1):
        if svals[i] / svals[i + 1] > ratio:
            return i + 1
    return svals.shape[0]


def small_probe_loops(z0: Configuration, eps: float, n_probes: int,
                      rng: np.random.Generator) -> list[Curve]:
    """Circles of radius eps through the snout, in random 2-planes."""
    d = z0.dim
    b = endpoint(z0)
    loops = []
    for _ in range(n_probes):
        if d == 2:
            u = _random_unit(rng, 2)
            w = np.array([-u[1], u[0]])
        else:
            u = _random_unit(rng, d)
            w = _random_unit(rng, d)
            w = w - (w @ u) * u
            while np.linalg.norm(w) < 1e-6:
                w = _random_unit(rng, d)
                w = w - (w @ u) * u
            w = w / np.linalg.norm(w)
        # circle through b: center b + eps*u, starting angle pi relative to u
        loops.append(CircleArc(center=b + eps * u, radius=eps,
                               start_angle=math.pi, sweep=2.0 * math.pi,
                               axis_u=u, axis_w=w))
    return loops


def _random_unit(rng, d):
    v = rng.standard_normal(d)
    return v / np.linalg.norm(v)


def orbit_tangent_rank(z0: Configuration, eps: float | None = None,
                       n_probes: int = 12, opts: LiftOptions | None = None,
                       seed: int = 2024) -> int:
    """Estimate dim horb(z0) from holonomies of small loops at the snout.

    Small-loop holonomy displacements span the orbit tangent space (they
    realize the curvature of the connection); the rank of their stack,
    separated by a 100x singular-value gap, is the estimate.
    """
    k = spherical_dimension(z0)
    if k == 0:
        raise LiftPreconditionError(
            "spherical dimension 0: use the bivalued orbit classification")
    if eps is None:
        eps = 1e-2 * z0.length
    if opts is None:
        opts = LiftOptions(step=2e-3)
    rng = np.random.default_rng(seed)
    loops = small_probe_loops(z0, eps, n_probes, rng)
    base_vals = _config_grid_values(z0)
    rows = []
    for loop in loops:
        z1 = holonomy(z0, loop, opts)
        rows.append(_config_grid_values(z1) - base_vals)
    return _rank_by_gap(np.asarray(rows))


# ---------------------------------------------------------------------------
# Rotation fits at snout zero
# ---------------------------------------------------------------------------

class ProcrustesFitError(RuntimeError):
    """No rotation maps the reference configuration onto the orbit point."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


def rotation_fit(z: Configuration, z0: Configuration):
    """Best rotation R with R . z0 = z over matched samples (weighted Kabsch).

    Partitions are preserved by lifts, so values align by position; returns
    (R, rms residual).
    """
    w0, v0 = _piece_weight_value(z0)
    w1, v1 = _piece_weight_value(z)
    if v0.shape != v1.shape:
        raise ValueError("configurations do not share their sampling structure")
    h = (v1 * w0[:, None]).T @ v0
    u, _, vt = np.linalg.svd(h)
    sign = np.sign(np.linalg.det(u @ vt))
    d = v0.shape[1]
    corr = np.diag([1.0] * (d - 1) + [sign])
    rot = u @ corr @ vt
    diff = v0 @ rot.T - v1
    rms = math.sqrt(float(w0 @ np.einsum("ij,ij->i", diff, diff)) / float(np.sum(w0)))
    return rot, rms


def reference_frame(z0: Configuration, tol: float = 1e-8) -> np.ndarray:
    """Orthonormal basis (d, k+1) of the linear span of the values of z0.

    At snout zero the minimal sub-sphere is a great sphere, so the span has
    dimension k + 1 and the frame pins down orbit points up to the stabilizer.
    """
    vals = value_samples(z0)
    u, s, vt = np.linalg.svd(vals, full_matrices=False)
    rank = int(np.sum(s > tol * s[0]))
    return vt[:rank].T


def stiefel_frame(z: Configuration, z0: Configuration,
                  tol: float = 1e-6) -> np.ndarray:
    """Frame of an orbit point at snout zero: the rotation fit applied to the
    reference frame of z0.  Raises ProcrustesFitError when no rotation fits
    (the point lies outside the rotation orbit or in another component)."""
    b = endpoint(z)
    if np.linalg.norm(b) > 1e-6 * max(1.0, z.length):
        raise ValueError("stiefel frames are defined at snout zero")
    rot, rms = rotation_fit(z, z0)
    if rms > tol:
        raise ProcrustesFitError(
            f"no rotation maps the reference onto this point (rms {rms:.3g})", rms)
    return rot @ reference_frame(z0)


# ---------------------------------------------------------------------------
# Connectivity witnesses for nomadic configurations
# ---------------------------------------------------------------------------

@dataclass
class WitnessPath:
    """Continuous-in-s family of holonomy endpoints joining z to z0."""

    scales: np.ndarray
    configs: list
    max_gap: float


class ConnectivityError(RuntimeError):
    def __init__(self, message, scale=None):
        super().__init__(message)
        self.scale = scale


def connectivity_probe(z0: Configuration, z: Configuration, word,
                       opts: LiftOptions | None = None, n_scales: int = 32,
                       gap_tol: float = 0.2, max_refine: int = 3) -> WitnessPath:
    """Path evidence that z lies in the base component of horb(z0).

    The word's smooth loop is shrunk linearly onto its basepoint; lifting
    each member of the family traces the endpoints continuously from z back
    to z0.  Requires a nomadic base (every shrunk loop stays liftable).
    """
    if sedentariness(z0) > 1e-12:
        raise LiftPreconditionError("connectivity probe requires a nomadic base")
    if opts is None:
        opts = LiftOptions(step=2e-3)
    loop_data = smooth_loop_from_word(word, z0)
    if not loop_data.curve.is_closed(1e-8):
        raise LiftPreconditionError("the word does not produce a closed loop")

    def endpoint_config(scale: float) -> Configuration:
        if scale == 0.0:
            return z0
        try:
            return holonomy(z0, ScaledLoop(loop_data.curve, scale), opts)
        except Exception as exc:
            raise ConnectivityError(
                f"lift failed at scale s = {scale:.6g}: {exc}", scale) from exc

    scales = list(np.linspace(0.0, 1.0, n_scales))
    configs = {s: endpoint_config(s) for s in scales}
    for _ in range(max_refine + 1):
        gaps = [sup_distance(configs[a], configs[b])
                for a, b in zip(scales, scales[1:])]
        worst = max(gaps)
        if worst <= gap_tol:
            break
        refined = [scales[0]]
        for a, b, g in zip(scales, scales[1:], gaps):
            if g > gap_tol:
                mid = 0.5 * (a + b)
                configs[mid] = endpoint_config(mid)
                refined.append(mid)
            refined.append(b)
        scales = refined
    else:
        raise ConnectivityError(
            f"witness gaps did not refine below {gap_tol} (worst {worst:.3g})")

    final_gap = sup_distance(configs[scales[-1]], z)
    if final_gap > max(10.0 * opts.defect_tol, 1e-6):
        raise ConnectivityError(
            f"word endpoint differs from the target configuration ({final_gap:.3g})")
    return WitnessPath(np.asarray(scales), [configs[s] for s in scales], worst)
