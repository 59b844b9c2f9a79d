"""Snake configurations: piecewise maps [0, L] -> S^{d-1} and their invariants.

A configuration z is the hodograph of a snake: the snake itself is the
cumulative integral S_z(s) = int_0^s z, its snout S_z(L) the endpoint map
f(z).  Pieces are either constant unit vectors (polygonal snakes, exact
arithmetic) or smooth samples frozen on a composite Gauss-Legendre rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import geometry
from .geometry import MobiusElement, SU11Element, apply_points, su11_apply
from .numerics import (DEFAULT_SETTINGS, NumericsSettings, adaptive_vector_rule,
                       gauss_legendre_rule, normalize_rows)


@dataclass(frozen=True)
class Partition:
    """Arc-length partition 0 = s_0 < s_1 < ... < s_N = L."""

    breakpoints: tuple

    def __post_init__(self):
        bp = tuple(float(s) for s in self.breakpoints)
        if len(bp) < 2:
            raise ValueError("partition needs at least the two endpoints")
        if bp[0] != 0.0:
            raise ValueError("partition must start at 0")
        if any(b <= a for a, b in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", bp)

    @property
    def length(self) -> float:
        return self.breakpoints[-1]

    @property
    def intervals(self):
        return list(zip(self.breakpoints[:-1], self.breakpoints[1:]))


@dataclass(frozen=True)
class ConstantPiece:
    """One interval on which z is a fixed unit vector."""

    value: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "value", geometry.sphere_point(self.value))

    @property
    def dim(self) -> int:
        return self.value.shape[0]

    def evaluate(self, s: np.ndarray) -> np.ndarray:
        s = np.atleast_1d(s)
        return np.tile(self.value, (s.shape[0], 1))


@dataclass(frozen=True)
class SampledPiece:
    """A smooth piece frozen at composite Gauss-Legendre nodes.

    The evaluator (s-array -> (n, d) unit vectors) stays attached so the
    Moebius action and sub-interval integrals remain available; nodes,
    weights and values are the quadrature data fixed at construction.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    nodes: np.ndarray
    weights: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if nodes.shape[0] < 2:
            raise ValueError("sampled piece needs at least two nodes")
        if values.shape != (nodes.shape[0], values.shape[1]):
            raise ValueError("values/nodes shape mismatch")
        norms = np.linalg.norm(values, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-9:
            raise ValueError("sampled values must be unit vectors")
        for arr in (nodes, weights, values):
            arr.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def evaluate(self, s: np.ndarray) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        return normalize_rows(self.evaluator(s))


def sampled_piece(evaluator, a: float, b: float,
                  settings: NumericsSettings = DEFAULT_SETTINGS) -> SampledPiece:
    """Freeze an evaluator on [a, b] with an adaptively refined GL rule."""
    def unit_eval(s):
        return normalize_rows(evaluator(np.atleast_1d(s)))

    nodes, weights, values = adaptive_vector_rule(unit_eval, a, b, settings)
    return SampledPiece(unit_eval, nodes, weights, values)


@dataclass(frozen=True)
class Configuration:
    """Piecewise map from [0, L] to the sphere, one piece per partition interval."""

    partition: Partition
    pieces: tuple

    def __post_init__(self):
        pieces = tuple(self.pieces)
        if len(pieces) != len(self.partition.breakpoints) - 1:
            raise ValueError("one piece per partition interval required")
        dims = {p.dim for p in pieces}
        if len(dims) != 1:
            raise ValueError("pieces must share one ambient dimension")
        object.__setattr__(self, "pieces", pieces)

    @property
    def dim(self) -> int:
        return self.pieces[0].dim

    @property
    def length(self) -> float:
        return self.partition.length

    def evaluate(self, s) -> np.ndarray:
        """Pointwise values; right-continuous at interior breakpoints."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        bp = self.partition.breakpoints
        idx = np.clip(np.searchsorted(bp, s, side="right") - 1, 0, len(self.pieces) - 1)
        out = np.empty((s.shape[0], self.dim))
        for i, piece in enumerate(self.pieces):
            mask = idx == i
            if np.any(mask):
                out[mask] = piece.evaluate(s[mask])
        return out


def constant_configuration(value, length: float) -> Configuration:
    return Configuration(Partition((0.0, float(length))), (ConstantPiece(value),))


def polygonal_configuration(values: Sequence, lengths: Sequence[float]) -> Configuration:
    """Piecewise-constant configuration from per-interval values and lengths."""
    values = [np.asarray(v, dtype=float) for v in values]
    lengths = [float(x) for x in lengths]
    if len(values) != len(lengths):
        raise ValueError("values and lengths must pair up")
    bp = np.concatenate([[0.0], np.cumsum(lengths)])
    return Configuration(Partition(tuple(bp)), tuple(ConstantPiece(v) for v in values))


def smooth_configuration(evaluator, length: float,
                         breakpoints: Sequence[float] | None = None,
                         settings: NumericsSettings = DEFAULT_SETTINGS) -> Configuration:
    """Configuration from a smooth evaluator, optionally split at breakpoints."""
    if breakpoints is None:
        bp = (0.0, float(length))
    else:
        bp = tuple(breakpoints)
    part = Partition(bp)
    pieces = tuple(sampled_piece(evaluator, a, b, settings) for a, b in part.intervals)
    return Configuration(part, pieces)


@dataclass(frozen=True)
class SnakePolyline:
    """Sampled snake S_z: arc lengths and the corresponding points in R^d."""

    arclengths: np.ndarray
    points: np.ndarray


# ---------------------------------------------------------------------------
# Integral quantities
# ---------------------------------------------------------------------------

def _piece_weight_value(z: Configuration):
    """All integration data of z as one (weights, values) pair.

    Constant pieces enter with their interval length as weight, making every
    integral below exact for polygonal snakes.
    """
    ws, vs = [], []
    for (a, b), piece in zip(z.partition.intervals, z.pieces):
        if isinstance(piece, ConstantPiece):
            ws.append(np.array([b - a]))
            vs.append(piece.value[None, :])
        else:
            ws.append(piece.weights)
            vs.append(piece.values)
    return np.concatenate(ws), np.concatenate(vs, axis=0)


def endpoint(z: Configuration) -> np.ndarray:
    """The snout position f(z) = int_0^L z(s) ds; lies in the closed L-ball."""
    w, v = _piece_weight_value(z)
    return w @ v


def integrate_snake(z: Configuration, n: int = 129) -> SnakePolyline:
    """Cumulative integral of z at n arc-length samples (breakpoints included)."""
    if n < 2:
        raise ValueError("need at least two samples")
    bp = np.asarray(z.partition.breakpoints)
    s_grid = np.unique(np.concatenate([np.linspace(0.0, z.length, n), bp]))
    pts = np.zeros((s_grid.shape[0], z.dim))
    acc = np.zeros(z.dim)
    k = 1  # s_grid[0] == 0 stays at the origin
    for (a, b), piece in zip(z.partition.intervals, z.pieces):
        while k < s_grid.shape[0] and s_grid[k] <= b + 1e-15:
            s = min(s_grid[k], b)
            pts[k] = acc + _partial_integral(piece, a, b, s)
            k += 1
        acc = acc + _partial_integral(piece, a, b, b)
    return SnakePolyline(s_grid, pts)


def _partial_integral(piece, a: float, b: float, s: float) -> np.ndarray:
    """Integral of the piece over [a, s] for a <= s <= b."""
    if s <= a:
        return np.zeros(piece.dim)
    if isinstance(piece, ConstantPiece):
        return (s - a) * piece.value
    # fresh rule on [a, s], matching the frozen rule's sub-interval density
    full = max(1, piece.nodes.shape[0] // DEFAULT_SETTINGS.quad_order)
    m = max(2, int(np.ceil((s - a) / (b - a) * full)))
    nodes, weights = gauss_legendre_rule(a, s, m, DEFAULT_SETTINGS.quad_order)
    return weights @ piece.evaluate(nodes)


def gram_defect(z: Configuration) -> np.ndarray:
    """M(z) = L I - G(z) with G the Gram matrix of the coordinate functions.

    Symmetric positive semidefinite with trace (d-1) L; singular exactly on
    lined configurations.
    """
    w, v = _piece_weight_value(z)
    gram = v.T @ (w[:, None] * v)
    return z.length * np.eye(z.dim) - gram


def is_lined(z: Configuration, tol: float = DEFAULT_SETTINGS.lined_tol) -> bool:
    """All values within {+p, -p} for some direction, judged through M(z)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    eigvals = np.linalg.eigvalsh(gram_defect(z))
    return bool(eigvals[0] <= tol * z.length)


def sedentariness(z: Configuration,
                  cluster_tol: float = DEFAULT_SETTINGS.value_cluster_tol) -> float:
    """Largest total length on which z holds a single value.

    Exact for piecewise-constant configurations; genuinely sampled pieces
    contribute zero unless their stored values are all equal.
    """
    clusters: list[tuple[np.ndarray, float]] = []

    def add(value, measure):
        for i, (rep, total) in enumerate(clusters):
            if np.linalg.norm(rep - value) <= cluster_tol:
                clusters[i] = (rep, total + measure)
                return
        clusters.append((value, measure))

    for (a, b), piece in zip(z.partition.intervals, z.pieces):
        if isinstance(piece, ConstantPiece):
            add(piece.value, b - a)
        else:
            spread = np.max(np.linalg.norm(piece.values - piece.values[0], axis=1))
            if spread <= cluster_tol:
                add(piece.values[0], b - a)
    if not clusters:
        return 0.0
    return max(total for _, total in clusters)


def value_samples(z: Configuration) -> np.ndarray:
    """Representative value set: constants once, sampled pieces at their nodes."""
    rows = []
    for piece in z.pieces:
        if isinstance(piece, ConstantPiece):
            rows.append(piece.value[None, :])
        else:
            rows.append(piece.values)
    return np.concatenate(rows, axis=0)


def distinct_value_count(z: Configuration,
                         tol: float = DEFAULT_SETTINGS.value_cluster_tol,
                         stop_at: int = 3) -> int:
    """Number of distinct values, counted up to stop_at."""
    reps: list[np.ndarray] = []
    for v in value_samples(z):
        if all(np.linalg.norm(v - r) > tol for r in reps):
            reps.append(v)
            if len(reps) >= stop_at:
                return len(reps)
    return len(reps)


def spherical_dimension(z: Configuration, tol: float = 1e-8) -> int:
    """Dimension of the smallest sub-sphere containing the values of z.

    Equals (affine rank of the value set) - 1, floored at zero: one or two
    values give 0, values spanning an affine j-plane give j - 1.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    vals = value_samples(z)
    centered = vals - vals.mean(axis=0)
    svals = np.linalg.svd(centered, compute_uv=False)
    rank = int(np.sum(svals > tol * max(1.0, svals[0] if svals.size else 1.0)))
    return max(rank - 1, 0)


# ---------------------------------------------------------------------------
# Group action and metric
# ---------------------------------------------------------------------------

def _map_piece(piece, point_map):
    if isinstance(piece, ConstantPiece):
        return ConstantPiece(point_map(piece.value[None, :])[0])
    base_eval = piece.evaluator
    return SampledPiece(lambda s, _e=base_eval, _m=point_map: _m(_e(s)),
                        piece.nodes, piece.weights,
                        normalize_rows(point_map(piece.values)))


def act(g, z: Configuration) -> Configuration:
    """Post-composition g . z; preserves the partition and piece kinds."""
    if isinstance(g, MobiusElement):
        if g.dim != z.dim:
            raise ValueError("dimension mismatch")
        point_map = lambda pts: apply_points(g, pts)
    elif isinstance(g, SU11Element):
        if z.dim != 2:
            raise ValueError("SU(1,1) acts on planar configurations only")
        def point_map(pts):
            w = su11_apply(g, pts[:, 0] + 1j * pts[:, 1])
            return np.column_stack([w.real, w.imag])
    else:
        raise TypeError(f"cannot act by {type(g).__name__}")
    return Configuration(z.partition, tuple(_map_piece(p, point_map) for p in z.pieces))


def _probe_grid(z: Configuration) -> np.ndarray:
    pts = []
    for (a, b), piece in zip(z.partition.intervals, z.pieces):
        if isinstance(piece, ConstantPiece):
            pts.append([0.5 * (a + b)])
        else:
            pts.append(piece.nodes)
    return np.concatenate(pts)


def sup_distance(z1: Configuration, z2: Configuration) -> float:
    """Uniform (sup over s) chordal distance between two configurations."""
    if z1.partition.breakpoints != z2.partition.breakpoints:
        raise ValueError("configurations live on different partitions")
    grid = np.unique(np.concatenate([_probe_grid(z1), _probe_grid(z2)]))
    d = np.linalg.norm(z1.evaluate(grid) - z2.evaluate(grid), axis=1)
    return float(np.max(d))
