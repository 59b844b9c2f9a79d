"""Moebius group of the unit sphere S^{d-1}, realized by Lorentz matrices.

The group of Moebius transformations of S^{d-1} is modeled by the identity
component of O(d,1): matrices g with g^T J g = J (J = diag(1,...,1,-1)),
det g = +1 and positive lower-right entry.  A sphere point x corresponds to
the forward light-cone ray through (x, 1); g acts projectively:

    g . x = y[:d] / y[d],   y = g @ (x, 1).

Hyperbolic one-parameter flows (boosts) along v have closed form; their
generators span the d-dimensional subspace complementing so(d).  For d = 2
the double cover SU(1,1) is provided as a faster, chart-friendly model.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .numerics import DEFAULT_SETTINGS, NumericsSettings


class GroupConstraintError(Exception):
    """A matrix is too far from the Lorentz group to be accepted or repaired."""


# ---------------------------------------------------------------------------
# Sphere points
# ---------------------------------------------------------------------------

def sphere_point(coords, tol: float = DEFAULT_SETTINGS.unit_norm_tol) -> np.ndarray:
    """Return the unit vector for coords, renormalizing small drift."""
    x = np.asarray(coords, dtype=float).ravel()
    n = np.linalg.norm(x)
    if n < 1e-8:
        raise ValueError("sphere point cannot be the zero vector")
    if abs(n - 1.0) > tol:
        x = x / n
    elif n != 1.0:
        x = x / n
    x.flags.writeable = False
    return x


class Infinity:
    """Tagged point at infinity of the stereographic chart."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"


INFINITY = Infinity()


def minkowski_form(d: int) -> np.ndarray:
    J = np.eye(d + 1)
    J[d, d] = -1.0
    return J


# ---------------------------------------------------------------------------
# Group elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MobiusElement:
    """Element of the Moebius group of S^{d-1} as a (d+1)x(d+1) Lorentz matrix."""

    matrix: np.ndarray
    dim: int

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (self.dim + 1, self.dim + 1):
            raise ValueError(f"expected shape {(self.dim+1, self.dim+1)}, got {m.shape}")
        m = np.array(m)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        if m[self.dim, self.dim] <= 0:
            raise GroupConstraintError("matrix does not preserve the upper sheet")

    @property
    def residual(self) -> float:
        J = minkowski_form(self.dim)
        return float(np.max(np.abs(self.matrix.T @ J @ self.matrix - J)))

    def __matmul__(self, other: "MobiusElement") -> "MobiusElement":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return MobiusElement(self.matrix @ other.matrix, self.dim)

    def inverse(self) -> "MobiusElement":
        J = minkowski_form(self.dim)
        return MobiusElement(J @ self.matrix.T @ J, self.dim)


def identity(d: int) -> MobiusElement:
    return MobiusElement(np.eye(d + 1), d)


def rotation_element(rho: np.ndarray, tol: float = 1e-9) -> MobiusElement:
    """Embed a rotation of R^d as a Moebius transformation."""
    rho = np.asarray(rho, dtype=float)
    d = rho.shape[0]
    if rho.shape != (d, d):
        raise ValueError("rotation must be square")
    if np.max(np.abs(rho.T @ rho - np.eye(d))) > tol:
        raise ValueError("matrix is not orthogonal")
    if np.linalg.det(rho) < 0:
        raise ValueError("matrix reverses orientation")
    m = np.eye(d + 1)
    m[:d, :d] = rho
    return MobiusElement(m, d)


def boost(v, t: float = 1.0) -> MobiusElement:
    """Hyperbolic flow at time t along v: attractor v/|v|, repeller -v/|v|.

    Closed-form rank-two update of the identity; boost(v, s) @ boost(v, t)
    equals boost(v, s + t).  boost(0, t) is the identity.
    """
    v = np.asarray(v, dtype=float).ravel()
    d = v.shape[0]
    r = np.linalg.norm(v) * t
    if r == 0.0:
        return identity(d)
    u = v / np.linalg.norm(v)
    m = np.eye(d + 1)
    m[:d, :d] += (math.cosh(r) - 1.0) * np.outer(u, u)
    m[:d, d] = math.sinh(r) * u
    m[d, :d] = math.sinh(r) * u
    m[d, d] = math.cosh(r)
    return MobiusElement(m, d)


@dataclass(frozen=True)
class LieVector:
    """Element of so(d,1) split into a boost vector and a rotation generator."""

    ambient: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self):
        a = np.asarray(self.ambient, dtype=float)
        d = a.shape[0] - 1
        J = minkowski_form(d)
        if np.max(np.abs(a.T @ J + J @ a)) > 1e-9:
            raise ValueError("matrix is not in so(d,1)")
        a = np.array(a)
        a.flags.writeable = False
        object.__setattr__(self, "ambient", a)
        object.__setattr__(self, "dim", d)

    @property
    def boost_part(self) -> np.ndarray:
        return np.array(self.ambient[: self.dim, self.dim])

    @property
    def rotation_part(self) -> np.ndarray:
        return np.array(self.ambient[: self.dim, : self.dim])


def chi(v) -> LieVector:
    """Boost generator with exp(t * chi(v)) = boost(v, t); linear in v."""
    v = np.asarray(v, dtype=float).ravel()
    d = v.shape[0]
    a = np.zeros((d + 1, d + 1))
    a[:d, d] = v
    a[d, :d] = v
    return LieVector(a)


def lie_vector(boost_vec, rotation) -> LieVector:
    boost_vec = np.asarray(boost_vec, dtype=float).ravel()
    rotation = np.asarray(rotation, dtype=float)
    d = boost_vec.shape[0]
    a = np.zeros((d + 1, d + 1))
    a[:d, :d] = 0.5 * (rotation - rotation.T)
    a[:d, d] = boost_vec
    a[d, :d] = boost_vec
    return LieVector(a)


def apply(g: MobiusElement, x) -> np.ndarray:
    """Action on a sphere point via the projective light-cone action."""
    x = np.asarray(x, dtype=float).ravel()
    y = g.matrix[:, :-1] @ x + g.matrix[:, -1]
    return y[:-1] / y[-1]


def apply_points(g: MobiusElement, points: np.ndarray) -> np.ndarray:
    """Vectorized action on an (n, d) array of sphere points."""
    pts = np.asarray(points, dtype=float)
    y = pts @ g.matrix[:-1, :-1].T + g.matrix[:-1, -1]
    w = pts @ g.matrix[-1, :-1] + g.matrix[-1, -1]
    return y / w[:, None]


# ---------------------------------------------------------------------------
# Stereographic charts (oracle machinery, never in the ODE path)
# ---------------------------------------------------------------------------

def stereo_project(v, x):
    """Stereographic projection of S^{d-1} from the pole v/|v|.

    Sends v/|v| to INFINITY and -v/|v| to the origin; the image lies in the
    hyperplane orthogonal to v, embedded in R^d.
    """
    v = np.asarray(v, dtype=float).ravel()
    nv = np.linalg.norm(v)
    if nv == 0.0:
        raise ValueError("projection pole requires v != 0")
    n = v / nv
    x = np.asarray(x, dtype=float).ravel()
    c = float(x @ n)
    if abs(1.0 - c) < 1e-14:
        return INFINITY
    return (x - c * n) / (1.0 - c)


def stereo_unproject(v, y):
    """Inverse of stereo_project; accepts INFINITY."""
    v = np.asarray(v, dtype=float).ravel()
    nv = np.linalg.norm(v)
    if nv == 0.0:
        raise ValueError("projection pole requires v != 0")
    n = v / nv
    if y is INFINITY:
        return n.copy()
    y = np.asarray(y, dtype=float).ravel()
    y = y - (y @ n) * n  # project defensively into the chart hyperplane
    r2 = float(y @ y)
    return (2.0 * y + (r2 - 1.0) * n) / (r2 + 1.0)


# ---------------------------------------------------------------------------
# Polar chart Psi(v, rho) = boost(v, 1) . rho  and its inverse
# ---------------------------------------------------------------------------

def psi(v, rho) -> MobiusElement:
    """Global chart: the boost along v composed with a rotation of R^d."""
    v = np.asarray(v, dtype=float).ravel()
    return boost(v, 1.0) @ rotation_element(rho)


def chart_coordinates(g: MobiusElement):
    """Invert psi: unique (v, rho) with g = boost(v,1) @ rotation(rho).

    Uses the symmetric factor of the Lorentz polar decomposition, read off
    from the eigendecomposition of g g^T.
    """
    m = g.matrix
    d = g.dim
    s = m @ m.T
    s = 0.5 * (s + s.T)
    w, q = np.linalg.eigh(s)
    w = np.clip(w, 1e-300, None)
    b = q @ np.diag(np.sqrt(w)) @ q.T  # SPD square root; a pure boost for g in the group
    col = b[:d, d]
    r = np.linalg.norm(col)
    if r < 1e-300:
        v = np.zeros(d)
    else:
        v = (math.asinh(r) / r) * col
    binv = boost(v, -1.0).matrix
    rho_full = binv @ m
    rho = rho_full[:d, :d]
    # clean the rotation against accumulated drift
    uq, _, vq = np.linalg.svd(rho)
    rho = uq @ vq
    if np.linalg.det(rho) < 0:
        raise GroupConstraintError("polar factor is not a rotation")
    return v, rho


def renormalize(g: MobiusElement, settings: NumericsSettings = DEFAULT_SETTINGS) -> MobiusElement:
    """Project a drifted matrix back onto the Lorentz group.

    Newton-Schulz iteration for the J-orthogonality constraint; first-order
    equivalent to the Frobenius-nearest projection.  Inputs with residual
    >= 0.1 are rejected (integrator blow-up).
    """
    m = np.array(g.matrix)
    d = g.dim
    J = minkowski_form(d)
    res = np.max(np.abs(m.T @ J @ m - J))
    if res >= 0.1:
        raise GroupConstraintError(f"matrix too far from the group (residual {res:.3g})")
    eye = np.eye(d + 1)
    prev = np.inf
    for _ in range(30):
        e = J @ m.T @ J @ m
        res = np.max(np.abs(e - eye))
        if res <= 1e-15 or res >= 0.5 * prev:  # converged or hit the float floor
            break
        m = m @ (1.5 * eye - 0.5 * e)
        prev = res
    return MobiusElement(m, d)


# ---------------------------------------------------------------------------
# SU(1,1) double cover (d = 2 only)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SU11Element:
    """Matrix [[a, b], [conj(b), conj(a)]] with |a|^2 - |b|^2 = 1.

    Acts on the unit circle (complex sphere points) by the homography
    w -> (a w + b) / (conj(b) w + conj(a)); the two elements +/-g act
    identically, realizing the double cover of the planar Moebius group.
    """

    a: complex
    b: complex

    def __post_init__(self, tol: float = DEFAULT_SETTINGS.su11_det_tol):
        det = abs(self.a) ** 2 - abs(self.b) ** 2
        if abs(det - 1.0) > tol:
            raise GroupConstraintError(f"|a|^2 - |b|^2 = {det!r}, expected 1")

    def __matmul__(self, other: "SU11Element") -> "SU11Element":
        a = self.a * other.a + self.b * other.b.conjugate()
        b = self.a * other.b + self.b * other.a.conjugate()
        return SU11Element(a, b)

    def inverse(self) -> "SU11Element":
        return SU11Element(self.a.conjugate(), -self.b)

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b],
                         [self.b.conjugate(), self.a.conjugate()]])


SU11_IDENTITY = SU11Element(1.0 + 0.0j, 0.0 + 0.0j)


def su11_renormalize(m: np.ndarray) -> SU11Element:
    """Snap a drifted 2x2 complex matrix to SU(1,1) structure and unit det."""
    a = 0.5 * (m[0, 0] + m[1, 1].conjugate())
    b = 0.5 * (m[0, 1] + m[1, 0].conjugate())
    det = abs(a) ** 2 - abs(b) ** 2
    if det <= 0.5 or det >= 2.0:
        raise GroupConstraintError(f"matrix too far from SU(1,1) (det {det:.3g})")
    s = 1.0 / math.sqrt(det)
    return SU11Element(a * s, b * s)


def su11_apply(g: SU11Element, w):
    """Homographic action on complex circle points (scalar or array)."""
    w = np.asarray(w, dtype=complex)
    out = (g.a * w + g.b) / (g.b.conjugate() * w + g.a.conjugate())
    return out


def su11_boost(v, t: float = 1.0) -> SU11Element:
    """The SU(1,1) lift of boost(v, t) for v in R^2 (as a complex number)."""
    v = np.asarray(v, dtype=float).ravel()
    c = 0.5 * t * complex(v[0], v[1])
    r = abs(c)
    if r == 0.0:
        return SU11_IDENTITY
    return SU11Element(math.cosh(r), (c / r) * math.sinh(r))


def su11_rotation(theta: float) -> SU11Element:
    return SU11Element(cmath.exp(0.5j * theta), 0.0)


def su11_cover_chart(g: SU11Element):
    """Chart (v, theta) of the cover R^2 x S^1: g = su11_boost(v) @ su11_rotation(theta).

    theta = 2 arg(a) (well defined mod 2 pi on the underlying Moebius group),
    |v| = 2 arccosh|a|, direction arg(a b).  +/-g give the same (v, e^{i theta}).
    """
    a, b = g.a, g.b
    theta = 2.0 * cmath.phase(a)
    r = abs(a)
    if abs(b) == 0.0:
        v = np.zeros(2)
    else:
        mag = 2.0 * math.acosh(max(r, 1.0))
        ang = cmath.phase(a * b)
        v = mag * np.array([math.cos(ang), math.sin(ang)])
    return v, theta


def su11_from_chart(v, theta: float) -> SU11Element:
    return su11_boost(v, 1.0) @ su11_rotation(theta)


def su11_to_mobius(g: SU11Element) -> MobiusElement:
    """Project along the double cover to the Lorentz model."""
    v, theta = su11_cover_chart(g)
    c, s = math.cos(theta), math.sin(theta)
    rho = np.array([[c, -s], [s, c]])
    return psi(v, rho)


def mobius_to_su11(g: MobiusElement) -> SU11Element:
    """One of the two lifts of a planar Moebius transformation."""
    if g.dim != 2:
        raise ValueError("the SU(1,1) cover exists only for d = 2")
    v, rho = chart_coordinates(g)
    theta = math.atan2(rho[1, 0], rho[0, 0])
    return su11_from_chart(v, theta)
