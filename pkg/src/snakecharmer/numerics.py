"""Shared numerical settings and quadrature helpers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class NumericsSettings:
    """Central record of tolerances used across the toolkit.

    group_residual_tol   largest accepted drift of g^T J g - J for group elements
    renorm_cadence       integrator steps between constraint renormalizations
    quad_order           Gauss-Legendre order per sub-interval
    quad_rtol            stop refining composite quadrature below this change
    unit_norm_tol        renormalization tolerance for sphere points
    lined_tol            is_lined default: smallest eigenvalue of M <= lined_tol * L
    value_cluster_tol    chordal tolerance for "equal value" clustering (sedentariness)
    su11_det_tol         accepted drift of |a|^2 - |b|^2 - 1
    """

    group_residual_tol: float = 1e-9
    renorm_cadence: int = 16
    quad_order: int = 8
    quad_rtol: float = 1e-11
    unit_norm_tol: float = 1e-12
    lined_tol: float = 1e-8
    value_cluster_tol: float = 1e-9
    su11_det_tol: float = 1e-10


DEFAULT_SETTINGS = NumericsSettings()


def gauss_legendre_rule(a: float, b: float, subintervals: int, order: int = 8):
    """Composite Gauss-Legendre nodes and weights on [a, b].

    Returns (nodes, weights), both of shape (subintervals * order,).
    """
    if b <= a:
        raise ValueError(f"empty interval [{a}, {b}]")
    if subintervals < 1:
        raise ValueError("need at least one subinterval")
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, subintervals + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def adaptive_vector_rule(evaluator, a: float, b: float,
                         settings: NumericsSettings = DEFAULT_SETTINGS,
                         max_subintervals: int = 256):
    """Choose a composite GL rule for a vector-valued integrand on [a, b].

    Sub-intervals are doubled until two successive estimates of the integral
    and of the second-moment matrix agree below quad_rtol (absolute, the
    integrands here are O(1) unit vectors).  Returns (nodes, weights, values).
    """
    def estimates(m):
        nodes, weights = gauss_legendre_rule(a, b, m, settings.quad_order)
        vals = np.asarray(evaluator(nodes), dtype=float)
        integral = weights @ vals
        moment = vals.T @ (weights[:, None] * vals)
        return nodes, weights, vals, integral, moment

    m = 1
    nodes, weights, vals, integral, moment = estimates(m)
    while m < max_subintervals:
        m2 = 2 * m
        nodes2, weights2, vals2, integral2, moment2 = estimates(m2)
        err = max(np.max(np.abs(integral2 - integral)),
                  np.max(np.abs(moment2 - moment)))
        nodes, weights, vals, integral, moment = nodes2, weights2, vals2, integral2, moment2
        m = m2
        if err < settings.quad_rtol:
            break
    return nodes, weights, vals


def normalize_rows(points: np.ndarray, tol: float = DEFAULT_SETTINGS.unit_norm_tol) -> np.ndarray:
    """Renormalize rows to unit length; reject rows that are nearly zero."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    norms = np.linalg.norm(pts, axis=1)
    if np.any(norms < 1e-8):
        raise ValueError("cannot normalize a near-zero vector to the sphere")
    out = pts / norms[:, None]
    return out
