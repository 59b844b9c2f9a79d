#!/usr/bin/env python3
"""Estimate holonomy-orbit dimensions against the closed-form count.

For snakes with snout at the origin, small snout loops generate tangent
displacements of the orbit; their numerical rank should equal
sum_{i=1..k+1} (d - i) with k the spherical dimension.

    python scripts/orbit_rank_survey.py --probes 12
"""

from __future__ import annotations

import argparse
import sys
import time

from snakecharmer import LiftOptions, presets
from snakecharmer.configuration import sedentariness, spherical_dimension
from snakecharmer.orbits import expected_orbit_dimension, orbit_tangent_rank


CASES = [
    ("planar circle snake", presets.full_circle_configuration),
    ("circle snake in 3-space", presets.planar_circle_in_space),
    ("tetrahedral polygonal snake", presets.tetrahedral_configuration),
]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--probes", type=int, default=12)
    parser.add_argument("--eps", type=float, default=None)
    parser.add_argument("--step", type=float, default=2e-3)
    parser.add_argument("--seed", type=int, default=2024)
    args = parser.parse_args()

    print(f"{'snake':32s} {'d':>2} {'k':>2} {'sed':>6} {'rank':>5} {'expected':>9} {'time':>7}")
    ok = True
    for name, factory in CASES:
        z0 = factory()
        d, k = z0.dim, spherical_dimension(z0)
        t0 = time.time()
        rank = orbit_tangent_rank(z0, eps=args.eps, n_probes=args.probes,
                                  opts=LiftOptions(step=args.step), seed=args.seed)
        dt = time.time() - t0
        expected = expected_orbit_dimension(d, k)
        ok &= rank == expected
        print(f"{name:32s} {d:2d} {k:2d} {sedentariness(z0):6.2f} "
              f"{rank:5d} {expected:9d} {dt:6.1f}s")
    print("all ranks match" if ok else "MISMATCH detected")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
