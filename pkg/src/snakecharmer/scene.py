"""Scene files: one YAML document describing snake, target curve and options.

A scene is a mapping with blocks `snake`, `curve`, `solver` and `outputs`;
`dimension` fixes the ambient space.  Parsing is strict (unknown snake or
curve kinds are errors) and serialize/parse round-trips the parsed content.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import yaml

from . import presets
from .bivalued import BivaluedConfig
from .configuration import Configuration, Partition, polygonal_configuration
from .curves import CircleArc, Composite, Curve, Segment, hermite_through_points
from .solver import LiftOptions, smooth_loop_from_word


class SceneError(ValueError):
    """Malformed or inconsistent scene content."""


SNAKE_PRESETS = {
    "half-circle": presets.half_circle_configuration,
    "full-circle": presets.full_circle_configuration,
    "circle-in-space": presets.planar_circle_in_space,
    "tetrahedron": presets.tetrahedral_configuration,
}


@dataclass
class Scene:
    """Parsed scene: raw mapping plus constructed objects."""

    dimension: int
    snake_spec: dict
    curve_spec: dict
    solver_spec: dict = field(default_factory=dict)
    outputs_spec: dict = field(default_factory=dict)

    # -- construction ------------------------------------------------------

    def build_snake(self):
        """Return a Configuration, or a BivaluedConfig for bivalued scenes."""
        spec = self.snake_spec
        kind = spec.get("kind")
        if kind == "preset":
            name = spec.get("name")
            if name not in SNAKE_PRESETS:
                raise SceneError(f"unknown snake preset {name!r}")
            snake = SNAKE_PRESETS[name]()
        elif kind == "polygonal":
            values = spec.get("values")
            lengths = spec.get("lengths")
            if not values or not lengths:
                raise SceneError("polygonal snake needs values and lengths")
            snake = polygonal_configuration([np.asarray(v, float) for v in values],
                                            [float(x) for x in lengths])
        elif kind == "bivalued":
            try:
                snake = BivaluedConfig(np.asarray(spec["p"], float),
                                       np.asarray(spec["q"], float),
                                       Partition(tuple(float(s) for s in spec["breakpoints"])),
                                       tuple(spec["pattern"]))
            except KeyError as missing:
                raise SceneError(f"bivalued snake is missing {missing}") from None
        elif kind == "tent":
            snake = presets.tent_bivalued()
        else:
            raise SceneError(f"unknown snake kind {kind!r}")
        dim = snake.dim
        if dim != self.dimension:
            raise SceneError(f"snake dimension {dim} != scene dimension {self.dimension}")
        return snake

    def build_curve(self, start=None) -> Curve:
        curve = self._build_curve_spec(self.curve_spec, start)
        if curve.dim != self.dimension:
            raise SceneError(f"curve dimension {curve.dim} != scene dimension {self.dimension}")
        return curve

    def _build_curve_spec(self, spec: dict, start=None) -> Curve:
        kind = spec.get("kind")
        if kind == "circle":
            turns = int(spec.get("turns", 1))
            return CircleArc(center=np.asarray(spec["center"], float),
                             radius=float(spec["radius"]),
                             start_angle=float(spec.get("start_angle", math.pi)),
                             sweep=float(spec.get("sweep", turns * 2.0 * math.pi)))
        if kind == "figure-a":
            return presets.figure_a_circle(int(spec.get("turns", 1)))
        if kind == "nonconnected-loop":
            return presets.nonconnected_orbit_loop()
        if kind == "segment":
            return Segment(np.asarray(spec["start"], float), np.asarray(spec["end"], float))
        if kind == "composite":
            parts = [self._build_curve_spec(p) for p in spec["parts"]]
            durations = spec.get("durations")
            return Composite(parts, durations)
        if kind == "spline":
            points = np.asarray(spec["points"], float)
            return hermite_through_points(points, spec.get("max_speed"))
        if kind == "word":
            raise SceneError("word curves are built against a snake; use build_word_curve")
        raise SceneError(f"unknown curve kind {kind!r}")

    def build_word_curve(self, z0: Configuration) -> Curve:
        entries = self.curve_spec.get("entries")
        if not entries:
            raise SceneError("word curve needs entries [[v...], lambda]")
        word = [(np.asarray(v, float), float(lam)) for v, lam in entries]
        return smooth_loop_from_word(word, z0).curve

    def build_options(self, **overrides) -> LiftOptions:
        spec = dict(self.solver_spec)
        spec.update({k: v for k, v in overrides.items() if v is not None})
        known = {"step", "defect_tol", "sigma_min", "renorm_every",
                 "enforce_sedentary_ball", "require_three_values", "snap",
                 "save_stride"}
        unknown = set(spec) - known
        if unknown:
            raise SceneError(f"unknown solver options: {sorted(unknown)}")
        return LiftOptions(**spec)


def scene_to_mapping(scene: Scene) -> dict:
    out: dict[str, Any] = {"dimension": scene.dimension,
                           "snake": scene.snake_spec,
                           "curve": scene.curve_spec}
    if scene.solver_spec:
        out["solver"] = scene.solver_spec
    if scene.outputs_spec:
        out["outputs"] = scene.outputs_spec
    return out


def parse_scene(text: str) -> Scene:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise SceneError(f"scene is not valid YAML: {exc}") from None
    if not isinstance(data, dict):
        raise SceneError("scene must be a mapping")
    missing = {"dimension", "snake", "curve"} - set(data)
    if missing:
        raise SceneError(f"scene is missing {sorted(missing)}")
    unknown = set(data) - {"dimension", "snake", "curve", "solver", "outputs"}
    if unknown:
        raise SceneError(f"unknown scene blocks: {sorted(unknown)}")
    return Scene(int(data["dimension"]), dict(data["snake"]), dict(data["curve"]),
                 dict(data.get("solver") or {}), dict(data.get("outputs") or {}))


def serialize_scene(scene: Scene) -> str:
    return yaml.safe_dump(scene_to_mapping(scene), sort_keys=True,
                          default_flow_style=None)


def load_scene(path) -> Scene:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scene(fh.read())
