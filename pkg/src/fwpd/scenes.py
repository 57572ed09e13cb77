"""Scene JSON loading and validation.

Schema: {"name", "bounds": {"x": [lo, hi], "y": [lo, hi]}, "floor_z",
"obstacles": [{"x": [lo, hi], "y": [lo, hi], "z": [lo, hi], "label"}]}.
Lengths in meters. Validation failures name the offending field path."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Union

from .model import Box, Scene, SceneError


def _interval(obj, path: str) -> tuple[float, float]:
    if (
        not isinstance(obj, (list, tuple))
        or len(obj) != 2
        or not all(isinstance(v, (int, float)) for v in obj)
    ):
        raise SceneError(f"{path}: expected [lo, hi]")
    return (float(obj[0]), float(obj[1]))


def scene_from_dict(doc: dict) -> Scene:
    if not isinstance(doc, dict):
        raise SceneError("root: expected an object")
    bounds = doc.get("bounds")
    if not isinstance(bounds, dict):
        raise SceneError("bounds: missing or not an object")
    bx = _interval(bounds.get("x"), "bounds.x")
    by = _interval(bounds.get("y"), "bounds.y")
    floor_z = doc.get("floor_z", 0.0)
    if not isinstance(floor_z, (int, float)):
        raise SceneError("floor_z: expected a number")
    obstacles = []
    raw = doc.get("obstacles", [])
    if not isinstance(raw, list):
        raise SceneError("obstacles: expected a list")
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise SceneError(f"obstacles[{i}]: expected an object")
        obstacles.append(
            Box(
                x=_interval(entry.get("x"), f"obstacles[{i}].x"),
                y=_interval(entry.get("y"), f"obstacles[{i}].y"),
                z=_interval(entry.get("z"), f"obstacles[{i}].z"),
                label=str(entry.get("label", "")),
            )
        )
    scene = Scene(
        name=str(doc.get("name", "unnamed")),
        bounds_x=bx,
        bounds_y=by,
        obstacles=tuple(obstacles),
        floor_z=float(floor_z),
    )
    scene.validate()
    return scene


def load_scene(path: Union[str, Path]) -> Scene:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SceneError(f"cannot read scene file: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneError(f"malformed JSON: {exc}") from exc
    return scene_from_dict(doc)


def builtin_scene_path(name: str) -> Path:
    """Path of a bundled scene ('fetchit_arena' or 'bin_table')."""
    with resources.as_file(resources.files("fwpd").joinpath("data", f"{name}.json")) as p:
        return Path(p)


def load_builtin_scene(name: str) -> Scene:
    return load_scene(builtin_scene_path(name))
