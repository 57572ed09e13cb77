"""Process configuration: everything has a default except the scene path."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from .manip_planner import NODE_CAP
from .model import RobotModel
from .scenes import load_scene


@dataclass
class Config:
    scene_path: str
    host: str = "127.0.0.1"
    port: int = 8723
    tick_hz: float = 20.0
    rng_seed: int = 0
    model_overrides: dict = field(default_factory=dict)
    planner_node_cap: int = NODE_CAP      # deterministic per-segment budget

    def load(self) -> tuple:
        """Resolve into (scene, model)."""
        scene = load_scene(self.scene_path)
        model = RobotModel(**self.model_overrides)
        return scene, model


def read_model_overrides(path: Optional[Union[str, Path]]) -> dict:
    """Optional JSON file of RobotModel field overrides."""
    if path is None:
        return {}
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(doc, dict):
        raise ValueError("model overrides file must hold a JSON object")
    out = {}
    for key, value in doc.items():
        if isinstance(value, list):
            value = tuple(tuple(v) if isinstance(v, list) else v for v in value)
        out[key] = value
    return out
