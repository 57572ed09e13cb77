"""Command line entry points: serve, replay, check-scene."""

from __future__ import annotations

import sys
from typing import Optional

import click

from .config import Config, read_model_overrides
from .manip_planner import NODE_CAP
from .model import SceneError
from .replay import ScriptError, run_replay
from .scenes import load_scene

_shared = [
    click.option("--scene", "scene_path", required=True, type=click.Path(),
                 help="Scene JSON file."),
    click.option("--seed", default=0, show_default=True, type=int),
    click.option("--tick-hz", default=20.0, show_default=True, type=float),
    click.option("--model-json", default=None, type=click.Path(),
                 help="JSON file of robot model field overrides."),
    click.option("--node-cap", default=NODE_CAP, show_default=True, type=int,
                 help="Manipulation planner budget per segment."),
]


def shared_options(fn):
    for opt in reversed(_shared):
        fn = opt(fn)
    return fn


def _config(scene_path: str, seed: int, tick_hz: float,
            model_json: Optional[str], node_cap: int, **extra) -> Config:
    try:
        overrides = read_model_overrides(model_json)
    except (OSError, ValueError) as exc:
        raise SystemExit(f"model overrides error: {exc}")
    return Config(scene_path=scene_path, rng_seed=seed, tick_hz=tick_hz,
                  model_overrides=overrides, planner_node_cap=node_cap, **extra)


@click.group()
def main() -> None:
    """Functional-waypoint planning engine and kinematic simulator."""


@main.command()
@shared_options
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8723, show_default=True, type=int)
def serve(scene_path: str, seed: int, tick_hz: float, model_json: Optional[str],
          node_cap: int, host: str, port: int) -> None:
    """Host operator sessions over a websocket."""
    from .server import serve as run_server

    cfg = _config(scene_path, seed, tick_hz, model_json, node_cap,
                  host=host, port=port)
    try:
        scene, model = cfg.load()
    except SceneError as exc:
        raise SystemExit(f"scene error: {exc}")
    run_server(scene, model, host=cfg.host, port=cfg.port, rng_seed=cfg.rng_seed,
               tick_hz=cfg.tick_hz, planner_node_cap=cfg.planner_node_cap)


@main.command()
@click.argument("script", type=click.Path())
@click.argument("out", type=click.Path())
@shared_options
def replay(script: str, out: str, scene_path: str, seed: int, tick_hz: float,
           model_json: Optional[str], node_cap: int) -> None:
    """Replay a timestamped message script headless; write a JSONL trace."""
    cfg = _config(scene_path, seed, tick_hz, model_json, node_cap)
    try:
        scene, model = cfg.load()
    except SceneError as exc:
        click.echo(f"scene error: {exc}", err=True)
        sys.exit(1)
    try:
        code = run_replay(script, out, scene, model=model, rng_seed=cfg.rng_seed,
                          tick_hz=cfg.tick_hz,
                          planner_node_cap=cfg.planner_node_cap)
    except ScriptError as exc:
        click.echo(f"script error: {exc}", err=True)
        sys.exit(1)
    if code != 0:
        click.echo("replay expectations failed", err=True)
    sys.exit(code)


@main.command("check-scene")
@click.argument("scene_path", type=click.Path())
def check_scene(scene_path: str) -> None:
    """Validate a scene file and print a summary."""
    try:
        scene = load_scene(scene_path)
    except SceneError as exc:
        click.echo(f"invalid: {exc}", err=True)
        sys.exit(1)
    click.echo(
        f"{scene.name}: bounds x={list(scene.bounds_x)} y={list(scene.bounds_y)}, "
        f"{len(scene.obstacles)} obstacles"
    )
    for box in scene.obstacles:
        click.echo(f"  - {box.label or '(unlabeled)'}: x={list(box.x)} "
                   f"y={list(box.y)} z={list(box.z)}")


if __name__ == "__main__":
    main()
