"""Websocket session server: one operator session per connection.

The connection reader and the tick driver funnel through one lock, so each
session stays single-writer; outbound messages are sent in order."""

from __future__ import annotations

import asyncio
import itertools
import json
import logging
import os
import socket
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .model import RobotModel, Scene
from .protocol import ProtocolSession, encode

logger = logging.getLogger("fwpd.server")


def create_app(scene: Scene, model: Optional[RobotModel] = None,
               rng_seed: int = 0, tick_hz: float = 20.0,
               planner_node_cap: Optional[int] = None) -> FastAPI:
    app = FastAPI(title="fwpd")
    session_ids = itertools.count(1)

    @app.get("/healthz")
    async def healthz() -> dict:
        return {"ok": True, "scene": scene.name}

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket) -> None:
        await ws.accept()
        sid = next(session_ids)
        proto = ProtocolSession(scene, model=model, rng_seed=rng_seed,
                                tick_hz=tick_hz, session_id=sid,
                                planner_node_cap=planner_node_cap)
        lock = asyncio.Lock()

        async def send_all(msgs: list[dict]) -> None:
            for msg in msgs:
                await ws.send_text(encode(msg))

        async def ticker() -> None:
            try:
                while True:
                    await asyncio.sleep(proto.tick_dt)
                    async with lock:
                        msgs = proto.tick()
                    await send_all(msgs)
            except asyncio.CancelledError:
                pass

        tick_task = asyncio.create_task(ticker())
        try:
            await send_all(proto.hello())
            while True:
                raw = await ws.receive_text()
                try:
                    msg = json.loads(raw)
                except json.JSONDecodeError:
                    await send_all(
                        [{"op": "error", "code": "bad_message",
                          "message": "payload is not valid JSON"}]
                    )
                    continue
                async with lock:
                    out = proto.handle(msg)
                await send_all(out)
        except WebSocketDisconnect:
            pass
        finally:
            tick_task.cancel()
            _dump_event_log(proto, sid)

    return app


def _dump_event_log(proto: ProtocolSession, sid: int) -> None:
    log_dir = os.environ.get("FWPD_LOG_DIR")
    if not log_dir:
        return
    path = Path(log_dir) / f"session-{sid}.jsonl"
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8") as fh:
            for ev in proto.session.event_log:
                fh.write(json.dumps(ev, sort_keys=True) + "\n")
    except OSError as exc:
        logger.warning("could not write event log %s: %s", path, exc)


def port_is_free(host: str, port: int) -> bool:
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as sock:
        sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        try:
            sock.bind((host, port))
        except OSError:
            return False
    return True


def serve(scene: Scene, model: Optional[RobotModel] = None, *,
          host: str = "127.0.0.1", port: int = 8723,
          rng_seed: int = 0, tick_hz: float = 20.0,
          planner_node_cap: Optional[int] = None) -> None:
    """Run until terminated; raises SystemExit(1) when the port is taken."""
    import uvicorn

    if not port_is_free(host, port):
        raise SystemExit(f"port {port} is already in use")
    app = create_app(scene, model=model, rng_seed=rng_seed, tick_hz=tick_hz,
                     planner_node_cap=planner_node_cap)
    uvicorn.run(app, host=host, port=port, log_level="warning")
