"""Headless script replay: drive a session from a timestamped message
script with simulated time and write every outbound message as JSONL.

Script format: a JSON list of entries, each either an inbound message with
a "t" timestamp ({"t": 0.5, "op": "approve"}) or an expectation
({"t": 2.0, "expect": "Plan Successful!"}) asserting the text of the next
status message. Exit status: 0 on success, 1 on an unreadable script,
2 when any expectation fails."""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Optional, Union

from .model import RobotModel, Scene
from .protocol import ProtocolSession, encode
from .session import StatusKind

DRAIN_CAP_S = 600.0           # simulated-seconds safety stop after the script


class ScriptError(Exception):
    pass


def resolve_trace_path(out_path: Union[str, Path]) -> Path:
    """FWPD_LOG_DIR, when set, overrides the trace directory."""
    out_path = Path(out_path)
    log_dir = os.environ.get("FWPD_LOG_DIR")
    if log_dir:
        return Path(log_dir) / out_path.name
    return out_path


def load_script(path: Union[str, Path]) -> list[dict]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ScriptError(f"cannot read script: {exc}") from exc
    if not isinstance(doc, list) or not all(isinstance(e, dict) for e in doc):
        raise ScriptError("script must be a JSON list of objects")
    for i, entry in enumerate(doc):
        if not isinstance(entry.get("t"), (int, float)):
            raise ScriptError(f"entry {i}: missing numeric 't'")
        if "expect" not in entry and not isinstance(entry.get("op"), str):
            raise ScriptError(f"entry {i}: needs an 'op' or an 'expect'")
    return sorted(doc, key=lambda e: e["t"])


class _Expectations:
    def __init__(self) -> None:
        self.queue: list[str] = []
        self.failures: list[str] = []

    def push(self, text: str) -> None:
        self.queue.append(text)

    def observe(self, outbound: list[dict]) -> None:
        for msg in outbound:
            if msg.get("op") == "status" and self.queue:
                want = self.queue.pop(0)
                if msg.get("text") != want:
                    self.failures.append(
                        f"expected status {want!r}, got {msg.get('text')!r}"
                    )

    def finish(self) -> None:
        for want in self.queue:
            self.failures.append(f"expected status {want!r}, never observed")
        self.queue.clear()


def run_replay(
    script_path: Union[str, Path],
    out_path: Union[str, Path],
    scene: Scene,
    model: Optional[RobotModel] = None,
    rng_seed: int = 0,
    tick_hz: float = 20.0,
    planner_node_cap: Optional[int] = None,
) -> int:
    """Run the script headless; returns the process exit code."""
    entries = load_script(script_path)
    proto = ProtocolSession(scene, model=model, rng_seed=rng_seed, tick_hz=tick_hz,
                            planner_node_cap=planner_node_cap)
    expectations = _Expectations()
    trace: list[dict] = []

    def emit(msgs: list[dict]) -> None:
        expectations.observe(msgs)
        trace.extend(msgs)

    emit(proto.hello())
    for entry in entries:
        while proto.session.clock < entry["t"] - 1e-9:
            emit(proto.tick())
        if "expect" in entry:
            expectations.push(str(entry["expect"]))
        else:
            msg = {k: v for k, v in entry.items() if k != "t"}
            emit(proto.handle(msg))

    session = proto.session
    start = session.clock
    while session.clock - start < DRAIN_CAP_S:
        busy = (
            session.status.kind in (StatusKind.PLANNING, StatusKind.EXECUTING)
            or session._torso_target is not None
            or session._gripper_target is not None
        )
        if not busy:
            break
        emit(proto.tick())
    expectations.finish()
    for failure in expectations.failures:
        trace.append({"op": "error", "code": "expectation_failed",
                      "message": failure})

    target = resolve_trace_path(out_path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", encoding="utf-8") as fh:
        for msg in trace:
            fh.write(encode(msg) + "\n")
    return 2 if expectations.failures else 0
