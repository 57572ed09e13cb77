import json
from pathlib import Path

import pytest

from fwpd.replay import ScriptError, load_script, resolve_trace_path, run_replay
from fwpd.scenes import load_builtin_scene

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"


def read_statuses(path):
    out = []
    for line in Path(path).read_text().splitlines():
        msg = json.loads(line)
        if msg.get("op") == "status":
            out.append(msg["text"])
    return out


def test_empty_script_trace_has_only_initial_status(tmp_path, bin_scene):
    script = tmp_path / "empty.json"
    script.write_text("[]")
    out = tmp_path / "trace.jsonl"
    assert run_replay(script, out, bin_scene) == 0
    statuses = read_statuses(out)
    assert statuses == ["Ready to plan!"]


def test_pickplace_statuses_match_golden(tmp_path, bin_scene):
    out = tmp_path / "trace.jsonl"
    code = run_replay(DATA / "pickplace.json", out, bin_scene, rng_seed=0)
    assert code == 0
    golden = json.loads((GOLDEN / "pickplace_status.json").read_text())
    assert read_statuses(out) == golden


def test_blocked_variant_exits_zero_with_met_expectation(tmp_path, bin_scene):
    out = tmp_path / "trace.jsonl"
    code = run_replay(DATA / "pickplace_blocked.json", out, bin_scene, rng_seed=0)
    assert code == 0
    assert read_statuses(out)[-1] == "Plan Failed at Waypoint 2"
    # the failing waypoint's color travelled over the wire as an error
    reds = [
        json.loads(l)
        for l in out.read_text().splitlines()
        if json.loads(l).get("op") == "waypoint_update"
        and json.loads(l).get("color_state") == "error"
    ]
    assert reds and reds[0]["label"] == 2


def test_two_runs_are_byte_identical(tmp_path, bin_scene):
    a = tmp_path / "a.jsonl"
    b = tmp_path / "b.jsonl"
    assert run_replay(DATA / "pickplace.json", a, bin_scene, rng_seed=7) == 0
    assert run_replay(DATA / "pickplace.json", b, bin_scene, rng_seed=7) == 0
    assert a.read_bytes() == b.read_bytes()


def test_failed_expectation_exits_two(tmp_path, bin_scene):
    script = tmp_path / "s.json"
    script.write_text(json.dumps([
        {"t": 0.0, "expect": "Plan Successful!"},
        {"t": 0.1, "op": "create_waypoint", "kind": "manipulation",
         "target": [0.3, 1.0, 0.0]},
        {"t": 0.2, "op": "request_plan", "which": "manipulation"},
    ]))
    out = tmp_path / "trace.jsonl"
    assert run_replay(script, out, bin_scene) == 2
    lines = [json.loads(l) for l in out.read_text().splitlines()]
    assert any(m.get("code") == "expectation_failed" for m in lines)


def test_unreadable_script_raises_script_error(tmp_path):
    with pytest.raises(ScriptError):
        load_script(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{]")
    with pytest.raises(ScriptError):
        load_script(bad)
    nolist = tmp_path / "nolist.json"
    nolist.write_text('{"t": 1}')
    with pytest.raises(ScriptError):
        load_script(nolist)


def test_script_entries_validated(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps([{"op": "approve"}]))     # missing t
    with pytest.raises(ScriptError, match="entry 0"):
        load_script(bad)


def test_log_dir_env_overrides_trace_directory(tmp_path, monkeypatch, bin_scene):
    override = tmp_path / "redirected"
    monkeypatch.setenv("FWPD_LOG_DIR", str(override))
    assert resolve_trace_path("trace.jsonl") == override / "trace.jsonl"
    script = tmp_path / "empty.json"
    script.write_text("[]")
    assert run_replay(script, tmp_path / "trace.jsonl", bin_scene) == 0
    assert (override / "trace.jsonl").exists()
    monkeypatch.delenv("FWPD_LOG_DIR")
    assert resolve_trace_path("/abs/x.jsonl") == Path("/abs/x.jsonl")


def test_trace_contains_execution_events(tmp_path, bin_scene):
    out = tmp_path / "trace.jsonl"
    run_replay(DATA / "pickplace.json", out, bin_scene, rng_seed=0)
    events = [
        json.loads(l)["type"]
        for l in out.read_text().splitlines()
        if json.loads(l).get("op") == "event"
    ]
    for needed in ("segment_started", "waypoint_reached",
                   "state_command_applied", "plan_completed"):
        assert needed in events
