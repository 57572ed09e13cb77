"""Independent test oracles: uniform-cost search for path costs and dense
re-sampling collision checks. These deliberately do not reuse the planner
code paths they verify."""

import heapq
import math

import numpy as np

from fwpd import kinematics
from fwpd.kinematics import arm_collides_batch
from fwpd.nav_planner import SQRT2

MOVES = (
    (1, 0, False), (-1, 0, False), (0, 1, False), (0, -1, False),
    (1, 1, True), (1, -1, True), (-1, 1, True), (-1, -1, True),
)


def dijkstra_cost(grid, start, goal):
    """Uniform-cost search with the same move rules as the planner, cost
    tracked as exact (straight, diagonal) counts."""
    if not grid.is_free(goal):
        return None
    best = {start: (0, 0)}
    heap = [(0.0, 0, start)]
    counter = 0
    done = set()
    while heap:
        _, _, cur = heapq.heappop(heap)
        if cur == goal:
            s, d = best[cur]
            return s + d * SQRT2
        if cur in done:
            continue
        done.add(cur)
        cs, cd = best[cur]
        for dx, dy, diag in MOVES:
            nxt = (cur[0] + dx, cur[1] + dy)
            if not grid.is_free(nxt):
                continue
            if diag and not (
                grid.is_free((cur[0] + dx, cur[1]))
                and grid.is_free((cur[0], cur[1] + dy))
            ):
                continue
            ng = (cs, cd + 1) if diag else (cs + 1, cd)
            old = best.get(nxt)
            if old is None or ng[0] + ng[1] * SQRT2 < old[0] + old[1] * SQRT2:
                best[nxt] = ng
                counter += 1
                heapq.heappush(heap, (ng[0] + ng[1] * SQRT2, counter, nxt))
    return None


def dense_recheck(model, state, scene, plan, resolution=1e-3):
    """Re-sample every path leg at `resolution` rad (inf-norm) and collision
    check each sample exactly. Returns the number of colliding samples."""
    obstacles = kinematics.slice_scene(scene, state.base_pose, model)
    bad = 0
    for seg in plan.segments:
        states = []
        for a, b in zip(seg.path, seg.path[1:]):
            a, b = np.asarray(a), np.asarray(b)
            span = float(np.max(np.abs(b - a)))
            n = max(1, int(math.ceil(span / resolution)))
            ts = np.linspace(0.0, 1.0, n + 1)
            states.append(a[None, :] + ts[:, None] * (b - a)[None, :])
        if not states:
            states.append(np.asarray(seg.path))
        allq = np.concatenate(states, axis=0)
        bad += int(arm_collides_batch(model, allq, state.torso_height, obstacles).sum())
    return bad
