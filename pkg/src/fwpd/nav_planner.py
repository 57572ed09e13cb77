"""Occupancy-grid navigation planning: rasterization, A*, exact footprint
placement checks, and pose-sequence assembly with turquoise path markers."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .model import RobotModel, RobotState, Scene, wrap_angle

GRID_RESOLUTION = 0.05     # m/cell
PATH_MARKER_SPACING = 0.25  # m between display markers
HEADING_STEP = 0.1         # rad per pose during in-place rotation
SQRT2 = math.sqrt(2.0)

Cell = tuple[int, int]
Pose = tuple[float, float, float]


@dataclass
class OccupancyGrid:
    resolution: float
    origin: tuple[float, float]
    width: int
    height: int
    occupied: np.ndarray               # bool, shape (width, height)
    inflation_radius: float

    def cell_of(self, x: float, y: float) -> Cell:
        return (
            int(math.floor((x - self.origin[0]) / self.resolution)),
            int(math.floor((y - self.origin[1]) / self.resolution)),
        )

    def center_of(self, cell: Cell) -> tuple[float, float]:
        return (
            self.origin[0] + (cell[0] + 0.5) * self.resolution,
            self.origin[1] + (cell[1] + 0.5) * self.resolution,
        )

    def in_bounds(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.width and 0 <= cell[1] < self.height

    def is_free(self, cell: Cell) -> bool:
        return self.in_bounds(cell) and not self.occupied[cell[0], cell[1]]


@dataclass
class NavSegment:
    poses: list[Pose]
    terminal_height: Optional[float] = None


@dataclass
class NavPlan:
    segments: list[NavSegment]
    path_markers: list[tuple[float, float]] = field(default_factory=list)


@dataclass(frozen=True)
class PlanFailure:
    """Planner outcome when waypoint `label` cannot be reached."""

    label: int
    reason: str            # "NoPath" | "IkUnreachable" | "PlanTimeout"


def _point_box_distance_xy(x: float, y: float, box) -> float:
    gx = max(box.x[0] - x, x - box.x[1], 0.0)
    gy = max(box.y[0] - y, y - box.y[1], 0.0)
    return math.hypot(gx, gy)


def _box_blocks_robot(box, scene: Scene, model: RobotModel) -> bool:
    lo = scene.floor_z
    hi = scene.floor_z + model.max_height
    return box.z[0] <= hi and box.z[1] >= lo


def pose_collides(scene: Scene, model: RobotModel, pose: Pose) -> bool:
    """Exact placement check: base disc overlaps an obstacle footprint.

    Tangency (distance exactly base_radius) counts as Free; the grid is
    the conservative side of the pair.
    """
    x, y = pose[0], pose[1]
    for box in scene.obstacles:
        if not _box_blocks_robot(box, scene, model):
            continue
        if _point_box_distance_xy(x, y, box) < model.base_radius:
            return True
    return False


def rasterize(scene: Scene, model: RobotModel,
              resolution: float = GRID_RESOLUTION) -> OccupancyGrid:
    """Occupancy grid over the scene bounds, obstacle footprints inflated
    by base_radius. Cells whose centers fall outside the bounds are
    occupied."""
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    x0, x1 = scene.bounds_x
    y0, y1 = scene.bounds_y
    width = max(1, int(math.ceil((x1 - x0) / resolution)))
    height = max(1, int(math.ceil((y1 - y0) / resolution)))
    xs = x0 + (np.arange(width) + 0.5) * resolution
    ys = y0 + (np.arange(height) + 0.5) * resolution
    cx, cy = np.meshgrid(xs, ys, indexing="ij")

    occ = (cx > x1) | (cy > y1)   # partial cells past the upper bounds
    r = model.base_radius
    for box in scene.obstacles:
        if not _box_blocks_robot(box, scene, model):
            continue
        gx = np.maximum(np.maximum(box.x[0] - cx, cx - box.x[1]), 0.0)
        gy = np.maximum(np.maximum(box.y[0] - cy, cy - box.y[1]), 0.0)
        occ |= np.hypot(gx, gy) <= r
    return OccupancyGrid(
        resolution=resolution,
        origin=(x0, y0),
        width=width,
        height=height,
        occupied=occ,
        inflation_radius=r,
    )


_MOVES = (
    (1, 0, False), (-1, 0, False), (0, 1, False), (0, -1, False),
    (1, 1, True), (1, -1, True), (-1, 1, True), (-1, -1, True),
)


def _octile(a: Cell, b: Cell) -> float:
    dx, dy = abs(a[0] - b[0]), abs(a[1] - b[1])
    lo, hi = (dx, dy) if dx < dy else (dy, dx)
    return (hi - lo) + lo * SQRT2


def astar(grid: OccupancyGrid, start: Cell, goal: Cell) -> Optional[list[Cell]]:
    """8-connected A* with octile heuristic; None when the goal is
    unreachable. Diagonal steps are forbidden when either adjacent cardinal
    cell is occupied. Costs are tracked as exact (straight, diagonal) step
    counts so reported costs are reproducible."""
    if not grid.is_free(goal) or not grid.in_bounds(start):
        return None
    if start == goal:
        return [start]

    # g-cost as (straight, diagonal) integer pair; float only for ordering
    g: dict[Cell, tuple[int, int]] = {start: (0, 0)}
    came: dict[Cell, Cell] = {}
    counter = 0
    open_heap: list[tuple[float, int, Cell]] = [(_octile(start, goal), 0, start)]
    closed: set[Cell] = set()

    while open_heap:
        _, _, cur = heapq.heappop(open_heap)
        if cur == goal:
            path = [cur]
            while cur in came:
                cur = came[cur]
                path.append(cur)
            path.reverse()
            return path
        if cur in closed:
            continue
        closed.add(cur)
        cs, cd = g[cur]
        for dx, dy, diag in _MOVES:
            nxt = (cur[0] + dx, cur[1] + dy)
            if not grid.is_free(nxt):
                continue
            if diag and not (
                grid.is_free((cur[0] + dx, cur[1])) and grid.is_free((cur[0], cur[1] + dy))
            ):
                continue
            ng = (cs, cd + 1) if diag else (cs + 1, cd)
            old = g.get(nxt)
            if old is not None and old[0] + old[1] * SQRT2 <= ng[0] + ng[1] * SQRT2:
                continue
            g[nxt] = ng
            came[nxt] = cur
            counter += 1
            f = ng[0] + ng[1] * SQRT2 + _octile(nxt, goal)
            heapq.heappush(open_heap, (f, counter, nxt))
    return None


def path_cost(path: Sequence[Cell]) -> float:
    """Exact cost of a cell path: straight steps + sqrt(2) per diagonal."""
    straight = diag = 0
    for a, b in zip(path, path[1:]):
        if a[0] != b[0] and a[1] != b[1]:
            diag += 1
        else:
            straight += 1
    return straight + diag * SQRT2


def _densify_polyline(points: list[tuple[float, float]], step: float
                      ) -> list[tuple[float, float]]:
    out = [points[0]]
    for a, b in zip(points, points[1:]):
        dist = math.hypot(b[0] - a[0], b[1] - a[1])
        if dist < 1e-12:
            continue
        n = max(1, int(math.ceil(dist / step)))
        for i in range(1, n + 1):
            t = i / n
            out.append((a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])))
    return out


def _segment_poses(grid: OccupancyGrid, start_pose: Pose, cell_path: list[Cell],
                   goal_pose: Pose) -> list[Pose]:
    """Pose sequence: tangent headings along the densified path, then an
    in-place rotation to the goal heading, ending exactly at goal_pose."""
    pts = [(start_pose[0], start_pose[1])]
    for c in cell_path[1:-1] if len(cell_path) > 1 else []:
        pts.append(grid.center_of(c))
    pts.append((goal_pose[0], goal_pose[1]))
    dense = _densify_polyline(pts, grid.resolution)

    poses: list[Pose] = [start_pose]
    heading = start_pose[2]
    for a, b in zip(dense, dense[1:]):
        heading = math.atan2(b[1] - a[1], b[0] - a[0])
        poses.append((b[0], b[1], heading))
    # terminal in-place rotation
    turn = wrap_angle(goal_pose[2] - heading)
    steps = int(math.ceil(abs(turn) / HEADING_STEP))
    for i in range(1, steps):
        poses.append(
            (goal_pose[0], goal_pose[1], wrap_angle(heading + turn * i / steps))
        )
    if poses[-1] != goal_pose:
        poses.append(goal_pose)
    return poses


def decimate_markers(segments: Sequence[NavSegment],
                     spacing: float = PATH_MARKER_SPACING
                     ) -> list[tuple[float, float]]:
    markers: list[tuple[float, float]] = []
    acc = 0.0
    prev: Optional[Pose] = None
    for seg in segments:
        for pose in seg.poses:
            if prev is None:
                markers.append((pose[0], pose[1]))
            else:
                acc += math.hypot(pose[0] - prev[0], pose[1] - prev[1])
                if acc >= spacing:
                    markers.append((pose[0], pose[1]))
                    acc = 0.0
            prev = pose
    if prev is not None and markers[-1] != (prev[0], prev[1]):
        markers.append((prev[0], prev[1]))
    return markers


def plan_navigation(scene: Scene, model: RobotModel, state: RobotState,
                    waypoints: Sequence) -> NavPlan | PlanFailure:
    """Route through navigation waypoints in label order.

    A* per leg on the inflated grid; every returned pose is post-validated
    with the exact placement check. The robot's own start cell is treated
    as free for departure."""
    if not waypoints:
        raise ValueError("waypoints must be nonempty")
    grid = rasterize(scene, model)
    start_cell = grid.cell_of(state.base_pose[0], state.base_pose[1])
    if grid.in_bounds(start_cell) and grid.occupied[start_cell]:
        grid.occupied = grid.occupied.copy()
        grid.occupied[start_cell] = False

    segments: list[NavSegment] = []
    prev_pose: Pose = state.base_pose
    for k, wp in enumerate(waypoints, start=1):
        goal_pose: Pose = wp.pose
        a = grid.cell_of(prev_pose[0], prev_pose[1])
        b = grid.cell_of(goal_pose[0], goal_pose[1])
        cells = astar(grid, a, b)
        if cells is None:
            return PlanFailure(label=k, reason="NoPath")
        if a == b and prev_pose == goal_pose:
            poses = [goal_pose]          # zero-length leg
        else:
            poses = _segment_poses(grid, prev_pose, cells, goal_pose)
        for pose in poses:
            if pose_collides(scene, model, pose):
                return PlanFailure(label=k, reason="NoPath")
        segments.append(NavSegment(poses=poses, terminal_height=wp.height_command))
        prev_pose = goal_pose
    return NavPlan(segments=segments, path_markers=decimate_markers(segments))
