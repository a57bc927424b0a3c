"""Ground-truth 2D semantic world: loading, observation, goals and oracles.

The world is immutable after load.  All randomness (observation noise, goal
generation) is derived per call from explicit seeds, so every operation here
is a pure function of its inputs and safe to call from parallel workers.
"""

import json
import math
import random
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .errors import (
    NoCandidatesError,
    UnreachableGoalError,
    WorldFormatError,
    WorldValidationError,
)
from .seeding import stable_seed

TWO_PI = 2.0 * math.pi

DEFAULT_SUCCESS_RADIUS = 5.0
DEFAULT_CONDITION_RADIUS = 10.0
DEFAULT_CORRIDOR_WIDTH = 10.0
DEFAULT_GRID_RESOLUTION = 0.5


def normalize_angle(theta: float) -> float:
    """Map an angle to [0, 2*pi)."""
    return theta % TWO_PI


def signed_angle(theta: float) -> float:
    """Map an angle to (-pi, pi]."""
    theta = theta % TWO_PI
    if theta > math.pi:
        theta -= TWO_PI
    return theta


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    heading: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "heading", normalize_angle(self.heading))

    def distance_to(self, other: "Pose") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class ObjectInstance:
    id: str
    category: str
    position: tuple
    attributes: frozenset = frozenset()
    affordances: frozenset = frozenset()


@dataclass(frozen=True)
class Region:
    label: str
    polygon: np.ndarray  # (n, 2) float64

    def __hash__(self):
        return hash(self.label)


@dataclass
class SemanticWorld:
    """Regions, objects and obstacles inside an axis-aligned boundary."""

    bounds: tuple  # (min_x, min_y, max_x, max_y)
    regions: list
    objects: list
    obstacles: list  # list of (n, 2) float64 arrays
    _grids: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def diagonal(self) -> float:
        min_x, min_y, max_x, max_y = self.bounds
        return math.hypot(max_x - min_x, max_y - min_y)

    def contains(self, x: float, y: float) -> bool:
        min_x, min_y, max_x, max_y = self.bounds
        return min_x <= x <= max_x and min_y <= y <= max_y

    def in_obstacle(self, x: float, y: float) -> bool:
        return any(kernels.point_in_polygon(x, y, poly) for poly in self.obstacles)

    def region_label_at(self, x: float, y: float) -> Optional[str]:
        for region in self.regions:
            if kernels.point_in_polygon(x, y, region.polygon):
                return region.label
        return None

    def categories(self) -> list:
        return sorted({obj.category for obj in self.objects})

    def segment_blocked(self, ax, ay, bx, by) -> bool:
        return any(
            kernels.segment_crosses_polygon(ax, ay, bx, by, poly)
            for poly in self.obstacles
        )

    def occupancy(self, resolution: float = DEFAULT_GRID_RESOLUTION) -> "OccupancyGrid":
        grid = self._grids.get(resolution)
        if grid is None:
            grid = OccupancyGrid.build(self, resolution)
            self._grids[resolution] = grid
        return grid


@dataclass
class OccupancyGrid:
    """Dense discretization of the world used only by metric oracles."""

    resolution: float
    origin_x: float
    origin_y: float
    nx: int
    ny: int
    blocked: np.ndarray  # (ny, nx) uint8

    @classmethod
    def build(cls, world: SemanticWorld, resolution: float) -> "OccupancyGrid":
        min_x, min_y, max_x, max_y = world.bounds
        nx = max(1, int(math.ceil((max_x - min_x) / resolution)))
        ny = max(1, int(math.ceil((max_y - min_y) / resolution)))
        blocked = np.zeros((ny, nx), dtype=np.uint8)
        for poly in world.obstacles:
            kernels.fill_polygon_mask(blocked, poly, min_x, min_y, resolution)
        return cls(resolution, min_x, min_y, nx, ny, blocked)

    def cell_of(self, x: float, y: float):
        ix = int((x - self.origin_x) / self.resolution)
        iy = int((y - self.origin_y) / self.resolution)
        return min(max(ix, 0), self.nx - 1), min(max(iy, 0), self.ny - 1)

    def center(self, ix: int, iy: int):
        return (
            self.origin_x + (ix + 0.5) * self.resolution,
            self.origin_y + (iy + 0.5) * self.resolution,
        )

    def flat(self, ix: int, iy: int) -> int:
        return iy * self.nx + ix


@dataclass(frozen=True)
class Corridor:
    polyline: tuple  # ((x, y), ...)
    width: float

    def as_array(self) -> np.ndarray:
        return np.asarray(self.polyline, dtype=np.float64)


@dataclass(frozen=True)
class GoalSpec:
    """A level 1-4 instruction plus its machine-checkable success parameters."""

    level: int
    text: str
    success_radius: float = DEFAULT_SUCCESS_RADIUS
    target_category: Optional[str] = None
    condition_category: Optional[str] = None
    condition_radius: float = DEFAULT_CONDITION_RADIUS
    path_corridor: Optional[Corridor] = None
    affordance_tag: Optional[str] = None

    def to_dict(self) -> dict:
        out = {
            "level": self.level,
            "text": self.text,
            "success_radius": self.success_radius,
        }
        if self.target_category is not None:
            out["target_category"] = self.target_category
        if self.condition_category is not None:
            out["condition_category"] = self.condition_category
            out["condition_radius"] = self.condition_radius
        if self.path_corridor is not None:
            out["path_corridor"] = {
                "polyline": [list(p) for p in self.path_corridor.polyline],
                "width": self.path_corridor.width,
            }
        if self.affordance_tag is not None:
            out["affordance_tag"] = self.affordance_tag
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "GoalSpec":
        corridor = None
        if "path_corridor" in data:
            corridor = Corridor(
                polyline=tuple(tuple(p) for p in data["path_corridor"]["polyline"]),
                width=data["path_corridor"]["width"],
            )
        return cls(
            level=data["level"],
            text=data["text"],
            success_radius=data["success_radius"],
            target_category=data.get("target_category"),
            condition_category=data.get("condition_category"),
            condition_radius=data.get("condition_radius", DEFAULT_CONDITION_RADIUS),
            path_corridor=corridor,
            affordance_tag=data.get("affordance_tag"),
        )


def validate_goal(goal: GoalSpec) -> None:
    """Check that exactly the fields implied by the level are populated."""
    if goal.level not in (1, 2, 3, 4):
        raise ValueError(f"goal level must be 1..4, got {goal.level}")
    if goal.success_radius <= 0:
        raise ValueError("success_radius must be positive")
    if goal.level in (1, 2, 3) and not goal.target_category:
        raise ValueError(f"level {goal.level} goal requires target_category")
    if goal.level == 2 and not goal.condition_category:
        raise ValueError("level 2 goal requires condition_category")
    if goal.level != 2 and goal.condition_category:
        raise ValueError("condition_category only belongs to level 2 goals")
    if goal.level == 3 and goal.path_corridor is None:
        raise ValueError("level 3 goal requires path_corridor")
    if goal.level != 3 and goal.path_corridor is not None:
        raise ValueError("path_corridor only belongs to level 3 goals")
    if goal.level == 4 and not goal.affordance_tag:
        raise ValueError("level 4 goal requires affordance_tag")
    if goal.level != 4 and goal.affordance_tag:
        raise ValueError("affordance_tag only belongs to level 4 goals")


@dataclass(frozen=True)
class ObservationParams:
    num_headings: int = 3
    fov: float = 2.0 * math.pi / 3.0  # radians
    view_range: float = 20.0


@dataclass(frozen=True)
class ObservationNoise:
    p_drop: float = 0.0
    p_hallucinate: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.p_drop <= 1.0 and 0.0 <= self.p_hallucinate <= 1.0):
            raise ValueError("noise probabilities must lie in [0, 1]")


NO_NOISE = ObservationNoise()


@dataclass(frozen=True)
class SceneDescription:
    """Textual observation at a pose, with a machine-readable shadow.

    ``mentioned_objects`` holds (category, bearing, range) triples; bearing is
    relative to the view axis in radians.  ``blocked`` marks the stand-in
    description produced when an imagined viewpoint is impassable.
    """

    source_pose: Pose
    heading_index: int
    view_angle: float
    text: str
    mentioned_objects: tuple
    blocked: bool = False

    def to_dict(self) -> dict:
        return {
            "source": [self.source_pose.x, self.source_pose.y, self.source_pose.heading],
            "heading_index": self.heading_index,
            "view_angle": self.view_angle,
            "text": self.text,
            "mentioned_objects": [list(m) for m in self.mentioned_objects],
            "blocked": self.blocked,
        }


# ---------------------------------------------------------------------------
# Loading and validation


def _parse_polygon(raw, what: str) -> np.ndarray:
    try:
        poly = np.asarray(raw, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise WorldFormatError(f"{what}: polygon is not a list of [x, y] pairs") from exc
    if poly.ndim != 2 or poly.shape[1] != 2 or poly.shape[0] < 3:
        raise WorldFormatError(f"{what}: polygon needs at least 3 [x, y] vertices")
    return poly


def _polygon_is_simple(poly: np.ndarray) -> bool:
    """No two non-adjacent edges may intersect."""
    from .kernels.reference import _segments_intersect

    n = len(poly)
    edges = [(poly[i], poly[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue  # adjacent edges share a vertex
            a, b = edges[i]
            c, d = edges[j]
            if _segments_intersect(a[0], a[1], b[0], b[1], c[0], c[1], d[0], d[1]):
                return False
    return True


def load_world(document: str) -> SemanticWorld:
    """Parse and validate a world-file JSON document.

    Raises WorldFormatError on malformed input and WorldValidationError when
    an invariant fails; both name the offending element.
    """
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise WorldFormatError(f"world document is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise WorldFormatError("world document must be a JSON object")
    for key in ("bounds", "regions", "objects", "obstacles"):
        if key not in data:
            raise WorldFormatError(f"world document missing top-level key {key!r}")

    bounds = data["bounds"]
    if not (isinstance(bounds, list) and len(bounds) == 4):
        raise WorldFormatError("bounds must be [min_x, min_y, max_x, max_y]")
    min_x, min_y, max_x, max_y = (float(v) for v in bounds)
    if not (min_x < max_x and min_y < max_y):
        raise WorldValidationError("bounds: min must be strictly below max")

    regions = []
    for i, raw in enumerate(data["regions"]):
        label = raw.get("label")
        if not label:
            raise WorldFormatError(f"regions[{i}]: missing label")
        poly = _parse_polygon(raw.get("polygon"), f"region {label!r}")
        if not _polygon_is_simple(poly):
            raise WorldValidationError(f"region {label!r}: polygon self-intersects")
        regions.append(Region(label=label, polygon=poly))

    obstacles = []
    for i, raw in enumerate(data["obstacles"]):
        poly = _parse_polygon(raw, f"obstacles[{i}]")
        if not _polygon_is_simple(poly):
            raise WorldValidationError(f"obstacles[{i}]: polygon self-intersects")
        obstacles.append(poly)

    objects = []
    seen_ids = set()
    for i, raw in enumerate(data["objects"]):
        obj_id = raw.get("id")
        if not obj_id:
            raise WorldFormatError(f"objects[{i}]: missing id")
        if obj_id in seen_ids:
            raise WorldValidationError(f"object {obj_id!r}: duplicate id")
        seen_ids.add(obj_id)
        category = raw.get("category")
        if not category:
            raise WorldValidationError(f"object {obj_id!r}: category must not be empty")
        pos = raw.get("position")
        if not (isinstance(pos, list) and len(pos) == 2):
            raise WorldFormatError(f"object {obj_id!r}: position must be [x, y]")
        x, y = float(pos[0]), float(pos[1])
        if not (min_x <= x <= max_x and min_y <= y <= max_y):
            raise WorldValidationError(f"object {obj_id!r}: position outside bounds")
        for k, poly in enumerate(obstacles):
            if kernels.point_in_polygon(x, y, poly):
                raise WorldValidationError(
                    f"object {obj_id!r}: position covered by obstacles[{k}]"
                )
        objects.append(
            ObjectInstance(
                id=obj_id,
                category=category,
                position=(x, y),
                attributes=frozenset(raw.get("attributes", [])),
                affordances=frozenset(raw.get("affordances", [])),
            )
        )

    return SemanticWorld(
        bounds=(min_x, min_y, max_x, max_y),
        regions=regions,
        objects=objects,
        obstacles=obstacles,
    )


def load_world_file(path) -> SemanticWorld:
    with open(path, "r", encoding="utf-8") as fh:
        return load_world(fh.read())


# ---------------------------------------------------------------------------
# Observation


def view_angle_for(pose: Pose, heading_index: int, params: ObservationParams) -> float:
    """Absolute view direction of one of the tiled headings at a pose."""
    return normalize_angle(pose.heading + TWO_PI * heading_index / params.num_headings)


def _bearing_word(bearing: float) -> str:
    deg = math.degrees(bearing)
    if abs(deg) <= 20.0:
        return "ahead"
    if deg > 0:
        return "ahead-left" if deg <= 60.0 else "to the left"
    return "ahead-right" if deg >= -60.0 else "to the right"


_COMPASS = ("east", "northeast", "north", "northwest", "west", "southwest", "south", "southeast")


def _compass_word(angle: float) -> str:
    return _COMPASS[int((normalize_angle(angle) + math.pi / 8) // (math.pi / 4)) % 8]


def _render_text(pose: Pose, view_angle: float, region: Optional[str], mentions) -> str:
    where = f"in the {region}" if region else "on open ground"
    head = f"Facing {_compass_word(view_angle)} {where}."
    if not mentions:
        return head + " Nothing notable in view."
    parts = [
        f"a {category} about {distance:.0f} m {_bearing_word(bearing)}"
        for category, bearing, distance in mentions
    ]
    return head + " You see " + "; ".join(parts) + "."


def impassable_scene(pose: Pose, heading_index: int, view_angle: float) -> SceneDescription:
    return SceneDescription(
        source_pose=pose,
        heading_index=heading_index,
        view_angle=view_angle,
        text="The way ahead is blocked by impassable terrain.",
        mentioned_objects=(),
        blocked=True,
    )


def observe(
    world: SemanticWorld,
    pose: Pose,
    heading_index: int,
    params: ObservationParams = ObservationParams(),
    noise: ObservationNoise = NO_NOISE,
) -> SceneDescription:
    """Simulated captioner: describe what is visible in one heading's cone.

    Deterministic for fixed (world, pose, heading_index, noise seed); the
    noise RNG is derived per call, never carried between calls.
    """
    if not 0 <= heading_index < params.num_headings:
        raise ValueError(f"heading_index {heading_index} outside 0..{params.num_headings - 1}")
    view_angle = view_angle_for(pose, heading_index, params)
    half_fov = params.fov / 2.0

    visible = []
    for obj in world.objects:
        dx = obj.position[0] - pose.x
        dy = obj.position[1] - pose.y
        distance = math.hypot(dx, dy)
        if distance > params.view_range:
            continue
        bearing = signed_angle(math.atan2(dy, dx) - view_angle)
        if abs(bearing) > half_fov:
            continue
        visible.append((distance, obj.category, obj.id, bearing))
    visible.sort()

    rng = None
    if noise.p_drop > 0.0 or noise.p_hallucinate > 0.0:
        rng = random.Random(
            stable_seed(noise.seed, "observe", pose.x, pose.y, pose.heading, heading_index)
        )

    mentions = []
    for distance, category, _obj_id, bearing in visible:
        if rng is not None and noise.p_drop > 0.0 and rng.random() < noise.p_drop:
            continue
        mentions.append((category, round(bearing, 3), round(distance, 2)))

    if rng is not None and noise.p_hallucinate > 0.0 and rng.random() < noise.p_hallucinate:
        categories = world.categories()
        if categories:
            category = categories[rng.randrange(len(categories))]
            bearing = rng.uniform(-half_fov, half_fov)
            distance = rng.uniform(1.0, params.view_range)
            mentions.append((category, round(bearing, 3), round(distance, 2)))

    region = world.region_label_at(pose.x, pose.y)
    return SceneDescription(
        source_pose=pose,
        heading_index=heading_index,
        view_angle=view_angle,
        text=_render_text(pose, view_angle, region, mentions),
        mentioned_objects=tuple(mentions),
    )


# ---------------------------------------------------------------------------
# Goal oracles


def satisfying_positions(world: SemanticWorld, goal: GoalSpec) -> list:
    """Positions at which standing within success_radius satisfies the goal."""
    if goal.level in (1, 3):
        return [o.position for o in world.objects if o.category == goal.target_category]
    if goal.level == 2:
        conditions = [
            o.position for o in world.objects if o.category == goal.condition_category
        ]
        out = []
        for o in world.objects:
            if o.category != goal.target_category:
                continue
            for cx, cy in conditions:
                if math.hypot(o.position[0] - cx, o.position[1] - cy) <= goal.condition_radius:
                    out.append(o.position)
                    break
        return out
    if goal.level == 4:
        return [o.position for o in world.objects if goal.affordance_tag in o.affordances]
    raise ValueError(f"goal level {goal.level} out of range")


def goal_categories(world: SemanticWorld, goal: GoalSpec) -> set:
    """Categories whose mention counts as seeing the goal."""
    if goal.level in (1, 2, 3):
        return {goal.target_category}
    return {o.category for o in world.objects if goal.affordance_tag in o.affordances}


def check_goal_reached(world: SemanticWorld, pose: Pose, goal: GoalSpec) -> bool:
    """Point oracle: is this pose within success_radius of a satisfying location?

    The level 3 corridor constraint is an episode-level check; see
    ``satisfies_path_constraint``.
    """
    for px, py in satisfying_positions(world, goal):
        if math.hypot(pose.x - px, pose.y - py) <= goal.success_radius:
            return True
    return False


def satisfies_path_constraint(trajectory, corridor: Corridor, threshold: float = 0.8) -> bool:
    """True if at least ``threshold`` of trajectory points stay inside the corridor."""
    if not trajectory:
        raise ValueError("trajectory must be non-empty")
    pts = corridor.as_array()
    half = corridor.width / 2.0
    inside = sum(
        1
        for pose in trajectory
        if kernels.polyline_min_distance(pose.x, pose.y, pts) <= half
    )
    return inside / len(trajectory) >= threshold


def _goal_cells(grid: OccupancyGrid, positions, radius: float):
    """Flat indices of free cells whose center lies within radius of a position."""
    sources = set()
    r_sq = radius * radius
    for px, py in positions:
        ix0, iy0 = grid.cell_of(px - radius, py - radius)
        ix1, iy1 = grid.cell_of(px + radius, py + radius)
        for iy in range(iy0, iy1 + 1):
            for ix in range(ix0, ix1 + 1):
                if grid.blocked[iy, ix]:
                    continue
                cx, cy = grid.center(ix, iy)
                if (cx - px) ** 2 + (cy - py) ** 2 <= r_sq:
                    sources.add(grid.flat(ix, iy))
    return sorted(sources)


def _nearest_free_cell(grid: OccupancyGrid, x: float, y: float, max_ring: int = 4):
    ix, iy = grid.cell_of(x, y)
    for ring in range(max_ring + 1):
        for jy in range(iy - ring, iy + ring + 1):
            for jx in range(ix - ring, ix + ring + 1):
                if max(abs(jx - ix), abs(jy - iy)) != ring:
                    continue
                if 0 <= jx < grid.nx and 0 <= jy < grid.ny and not grid.blocked[jy, jx]:
                    return jx, jy
    return None


def _smooth_path(world: SemanticWorld, points) -> list:
    """Greedy line-of-sight shortcutting over a grid path."""
    out = [points[0]]
    i = 0
    while i < len(points) - 1:
        j = len(points) - 1
        while j > i + 1 and world.segment_blocked(
            points[i][0], points[i][1], points[j][0], points[j][1]
        ):
            j -= 1
        out.append(points[j])
        i = j
    return out


def shortest_path_length(
    world: SemanticWorld,
    start: Pose,
    goal: GoalSpec,
    resolution: float = DEFAULT_GRID_RESOLUTION,
) -> float:
    """Length of the shortest obstacle-avoiding path to the goal region.

    Straight reaches are measured exactly; detours around obstacles come from
    an 8-connected grid search whose path is then line-of-sight smoothed.
    Used only by metrics, never by the planner.
    """
    positions = satisfying_positions(world, goal)
    if not positions:
        raise UnreachableGoalError(f"goal {goal.text!r} has no satisfying location")
    radius = goal.success_radius

    ranked = sorted(
        (math.hypot(px - start.x, py - start.y), (px, py)) for px, py in positions
    )
    if ranked[0][0] <= radius:
        return 0.0
    lower_bound = ranked[0][0] - radius

    best = math.inf
    for dist, (px, py) in ranked:
        reach = dist - radius
        if reach >= best:
            break
        # nearest point of the goal disk along the straight line from start
        bx = px + (start.x - px) / dist * radius
        by = py + (start.y - py) / dist * radius
        if not world.segment_blocked(start.x, start.y, bx, by):
            best = reach
            break  # ranked by distance, so the first clear reach is the best straight one
    if best <= lower_bound + 1e-9:
        return best

    grid = world.occupancy(resolution)
    sources = _goal_cells(grid, positions, radius)
    if sources:
        dist_field, parent = kernels.grid_shortest_path(grid.blocked, sources, resolution)
        start_cell = _nearest_free_cell(grid, start.x, start.y)
        if start_cell is not None:
            start_idx = grid.flat(*start_cell)
            if math.isfinite(dist_field[start_idx]):
                chain = [(start.x, start.y)]
                idx = start_idx
                while idx != -1:
                    iy, ix = divmod(idx, grid.nx)
                    chain.append(grid.center(ix, iy))
                    idx = int(parent[idx])
                smooth = _smooth_path(world, chain)
                length = sum(
                    math.hypot(bx - ax, by - ay)
                    for (ax, ay), (bx, by) in zip(smooth, smooth[1:])
                )
                best = min(best, max(length, lower_bound))

    if not math.isfinite(best):
        raise UnreachableGoalError(
            f"no obstacle-avoiding path from ({start.x:.1f}, {start.y:.1f}) to goal {goal.text!r}"
        )
    return best


# ---------------------------------------------------------------------------
# Goal generation


def sample_free_point(world: SemanticWorld, rng: random.Random, margin: float = 1.0):
    """Uniform point inside bounds, outside every obstacle."""
    min_x, min_y, max_x, max_y = world.bounds
    for _ in range(1000):
        x = rng.uniform(min_x + margin, max_x - margin)
        y = rng.uniform(min_y + margin, max_y - margin)
        if not world.in_obstacle(x, y):
            return x, y
    raise RuntimeError("could not sample a free point; world too cluttered")


def _pick_spread(rng: random.Random, items: list, count: int) -> list:
    """Sample preferring distinct items, reusing only once the pool is spent."""
    picks = []
    pool = []
    while len(picks) < count:
        if not pool:
            pool = list(items)
        picks.append(pool.pop(rng.randrange(len(pool))))
    return picks


def generate_goals(world: SemanticWorld, level: int, count: int, seed: int) -> list:
    """Deterministically sample achievable goals of the given level."""
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = random.Random(stable_seed(seed, "goal-gen", level))
    goals = []

    if level == 1:
        categories = world.categories()
        if not categories:
            raise NoCandidatesError("level 1 goals need at least one object")
        for category in _pick_spread(rng, categories, count):
            goals.append(
                GoalSpec(level=1, text=f"Navigate to a {category}.", target_category=category)
            )
    elif level == 2:
        pairs = []
        for target in world.categories():
            for condition in world.categories():
                if target == condition:
                    continue
                probe = GoalSpec(
                    level=2,
                    text="",
                    target_category=target,
                    condition_category=condition,
                )
                if satisfying_positions(world, probe):
                    pairs.append((target, condition))
        if not pairs:
            raise NoCandidatesError("no target/condition pair lies close enough for level 2")
        for target, condition in _pick_spread(rng, pairs, count):
            goals.append(
                GoalSpec(
                    level=2,
                    text=f"Navigate to a {target} near a {condition}.",
                    target_category=target,
                    condition_category=condition,
                )
            )
    elif level == 3:
        categories = world.categories()
        if not categories:
            raise NoCandidatesError("level 3 goals need at least one object")
        for category in _pick_spread(rng, categories, count):
            instances = sorted(
                (o for o in world.objects if o.category == category), key=lambda o: o.id
            )
            target = instances[rng.randrange(len(instances))]
            waypoint = sample_free_point(world, rng)
            corridor = Corridor(
                polyline=(waypoint, target.position), width=DEFAULT_CORRIDOR_WIDTH
            )
            goals.append(
                GoalSpec(
                    level=3,
                    text=f"Navigate to a {category} while keeping to the marked route.",
                    target_category=category,
                    path_corridor=corridor,
                )
            )
    elif level == 4:
        tags = sorted({tag for o in world.objects for tag in o.affordances})
        if not tags:
            raise NoCandidatesError("level 4 goals need affordance-tagged objects")
        for tag in _pick_spread(rng, tags, count):
            goals.append(
                GoalSpec(level=4, text=f"Find a place where you can {tag}.", affordance_tag=tag)
            )
    else:
        raise ValueError(f"goal level must be 1..4, got {level}")

    for goal in goals:
        validate_goal(goal)
        if not satisfying_positions(world, goal):
            raise NoCandidatesError(f"generated goal {goal.text!r} is unsatisfiable")
    return goals
