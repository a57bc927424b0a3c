"""Expanding topological graph: frontier nodes, the buffer, and selection.

A frontier is a candidate waypoint one edge away from a visited pathpoint;
committing it makes it the next pathpoint and removes it from the open set.
Selection maximizes the node's normalized score minus a sigmoid distance
penalty, so far-away buffer entries stay viable but cost more.
"""

import math
from dataclasses import dataclass
from typing import Optional

from .errors import EmptyBufferError, NodeNotOpenError
from .world import Pose, SceneDescription, SemanticWorld

DEFAULT_EDGE_LENGTH = 10.0
DEFAULT_DEDUP_RADIUS = 3.0


@dataclass(frozen=True)
class DistancePenaltyParams:
    k: float = 0.5  # sharpness, 1/m
    d0: float = 15.0  # half-penalty distance, m

    def __post_init__(self):
        if self.k <= 0 or self.d0 <= 0:
            raise ValueError("penalty parameters k and d0 must be positive")


def sigmoid_penalty(d: float, params: DistancePenaltyParams) -> float:
    """Logistic penalty 1 / (1 + exp(-k * (d - d0))), evaluated stably."""
    x = params.k * (d - params.d0)
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


@dataclass
class FrontierNode:
    """A candidate waypoint, or (once committed) a visited pathpoint."""

    id: str
    x: float
    y: float
    heading: float  # absolute direction of the edge leading into this node
    heading_index: int
    parent_id: Optional[str]
    scene: Optional[SceneDescription]
    score_q: Optional[float] = None
    distance_from_current: float = 0.0

    @property
    def pose(self) -> Pose:
        return Pose(self.x, self.y, self.heading)

    def distance_to(self, pose: Pose) -> float:
        return math.hypot(self.x - pose.x, self.y - pose.y)


class FrontierBuffer:
    """Open frontiers plus the ordered list of committed pathpoints.

    Single-writer: expansion and commits happen on the planner's control
    thread; concurrent workers only fill score_q on distinct nodes.
    """

    def __init__(self):
        self.open = []
        self.committed = []
        self._open_ids = set()
        self._count = 0

    def new_id(self) -> str:
        nid = f"n{self._count:04d}"
        self._count += 1
        return nid

    def add_root(self, pose: Pose) -> FrontierNode:
        """Seed the committed list with the start pose node."""
        node = FrontierNode(
            id=self.new_id(),
            x=pose.x,
            y=pose.y,
            heading=pose.heading,
            heading_index=0,
            parent_id=None,
            scene=None,
        )
        self.committed.append(node)
        return node

    def add_open(self, node: FrontierNode) -> None:
        self.open.append(node)
        self._open_ids.add(node.id)

    def is_open(self, node: FrontierNode) -> bool:
        return node.id in self._open_ids

    def commit(self, node: FrontierNode) -> None:
        """Move a node from open to the end of the committed path."""
        if node.id not in self._open_ids:
            raise NodeNotOpenError(f"node {node.id} is not in the open set")
        self._open_ids.remove(node.id)
        self.open = [n for n in self.open if n.id != node.id]
        self.committed.append(node)

    def snapshot(self, penalty: DistancePenaltyParams, current: Pose) -> dict:
        """JSON-ready view of the graph used by logs and the plot emitter."""
        return {
            "committed": [
                {"id": n.id, "x": n.x, "y": n.y, "heading": n.heading}
                for n in self.committed
            ],
            "open": [
                {
                    "id": n.id,
                    "x": n.x,
                    "y": n.y,
                    "parent": n.parent_id,
                    "score_q": n.score_q,
                    "distance": n.distance_to(current),
                    "penalty": sigmoid_penalty(n.distance_to(current), penalty),
                }
                for n in self.open
            ],
        }


def expand_frontiers(
    buffer: FrontierBuffer,
    current: FrontierNode,
    world: SemanticWorld,
    scenes,
    edge_length: float = DEFAULT_EDGE_LENGTH,
    dedup_radius: float = DEFAULT_DEDUP_RADIUS,
) -> list:
    """Spawn up to one frontier per heading from the current pathpoint.

    ``scenes`` are the observations taken at the current pathpoint, one per
    tiled heading; each surviving frontier carries its heading's scene.
    Positions inside obstacles, outside bounds, or within dedup_radius of an
    existing node are discarded.  May return an empty list; dead ends are
    handled by selecting from the global buffer.
    """
    if len(scenes) < 2:
        raise ValueError("need at least 2 headings to expand")
    if edge_length <= 0:
        raise ValueError("edge_length must be positive")

    added = []
    existing = buffer.open + buffer.committed
    for heading_index, scene in enumerate(scenes):
        theta = scene.view_angle
        nx = current.x + edge_length * math.cos(theta)
        ny = current.y + edge_length * math.sin(theta)
        if not world.contains(nx, ny) or world.in_obstacle(nx, ny):
            continue
        too_close = any(
            math.hypot(nx - n.x, ny - n.y) < dedup_radius for n in existing
        ) or any(math.hypot(nx - n.x, ny - n.y) < dedup_radius for n in added)
        if too_close:
            continue
        node = FrontierNode(
            id=buffer.new_id(),
            x=nx,
            y=ny,
            heading=theta,
            heading_index=heading_index,
            parent_id=current.id,
            scene=scene,
        )
        buffer.add_open(node)
        added.append(node)
    return added


def select_frontier(
    buffer: FrontierBuffer,
    current: Pose,
    params: DistancePenaltyParams,
) -> FrontierNode:
    """Pick the open frontier maximizing score_q - sigmoid_penalty(distance).

    Ties break toward the smaller distance, then insertion order.  Every open
    node must have been scored.  Raises EmptyBufferError when exploration is
    exhausted.
    """
    if not buffer.open:
        raise EmptyBufferError("no open frontier to select")
    best = None
    best_utility = -math.inf
    best_distance = math.inf
    for node in buffer.open:
        if node.score_q is None:
            raise ValueError(f"frontier {node.id} has no score")
        d = node.distance_to(current)
        node.distance_from_current = d
        utility = node.score_q - sigmoid_penalty(d, params)
        if utility > best_utility or (utility == best_utility and d < best_distance):
            best = node
            best_utility = utility
            best_distance = d
    return best
