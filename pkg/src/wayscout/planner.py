"""Decision core: frontier scoring by imagined rollouts, baselines, episodes.

Three scoring methods share the episode loop:

* ``reasoned-explorer`` - per-frontier rollouts: each rollout imagines
  scenes down to the configured depth and evaluates every one; the frontier
  score is the mean over depths and rollouts, normalized to [0, 1].
* ``llm-as-eval``       - greedy re-scoring of the frontier scene alone;
  exactly the rollout scorer at depth 0 with one rollout.
* ``llm-mcts``          - sequential UCT over the imagined tree at a fixed
  iteration budget.

Scoring of distinct frontiers may run on worker threads; results are merged
in frontier order so concurrency never changes an episode's outcome.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .errors import BackendError, EmptyBufferError
from .frontier import (
    DEFAULT_DEDUP_RADIUS,
    DEFAULT_EDGE_LENGTH,
    DistancePenaltyParams,
    FrontierBuffer,
    FrontierNode,
    expand_frontiers,
    select_frontier,
)
from .reasoning import ReasoningBackend
from .world import (
    GoalSpec,
    ObservationNoise,
    ObservationParams,
    Pose,
    SemanticWorld,
    observe,
    validate_goal,
)

METHODS = ("reasoned-explorer", "llm-mcts", "llm-as-eval")

LOG_SCHEMA_VERSION = 1

TERMINATION_FOUND = "found-declared"
TERMINATION_BUDGET = "budget-exhausted"
TERMINATION_EMPTY = "buffer-empty"
TERMINATION_MAX_STEPS = "max-steps"


@dataclass(frozen=True)
class PlannerParams:
    n: int = 3  # branching / action-space dimension
    l: int = 2  # rollout depth
    b: Optional[int] = None  # rollouts per frontier; defaults to n
    penalty: DistancePenaltyParams = DistancePenaltyParams()
    max_steps: int = 100
    t_max: float = 1800.0  # seconds of CT + TT per episode
    edge_length: float = DEFAULT_EDGE_LENGTH
    dedup_radius: float = DEFAULT_DEDUP_RADIUS
    agent_speed: float = 1.5  # m/s
    mcts_iterations: int = 10
    scoring_workers: int = 1

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.l < 0:
            raise ValueError("l must be non-negative")
        if self.b is not None and self.b < 1:
            raise ValueError("b must be at least 1")
        if self.t_max <= 0:
            raise ValueError("t_max must be positive")
        if self.agent_speed <= 0:
            raise ValueError("agent_speed must be positive")

    @property
    def rollouts(self) -> int:
        return self.b if self.b is not None else self.n

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "l": self.l,
            "b": self.rollouts,
            "penalty": {"k": self.penalty.k, "d0": self.penalty.d0},
            "max_steps": self.max_steps,
            "t_max": self.t_max,
            "edge_length": self.edge_length,
            "dedup_radius": self.dedup_radius,
            "agent_speed": self.agent_speed,
            "mcts_iterations": self.mcts_iterations,
        }


@dataclass
class LedgerEntry:
    kind: str  # evaluate | envision | check_found
    latency: float
    ok: bool = True

    def to_dict(self, step: int, node: Optional[str]) -> dict:
        return {
            "step": step,
            "node": node,
            "kind": self.kind,
            "latency": self.latency,
            "ok": self.ok,
        }


def _evaluate(backend, goal_text, scene, entries) -> int:
    """Evaluate a scene, recording the call; failures score 1 (fail-low)."""
    try:
        score = backend.evaluate(goal_text, scene)
    except BackendError as exc:
        entries.append(LedgerEntry("evaluate", exc.latency, ok=False))
        return 1
    entries.append(LedgerEntry("evaluate", score.latency))
    return score.value


# ---------------------------------------------------------------------------
# Frontier scorers


def rrt_score(
    frontier: FrontierNode,
    goal_text: str,
    backend: ReasoningBackend,
    depth: int,
    rollouts: int,
):
    """Score a frontier by independent imagined rollouts.

    Rollout r produces scenes at depths 0..depth (depth 0 is the frontier's
    real scene, evaluated once and shared); its mean over depths feeds the
    mean over rollouts, and the result is normalized from Likert 1..5 to
    [0, 1].  Returns (score, ledger entries).
    """
    entries = []
    v0 = _evaluate(backend, goal_text, frontier.scene, entries)
    if depth == 0:
        return (v0 - 1.0) / 4.0, entries

    means = []
    for _ in range(rollouts):
        values = [v0]
        scene = frontier.scene
        dead = False
        for _ in range(depth):
            if not dead:
                try:
                    scene, latency = backend.envision(scene)
                    entries.append(LedgerEntry("envision", latency))
                except BackendError as exc:
                    entries.append(LedgerEntry("envision", exc.latency, ok=False))
                    dead = True
            if dead:
                values.append(1)
            else:
                values.append(_evaluate(backend, goal_text, scene, entries))
        means.append(sum(values) / (depth + 1))
    raw = sum(means) / rollouts
    return (raw - 1.0) / 4.0, entries


def greedy_eval_score(frontier: FrontierNode, goal_text: str, backend: ReasoningBackend):
    """Single evaluation of the frontier scene: rrt_score at depth 0, one rollout."""
    return rrt_score(frontier, goal_text, backend, depth=0, rollouts=1)


class _TreeNode:
    __slots__ = ("scene", "depth", "children", "visits", "total")

    def __init__(self, scene, depth):
        self.scene = scene
        self.depth = depth
        self.children = []
        self.visits = 0
        self.total = 0.0

    def mean(self) -> float:
        return self.total / self.visits


def mcts_score(
    frontier: FrontierNode,
    goal_text: str,
    backend: ReasoningBackend,
    depth: int,
    iterations: int = 10,
    branching: int = 3,
    exploration: float = math.sqrt(2.0),
):
    """Sequential UCT over the imagined tree; returns the root's mean value.

    Each iteration selects by UCT, expands one child via the imaginer (or
    re-evaluates a depth-capped leaf), and back-propagates the normalized
    score.  At depth 0 the tree is degenerate and the root is evaluated once.
    """
    entries = []
    root = _TreeNode(frontier.scene, 0)
    v = _evaluate(backend, goal_text, frontier.scene, entries)
    _backprop([root], (v - 1.0) / 4.0)
    if depth == 0:
        return root.mean(), entries

    for _ in range(iterations):
        path = [root]
        node = root
        while node.depth < depth and len(node.children) == branching:
            node = _uct_child(node, exploration)
            path.append(node)
        if node.depth < depth:
            try:
                scene, latency = backend.envision(node.scene)
                entries.append(LedgerEntry("envision", latency))
            except BackendError as exc:
                entries.append(LedgerEntry("envision", exc.latency, ok=False))
                _backprop(path, 0.0)
                continue
            child = _TreeNode(scene, node.depth + 1)
            node.children.append(child)
            path.append(child)
            v = _evaluate(backend, goal_text, scene, entries)
        else:
            v = _evaluate(backend, goal_text, node.scene, entries)
        _backprop(path, (v - 1.0) / 4.0)
    return root.mean(), entries


def _uct_child(node: _TreeNode, exploration: float) -> _TreeNode:
    log_n = math.log(node.visits)
    best = None
    best_value = -math.inf
    for child in node.children:
        value = child.mean() + exploration * math.sqrt(log_n / child.visits)
        if value > best_value:
            best = child
            best_value = value
    return best


def _backprop(path, value: float) -> None:
    for node in path:
        node.visits += 1
        node.total += value


# ---------------------------------------------------------------------------
# Episode loop


@dataclass
class EpisodeState:
    """Live state of one exploration episode."""

    current: FrontierNode
    buffer: FrontierBuffer
    goal: GoalSpec
    elapsed_travel: float = 0.0
    elapsed_compute: float = 0.0
    travel_distance: float = 0.0
    step_count: int = 0
    trajectory: list = field(default_factory=list)
    terminated: Optional[str] = None  # None while running


@dataclass
class EpisodeLog:
    """Serializable record of one episode: the contract metrics consume."""

    method: str
    seed: int
    goal: dict
    params: dict
    start: list
    pathpoints: list  # committed nodes in visit order
    trajectory: list
    steps: list
    ledger: list
    compute_time: float
    travel_time: float
    travel_distance: float
    termination: str
    final_pose: list
    schema_version: int = LOG_SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "method": self.method,
            "seed": self.seed,
            "goal": self.goal,
            "params": self.params,
            "start": self.start,
            "pathpoints": self.pathpoints,
            "trajectory": self.trajectory,
            "steps": self.steps,
            "ledger": self.ledger,
            "compute_time": self.compute_time,
            "travel_time": self.travel_time,
            "travel_distance": self.travel_distance,
            "termination": self.termination,
            "final_pose": self.final_pose,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EpisodeLog":
        from .errors import MalformedLogError

        try:
            return cls(
                schema_version=data["schema_version"],
                method=data["method"],
                seed=data["seed"],
                goal=data["goal"],
                params=data["params"],
                start=data["start"],
                pathpoints=data["pathpoints"],
                trajectory=data["trajectory"],
                steps=data["steps"],
                ledger=data["ledger"],
                compute_time=data["compute_time"],
                travel_time=data["travel_time"],
                travel_distance=data["travel_distance"],
                termination=data["termination"],
                final_pose=data["final_pose"],
            )
        except KeyError as exc:
            raise MalformedLogError(f"episode log missing key {exc.args[0]!r}") from exc


def _score_many(nodes, score_fn, workers: int):
    if workers and workers > 1 and len(nodes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(score_fn, nodes))
    return [score_fn(node) for node in nodes]


def _extend_trajectory(trajectory, frm: Pose, to_node: FrontierNode) -> None:
    """Record straight-line motion sampled at 1 m intervals, endpoint included."""
    dx = to_node.x - frm.x
    dy = to_node.y - frm.y
    d = math.hypot(dx, dy)
    if d <= 0.0:
        return
    steps = int(d - 1e-9)
    for k in range(1, steps + 1):
        t = k / d
        trajectory.append([frm.x + dx * t, frm.y + dy * t])
    trajectory.append([to_node.x, to_node.y])


def run_episode(
    world: SemanticWorld,
    goal: GoalSpec,
    start: Pose,
    method: str,
    backend: ReasoningBackend,
    params: PlannerParams,
    seed: int = 0,
    obs_params: Optional[ObservationParams] = None,
    noise: ObservationNoise = ObservationNoise(),
) -> EpisodeLog:
    """Run one exploration episode and return its full log.

    Per step: observe one scene per heading, expand frontiers, score the new
    ones with the method's scorer, stop-check every current scene, then
    select and travel.  Terminates on found-declared, budget exhaustion
    (checked between steps), an empty buffer, or the step cap.  Raises
    BackendUnavailableError if the backend goes down entirely.
    """
    validate_goal(goal)
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    base = obs_params or ObservationParams()
    obs = ObservationParams(
        num_headings=params.n, fov=base.fov, view_range=base.view_range
    )

    if method == "reasoned-explorer":
        def score_fn(node):
            return rrt_score(node, goal.text, backend, params.l, params.rollouts)
    elif method == "llm-as-eval":
        def score_fn(node):
            return greedy_eval_score(node, goal.text, backend)
    else:
        def score_fn(node):
            return mcts_score(
                node, goal.text, backend, params.l, params.mcts_iterations, params.n
            )

    buffer = FrontierBuffer()
    state = EpisodeState(
        current=buffer.add_root(start),
        buffer=buffer,
        goal=goal,
        trajectory=[[start.x, start.y]],
    )
    ledger = []
    step_records = []

    while True:
        if state.elapsed_compute + state.elapsed_travel >= params.t_max:
            state.terminated = TERMINATION_BUDGET
            break
        if state.step_count >= params.max_steps:
            state.terminated = TERMINATION_MAX_STEPS
            break

        current = state.current
        scenes = [
            observe(world, current.pose, i, obs, noise) for i in range(params.n)
        ]
        new_nodes = expand_frontiers(
            buffer, current, world, scenes, params.edge_length, params.dedup_radius
        )

        results = _score_many(new_nodes, score_fn, params.scoring_workers)
        for node, (score, entries) in zip(new_nodes, results):
            node.score_q = score
            for entry in entries:
                ledger.append(entry.to_dict(state.step_count, node.id))
                state.elapsed_compute += entry.latency

        found = False
        for scene in scenes:
            try:
                verdict, latency = backend.check_found(goal.text, scene)
                entry = LedgerEntry("check_found", latency)
            except BackendError as exc:
                verdict = False
                entry = LedgerEntry("check_found", exc.latency, ok=False)
            ledger.append(entry.to_dict(state.step_count, current.id))
            state.elapsed_compute += entry.latency
            found = found or verdict

        record = {
            "step": state.step_count,
            "pathpoint": {"id": current.id, "x": current.x, "y": current.y},
            "scenes": [scene.text for scene in scenes],
            "new_frontiers": [node.id for node in new_nodes],
            "found": found,
            "selected": None,
            "buffer": buffer.snapshot(params.penalty, current.pose),
        }
        step_records.append(record)

        if found:
            state.terminated = TERMINATION_FOUND
            break

        try:
            selected = select_frontier(buffer, current.pose, params.penalty)
        except EmptyBufferError:
            state.terminated = TERMINATION_EMPTY
            break
        buffer.commit(selected)
        record["selected"] = selected.id

        hop = selected.distance_to(current.pose)
        state.travel_distance += hop
        state.elapsed_travel = state.travel_distance / params.agent_speed
        _extend_trajectory(state.trajectory, current.pose, selected)
        state.current = selected
        state.step_count += 1

    final = state.current.pose
    return EpisodeLog(
        method=method,
        seed=seed,
        goal=goal.to_dict(),
        params=params.to_dict(),
        start=[start.x, start.y, start.heading],
        pathpoints=[
            {"id": n.id, "x": n.x, "y": n.y, "heading": n.heading}
            for n in buffer.committed
        ],
        trajectory=state.trajectory,
        steps=step_records,
        ledger=ledger,
        compute_time=state.elapsed_compute,
        travel_time=state.elapsed_travel,
        travel_distance=state.travel_distance,
        termination=state.terminated,
        final_pose=[final.x, final.y, final.heading],
    )
