"""Frontier exploration with imagined rollouts over 2D semantic worlds.

A planning toolkit: a simulated outdoor world with a captioner-style
observation model, an expanding frontier graph, rollout and tree-search
scorers behind pluggable reasoning backends, and the SR/OSR/SPL/CASR
metric suite with a deterministic experiment harness.
"""

from .frontier import (
    DistancePenaltyParams,
    FrontierBuffer,
    FrontierNode,
    expand_frontiers,
    select_frontier,
    sigmoid_penalty,
)
from .metrics import (
    EpisodeOutcome,
    MetricsReport,
    build_report,
    casr,
    episode_outcome,
    interaction_term,
    osr,
    spl,
    sr,
)
from .planner import (
    METHODS,
    EpisodeLog,
    PlannerParams,
    greedy_eval_score,
    mcts_score,
    rrt_score,
    run_episode,
)
from .reasoning import (
    EvalScore,
    ReasoningBackend,
    RemoteBackend,
    RemoteEndpointConfig,
    ReplayBackend,
    ScriptedOracleBackend,
    ScriptedOracleParams,
)
from .suite import SuiteConfig, load_config, run_suite, sweep_l
from .world import (
    GoalSpec,
    ObservationNoise,
    ObservationParams,
    Pose,
    SceneDescription,
    SemanticWorld,
    check_goal_reached,
    generate_goals,
    load_world,
    load_world_file,
    observe,
    satisfies_path_constraint,
    shortest_path_length,
)

__version__ = "0.1.0"
