"""Navigation metrics over episode logs: SR, OSR, SPL, and CASR.

CASR discounts the success rate by the mean remaining fraction of the time
budget, counting both compute time (reasoning-query latencies) and travel
time.  Episodes at or over budget contribute zero; the interaction term is
clamped so all metrics stay within [0, 1].
"""

from dataclasses import dataclass

from .planner import TERMINATION_FOUND, EpisodeLog
from .world import (
    GoalSpec,
    Pose,
    SemanticWorld,
    check_goal_reached,
    satisfies_path_constraint,
    shortest_path_length,
)

LEVELS = (1, 2, 3, 4)


@dataclass(frozen=True)
class EpisodeOutcome:
    """Per-episode inputs to the aggregate metrics."""

    success: bool  # declared found AND the oracle confirms the final pose
    oracle_success: bool  # some trajectory point satisfied the goal
    shortest_length: float  # l_i, meters
    actual_length: float  # p_i, meters
    ct: float  # compute time, seconds
    tt: float  # travel time, seconds
    level: int = 0


def interaction_term(ct: float, tt: float, t_max: float) -> float:
    """Remaining budget fraction 1 - (ct + tt) / t_max, clamped at zero."""
    if ct < 0 or tt < 0:
        raise ValueError("ct and tt must be non-negative")
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    return max(0.0, 1.0 - (ct + tt) / t_max)


def sr(outcomes) -> float:
    if not outcomes:
        raise ValueError("need at least one outcome")
    return sum(1 for o in outcomes if o.success) / len(outcomes)


def osr(outcomes) -> float:
    if not outcomes:
        raise ValueError("need at least one outcome")
    return sum(1 for o in outcomes if o.oracle_success) / len(outcomes)


def spl(outcomes) -> float:
    """Mean of success_i * l_i / max(p_i, l_i)."""
    if not outcomes:
        raise ValueError("need at least one outcome")
    total = 0.0
    for o in outcomes:
        if not o.success:
            continue
        denom = max(o.actual_length, o.shortest_length)
        total += o.shortest_length / denom if denom > 0 else 1.0
    return total / len(outcomes)


def casr(outcomes, t_max: float) -> float:
    """Success rate scaled by the mean interaction term over all episodes."""
    if not outcomes:
        raise ValueError("need at least one outcome")
    mean_i = sum(interaction_term(o.ct, o.tt, t_max) for o in outcomes) / len(outcomes)
    return sr(outcomes) * mean_i


def episode_outcome(world: SemanticWorld, log: EpisodeLog) -> EpisodeOutcome:
    """Judge one episode log against the world's ground truth."""
    goal = GoalSpec.from_dict(log.goal)
    trajectory = [Pose(p[0], p[1]) for p in log.trajectory]
    final = Pose(log.final_pose[0], log.final_pose[1])

    declared = log.termination == TERMINATION_FOUND
    confirmed = check_goal_reached(world, final, goal)
    if goal.level == 3 and confirmed:
        confirmed = satisfies_path_constraint(trajectory, goal.path_corridor)
    success = declared and confirmed

    oracle = any(check_goal_reached(world, pose, goal) for pose in trajectory)

    start = Pose(log.start[0], log.start[1], log.start[2])
    shortest = shortest_path_length(world, start, goal)

    return EpisodeOutcome(
        success=success,
        oracle_success=oracle,
        shortest_length=shortest,
        actual_length=log.travel_distance,
        ct=log.compute_time,
        tt=log.travel_time,
        level=goal.level,
    )


@dataclass
class MetricsReport:
    """Per-level and pooled SR/OSR/SPL/CASR plus budget bookkeeping."""

    t_max: float
    per_level: dict  # level -> metrics dict
    overall: dict  # pooled over all episodes

    def to_dict(self) -> dict:
        return {
            "t_max": self.t_max,
            "per_level": {str(k): v for k, v in sorted(self.per_level.items())},
            "overall": self.overall,
        }


def _bucket_metrics(outcomes, t_max: float) -> dict:
    return {
        "episodes": len(outcomes),
        "sr": sr(outcomes),
        "osr": osr(outcomes),
        "spl": spl(outcomes),
        "casr": casr(outcomes, t_max),
        "mean_ct": sum(o.ct for o in outcomes) / len(outcomes),
        "mean_tt": sum(o.tt for o in outcomes) / len(outcomes),
    }


def build_report(outcomes, t_max: float) -> MetricsReport:
    if not outcomes:
        raise ValueError("need at least one outcome")
    per_level = {}
    for level in LEVELS:
        bucket = [o for o in outcomes if o.level == level]
        if bucket:
            per_level[level] = _bucket_metrics(bucket, t_max)
    return MetricsReport(t_max=t_max, per_level=per_level, overall=_bucket_metrics(outcomes, t_max))


def render_table(reports: dict) -> str:
    """Aligned text table, one row per method: L1..L4 + Avg per metric.

    The Avg column is the unweighted mean over levels that ran; levels with
    no episodes show a dash.
    """
    metrics = ("sr", "osr", "spl", "casr")
    name_w = max([len(m) for m in reports] + [10])
    header_1 = " " * name_w
    header_2 = "method".ljust(name_w)
    for metric in metrics:
        block = f"{metric.upper():^30}"
        header_1 += " | " + block
        header_2 += " | " + " ".join(f"{c:>5}" for c in ("L1", "L2", "L3", "L4", "Avg"))
    lines = [header_1, header_2, "-" * len(header_2)]
    for method, report in reports.items():
        row = method.ljust(name_w)
        for metric in metrics:
            cells = []
            values = []
            for level in LEVELS:
                stats = report.per_level.get(level)
                if stats is None:
                    cells.append(f"{'-':>5}")
                else:
                    cells.append(f"{stats[metric]:>5.2f}")
                    values.append(stats[metric])
            avg = sum(values) / len(values) if values else 0.0
            cells.append(f"{avg:>5.2f}")
            row += " | " + " ".join(cells)
        lines.append(row)
    return "\n".join(lines) + "\n"
