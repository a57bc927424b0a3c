"""Suite orchestration: config files, seeded episode batches, sweeps, resume.

Per-episode seeds are a pure function of (master seed, level, episode index,
method), so reordering config lists or changing worker counts never changes
an individual episode.  Every file a run writes is referenced from a single
manifest; rerunning with the same config skips episodes whose logs exist.
"""

import json
import math
import random
import statistics
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import yaml

from .errors import BackendUnavailableError, ConfigError
from .frontier import DistancePenaltyParams
from .metrics import MetricsReport, build_report, episode_outcome, render_table
from .planner import METHODS, EpisodeLog, PlannerParams, run_episode
from .reasoning import (
    RemoteBackend,
    RemoteEndpointConfig,
    ScriptedOracleBackend,
    ScriptedOracleParams,
)
from .seeding import stable_seed
from .world import (
    GoalSpec,
    ObservationNoise,
    ObservationParams,
    Pose,
    SemanticWorld,
    generate_goals,
    load_world_file,
    sample_free_point,
    satisfying_positions,
)

MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class StartSampling:
    min_goal_distance: float = 25.0
    max_goal_distance: float = 80.0


@dataclass
class SuiteConfig:
    world_path: str
    output_dir: str
    master_seed: int
    levels: list
    episodes_per_level: int
    methods: list
    planner: PlannerParams = PlannerParams()
    observation: ObservationParams = ObservationParams()
    noise: ObservationNoise = ObservationNoise()
    backend_kind: str = "scripted"
    oracle: ScriptedOracleParams = ScriptedOracleParams()
    remote: Optional[RemoteEndpointConfig] = None
    start: StartSampling = StartSampling()
    workers: int = 1

    def fingerprint(self) -> str:
        import hashlib

        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.blake2b(blob.encode("utf-8"), digest_size=16).hexdigest()

    def to_dict(self) -> dict:
        out = {
            "world": str(self.world_path),
            "master_seed": self.master_seed,
            "levels": list(self.levels),
            "episodes_per_level": self.episodes_per_level,
            "methods": list(self.methods),
            "planner": self.planner.to_dict(),
            "observation": {
                "fov_deg": math.degrees(self.observation.fov),
                "view_range": self.observation.view_range,
            },
            "noise": {
                "p_drop": self.noise.p_drop,
                "p_hallucinate": self.noise.p_hallucinate,
            },
            "backend": {"kind": self.backend_kind},
            "start": {
                "min_goal_distance": self.start.min_goal_distance,
                "max_goal_distance": self.start.max_goal_distance,
            },
        }
        if self.backend_kind == "scripted":
            out["backend"].update(
                {
                    "score_noise": self.oracle.score_noise,
                    "optimism_bias": self.oracle.optimism_bias,
                    "latencies": {
                        "evaluate": self.oracle.latency_evaluate,
                        "envision": self.oracle.latency_envision,
                        "check_found": self.oracle.latency_check_found,
                    },
                }
            )
        elif self.remote is not None:
            out["backend"].update({"url": self.remote.url, "model": self.remote.model})
        return out


def _require(condition, message):
    if not condition:
        raise ConfigError(message)


def load_config(path, overrides: Optional[dict] = None) -> SuiteConfig:
    """Parse and validate a YAML suite config; messages name the field."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    with open(path, "r", encoding="utf-8") as fh:
        raw = yaml.safe_load(fh) or {}
    if overrides:
        raw.update(overrides)
    return config_from_dict(raw, base_dir=path.parent)


def config_from_dict(raw: dict, base_dir: Optional[Path] = None) -> SuiteConfig:
    _require(isinstance(raw, dict), "config root must be a mapping")
    _require("world" in raw, "world: required (path to a .world file)")
    _require("output_dir" in raw, "output_dir: required")

    world_path = Path(raw["world"])
    if base_dir is not None and not world_path.is_absolute():
        candidate = base_dir / world_path
        if candidate.exists():
            world_path = candidate
    _require(world_path.exists(), f"world: file {world_path} does not exist")

    levels = raw.get("levels", [1])
    _require(
        isinstance(levels, list) and levels and all(lv in (1, 2, 3, 4) for lv in levels),
        "levels: must be a non-empty list drawn from [1, 2, 3, 4]",
    )
    episodes = raw.get("episodes_per_level", 1)
    _require(isinstance(episodes, int) and episodes >= 1, "episodes_per_level: must be >= 1")

    methods = raw.get("methods", ["reasoned-explorer"])
    _require(
        isinstance(methods, list) and methods and all(m in METHODS for m in methods),
        f"methods: must be a non-empty list drawn from {list(METHODS)}",
    )

    planner_raw = dict(raw.get("planner", {}))
    penalty_raw = planner_raw.pop("penalty", {})
    try:
        penalty = DistancePenaltyParams(
            k=float(penalty_raw.get("k", 0.5)), d0=float(penalty_raw.get("d0", 15.0))
        )
        planner = PlannerParams(penalty=penalty, **planner_raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"planner: {exc}") from exc

    obs_raw = raw.get("observation", {})
    try:
        observation = ObservationParams(
            num_headings=planner.n,
            fov=math.radians(float(obs_raw.get("fov_deg", 120.0))),
            view_range=float(obs_raw.get("view_range", 20.0)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"observation: {exc}") from exc

    noise_raw = raw.get("noise", {})
    try:
        noise = ObservationNoise(
            p_drop=float(noise_raw.get("p_drop", 0.0)),
            p_hallucinate=float(noise_raw.get("p_hallucinate", 0.0)),
        )
    except ValueError as exc:
        raise ConfigError(f"noise: {exc}") from exc

    backend_raw = dict(raw.get("backend", {"kind": "scripted"}))
    kind = backend_raw.pop("kind", "scripted")
    _require(kind in ("scripted", "remote"), "backend.kind: must be scripted or remote")
    oracle = ScriptedOracleParams()
    remote = None
    if kind == "scripted":
        latencies = backend_raw.pop("latencies", {})
        try:
            oracle = ScriptedOracleParams(
                score_noise=float(backend_raw.pop("score_noise", 0.0)),
                optimism_bias=int(backend_raw.pop("optimism_bias", 0)),
                latency_evaluate=float(latencies.get("evaluate", 2.0)),
                latency_envision=float(latencies.get("envision", 2.5)),
                latency_check_found=float(latencies.get("check_found", 1.5)),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"backend: {exc}") from exc
    else:
        _require("url" in backend_raw and "model" in backend_raw,
                 "backend: remote kind requires url and model")
        remote = RemoteEndpointConfig(
            url=backend_raw.pop("url"),
            model=backend_raw.pop("model"),
            temperature=float(backend_raw.pop("temperature", 0.3)),
            api_key_env=backend_raw.pop("api_key_env", "WAYSCOUT_API_KEY"),
            record_path=backend_raw.pop("record_path", None),
            prompt_dir=backend_raw.pop("prompt_dir", None),
        )

    start_raw = raw.get("start", {})
    start = StartSampling(
        min_goal_distance=float(start_raw.get("min_goal_distance", 25.0)),
        max_goal_distance=float(start_raw.get("max_goal_distance", 80.0)),
    )
    _require(
        0 <= start.min_goal_distance <= start.max_goal_distance,
        "start: need 0 <= min_goal_distance <= max_goal_distance",
    )

    workers = raw.get("workers", 1)
    _require(isinstance(workers, int) and workers >= 1, "workers: must be >= 1")

    master_seed = raw.get("master_seed", 0)
    _require(isinstance(master_seed, int), "master_seed: must be an integer")

    return SuiteConfig(
        world_path=str(world_path),
        output_dir=str(raw["output_dir"]),
        master_seed=master_seed,
        levels=list(levels),
        episodes_per_level=episodes,
        methods=list(methods),
        planner=planner,
        observation=observation,
        noise=noise,
        backend_kind=kind,
        oracle=oracle,
        remote=remote,
        start=start,
        workers=workers,
    )


# ---------------------------------------------------------------------------
# Episode cell machinery


def episode_seed(master_seed: int, level: int, index: int, method: str) -> int:
    return stable_seed(master_seed, "episode", level, index, method)


def sample_start(
    world: SemanticWorld,
    goal: GoalSpec,
    rng: random.Random,
    band: StartSampling = StartSampling(),
) -> Pose:
    """Free start pose whose distance to the nearest goal location sits in a band.

    The band keeps episodes non-trivial (not already at the goal) and
    solvable within budget; if the world cannot honor it the band relaxes.
    """
    positions = satisfying_positions(world, goal)
    lo, hi = band.min_goal_distance, band.max_goal_distance
    for attempt in range(4000):
        if attempt == 2000:  # relax the upper bound if the band is infeasible
            hi = math.inf
        x, y = sample_free_point(world, rng)
        d = min(math.hypot(px - x, py - y) for px, py in positions)
        if lo <= d <= hi:
            return Pose(x, y, rng.uniform(0.0, 2.0 * math.pi))
    raise ConfigError(
        "start: could not sample a start pose in the configured distance band"
    )


def _build_backend(config: SuiteConfig, world, goal, seed: int, noise: ObservationNoise):
    if config.backend_kind == "scripted":
        return ScriptedOracleBackend(
            world,
            goal,
            params=config.oracle,
            obs_params=config.observation,
            noise=noise,
            seed=stable_seed(seed, "oracle"),
            edge_length=config.planner.edge_length,
        )
    return RemoteBackend(config.remote, edge_length=config.planner.edge_length)


def run_cell(
    config: SuiteConfig,
    world: SemanticWorld,
    goal: GoalSpec,
    level: int,
    index: int,
    method: str,
) -> EpisodeLog:
    """Run one (level, episode, method) cell deterministically."""
    seed = episode_seed(config.master_seed, level, index, method)
    start_rng = random.Random(stable_seed(config.master_seed, "start", level, index))
    start = sample_start(world, goal, start_rng, config.start)
    noise = ObservationNoise(
        p_drop=config.noise.p_drop,
        p_hallucinate=config.noise.p_hallucinate,
        seed=stable_seed(seed, "obs-noise"),
    )
    backend = _build_backend(config, world, goal, seed, noise)
    return run_episode(
        world,
        goal,
        start,
        method,
        backend,
        config.planner,
        seed=seed,
        obs_params=config.observation,
        noise=noise,
    )


@dataclass
class SuiteResult:
    reports: dict  # method -> MetricsReport
    table: str
    manifest_path: str
    aborted: list = field(default_factory=list)


def _write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def run_suite(config: SuiteConfig, workers: Optional[int] = None) -> SuiteResult:
    """Run every (level, episode, method) cell and write logs plus reports.

    Episodes may run on parallel worker threads; seeds are pre-assigned so
    parallelism cannot change any output byte.  Completed cells found in the
    manifest are skipped on rerun.
    """
    world = load_world_file(config.world_path)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest_path = out_dir / MANIFEST_NAME
    fingerprint = config.fingerprint()

    episodes = {}
    if manifest_path.exists():
        with open(manifest_path, "r", encoding="utf-8") as fh:
            previous = json.load(fh)
        if previous.get("config_fingerprint") != fingerprint:
            raise ConfigError(
                f"output_dir: {out_dir} holds results for a different config; "
                "choose a fresh directory"
            )
        episodes = {
            key: rel
            for key, rel in previous.get("episodes", {}).items()
            if (out_dir / rel).exists()
        }

    goals = {
        level: generate_goals(
            world,
            level,
            config.episodes_per_level,
            seed=stable_seed(config.master_seed, "goals", level),
        )
        for level in config.levels
    }

    cells = [
        (level, index, method)
        for level in config.levels
        for index in range(config.episodes_per_level)
        for method in config.methods
    ]

    lock = threading.Lock()
    aborted = []

    def do_cell(cell):
        level, index, method = cell
        key = f"L{level}:{index:03d}:{method}"
        rel = f"logs/{method}/L{level}-{index:03d}.json"
        with lock:
            if key in episodes:
                return
        try:
            log = run_cell(config, world, goals[level][index], level, index, method)
        except BackendUnavailableError as exc:
            with lock:
                aborted.append({"cell": key, "error": str(exc)})
            return
        _write_json(out_dir / rel, log.to_dict())
        with lock:
            episodes[key] = rel

    n_workers = workers if workers is not None else config.workers
    if n_workers > 1 and len(cells) > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            list(pool.map(do_cell, cells))
    else:
        for cell in cells:
            do_cell(cell)

    # Judge episodes in deterministic cell order.
    outcomes = {method: [] for method in config.methods}
    for level, index, method in cells:
        key = f"L{level}:{index:03d}:{method}"
        rel = episodes.get(key)
        if rel is None:
            continue
        with open(out_dir / rel, "r", encoding="utf-8") as fh:
            log = EpisodeLog.from_dict(json.load(fh))
        outcomes[method].append(episode_outcome(world, log))

    reports = {}
    files = sorted(episodes.values())
    for method in config.methods:
        if not outcomes[method]:
            continue
        report = build_report(outcomes[method], config.planner.t_max)
        reports[method] = report
        rel = f"metrics/{method}.json"
        _write_json(out_dir / rel, report.to_dict())
        files.append(rel)

    table = render_table(reports)
    with open(out_dir / "comparison.txt", "w", encoding="utf-8") as fh:
        fh.write(table)
    _write_json(
        out_dir / "comparison.json",
        {method: report.to_dict() for method, report in reports.items()},
    )
    files.extend(["comparison.txt", "comparison.json"])

    manifest = {
        "config_fingerprint": fingerprint,
        "config": config.to_dict(),
        "episodes": {k: episodes[k] for k in sorted(episodes)},
        "files": sorted(files),
        "aborted": sorted(aborted, key=lambda a: a["cell"]),
    }
    _write_json(manifest_path, manifest)

    return SuiteResult(
        reports=reports,
        table=table,
        manifest_path=str(manifest_path),
        aborted=aborted,
    )


# ---------------------------------------------------------------------------
# Rollout-depth sweep


def sweep_l(
    config: SuiteConfig,
    l_values,
    repetitions: int = 3,
    workers: Optional[int] = None,
) -> dict:
    """CASR mean and spread per rollout depth, with seeds shared across depths.

    Each repetition reruns the suite with a repetition-specific master seed
    that is identical for every depth, so depth is the only difference
    between paired runs.  Uses the rollout-based method only.
    """
    if not l_values:
        raise ConfigError("sweep: l_values must be non-empty")
    if any((not isinstance(lv, int)) or lv < 0 for lv in l_values):
        raise ConfigError("sweep: l_values must be non-negative integers")
    if repetitions < 2:
        raise ConfigError("sweep: need at least 2 repetitions for a spread")

    base_out = Path(config.output_dir)
    rows = []
    for l_value in l_values:
        casrs = []
        for rep in range(repetitions):
            rep_config = replace(
                config,
                methods=["reasoned-explorer"],
                planner=replace(config.planner, l=l_value),
                master_seed=stable_seed(config.master_seed, "sweep-rep", rep),
                output_dir=str(base_out / f"sweep/l{l_value}/rep{rep}"),
            )
            result = run_suite(rep_config, workers=workers)
            casrs.append(result.reports["reasoned-explorer"].overall["casr"])
        rows.append(
            {
                "l": l_value,
                "casr_mean": statistics.fmean(casrs),
                "casr_std": statistics.stdev(casrs),
                "repetitions": repetitions,
            }
        )

    lines = ["    L    CASR    sigma", "-" * 24]
    for row in rows:
        lines.append(f"  {row['l']:>3}   {row['casr_mean']:.3f}    {row['casr_std']:.3f}")
    table = "\n".join(lines) + "\n"

    base_out.mkdir(parents=True, exist_ok=True)
    _write_json(base_out / "sweep_l.json", {"rows": rows})
    with open(base_out / "sweep_l.txt", "w", encoding="utf-8") as fh:
        fh.write(table)
    return {"rows": rows, "table": table}
