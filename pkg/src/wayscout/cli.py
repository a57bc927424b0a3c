"""Command-line surface: run suites, sweeps, single episodes, metrics, plots.

Exit status reflects completion (0) or a usage/config problem (2), never the
success rate of the episodes themselves.
"""

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigError, WayscoutError
from .metrics import build_report, episode_outcome, render_table
from .planner import METHODS, EpisodeLog, PlannerParams, run_episode
from .plotdata import emit_plot_data
from .reasoning import ScriptedOracleBackend, ScriptedOracleParams
from .seeding import stable_seed
from .suite import (
    SuiteConfig,
    load_config,
    run_suite,
    sample_start,
    sweep_l,
)
from .world import (
    ObservationNoise,
    ObservationParams,
    generate_goals,
    load_world_file,
)
import random


def _cmd_run(args) -> int:
    overrides = {}
    if args.output_dir:
        overrides["output_dir"] = args.output_dir
    config = load_config(args.config, overrides)
    result = run_suite(config, workers=args.workers)
    print(result.table, end="")
    if result.aborted:
        print(f"{len(result.aborted)} episode(s) aborted; see manifest for details.")
    print(f"manifest: {result.manifest_path}")
    return 0


def _cmd_sweep_l(args) -> int:
    overrides = {}
    if args.output_dir:
        overrides["output_dir"] = args.output_dir
    config = load_config(args.config, overrides)
    l_values = [int(v) for v in args.l_values.split(",") if v != ""]
    result = sweep_l(config, l_values, repetitions=args.repetitions, workers=args.workers)
    print(result["table"], end="")
    return 0


def _cmd_episode(args) -> int:
    world = load_world_file(args.world)
    goals = generate_goals(world, args.level, 1, seed=stable_seed(args.seed, "goal"))
    goal = goals[0]
    params = PlannerParams(n=args.n, l=args.l, t_max=args.t_max, max_steps=args.max_steps)
    obs = ObservationParams(num_headings=args.n)
    noise = ObservationNoise(
        p_drop=args.p_drop, p_hallucinate=0.0, seed=stable_seed(args.seed, "obs-noise")
    )
    rng = random.Random(stable_seed(args.seed, "start"))
    start = sample_start(world, goal, rng)
    backend = ScriptedOracleBackend(
        world,
        goal,
        params=ScriptedOracleParams(score_noise=args.score_noise),
        obs_params=obs,
        noise=noise,
        seed=stable_seed(args.seed, "oracle"),
        edge_length=params.edge_length,
    )
    log = run_episode(
        world, goal, start, args.method, backend, params,
        seed=args.seed, obs_params=obs, noise=noise,
    )
    print(f"goal: {goal.text}")
    print(f"termination: {log.termination}")
    print(f"steps: {len(log.pathpoints) - 1}  ct: {log.compute_time:.1f}s  "
          f"tt: {log.travel_time:.1f}s  distance: {log.travel_distance:.1f}m")
    outcome = episode_outcome(world, log)
    print(f"success: {outcome.success}  oracle_success: {outcome.oracle_success}")
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(log.to_dict(), fh, sort_keys=True, indent=2)
            fh.write("\n")
        print(f"log: {out}")
    return 0


def _iter_log_paths(paths):
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            yield from sorted(p.rglob("*.json"))
        else:
            yield p


def _cmd_metrics(args) -> int:
    world = load_world_file(args.world)
    by_method = {}
    t_max = None
    for path in _iter_log_paths(args.logs):
        with open(path, "r", encoding="utf-8") as fh:
            log = EpisodeLog.from_dict(json.load(fh))
        by_method.setdefault(log.method, []).append(episode_outcome(world, log))
        t_max = log.params["t_max"] if t_max is None else t_max
    if not by_method:
        print("no episode logs found", file=sys.stderr)
        return 2
    if args.t_max is not None:
        t_max = args.t_max
    reports = {
        method: build_report(outcomes, t_max)
        for method, outcomes in sorted(by_method.items())
    }
    table = render_table(reports)
    print(table, end="")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for method, report in reports.items():
            with open(out / f"{method}.json", "w", encoding="utf-8") as fh:
                json.dump(report.to_dict(), fh, sort_keys=True, indent=2)
                fh.write("\n")
        with open(out / "comparison.txt", "w", encoding="utf-8") as fh:
            fh.write(table)
    return 0


def _cmd_plot_data(args) -> int:
    world = load_world_file(args.world) if args.world else None
    files = emit_plot_data(list(_iter_log_paths(args.logs)), args.out, world=world)
    for f in files:
        print(f)
    return 0


def _cmd_validate(args) -> int:
    if not args.config and not args.world:
        print("validate: give --config and/or --world", file=sys.stderr)
        return 2
    if args.world:
        world = load_world_file(args.world)
        print(
            f"world ok: {len(world.regions)} regions, {len(world.objects)} objects, "
            f"{len(world.obstacles)} obstacles"
        )
    if args.config:
        config = load_config(args.config)
        cells = len(config.levels) * config.episodes_per_level * len(config.methods)
        print(f"config ok: {cells} episode cells, backend={config.backend_kind}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wayscout",
        description="Frontier exploration suites over 2D semantic worlds",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a full suite from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--output-dir", default=None)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("sweep-l", help="sweep the rollout depth, report CASR per depth")
    p.add_argument("--config", required=True)
    p.add_argument("--l-values", required=True, help="comma-separated depths, e.g. 0,1,2")
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--output-dir", default=None)
    p.set_defaults(func=_cmd_sweep_l)

    p = sub.add_parser("episode", help="run a single scripted episode")
    p.add_argument("--world", required=True)
    p.add_argument("--level", type=int, default=1, choices=(1, 2, 3, 4))
    p.add_argument("--method", default="reasoned-explorer", choices=METHODS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--l", type=int, default=2)
    p.add_argument("--t-max", type=float, default=1800.0)
    p.add_argument("--max-steps", type=int, default=100)
    p.add_argument("--p-drop", type=float, default=0.0)
    p.add_argument("--score-noise", type=float, default=0.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_episode)

    p = sub.add_parser("metrics", help="recompute metrics from episode logs")
    p.add_argument("--world", required=True)
    p.add_argument("--logs", nargs="+", required=True)
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("plot-data", help="emit plot-ready layers from logs")
    p.add_argument("--logs", nargs="+", required=True)
    p.add_argument("--world", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_plot_data)

    p = sub.add_parser("validate", help="lint a config file and/or world file")
    p.add_argument("--config", default=None)
    p.add_argument("--world", default=None)
    p.set_defaults(func=_cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, WayscoutError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
