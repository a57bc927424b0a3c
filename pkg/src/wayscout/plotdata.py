"""Plot-ready data layers from episode logs: no rendering, just files.

Each log yields a committed-path layer, a per-step open-frontier layer and
the sampled trajectory; the world outline layer is shared.  Any external
plotting tool can overlay them.
"""

import csv
import json
from pathlib import Path

from .errors import MalformedLogError
from .planner import EpisodeLog
from .world import SemanticWorld


def _load_log(path) -> EpisodeLog:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return EpisodeLog.from_dict(json.load(fh))
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedLogError(f"cannot read episode log {path}: {exc}") from exc


def emit_world_layer(world: SemanticWorld, out_path: Path) -> None:
    payload = {
        "bounds": list(world.bounds),
        "regions": [
            {"label": r.label, "polygon": r.polygon.tolist()} for r in world.regions
        ],
        "obstacles": [poly.tolist() for poly in world.obstacles],
        "objects": [
            {"id": o.id, "category": o.category, "position": list(o.position)}
            for o in world.objects
        ],
    }
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def emit_plot_data(log_paths, out_dir, world=None) -> list:
    """Write CSV/JSON layers for one or more logs; returns the files written."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    if world is not None:
        world_path = out_dir / "world_layers.json"
        emit_world_layer(world, world_path)
        written.append(str(world_path))

    for path in log_paths:
        log = _load_log(path)
        stem = Path(path).stem

        path_file = out_dir / f"{stem}_path.csv"
        with open(path_file, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["order", "id", "x", "y", "heading"])
            for order, node in enumerate(log.pathpoints):
                writer.writerow([order, node["id"], node["x"], node["y"], node["heading"]])
        written.append(str(path_file))

        frontier_file = out_dir / f"{stem}_frontiers.csv"
        with open(frontier_file, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "id", "x", "y", "score_q", "penalty", "selected"])
            for step in log.steps:
                selected = step.get("selected")
                for node in step["buffer"]["open"]:
                    writer.writerow(
                        [
                            step["step"],
                            node["id"],
                            node["x"],
                            node["y"],
                            node["score_q"],
                            node["penalty"],
                            int(node["id"] == selected),
                        ]
                    )
        written.append(str(frontier_file))

        trajectory_file = out_dir / f"{stem}_trajectory.csv"
        with open(trajectory_file, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["index", "x", "y"])
            for index, point in enumerate(log.trajectory):
                writer.writerow([index, point[0], point[1]])
        written.append(str(trajectory_file))

    return written
