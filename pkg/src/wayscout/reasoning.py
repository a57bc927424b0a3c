"""Reasoning backends: scene evaluation, lookahead imagination, stop check.

Three implementations of one interface:

* ``ScriptedOracleBackend`` - deterministic ground-truth heuristic with
  configurable score noise and bias; the backend used by all acceptance
  tests.  Pure function of (inputs, seed): every random draw is derived
  from the call's own inputs, so calls are order-independent and safe to
  issue from parallel workers.
* ``RemoteBackend`` - chat-completion HTTP endpoint with retry/backoff,
  optional request/response recording.
* ``ReplayBackend`` - replays a recorded log as a deterministic backend.

Every call reports a latency for the episode's compute-time ledger.
"""

import hashlib
import json
import math
import random
import re
import threading
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .errors import BackendError, BackendUnavailableError, ReplyParseError
from .seeding import stable_seed
from .world import (
    GoalSpec,
    ObservationNoise,
    ObservationParams,
    Pose,
    SceneDescription,
    SemanticWorld,
    check_goal_reached,
    goal_categories,
    impassable_scene,
    observe,
    satisfying_positions,
)


@dataclass(frozen=True)
class EvalScore:
    value: int  # Likert 1..5
    latency: float  # seconds, for the compute-time ledger

    def __post_init__(self):
        if self.value not in (1, 2, 3, 4, 5):
            raise ValueError(f"score must be an integer 1..5, got {self.value}")

    @property
    def normalized(self) -> float:
        return (self.value - 1) / 4.0


class ReasoningBackend:
    """Scene scorer, scene imaginer, and goal stop-check behind one surface."""

    def evaluate(self, goal_text: str, scene: SceneDescription) -> EvalScore:
        raise NotImplementedError

    def envision(self, scene: SceneDescription):
        """Return (next SceneDescription, latency)."""
        raise NotImplementedError

    def check_found(self, goal_text: str, scene: SceneDescription):
        """Return (goal found?, latency)."""
        raise NotImplementedError


# ---------------------------------------------------------------------------
# Scripted oracle


@dataclass(frozen=True)
class ScriptedOracleParams:
    score_noise: float = 0.0  # probability of a +/-1 perturbation
    optimism_bias: int = 0  # additive bias before clamping
    latency_evaluate: float = 2.0
    latency_envision: float = 2.5
    latency_check_found: float = 1.5


def _clamp_score(value: int) -> int:
    return max(1, min(5, value))


class ScriptedOracleBackend(ReasoningBackend):
    """Ground-truth heuristic standing in for the two LLM roles.

    Scores follow the distance-to-goal heuristic: 5 when a goal-relevant
    object is mentioned in the scene, otherwise 5 - min(4, round(4*D/D_max))
    where D is the viewpoint's distance to the nearest satisfying location
    and D_max the world diagonal.  Impassable imagined viewpoints score by
    the same distance rule; walls repel through frontier discards, not
    through scoring.  Imagination is a ground-truth lookahead one edge
    ahead, subject to the same observation noise.
    """

    def __init__(
        self,
        world: SemanticWorld,
        goal: GoalSpec,
        params: ScriptedOracleParams = ScriptedOracleParams(),
        obs_params: ObservationParams = ObservationParams(),
        noise: ObservationNoise = ObservationNoise(),
        seed: int = 0,
        edge_length: float = 10.0,
    ):
        self.world = world
        self.goal = goal
        self.params = params
        self.obs_params = obs_params
        self.noise = noise
        self.seed = seed
        self.edge_length = edge_length
        self._goal_cats = goal_categories(world, goal)
        self._positions = satisfying_positions(world, goal)

    def _mentions_goal(self, scene: SceneDescription) -> bool:
        return any(m[0] in self._goal_cats for m in scene.mentioned_objects)

    def true_score(self, scene: SceneDescription) -> int:
        if self._mentions_goal(scene):
            return 5
        if not self._positions:
            return 1
        x, y = scene.source_pose.x, scene.source_pose.y
        d = min(math.hypot(px - x, py - y) for px, py in self._positions)
        return 5 - min(4, round(4.0 * d / self.world.diagonal))

    def evaluate(self, goal_text: str, scene: SceneDescription) -> EvalScore:
        value = self.true_score(scene) + self.params.optimism_bias
        if self.params.score_noise > 0.0:
            rng = random.Random(
                stable_seed(
                    self.seed,
                    "evaluate",
                    scene.source_pose.x,
                    scene.source_pose.y,
                    scene.view_angle,
                    scene.text,
                    goal_text,
                )
            )
            if rng.random() < self.params.score_noise:
                value += 1 if rng.random() < 0.5 else -1
        return EvalScore(_clamp_score(value), self.params.latency_evaluate)

    def envision(self, scene: SceneDescription):
        theta = scene.view_angle
        nx = scene.source_pose.x + self.edge_length * math.cos(theta)
        ny = scene.source_pose.y + self.edge_length * math.sin(theta)
        pose = Pose(nx, ny, theta)
        if not self.world.contains(nx, ny) or self.world.in_obstacle(nx, ny):
            return impassable_scene(pose, 0, theta), self.params.latency_envision
        nxt = observe(self.world, pose, 0, self.obs_params, self.noise)
        return nxt, self.params.latency_envision

    def check_found(self, goal_text: str, scene: SceneDescription):
        reached = check_goal_reached(self.world, scene.source_pose, self.goal)
        return reached and self._mentions_goal(scene), self.params.latency_check_found


# ---------------------------------------------------------------------------
# Remote chat-completion endpoint


@dataclass(frozen=True)
class RemoteEndpointConfig:
    url: str
    model: str
    temperature: float = 0.3
    timeout: float = 30.0
    max_retries: int = 3
    backoff_base: float = 1.0
    backoff_cap: float = 30.0
    api_key_env: str = "WAYSCOUT_API_KEY"
    max_in_flight: int = 4
    outage_threshold: int = 5  # consecutive failed calls before declaring outage
    record_path: Optional[str] = None
    prompt_dir: Optional[str] = None


_RETRIABLE_STATUS = {429, 500, 502, 503, 504}
_SCORE_RE = re.compile(r"\b([1-5])\b")
_VERDICT_RE = re.compile(r"\b(yes|no)\b", re.IGNORECASE)


def parse_score(text: str) -> Optional[int]:
    """First standalone integer 1..5 in the reply, if any."""
    m = _SCORE_RE.search(text)
    return int(m.group(1)) if m else None


def parse_verdict(text: str) -> Optional[bool]:
    m = _VERDICT_RE.search(text)
    return m.group(1).lower() == "yes" if m else None


def load_prompt_templates(prompt_dir: Optional[str] = None) -> dict:
    """Load the three role templates; placeholders are {goal} and {scene}."""
    names = ("evaluate", "envision", "check_found")
    out = {}
    for name in names:
        if prompt_dir is not None:
            out[name] = Path(prompt_dir, f"{name}.txt").read_text(encoding="utf-8")
        else:
            out[name] = (
                resources.files("wayscout").joinpath(f"prompts/{name}.txt").read_text("utf-8")
            )
    return out


def _messages_key(messages) -> str:
    blob = json.dumps(messages, sort_keys=True, separators=(",", ":"))
    return hashlib.blake2b(blob.encode("utf-8"), digest_size=16).hexdigest()


class RemoteBackend(ReasoningBackend):
    """Chat-completion endpoint wrapper with retry, backoff and recording.

    Requests are OpenAI-style: POST {model, messages, temperature}; the
    credential is read from the configured environment variable.  Failed
    calls raise BackendError (the planner scores the node fail-low);
    repeated whole-call failures raise BackendUnavailableError.
    """

    def __init__(self, config: RemoteEndpointConfig, edge_length: float = 10.0):
        import os

        self.config = config
        self.edge_length = edge_length
        self.templates = load_prompt_templates(config.prompt_dir)
        self.api_key = os.environ.get(config.api_key_env)
        self._gate = threading.Semaphore(config.max_in_flight)
        self._record_lock = threading.Lock()
        self._failures = 0
        self._failures_lock = threading.Lock()

    # -- transport ---------------------------------------------------------

    def _post_once(self, messages):
        import requests

        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {
            "model": self.config.model,
            "messages": messages,
            "temperature": self.config.temperature,
        }
        resp = requests.post(
            self.config.url, json=body, headers=headers, timeout=self.config.timeout
        )
        if resp.status_code in _RETRIABLE_STATUS:
            raise BackendError(f"endpoint returned {resp.status_code}")
        resp.raise_for_status()
        payload = resp.json()
        return payload["choices"][0]["message"]["content"]

    def _chat(self, messages):
        """Return (reply, latency); latency covers all attempts."""
        import requests

        start = time.monotonic()
        last_error = None
        for attempt in range(self.config.max_retries + 1):
            try:
                with self._gate:
                    reply = self._post_once(messages)
                self._note_success()
                return reply, time.monotonic() - start
            except (BackendError, requests.RequestException, KeyError, ValueError) as exc:
                last_error = exc
                if attempt < self.config.max_retries:
                    delay = min(
                        self.config.backoff_cap,
                        self.config.backoff_base * (2.0 ** attempt),
                    )
                    time.sleep(delay)
        latency = time.monotonic() - start
        self._note_failure()
        raise BackendError(f"endpoint failed after retries: {last_error}", latency=latency)

    def _note_success(self):
        with self._failures_lock:
            self._failures = 0

    def _note_failure(self):
        with self._failures_lock:
            self._failures += 1
            if self._failures >= self.config.outage_threshold:
                raise BackendUnavailableError(
                    f"{self._failures} consecutive endpoint failures; giving up"
                )

    def _record(self, kind: str, messages, reply: str, latency: float):
        if not self.config.record_path:
            return
        entry = {
            "kind": kind,
            "key": _messages_key(messages),
            "messages": messages,
            "reply": reply,
            "latency": latency,
        }
        with self._record_lock:
            with open(self.config.record_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(entry, sort_keys=True) + "\n")

    # -- message composition (shared with ReplayBackend) --------------------

    def _eval_messages(self, goal_text, scene_text):
        return [
            {"role": "user", "content": self.templates["evaluate"].format(goal=goal_text, scene=scene_text)}
        ]

    def _envision_messages(self, scene_text):
        return [
            {"role": "user", "content": self.templates["envision"].format(goal="", scene=scene_text)}
        ]

    def _found_messages(self, goal_text, scene_text):
        return [
            {"role": "user", "content": self.templates["check_found"].format(goal=goal_text, scene=scene_text)}
        ]

    _REPROMPT_SCORE = "Reply with a single integer from 1 to 5 and nothing else."
    _REPROMPT_VERDICT = "Reply with yes or no and nothing else."

    # -- interface ----------------------------------------------------------

    def evaluate(self, goal_text: str, scene: SceneDescription) -> EvalScore:
        messages = self._eval_messages(goal_text, scene.text)
        reply, latency = self._chat(messages)
        self._record("evaluate", messages, reply, latency)
        value = parse_score(reply)
        if value is None:
            retry = messages + [
                {"role": "assistant", "content": reply},
                {"role": "user", "content": self._REPROMPT_SCORE},
            ]
            reply2, latency2 = self._chat(retry)
            self._record("evaluate", retry, reply2, latency2)
            latency += latency2
            value = parse_score(reply2)
            if value is None:
                raise ReplyParseError("no integer 1..5 in evaluator reply", latency=latency)
        return EvalScore(value, latency)

    def envision(self, scene: SceneDescription):
        messages = self._envision_messages(scene.text)
        reply, latency = self._chat(messages)
        self._record("envision", messages, reply, latency)
        theta = scene.view_angle
        pose = Pose(
            scene.source_pose.x + self.edge_length * math.cos(theta),
            scene.source_pose.y + self.edge_length * math.sin(theta),
            theta,
        )
        nxt = SceneDescription(
            source_pose=pose,
            heading_index=0,
            view_angle=theta,
            text=reply.strip(),
            mentioned_objects=(),
        )
        return nxt, latency

    def check_found(self, goal_text: str, scene: SceneDescription):
        messages = self._found_messages(goal_text, scene.text)
        reply, latency = self._chat(messages)
        self._record("check_found", messages, reply, latency)
        verdict = parse_verdict(reply)
        if verdict is None:
            retry = messages + [
                {"role": "assistant", "content": reply},
                {"role": "user", "content": self._REPROMPT_VERDICT},
            ]
            reply2, latency2 = self._chat(retry)
            self._record("check_found", retry, reply2, latency2)
            latency += latency2
            verdict = parse_verdict(reply2)
            if verdict is None:
                raise ReplyParseError("no yes/no in stop-check reply", latency=latency)
        return verdict, latency


class ReplayBackend(ReasoningBackend):
    """Deterministic backend that replays a recorded request/response log.

    Replies are matched by (kind, message hash); repeated identical requests
    consume successive recorded entries, then stick at the last one.
    """

    def __init__(self, log_path, edge_length: float = 10.0, prompt_dir: Optional[str] = None):
        self.edge_length = edge_length
        self.templates = load_prompt_templates(prompt_dir)
        self._records = {}
        with open(log_path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                entry = json.loads(line)
                key = (entry["kind"], entry["key"])
                self._records.setdefault(key, []).append(entry)
        self._cursor = {}
        self._lock = threading.Lock()

    def _lookup(self, kind: str, messages):
        key = (kind, _messages_key(messages))
        entries = self._records.get(key)
        if not entries:
            raise BackendError(f"replay log has no entry for this {kind} request")
        with self._lock:
            i = self._cursor.get(key, 0)
            self._cursor[key] = i + 1
        return entries[min(i, len(entries) - 1)]

    _eval_messages = RemoteBackend._eval_messages
    _envision_messages = RemoteBackend._envision_messages
    _found_messages = RemoteBackend._found_messages

    def evaluate(self, goal_text: str, scene: SceneDescription) -> EvalScore:
        entry = self._lookup("evaluate", self._eval_messages(goal_text, scene.text))
        value = parse_score(entry["reply"])
        if value is None:
            raise ReplyParseError("recorded evaluator reply holds no score")
        return EvalScore(value, entry["latency"])

    def envision(self, scene: SceneDescription):
        entry = self._lookup("envision", self._envision_messages(scene.text))
        theta = scene.view_angle
        pose = Pose(
            scene.source_pose.x + self.edge_length * math.cos(theta),
            scene.source_pose.y + self.edge_length * math.sin(theta),
            theta,
        )
        nxt = SceneDescription(
            source_pose=pose,
            heading_index=0,
            view_angle=theta,
            text=entry["reply"].strip(),
            mentioned_objects=(),
        )
        return nxt, entry["latency"]

    def check_found(self, goal_text: str, scene: SceneDescription):
        entry = self._lookup("check_found", self._found_messages(goal_text, scene.text))
        verdict = parse_verdict(entry["reply"])
        if verdict is None:
            raise ReplyParseError("recorded stop-check reply holds no verdict")
        return verdict, entry["latency"]
