"""Seeded episode runner and experiment driver.

Episodes alternate multi-action turns: the controller acts until it
plays Switch, announcing a planned path for the partner as it hands
over. Replays are exact: every random draw descends from a per-job seed
derived by hashing, so results are independent of worker count.
"""

import csv
import hashlib
import json
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple

from .agents import Agent, AgentKind, HeuristicConfig, make_agent
from .belief import ConfidenceFactors, DEFAULT_FACTORS
from .game import (
    Action,
    ControllerState,
    DEFAULT_STEP_CAP,
    GameConfig,
    GridPos,
    MazePair,
    PlayerId,
    oracle_episode_length,
    step,
)
from .intent import DEFAULT_COSTS, EdgeCostModel
from .mcts import PlannerParams
from . import mazefile


class ProtocolViolationError(RuntimeError):
    """An agent emitted an action its own maze does not allow."""


def _kind_label(agent) -> str:
    kind = getattr(agent, "kind", None)
    return kind.value if isinstance(kind, AgentKind) else "custom"


def derive_seed(*parts) -> int:
    """Stable 63-bit seed from arbitrary labels; identical across processes."""
    text = "|".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


@dataclass(frozen=True)
class AgentSpec:
    """Recipe for building one player's agent inside an episode."""

    kind: AgentKind
    planner: Optional[PlannerParams] = None
    heuristic_random_prob: float = 0.2
    factors: ConfidenceFactors = DEFAULT_FACTORS
    costs: EdgeCostModel = DEFAULT_COSTS
    impl: str = "auto"

    def build(self, player: PlayerId, pair: MazePair, goal: GridPos, seed: int) -> Agent:
        return make_agent(
            self.kind,
            player,
            pair.side(player),
            goal,
            seed,
            planner=self.planner,
            heuristic=HeuristicConfig(self.heuristic_random_prob),
            factors=self.factors,
            costs=self.costs,
            impl=self.impl,
        )

    @property
    def scheme_label(self) -> str:
        if self.kind is AgentKind.MCTS_INTENT:
            planner = self.planner if self.planner is not None else PlannerParams()
            return planner.scheme.value
        return "none"


@dataclass
class EpisodeRecord:
    maze_id: str
    config: GameConfig
    trial: int
    seed: int
    steps: int
    switches: int
    success: bool
    oracle_length: int
    agent_e: str = ""
    agent_h: str = ""
    scheme: str = "none"


def run_episode(
    pair: MazePair,
    config: GameConfig,
    agent_e,
    agent_h,
    cap: int = DEFAULT_STEP_CAP,
    seed: int = 0,
    maze_id: str = "",
    trial: int = 0,
    oracle_length: Optional[int] = None,
) -> EpisodeRecord:
    """Play one full episode; deterministic in (inputs, seed).

    agent_e / agent_h may be AgentSpec recipes (seeded here) or prebuilt
    agent objects (used as-is, mainly for scripted tests).
    """
    goal = config.goal
    agents = {}
    for player, spec in ((PlayerId.E, agent_e), (PlayerId.H, agent_h)):
        if hasattr(spec, "choose_action"):
            agents[player] = spec
        else:
            agents[player] = spec.build(player, pair, goal, derive_seed(seed, "agent", player.value))

    state = ControllerState(GridPos(*config.init), config.start)
    steps = switches = 0
    success = False
    while True:
        if tuple(state.cell) == tuple(goal):
            success = True
            break
        if steps >= cap:
            break
        agent = agents[state.controller]
        action = agent.choose_action(state)
        if action is Action.SWITCH:
            outgoing = agent.outgoing_intent(state.cell)
            state = ControllerState(state.cell, state.controller.other)
            steps += 1
            switches += 1
            agents[state.controller].receive_intent(outgoing)
        else:
            nxt = step(pair.side(state.controller), state, action)
            if nxt is None:
                raise ProtocolViolationError(
                    f"{state.controller.value} played blocked {action.name} at {tuple(state.cell)}"
                )
            agents[state.controller.other].note_partner_move(state.cell, action)
            state = nxt
            steps += 1

    if oracle_length is None:
        oracle_length = oracle_episode_length(pair, config)
    kind_e, kind_h = _kind_label(agent_e), _kind_label(agent_h)
    scheme = agent_e.scheme_label if isinstance(agent_e, AgentSpec) else "none"
    return EpisodeRecord(
        maze_id=maze_id,
        config=config,
        trial=trial,
        seed=seed,
        steps=steps,
        switches=switches,
        success=success,
        oracle_length=oracle_length,
        agent_e=kind_e,
        agent_h=kind_h,
        scheme=scheme,
    )


@dataclass
class ExperimentSpec:
    """A sweep: mazes x configurations x trials for one agent pairing."""

    mazes: Sequence[Tuple[str, MazePair]]
    agent_e: AgentSpec
    agent_h: AgentSpec
    configs: str = "all"          # "all" or "sample:K"
    trials: int = 10
    cap: int = DEFAULT_STEP_CAP
    base_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")


def enumerate_configs(pair: MazePair, mode: str, maze_id: str, base_seed: int) -> list:
    """All ordered init/goal pairs, or a seeded sample of them (start fixed to E)."""
    cells = [GridPos(c, r) for r in range(pair.height) for c in range(pair.width)]
    every = [GameConfig(i, g) for i in cells for g in cells if i != g]
    if mode == "all":
        return every
    if mode.startswith("sample:"):
        k = int(mode.split(":", 1)[1])
        if k >= len(every):
            return every
        rng = random.Random(derive_seed(base_seed, "configs", maze_id))
        return rng.sample(every, k)
    raise ValueError(f"configs mode must be 'all' or 'sample:K', got {mode!r}")


def _job_seed(base_seed: int, maze_id: str, config: GameConfig, trial: int) -> int:
    return derive_seed(
        base_seed, maze_id,
        config.init[0], config.init[1], config.goal[0], config.goal[1], config.start.value,
        trial,
    )


def _run_chunk(maze_doc: dict, maze_id: str, jobs: list, agent_e: AgentSpec, agent_h: AgentSpec, cap: int):
    pair = mazefile.maze_from_dict(maze_doc)
    out = []
    for config, trial, seed, oracle in jobs:
        try:
            out.append(
                run_episode(
                    pair, config, agent_e, agent_h, cap=cap, seed=seed,
                    maze_id=maze_id, trial=trial, oracle_length=oracle,
                )
            )
        except ProtocolViolationError as exc:
            raise ProtocolViolationError(
                f"maze {maze_id} init {tuple(config.init)} goal {tuple(config.goal)} trial {trial}: {exc}"
            ) from exc
    return out


def run_experiment(spec: ExperimentSpec):
    """Run the sweep (optionally in parallel) and aggregate the records."""
    chunks = []
    for maze_id, pair in spec.mazes:
        doc = mazefile.maze_to_dict(pair)
        configs = enumerate_configs(pair, spec.configs, maze_id, spec.base_seed)
        jobs = []
        for config in configs:
            oracle = oracle_episode_length(pair, config)
            for trial in range(spec.trials):
                jobs.append((config, trial, _job_seed(spec.base_seed, maze_id, config, trial), oracle))
        target = max(1, spec.workers * 4)
        size = max(1, math.ceil(len(jobs) / target))
        for i in range(0, len(jobs), size):
            chunks.append((doc, maze_id, jobs[i:i + size]))

    records = []
    if spec.workers <= 1:
        for doc, maze_id, jobs in chunks:
            records.extend(_run_chunk(doc, maze_id, jobs, spec.agent_e, spec.agent_h, spec.cap))
    else:
        try:
            from . import fastmcts

            fastmcts.warmup()  # compile before forking so workers inherit the kernel
        except Exception:
            pass
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            futures = [
                pool.submit(_run_chunk, doc, maze_id, jobs, spec.agent_e, spec.agent_h, spec.cap)
                for doc, maze_id, jobs in chunks
            ]
            for fut in futures:
                records.extend(fut.result())

    records.sort(key=_record_key)
    return records, aggregate(records)


def _record_key(r: EpisodeRecord):
    return (r.maze_id, tuple(r.config.init), tuple(r.config.goal), r.config.start.value, r.trial)


def geometric_stats(values) -> Tuple[float, float]:
    """exp of mean and of sample stddev (n-1) of the logs."""
    values = list(values)
    if not values:
        raise ValueError("geometric stats need at least one value")
    if any(v <= 0 for v in values):
        raise ValueError("geometric stats need strictly positive values")
    logs = [math.log(v) for v in values]
    mean = sum(logs) / len(logs)
    if len(logs) == 1:
        return math.exp(mean), 1.0
    var = sum((x - mean) ** 2 for x in logs) / (len(logs) - 1)
    return math.exp(mean), math.exp(math.sqrt(var))


def _bucket_stats(records) -> dict:
    steps_mean, steps_std = geometric_stats([r.steps for r in records])
    # switches can be zero; stats run on switches+1 (offset recorded in metadata)
    sw_mean, sw_std = geometric_stats([r.switches + 1 for r in records])
    return {
        "episodes": len(records),
        "success_rate": sum(r.success for r in records) / len(records),
        "steps": {"geo_mean": steps_mean, "geo_std": steps_std},
        "switches_plus_one": {"geo_mean": sw_mean, "geo_std": sw_std},
    }


def aggregate(records) -> dict:
    """Overall, per-oracle-length, and per-scheme geometric summaries."""
    if not records:
        raise ValueError("no records to aggregate")
    by_len = {}
    by_scheme = {}
    for r in records:
        by_len.setdefault(r.oracle_length, []).append(r)
        by_scheme.setdefault(r.scheme, []).append(r)
    return {
        "format_version": 1,
        "metadata": {
            "geo_std_convention": "sample (n-1) on natural logs",
            "switches_offset": 1,
        },
        "overall": _bucket_stats(records),
        "by_oracle_length": {str(k): _bucket_stats(v) for k, v in sorted(by_len.items())},
        "by_scheme": {k: _bucket_stats(v) for k, v in sorted(by_scheme.items())},
    }


CSV_FIELDS = [
    "maze_id", "init_col", "init_row", "goal_col", "goal_row", "start", "trial",
    "seed", "oracle_length", "steps", "switches", "success", "agent_e", "agent_h", "scheme",
]


def emit_results(records, stats: dict, out_dir) -> Tuple[Path, Path]:
    """Write records.csv and summary.json under out_dir."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        csv_path = out / "records.csv"
        with csv_path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_FIELDS)
            for r in records:
                writer.writerow([
                    r.maze_id, r.config.init[0], r.config.init[1], r.config.goal[0], r.config.goal[1],
                    r.config.start.value, r.trial, r.seed, r.oracle_length, r.steps, r.switches,
                    int(r.success), r.agent_e, r.agent_h, r.scheme,
                ])
        json_path = out / "summary.json"
        json_path.write_text(json.dumps(stats, indent=2) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write results under {out}: {exc}") from exc
    return csv_path, json_path


def read_records_csv(path) -> list:
    """Load an emitted records.csv back into EpisodeRecord objects."""
    out = []
    with Path(path).open() as fh:
        for row in csv.DictReader(fh):
            out.append(
                EpisodeRecord(
                    maze_id=row["maze_id"],
                    config=GameConfig(
                        GridPos(int(row["init_col"]), int(row["init_row"])),
                        GridPos(int(row["goal_col"]), int(row["goal_row"])),
                        PlayerId(row["start"]),
                    ),
                    trial=int(row["trial"]),
                    seed=int(row["seed"]),
                    steps=int(row["steps"]),
                    switches=int(row["switches"]),
                    success=bool(int(row["success"])),
                    oracle_length=int(row["oracle_length"]),
                    agent_e=row["agent_e"],
                    agent_h=row["agent_h"],
                    scheme=row["scheme"],
                )
            )
    return out
