"""Monte Carlo tree search over both players' turns, with intent bonuses.

The searching player knows its own walls exactly; partner-controlled
moves are expanded optimistically and weighted by the belief table's
feasibility estimate, both when sampling rollouts and when mixing
returns during backpropagation. Landing on a cell the partner asked for
earns a small bonus (several schemes) on top of the environment reward,
never enough to outweigh the per-step cost.

The same search exists twice: the readable implementation here and a
numba kernel in fastmcts. Both consume one shared RNG and shared
precomputed tables, and are required by tests to produce bit-identical
trees. Anything transcendental (logs, discount powers) is precomputed on
the Python side so the two cannot drift.
"""

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np

from .belief import BeliefTable
from .game import (
    Action,
    ControllerState,
    GridPos,
    MazeSide,
    PlayerId,
    env_reward,
    in_bounds,
    neighbor,
)

_U64_MASK = (1 << 64) - 1
_SPLITMIX_GOLDEN = 0x9E3779B97F4A7C15
_SPLITMIX_MIX1 = 0xBF58476D1CE4E5B9
_SPLITMIX_MIX2 = 0x94D049BB133111EB
_INV_2_53 = 2.0 ** -53


class SplitMix64:
    """Tiny deterministic RNG shared verbatim by both search implementations."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _U64_MASK

    def next_u64(self) -> int:
        self.state = (self.state + _SPLITMIX_GOLDEN) & _U64_MASK
        z = self.state
        z = ((z ^ (z >> 30)) * _SPLITMIX_MIX1) & _U64_MASK
        z = ((z ^ (z >> 27)) * _SPLITMIX_MIX2) & _U64_MASK
        return z ^ (z >> 31)

    def random(self) -> float:
        return (self.next_u64() >> 11) * _INV_2_53


class RewardScheme(Enum):
    NONE = "none"
    DISCOUNTED = "discounted"
    FIXED = "fixed"
    FIRST_STEP_ONLY = "fso"
    LENGTH_INVERSE = "linv"


@dataclass(frozen=True)
class PlannerParams:
    # intent_discount stays below discount but high enough that the bonus
    # gradient remains visible along realistic intent lengths; near 1 the
    # bonus would cancel the step cost and reward loitering on the path.
    iterations: int = 100
    exploration: float = math.sqrt(2)
    discount: float = 0.99
    horizon: int = 100
    intent_discount: float = 0.95
    scheme: RewardScheme = RewardScheme.DISCOUNTED
    rng_seed: int = 0

    def __post_init__(self):
        if self.iterations < 1 or self.horizon < 1:
            raise ValueError("iterations and horizon must be at least 1")
        if not 0.0 < self.discount < 1.0:
            raise ValueError("discount must lie in (0,1)")
        if not 0.0 < self.intent_discount < self.discount:
            raise ValueError("intent_discount must lie in (0, discount)")


def feasible_actions(state: ControllerState, own_side: MazeSide, ego: PlayerId = PlayerId.E) -> Tuple[Action, ...]:
    """Actions the planner will consider at a state, in canonical order.

    For its own turns only genuinely open moves (plus Switch); for the
    partner's turns all five actions, since the partner's walls are
    unknown.
    """
    if state.controller is ego:
        return own_side.legal_moves(state.cell) + (Action.SWITCH,)
    return tuple(Action)


def optimistic_neighbor(cell: GridPos, action: Action, width: int, height: int) -> GridPos:
    """Assume the move works; off-grid attempts leave the token in place."""
    tgt = neighbor(cell, action)
    return tgt if in_bounds(tgt, width, height) else cell


def forward(
    state: ControllerState,
    action: Action,
    own_side: MazeSide,
    partner_belief: BeliefTable,
    ego: PlayerId = PlayerId.E,
) -> Tuple[ControllerState, float]:
    """Imagined transition plus its feasibility.

    Own moves and Switch are certain. Partner moves go to the optimistic
    target with feasibility read from the belief table.
    """
    if action is Action.SWITCH:
        return ControllerState(state.cell, state.controller.other), 1.0
    if state.controller is ego:
        tgt = own_side.next_cell[own_side.cell_index(state.cell) * 4 + action]
        if tgt < 0:
            raise ValueError(f"{action!r} is blocked at {tuple(state.cell)} on the planner's own side")
        return ControllerState(own_side.index_pos(int(tgt)), state.controller), 1.0
    nxt = optimistic_neighbor(state.cell, action, own_side.width, own_side.height)
    return ControllerState(nxt, state.controller), partner_belief.mean(state.cell, action)


def intent_bonus(scheme: RewardScheme, state: ControllerState, intent: Sequence, intent_discount: float) -> float:
    """Bonus for standing on an intent cell; always within [0, 1]."""
    if scheme is RewardScheme.NONE or not intent:
        return 0.0
    cells = tuple(GridPos(*c) for c in intent)
    cell = GridPos(*state.cell)
    if cell not in cells:
        return 0.0
    m = len(cells)
    i = cells.index(cell) + 1
    if scheme is RewardScheme.DISCOUNTED:
        return intent_discount ** (m - i)
    if scheme is RewardScheme.FIXED:
        return 0.5
    if scheme is RewardScheme.FIRST_STEP_ONLY:
        return 0.5 if i == 1 else 0.0
    if scheme is RewardScheme.LENGTH_INVERSE:
        return 1.0 if i == m else 1.0 / m
    raise ValueError(f"unknown scheme {scheme!r}")


def augmented_reward(
    state: ControllerState,
    goal: GridPos,
    intent: Sequence,
    scheme: RewardScheme,
    intent_discount: float,
    ego: PlayerId = PlayerId.E,
) -> float:
    """Environment reward plus the intent bonus on the ego player's turns only."""
    reward = env_reward(state, goal)
    if state.controller is ego:
        reward += intent_bonus(scheme, state, intent, intent_discount)
    return reward


def backprop_return(
    step_reward: float,
    discount: float,
    feasibility: float,
    child_return: float,
    value_estimate: float,
) -> float:
    """Blend a child's sampled return with the parent's running estimate.

    With probability `feasibility` the edge into the child actually
    exists and its sampled return flows back; otherwise the move would
    be a no-op and the node's own average stands in.
    """
    return step_reward + discount * (feasibility * child_return + (1.0 - feasibility) * value_estimate)


# --- shared search preparation ------------------------------------------------

def build_bonus_array(
    scheme: RewardScheme,
    intent: Sequence,
    intent_discount: float,
    width: int,
    height: int,
) -> np.ndarray:
    """Per-cell bonus lookup agreeing exactly with intent_bonus."""
    bonus = np.zeros(width * height, dtype=np.float64)
    if scheme is RewardScheme.NONE or not intent:
        return bonus
    cells = tuple(GridPos(*c) for c in intent)
    m = len(cells)
    for i, cell in enumerate(cells, start=1):
        idx = cell[1] * width + cell[0]
        if scheme is RewardScheme.DISCOUNTED:
            bonus[idx] = intent_discount ** (m - i)
        elif scheme is RewardScheme.FIXED:
            bonus[idx] = 0.5
        elif scheme is RewardScheme.FIRST_STEP_ONLY:
            bonus[idx] = 0.5 if i == 1 else 0.0
        elif scheme is RewardScheme.LENGTH_INVERSE:
            bonus[idx] = 1.0 if i == m else 1.0 / m
        else:
            raise ValueError(f"unknown scheme {scheme!r}")
    return bonus


@dataclass
class SearchTables:
    """Everything a search touches, precomputed as flat arrays."""

    width: int
    height: int
    goal_idx: int
    ego_next: np.ndarray      # int64[n*4], own-side targets, -1 when blocked
    ego_acts: np.ndarray      # int64[n*5], canonical feasible actions per cell
    ego_cnt: np.ndarray       # int64[n]
    opt_next: np.ndarray      # int64[n*4], optimistic partner targets (clamped)
    feas: np.ndarray          # float64[n*4], belief means
    bonus: np.ndarray         # float64[n]
    iterations: int
    exploration: float
    discount: float
    horizon: int
    rng_seed: int
    gamma_pow: np.ndarray     # float64[horizon]
    logs: np.ndarray          # float64[iterations + 2]


@lru_cache(maxsize=64)
def _act_tables(own_side: MazeSide):
    """Canonical feasible-action lists per cell (legal moves then Switch)."""
    n = own_side.width * own_side.height
    ego_next = own_side.next_cell
    ego_acts = np.empty(n * 5, dtype=np.int64)
    ego_cnt = np.empty(n, dtype=np.int64)
    for idx in range(n):
        cnt = 0
        for a in range(4):
            if ego_next[idx * 4 + a] >= 0:
                ego_acts[idx * 5 + cnt] = a
                cnt += 1
        ego_acts[idx * 5 + cnt] = int(Action.SWITCH)
        ego_cnt[idx] = cnt + 1
    ego_acts.setflags(write=False)
    ego_cnt.setflags(write=False)
    return ego_acts, ego_cnt


@lru_cache(maxsize=16)
def _opt_next_table(width: int, height: int):
    """Optimistic movement targets; off-grid attempts stay in place."""
    n = width * height
    opt_next = np.empty(n * 4, dtype=np.int64)
    for idx in range(n):
        pos = GridPos(idx % width, idx // width)
        for a in range(4):
            tgt = neighbor(pos, Action(a))
            opt_next[idx * 4 + a] = tgt[1] * width + tgt[0] if in_bounds(tgt, width, height) else idx
    opt_next.setflags(write=False)
    return opt_next


@lru_cache(maxsize=16)
def _discount_powers(discount: float, horizon: int):
    gamma_pow = np.empty(horizon, dtype=np.float64)
    acc = 1.0
    for d in range(horizon):
        gamma_pow[d] = acc
        acc *= discount
    gamma_pow.setflags(write=False)
    return gamma_pow


@lru_cache(maxsize=16)
def _log_table(iterations: int):
    logs = np.zeros(iterations + 2, dtype=np.float64)
    for i in range(1, iterations + 2):
        logs[i] = math.log(i)
    logs.setflags(write=False)
    return logs


def build_tables(
    own_side: MazeSide,
    partner_belief: BeliefTable,
    intent: Sequence,
    goal: GridPos,
    params: PlannerParams,
) -> SearchTables:
    width, height = own_side.width, own_side.height
    goal_idx = goal[1] * width + goal[0]
    ego_acts, ego_cnt = _act_tables(own_side)
    return SearchTables(
        width=width,
        height=height,
        goal_idx=goal_idx,
        ego_next=own_side.next_cell,
        ego_acts=ego_acts,
        ego_cnt=ego_cnt,
        opt_next=_opt_next_table(width, height),
        feas=partner_belief.means(),
        bonus=build_bonus_array(params.scheme, intent, params.intent_discount, width, height),
        iterations=params.iterations,
        exploration=params.exploration,
        discount=params.discount,
        horizon=params.horizon,
        rng_seed=params.rng_seed,
        gamma_pow=_discount_powers(params.discount, params.horizon),
        logs=_log_table(params.iterations),
    )


# --- reference implementation ---------------------------------------------------

class SearchNode:
    """Tree node: imagined state plus the statistics UCB selection needs."""

    __slots__ = (
        "cell", "ctrl", "incoming", "feasibility", "reward",
        "visits", "total_return", "children", "parent", "actions", "next_untried",
    )

    def __init__(self, tables: SearchTables, cell: int, ctrl: int, incoming: int,
                 feasibility: float, reward: float, parent):
        self.cell = cell
        self.ctrl = ctrl
        self.incoming = incoming
        self.feasibility = feasibility
        self.reward = reward
        self.visits = 0
        self.total_return = 0.0
        self.children = []
        self.parent = parent
        if cell == tables.goal_idx:
            self.actions = ()
        elif ctrl == 0:
            base = cell * 5
            self.actions = tuple(int(a) for a in tables.ego_acts[base:base + tables.ego_cnt[cell]])
        else:
            self.actions = (0, 1, 2, 3, 4)
        self.next_untried = 0

    @property
    def terminal(self) -> bool:
        return not self.actions and self.next_untried == 0 and not self.children


def _expand(tables: SearchTables, node: "SearchNode") -> "SearchNode":
    a = node.actions[node.next_untried]
    node.next_untried += 1
    if a == int(Action.SWITCH):
        cell, ctrl, feas, reward = node.cell, 1 - node.ctrl, 1.0, -1.0
    else:
        ctrl = node.ctrl
        if ctrl == 0:
            cell = int(tables.ego_next[node.cell * 4 + a])
            feas = 1.0
        else:
            cell = int(tables.opt_next[node.cell * 4 + a])
            feas = float(tables.feas[node.cell * 4 + a])
        reward = 100.0 if cell == tables.goal_idx else -1.0
        if ctrl == 0:
            reward += float(tables.bonus[cell])
    child = SearchNode(tables, cell, ctrl, a, feas, reward, node)
    node.children.append(child)
    return child


def _rollout(tables: SearchTables, rng: SplitMix64, cell: int, ctrl: int) -> float:
    q = 0.0
    goal = tables.goal_idx
    d = 0
    while d < tables.horizon and cell != goal:
        if ctrl == 0:
            cnt = int(tables.ego_cnt[cell])
            a = int(tables.ego_acts[cell * 5 + int(rng.random() * cnt)])
        else:
            a = int(rng.random() * 5)
        if a == 4:
            ctrl = 1 - ctrl
        elif ctrl == 0:
            cell = int(tables.ego_next[cell * 4 + a])
        else:
            if rng.random() < tables.feas[cell * 4 + a]:
                cell = int(tables.opt_next[cell * 4 + a])
        r = 100.0 if cell == goal else -1.0
        if ctrl == 0:
            r += tables.bonus[cell]
        q += tables.gamma_pow[d] * r
        d += 1
    return q


def _backprop(tables: SearchTables, node: "SearchNode", q: float) -> None:
    feas = 1.0
    while node is not None:
        w = node.total_return / node.visits if node.visits > 0 else 0.0
        q = backprop_return(node.reward, tables.discount, feas, q, w)
        node.total_return += q
        node.visits += 1
        feas = node.feasibility
        node = node.parent


def reference_search(tables: SearchTables, root_cell: int) -> "SearchNode":
    """Grow the whole tree for one decision and return its root."""
    rng = SplitMix64(tables.rng_seed)
    root = SearchNode(tables, root_cell, 0, -1, 1.0, 0.0, None)
    if not root.actions:
        raise ValueError("search started from a terminal state")
    k = tables.exploration
    for _ in range(tables.iterations):
        node = root
        while node.cell != tables.goal_idx:
            if node.next_untried < len(node.actions):
                node = _expand(tables, node)
                break
            log_n = tables.logs[node.visits]
            best, best_u = None, -math.inf
            for child in node.children:
                u = child.total_return / child.visits + k * math.sqrt(log_n / child.visits)
                if u > best_u:
                    best, best_u = child, u
            node = best
        q = _rollout(tables, rng, node.cell, node.ctrl) if node.cell != tables.goal_idx else 0.0
        _backprop(tables, node, q)
    return root


# --- public search interface ----------------------------------------------------

@dataclass(frozen=True)
class ChildStat:
    action: Action
    cell: GridPos
    visits: int
    total_return: float
    feasibility: float


@dataclass(frozen=True)
class SearchResult:
    action: Action
    children: Tuple[ChildStat, ...]
    root_visits: int

    def tree_dump(self) -> list:
        """Root-children summary for UI/debug display."""
        return [
            {"action": c.action.name, "N": c.visits, "Q": c.total_return, "delta": c.feasibility}
            for c in self.children
        ]


def _result_from_root(tables: SearchTables, root: "SearchNode") -> SearchResult:
    stats = []
    best = None
    for child in root.children:
        stat = ChildStat(
            action=Action(child.incoming),
            cell=GridPos(child.cell % tables.width, child.cell // tables.width),
            visits=child.visits,
            total_return=child.total_return,
            feasibility=child.feasibility,
        )
        stats.append(stat)
        if best is None or stat.visits > best.visits:
            best = stat
    return SearchResult(action=best.action, children=tuple(stats), root_visits=root.visits)


def run_search(
    root: ControllerState,
    own_side: MazeSide,
    partner_belief: BeliefTable,
    intent: Sequence,
    goal: GridPos,
    params: PlannerParams,
    impl: str = "auto",
) -> SearchResult:
    """One planning decision for the player currently in control."""
    tables = build_tables(own_side, partner_belief, intent, goal, params)
    root_cell = root.cell[1] * own_side.width + root.cell[0]
    if root_cell == tables.goal_idx:
        raise ValueError("search started from a terminal state")
    if impl == "auto":
        impl = "fast" if _fast_available() else "reference"
    if impl == "fast":
        from . import fastmcts
        return fastmcts.fast_search(tables, root_cell)
    if impl == "reference":
        return _result_from_root(tables, reference_search(tables, root_cell))
    raise ValueError(f"unknown impl {impl!r}")


def search(
    root: ControllerState,
    own_side: MazeSide,
    partner_belief: BeliefTable,
    intent: Sequence,
    goal: GridPos,
    params: PlannerParams,
    impl: str = "auto",
) -> Action:
    return run_search(root, own_side, partner_belief, intent, goal, params, impl).action


_FAST_OK: Optional[bool] = None


def _fast_available() -> bool:
    global _FAST_OK
    if _FAST_OK is None:
        try:
            from . import fastmcts  # noqa: F401
            _FAST_OK = True
        except Exception:
            _FAST_OK = False
    return _FAST_OK


# --- follow-vs-skip analysis ------------------------------------------------------

def skip_vs_follow(m: int, n: int, discount: float, intent_discount: float):
    """Returns (J_follow, J_skip, J_diff) for an m-cell intent and an n-step shortcut.

    J_follow walks the intent exactly, collecting every bonus; J_skip
    reaches only the final intent cell in n < m steps. J_diff uses the
    closed form, which must match J_skip - J_follow.
    """
    if not 1 <= n <= m:
        raise ValueError("need 1 <= n <= m")
    g, lam = _check_discounts(discount, intent_discount)
    j_follow = sum(g ** t * (lam ** (m - t - 1) - 1.0) for t in range(m))
    j_skip = g ** (n - 1) + sum(-(g ** t) for t in range(n))
    j_diff = (g ** n - g ** (m + 1)) / (g * (1.0 - g)) - (g ** m - lam ** m) / (g - lam)
    return j_follow, j_skip, j_diff


def skip_threshold(m: int, discount: float, intent_discount: float) -> float:
    """Largest shortcut length (as a real bound) for which skipping still wins."""
    g, lam = _check_discounts(discount, intent_discount)
    arg = g ** (m + 1) + g * (1.0 - g) * (g ** m - lam ** m) / (g - lam)
    return math.log(arg) / math.log(g)


def _check_discounts(discount: float, intent_discount: float):
    if not 0.0 < discount < 1.0:
        raise ValueError("discount must lie in (0,1)")
    if not 0.0 < intent_discount < discount:
        raise ValueError("intent_discount must be positive and below discount")
    return discount, intent_discount
