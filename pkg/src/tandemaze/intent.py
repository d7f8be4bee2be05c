"""Multi-step intent: the cell sequence a player asks its partner to walk.

Intents are planned as the cheapest path to the goal where the planner's
own open edges cost one move and own-blocked edges cost extra in
proportion to how unlikely the partner is believed to be able to cross
them. A fully trusted partner edge is as good as one's own.
"""

import heapq
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .belief import BeliefTable
from .game import Action, GridPos, MazeSide, MOVE_ACTIONS, OPPOSITE_ACTION, in_bounds, neighbor

Intent = Tuple[GridPos, ...]


@dataclass(frozen=True)
class EdgeCostModel:
    own_move_cost: float = 1.0
    wall_penalty_scale: float = 10.0

    def __post_init__(self):
        if self.own_move_cost <= 0 or self.wall_penalty_scale <= 0:
            raise ValueError("edge costs must be positive")


DEFAULT_COSTS = EdgeCostModel()


class InvalidIntentError(ValueError):
    """Cell sequence is not a simple chain of adjacent cells."""


def validate_intent(cells: Sequence, width: int, height: int, allow_empty: bool = False) -> Intent:
    cells = tuple(GridPos(int(c[0]), int(c[1])) for c in cells)
    if not cells:
        if allow_empty:
            return cells
        raise InvalidIntentError("intent must name at least one cell")
    seen = set()
    prev = None
    for pos in cells:
        if not in_bounds(pos, width, height):
            raise InvalidIntentError(f"intent cell {tuple(pos)} outside {width}x{height} grid")
        if pos in seen:
            raise InvalidIntentError(f"intent repeats cell {tuple(pos)}")
        seen.add(pos)
        if prev is not None and abs(pos[0] - prev[0]) + abs(pos[1] - prev[1]) != 1:
            raise InvalidIntentError(f"intent cells {tuple(prev)} -> {tuple(pos)} are not adjacent")
        prev = pos
    return cells


def edge_cost(
    own_side: MazeSide,
    partner_belief: BeliefTable,
    pos: GridPos,
    action: Action,
    costs: EdgeCostModel = DEFAULT_COSTS,
) -> float:
    """Cost of crossing one grid edge in the given direction."""
    if own_side.passable(pos, action):
        return costs.own_move_cost
    feasibility = partner_belief.mean(pos, action)
    return costs.own_move_cost + costs.wall_penalty_scale * (1.0 - feasibility)


def plan_intent(
    own_side: MazeSide,
    partner_belief: BeliefTable,
    start: GridPos,
    goal: GridPos,
    costs: EdgeCostModel = DEFAULT_COSTS,
) -> Intent:
    """Cheapest path from start to goal; returns its cells excluding start.

    Every grid-adjacent edge is usable at some cost, so a path always
    exists. Ties break toward the lexicographically smallest (col, row)
    next cell, keeping plans reproducible.
    """
    start = GridPos(*start)
    goal = GridPos(*goal)
    if start == goal:
        raise ValueError("cannot plan an intent from the goal itself")
    dist = _cost_to_goal(own_side, partner_belief, goal, costs)
    width = own_side.width
    path = []
    pos = start
    while pos != goal:
        best: Optional[GridPos] = None
        here = dist[pos[1] * width + pos[0]]
        for action in MOVE_ACTIONS:
            nxt = neighbor(pos, action)
            if not in_bounds(nxt, width, own_side.height):
                continue
            cost = edge_cost(own_side, partner_belief, pos, action, costs)
            if abs(here - (cost + dist[nxt[1] * width + nxt[0]])) < 1e-9:
                if best is None or (nxt[0], nxt[1]) < (best[0], best[1]):
                    best = nxt
        assert best is not None, "cost-to-goal table admits no descent step"
        path.append(best)
        pos = best
    return tuple(path)


def _cost_to_goal(own_side: MazeSide, partner_belief: BeliefTable, goal: GridPos, costs: EdgeCostModel):
    """Dijkstra from the goal over reversed edges (costs are directional)."""
    width, height = own_side.width, own_side.height
    n = width * height
    dist = [float("inf")] * n
    goal_idx = goal[1] * width + goal[0]
    dist[goal_idx] = 0.0
    heap = [(0.0, goal[0], goal[1])]
    while heap:
        d, col, row = heapq.heappop(heap)
        idx = row * width + col
        if d > dist[idx]:
            continue
        for action in MOVE_ACTIONS:
            src = neighbor(GridPos(col, row), action)
            if not in_bounds(src, width, height):
                continue
            # cost of walking src -> (col,row), i.e. the opposite direction
            cost = edge_cost(own_side, partner_belief, src, OPPOSITE_ACTION[action], costs)
            nd = d + cost
            src_idx = src[1] * width + src[0]
            if nd < dist[src_idx]:
                dist[src_idx] = nd
                heapq.heappush(heap, (nd, src[0], src[1]))
    return dist


def trim_intent(intent: Sequence, current: GridPos) -> Intent:
    """Drop everything up to and including the current cell, once reached."""
    cells = tuple(GridPos(*c) for c in intent)
    current = GridPos(*current)
    if current in cells:
        return cells[cells.index(current) + 1:]
    return cells
