"""Playable policies: greedy path-follower and three search variants.

Every agent keeps the same memory of the partner's moves and announces a
planned path for the partner whenever it hands over control; they differ
only in how they pick actions on their own turns.
"""

import dataclasses
import random
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from .belief import ConfidenceFactors, DEFAULT_FACTORS, PartnerHistory, init_belief
from .game import Action, ControllerState, GridPos, MazeSide, PlayerId
from .intent import DEFAULT_COSTS, EdgeCostModel, plan_intent, trim_intent
from .mcts import PlannerParams, RewardScheme, run_search


class AgentKind(Enum):
    HEURISTIC = "heuristic"
    MCTS_NONE = "mcts-none"
    MCTS_SINGLE = "mcts-single"
    MCTS_INTENT = "mcts-intent"


@dataclass(frozen=True)
class HeuristicConfig:
    random_action_prob: float = 0.2

    def __post_init__(self):
        if not 0.0 <= self.random_action_prob <= 1.0:
            raise ValueError("random_action_prob must be in [0,1]")


def _move_toward(cell: GridPos, target: GridPos) -> Action:
    dc, dr = target[0] - cell[0], target[1] - cell[1]
    if (dc, dr) == (1, 0):
        return Action.RIGHT
    if (dc, dr) == (-1, 0):
        return Action.LEFT
    if (dc, dr) == (0, 1):
        return Action.UP
    if (dc, dr) == (0, -1):
        return Action.DOWN
    raise ValueError(f"cells {tuple(cell)} and {tuple(target)} are not adjacent")


def heuristic_action(
    state: ControllerState,
    own_side: MazeSide,
    partner_belief,
    goal: GridPos,
    cfg: HeuristicConfig,
    rng: random.Random,
    costs: EdgeCostModel = DEFAULT_COSTS,
) -> Action:
    """Walk the cheapest path to the goal; hand over when it leaves our side.

    With probability random_action_prob a uniformly random feasible
    action is taken instead, so the controller cannot deadlock forever.
    """
    feasible = own_side.legal_moves(state.cell) + (Action.SWITCH,)
    if rng.random() < cfg.random_action_prob:
        return feasible[rng.randrange(len(feasible))]
    path = plan_intent(own_side, partner_belief, state.cell, goal, costs)
    move = _move_toward(state.cell, path[0])
    return move if own_side.passable(state.cell, move) else Action.SWITCH


def single_step_tiebreak(children: Sequence, intent: Sequence) -> Action:
    """Resolve equally-visited root children by the next requested cell.

    children are (action, visits, next_cell) triples or ChildStat-likes.
    When no tied child matches the intent's first cell, fall back to the
    lexicographically smallest action name.
    """
    def fields(c):
        if hasattr(c, "action"):
            return c.action, c.visits, c.cell
        return c[0], c[1], c[2]

    rows = [fields(c) for c in children]
    if not rows:
        raise ValueError("no children to select from")
    best_n = max(n for _, n, _ in rows)
    tied = [(a, cell) for a, n, cell in rows if n == best_n]
    if len(tied) > 1 and intent:
        first = GridPos(*intent[0])
        for a, cell in tied:
            if GridPos(*cell) == first:
                return a
    return min((a for a, _ in tied), key=lambda a: a.name)


class Agent:
    """One player's policy plus its evolving memory for a single episode."""

    def __init__(
        self,
        kind: AgentKind,
        player: PlayerId,
        own_side: MazeSide,
        goal: GridPos,
        seed: int,
        planner: Optional[PlannerParams] = None,
        heuristic: HeuristicConfig = HeuristicConfig(),
        factors: ConfidenceFactors = DEFAULT_FACTORS,
        costs: EdgeCostModel = DEFAULT_COSTS,
        impl: str = "auto",
    ):
        self.kind = AgentKind(kind)
        self.player = player
        self.own_side = own_side
        self.goal = GridPos(*goal)
        self.heuristic = heuristic
        self.factors = factors
        self.costs = costs
        self.impl = impl
        planner = planner if planner is not None else PlannerParams()
        if self.kind in (AgentKind.MCTS_NONE, AgentKind.MCTS_SINGLE):
            planner = dataclasses.replace(planner, scheme=RewardScheme.NONE)
        self.planner = planner
        self.belief = init_belief(own_side.width, own_side.height)
        self.partner_history = PartnerHistory()
        self.rng = random.Random(seed)
        self.received_intent = ()
        self.last_result = None

    def note_partner_move(self, cell: GridPos, action: Action) -> None:
        """Record a movement the partner actually executed."""
        self.partner_history.append(cell, action)

    def receive_intent(self, cells: Sequence) -> None:
        self.received_intent = tuple(GridPos(*c) for c in cells)

    def outgoing_intent(self, cell: GridPos):
        """Path announced to the partner right before a Switch."""
        return plan_intent(self.own_side, self.belief, cell, self.goal, self.costs)

    def choose_action(self, state: ControllerState) -> Action:
        """Decide one atomic action; syncs memory and trims stale intent first."""
        if state.controller is not self.player:
            raise ValueError(f"agent {self.player.value} asked to act out of turn")
        self.belief.ingest_history(self.partner_history, self.factors)
        self.received_intent = trim_intent(self.received_intent, state.cell)

        if self.kind is AgentKind.HEURISTIC:
            return heuristic_action(
                state, self.own_side, self.belief, self.goal, self.heuristic, self.rng, self.costs
            )

        params = dataclasses.replace(self.planner, rng_seed=self.rng.getrandbits(64))
        intent = self.received_intent if self.kind is AgentKind.MCTS_INTENT else ()
        result = run_search(state, self.own_side, self.belief, intent, self.goal, params, impl=self.impl)
        self.last_result = result
        if self.kind is AgentKind.MCTS_SINGLE:
            return single_step_tiebreak(result.children, self.received_intent)
        return result.action


def make_agent(kind, player: PlayerId, own_side: MazeSide, goal: GridPos, seed: int, **overrides) -> Agent:
    """Factory for the four policy kinds; kind accepts enum or CLI string."""
    return Agent(AgentKind(kind), player, own_side, goal, seed, **overrides)
