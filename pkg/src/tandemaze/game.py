"""Core rules of the two-player shared-control maze game.

A single token lives on a shared grid. Each player has a private wall
layout (their "side"), and only the player currently in control can move
the token -- along edges open on *their* side. A Switch action hands
control to the partner. The token must reach a goal cell within a step
cap; every action costs one step.
"""

from collections import deque
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Iterable, NamedTuple, Optional

import numpy as np

GOAL_REWARD = 100.0
STEP_PENALTY = -1.0
DEFAULT_STEP_CAP = 1000


class GridPos(NamedTuple):
    col: int
    row: int


class PlayerId(Enum):
    E = "E"
    H = "H"

    @property
    def other(self) -> "PlayerId":
        return PlayerId.H if self is PlayerId.E else PlayerId.E


class Action(IntEnum):
    RIGHT = 0
    UP = 1
    LEFT = 2
    DOWN = 3
    SWITCH = 4


MOVE_ACTIONS = (Action.RIGHT, Action.UP, Action.LEFT, Action.DOWN)

# (dcol, drow) per movement action; row axis points "up".
MOVE_DELTAS = {
    Action.RIGHT: (1, 0),
    Action.UP: (0, 1),
    Action.LEFT: (-1, 0),
    Action.DOWN: (0, -1),
}

OPPOSITE_ACTION = {
    Action.RIGHT: Action.LEFT,
    Action.LEFT: Action.RIGHT,
    Action.UP: Action.DOWN,
    Action.DOWN: Action.UP,
}


class ControllerState(NamedTuple):
    cell: GridPos
    controller: PlayerId


class MazeError(ValueError):
    """Invalid maze structure (bad wall record, dimension mismatch, ...)."""


def neighbor(pos: GridPos, action: Action) -> GridPos:
    dc, dr = MOVE_DELTAS[action]
    return GridPos(pos[0] + dc, pos[1] + dr)


def in_bounds(pos: GridPos, width: int, height: int) -> bool:
    return 0 <= pos[0] < width and 0 <= pos[1] < height


class Wall(NamedTuple):
    """An undirected blocked edge, anchored at its lower-left cell.

    direction "R": between (col,row) and (col+1,row)
    direction "U": between (col,row) and (col,row+1)
    """

    col: int
    row: int
    direction: str


def _canonical_wall(pos: GridPos, action: Action) -> Wall:
    if action in (Action.RIGHT, Action.UP):
        return Wall(pos[0], pos[1], "R" if action is Action.RIGHT else "U")
    other = neighbor(pos, action)
    return Wall(other[0], other[1], "R" if action is Action.LEFT else "U")


class MazeSide:
    """One player's immutable passability layout over the shared grid.

    Walls block undirected interior edges; border edges are always
    blocked. Anything not listed as a wall is open.
    """

    def __init__(self, width: int, height: int, walls: Iterable[tuple] = ()):
        if width < 1 or height < 1:
            raise MazeError(f"maze dimensions must be positive, got {width}x{height}")
        self.width = width
        self.height = height
        wallset = set()
        for w in walls:
            col, row, direction = w
            if direction not in ("R", "U"):
                raise MazeError(f"wall {w}: direction must be 'R' or 'U'")
            if not in_bounds(GridPos(col, row), width, height):
                raise MazeError(f"wall {w}: cell out of bounds for {width}x{height}")
            target = neighbor(GridPos(col, row), Action.RIGHT if direction == "R" else Action.UP)
            if not in_bounds(target, width, height):
                raise MazeError(f"wall {w}: names a border edge, which is always blocked")
            wallset.add(Wall(col, row, direction))
        self.walls = frozenset(wallset)

        # next_cell[idx*4 + action] = target cell index, or -1 when blocked/off-grid
        n = width * height
        table = np.full(n * 4, -1, dtype=np.int64)
        for row in range(height):
            for col in range(width):
                idx = row * width + col
                for action in MOVE_ACTIONS:
                    pos = GridPos(col, row)
                    tgt = neighbor(pos, action)
                    if not in_bounds(tgt, width, height):
                        continue
                    if _canonical_wall(pos, action) in self.walls:
                        continue
                    table[idx * 4 + action] = tgt[1] * width + tgt[0]
        table.setflags(write=False)
        self.next_cell = table

    def cell_index(self, pos: GridPos) -> int:
        return pos[1] * self.width + pos[0]

    def index_pos(self, idx: int) -> GridPos:
        return GridPos(idx % self.width, idx // self.width)

    def passable(self, pos: GridPos, action: Action) -> bool:
        if action is Action.SWITCH:
            return False
        return self.next_cell[self.cell_index(pos) * 4 + action] >= 0

    def legal_moves(self, pos: GridPos) -> tuple:
        return tuple(a for a in MOVE_ACTIONS if self.passable(pos, a))

    def open_edge_count(self) -> int:
        return int((self.next_cell >= 0).sum()) // 2

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MazeSide)
            and self.width == other.width
            and self.height == other.height
            and self.walls == other.walls
        )

    def __hash__(self) -> int:
        return hash((self.width, self.height, self.walls))

    def __repr__(self) -> str:
        return f"MazeSide({self.width}x{self.height}, {len(self.walls)} walls)"


def _union_connected(side_e: MazeSide, side_h: MazeSide) -> bool:
    n = side_e.width * side_e.height
    seen = [False] * n
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        idx = queue.popleft()
        for a in MOVE_ACTIONS:
            for side in (side_e, side_h):
                tgt = side.next_cell[idx * 4 + a]
                if tgt >= 0 and not seen[tgt]:
                    seen[tgt] = True
                    count += 1
                    queue.append(tgt)
    return count == n


@dataclass(frozen=True)
class MazePair:
    """Both players' layouts over one grid; the union must be connected."""

    side_e: MazeSide
    side_h: MazeSide
    check_connected: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if (self.side_e.width, self.side_e.height) != (self.side_h.width, self.side_h.height):
            raise MazeError("maze sides must share dimensions")
        if self.check_connected and not _union_connected(self.side_e, self.side_h):
            raise MazeError("union of both sides must be connected")

    @property
    def width(self) -> int:
        return self.side_e.width

    @property
    def height(self) -> int:
        return self.side_e.height

    def side(self, player: PlayerId) -> MazeSide:
        return self.side_e if player is PlayerId.E else self.side_h


@dataclass(frozen=True)
class GameConfig:
    init: GridPos
    goal: GridPos
    start: PlayerId = PlayerId.E

    def __post_init__(self):
        if tuple(self.init) == tuple(self.goal):
            raise ValueError("init and goal must differ")


def step(side: MazeSide, state: ControllerState, action: Action) -> Optional[ControllerState]:
    """Apply one atomic action on the acting player's side.

    Switch always succeeds and flips the controller. A movement action
    succeeds only along an open edge; returns None when blocked.
    """
    if action is Action.SWITCH:
        return ControllerState(state.cell, state.controller.other)
    tgt = side.next_cell[side.cell_index(state.cell) * 4 + action]
    if tgt < 0:
        return None
    return ControllerState(side.index_pos(int(tgt)), state.controller)


def env_reward(state: ControllerState, goal: GridPos) -> float:
    return GOAL_REWARD if tuple(state.cell) == tuple(goal) else STEP_PENALTY


def is_terminal(state: ControllerState, goal: GridPos, steps_elapsed: int, cap: int = DEFAULT_STEP_CAP) -> bool:
    if cap <= 0:
        raise ValueError("step cap must be positive")
    return tuple(state.cell) == tuple(goal) or steps_elapsed >= cap


class UnreachableGoalError(RuntimeError):
    """No path from init to goal even using both sides and switches."""


def oracle_episode_length(pair: MazePair, config: GameConfig, minimize_over_start: bool = False) -> int:
    """Fewest moves plus control switches to reach the goal, knowing both sides.

    Breadth-first search over (cell, controller) states; every movement
    and every switch costs one step. The difficulty yardstick for a
    configuration. With minimize_over_start, takes the better of the two
    possible starting controllers.
    """
    starts = [config.start, config.start.other] if minimize_over_start else [config.start]
    best = None
    for start in starts:
        length = _product_bfs(pair, config.init, config.goal, start)
        if length is not None and (best is None or length < best):
            best = length
    if best is None:
        raise UnreachableGoalError(f"goal {tuple(config.goal)} unreachable from {tuple(config.init)}")
    return best


def _product_bfs(pair: MazePair, init: GridPos, goal: GridPos, start: PlayerId) -> Optional[int]:
    width = pair.width
    n = width * pair.height
    init_idx = init[1] * width + init[0]
    goal_idx = goal[1] * width + goal[0]
    # product node: cell_idx*2 + (0 for E in control, 1 for H)
    dist = [-1] * (n * 2)
    src = init_idx * 2 + (0 if start is PlayerId.E else 1)
    dist[src] = 0
    queue = deque([src])
    while queue:
        node = queue.popleft()
        idx, ctrl = node >> 1, node & 1
        if idx == goal_idx:
            return dist[node]
        d = dist[node] + 1
        side = pair.side_e if ctrl == 0 else pair.side_h
        for a in MOVE_ACTIONS:
            tgt = side.next_cell[idx * 4 + a]
            if tgt >= 0:
                nxt = int(tgt) * 2 + ctrl
                if dist[nxt] < 0:
                    dist[nxt] = d
                    queue.append(nxt)
        flipped = idx * 2 + (1 - ctrl)
        if dist[flipped] < 0:
            dist[flipped] = d
            queue.append(flipped)
    return None
