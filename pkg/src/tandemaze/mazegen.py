"""Seeded random maze-pair generation.

Strategy: grow a random spanning tree over the full grid so the union of
both sides is connected by construction, then hand every open edge to
exactly one side. Non-tree edges become walls on both sides with
probability wall_density. Splitting edges between the sides is what
forces the players to trade control.
"""

import random

from .game import GridPos, MazeError, MazePair, MazeSide, MOVE_ACTIONS, Action, in_bounds, neighbor

DEFAULT_WALL_DENSITY = 0.45
_RETRY_BUDGET = 16


def _interior_edges(width: int, height: int):
    """All undirected interior edges as (col, row, dir) anchored lower-left."""
    edges = []
    for row in range(height):
        for col in range(width):
            if col + 1 < width:
                edges.append((col, row, "R"))
            if row + 1 < height:
                edges.append((col, row, "U"))
    return edges


def _edge_cells(edge, width: int):
    col, row, direction = edge
    a = row * width + col
    b = a + 1 if direction == "R" else a + width
    return a, b


def _spanning_tree(width: int, height: int, rng: random.Random):
    """Randomized depth-first spanning tree over the grid graph."""
    n = width * height
    visited = [False] * n
    start = rng.randrange(n)
    visited[start] = True
    stack = [start]
    tree = []
    while stack:
        idx = stack[-1]
        pos = GridPos(idx % width, idx // width)
        options = []
        for action in MOVE_ACTIONS:
            tgt = neighbor(pos, action)
            if in_bounds(tgt, width, height):
                tidx = tgt[1] * width + tgt[0]
                if not visited[tidx]:
                    options.append((action, tidx))
        if not options:
            stack.pop()
            continue
        action, tidx = options[rng.randrange(len(options))]
        visited[tidx] = True
        if action in (Action.RIGHT, Action.UP):
            tree.append((pos[0], pos[1], "R" if action is Action.RIGHT else "U"))
        else:
            tpos = GridPos(tidx % width, tidx // width)
            tree.append((tpos[0], tpos[1], "R" if action is Action.LEFT else "U"))
        stack.append(tidx)
    return tree


def generate_maze_pair(
    seed: int,
    width: int,
    height: int,
    wall_density: float = DEFAULT_WALL_DENSITY,
) -> MazePair:
    """Deterministically generate a solvable maze pair from a seed."""
    if width < 2 or height < 2:
        raise MazeError("generated mazes must be at least 2x2")
    if not 0.0 <= wall_density < 1.0:
        raise MazeError("wall_density must be in [0, 1)")
    rng = random.Random(seed)
    for _ in range(_RETRY_BUDGET):
        tree = set(_spanning_tree(width, height, rng))
        open_e, open_h = [], []
        for edge in _interior_edges(width, height):
            if edge in tree:
                (open_e if rng.random() < 0.5 else open_h).append(edge)
            elif rng.random() >= wall_density:
                (open_e if rng.random() < 0.5 else open_h).append(edge)
        all_edges = set(_interior_edges(width, height))
        walls_e = sorted(all_edges - set(open_e))
        walls_h = sorted(all_edges - set(open_h))
        try:
            return MazePair(MazeSide(width, height, walls_e), MazeSide(width, height, walls_h))
        except MazeError:
            continue
    raise MazeError(f"no valid maze pair found for seed {seed} within retry budget")
