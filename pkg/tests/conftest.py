import random

import pytest

from tandemaze.game import GridPos, MazePair, MazeSide, Wall, MOVE_ACTIONS
from tandemaze.mazegen import _interior_edges, generate_maze_pair


def open_side(width, height):
    """Side with every interior edge open."""
    return MazeSide(width, height)


def closed_side(width, height):
    """Side with every interior edge walled."""
    return MazeSide(width, height, _interior_edges(width, height))


def side_with_open(width, height, open_edges):
    """Side where only the given (col,row,dir) edges are open."""
    walls = sorted(set(_interior_edges(width, height)) - {tuple(e) for e in open_edges})
    return MazeSide(width, height, walls)


def e_only_pair(width, height):
    """E sees a fully open maze, H sees only walls; union stays connected."""
    return MazePair(open_side(width, height), closed_side(width, height))


def random_side(width, height, rng, p_wall=0.4):
    walls = [e for e in _interior_edges(width, height) if rng.random() < p_wall]
    return MazeSide(width, height, walls)


@pytest.fixture
def nine_pair():
    return generate_maze_pair(101, 9, 9, 0.45)


@pytest.fixture
def small_pair():
    return generate_maze_pair(7, 4, 4, 0.4)
