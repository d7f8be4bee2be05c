import random

import pytest

from tandemaze.game import (
    Action,
    ControllerState,
    GameConfig,
    GridPos,
    MazeError,
    MazePair,
    MazeSide,
    MOVE_ACTIONS,
    PlayerId,
    UnreachableGoalError,
    env_reward,
    is_terminal,
    oracle_episode_length,
    step,
)
from conftest import closed_side, e_only_pair, open_side, random_side, side_with_open


def test_switch_flips_controller_only():
    side = open_side(2, 2)
    state = ControllerState(GridPos(0, 0), PlayerId.E)
    out = step(side, state, Action.SWITCH)
    assert out == ControllerState(GridPos(0, 0), PlayerId.H)
    assert step(side, out, Action.SWITCH) == state


def test_open_move():
    side = open_side(2, 2)
    out = step(side, ControllerState(GridPos(0, 0), PlayerId.E), Action.RIGHT)
    assert out == ControllerState(GridPos(1, 0), PlayerId.E)


def test_blocked_move_is_undefined():
    side = MazeSide(2, 2, [(0, 0, "R")])
    assert step(side, ControllerState(GridPos(0, 0), PlayerId.E), Action.RIGHT) is None


def test_border_edges_never_passable():
    side = open_side(3, 3)
    assert step(side, ControllerState(GridPos(0, 0), PlayerId.E), Action.LEFT) is None
    assert step(side, ControllerState(GridPos(0, 0), PlayerId.E), Action.DOWN) is None
    assert step(side, ControllerState(GridPos(2, 2), PlayerId.E), Action.RIGHT) is None
    assert step(side, ControllerState(GridPos(2, 2), PlayerId.E), Action.UP) is None


def test_wall_on_border_edge_rejected():
    with pytest.raises(MazeError):
        MazeSide(2, 2, [(1, 0, "R")])
    with pytest.raises(MazeError):
        MazeSide(2, 2, [(0, 1, "U")])


def test_walls_are_undirected():
    rng = random.Random(5)
    for _ in range(20):
        side = random_side(4, 4, rng)
        for col in range(4):
            for row in range(4):
                pos = GridPos(col, row)
                state = ControllerState(pos, PlayerId.E)
                for action in MOVE_ACTIONS:
                    fwd = step(side, state, action)
                    if fwd is None:
                        continue
                    from tandemaze.game import OPPOSITE_ACTION
                    back = step(side, fwd, OPPOSITE_ACTION[action])
                    assert back is not None and back.cell == pos


def test_movement_never_changes_controller():
    side = open_side(3, 3)
    for player in PlayerId:
        out = step(side, ControllerState(GridPos(1, 1), player), Action.UP)
        assert out.controller is player


def test_env_reward():
    goal = GridPos(2, 2)
    assert env_reward(ControllerState(goal, PlayerId.E), goal) == 100.0
    assert env_reward(ControllerState(goal, PlayerId.H), goal) == 100.0
    assert env_reward(ControllerState(GridPos(0, 0), PlayerId.E), goal) == -1.0


def test_is_terminal():
    goal = GridPos(1, 1)
    at_goal = ControllerState(goal, PlayerId.E)
    away = ControllerState(GridPos(0, 0), PlayerId.E)
    assert is_terminal(at_goal, goal, 5)
    assert is_terminal(away, goal, 1000, cap=1000)
    assert not is_terminal(away, goal, 999, cap=1000)
    with pytest.raises(ValueError):
        is_terminal(away, goal, 0, cap=0)


def test_game_config_rejects_equal_init_goal():
    with pytest.raises(ValueError):
        GameConfig(GridPos(1, 1), GridPos(1, 1))


def test_pair_requires_matching_dims():
    with pytest.raises(MazeError):
        MazePair(open_side(3, 3), open_side(4, 4))


def test_pair_requires_union_connectivity():
    with pytest.raises(MazeError):
        MazePair(closed_side(3, 3), closed_side(3, 3))


def test_oracle_solo_side_equals_distance():
    pair = e_only_pair(4, 4)
    config = GameConfig(GridPos(0, 0), GridPos(3, 3), PlayerId.E)
    assert oracle_episode_length(pair, config) == 6  # manhattan on an open grid


def test_oracle_requires_one_switch():
    # E can only cross (0,0)->(1,0); H can only climb (1,0)->(1,1)
    side_e = side_with_open(2, 2, [(0, 0, "R")])
    side_h = side_with_open(2, 2, [(1, 0, "U")])
    pair = MazePair(side_e, side_h, check_connected=False)
    config = GameConfig(GridPos(0, 0), GridPos(1, 1), PlayerId.E)
    assert oracle_episode_length(pair, config) == 3  # move, switch, move


def test_oracle_minimize_over_start():
    side_e = side_with_open(2, 2, [(0, 0, "R")])
    side_h = side_with_open(2, 2, [(1, 0, "U")])
    pair = MazePair(side_e, side_h, check_connected=False)
    config = GameConfig(GridPos(1, 0), GridPos(1, 1), PlayerId.E)
    assert oracle_episode_length(pair, config) == 2  # switch, move
    assert oracle_episode_length(pair, config, minimize_over_start=True) == 1


def test_oracle_unreachable_raises():
    pair = MazePair(closed_side(2, 2), closed_side(2, 2), check_connected=False)
    with pytest.raises(UnreachableGoalError):
        oracle_episode_length(pair, GameConfig(GridPos(0, 0), GridPos(1, 1)))


def _oracle_by_relaxation(pair, config):
    """Independent check: Bellman relaxation over the product graph."""
    width, height = pair.width, pair.height
    n = width * height
    INF = float("inf")
    dist = {(i, c): INF for i in range(n) for c in (0, 1)}
    start = (config.init[1] * width + config.init[0], 0 if config.start is PlayerId.E else 1)
    dist[start] = 0
    changed = True
    while changed:
        changed = False
        for (idx, c), d in list(dist.items()):
            if d == INF:
                continue
            side = pair.side_e if c == 0 else pair.side_h
            targets = [(int(side.next_cell[idx * 4 + a]), c) for a in range(4) if side.next_cell[idx * 4 + a] >= 0]
            targets.append((idx, 1 - c))
            for key in targets:
                if d + 1 < dist[key]:
                    dist[key] = d + 1
                    changed = True
    goal_idx = config.goal[1] * width + config.goal[0]
    return min(dist[(goal_idx, 0)], dist[(goal_idx, 1)])


def test_oracle_matches_relaxation_on_random_pairs():
    from tandemaze.mazegen import generate_maze_pair

    for seed in range(8):
        pair = generate_maze_pair(seed, 3, 3, 0.35)
        cells = [GridPos(c, r) for r in range(3) for c in range(3)]
        for init in cells[:4]:
            for goal in cells[5:]:
                if init == goal:
                    continue
                config = GameConfig(init, goal, PlayerId.E)
                assert oracle_episode_length(pair, config) == _oracle_by_relaxation(pair, config)
