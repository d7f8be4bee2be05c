import json
from collections import deque

import pytest

from tandemaze.game import GridPos, GameConfig, PlayerId, MOVE_ACTIONS
from tandemaze.mazefile import (
    MazeFormatError,
    configs_from_list,
    configs_to_list,
    load_maze,
    load_configs,
    maze_from_dict,
    maze_to_dict,
    save_configs,
    save_maze,
)
from tandemaze.mazegen import generate_maze_pair


def test_round_trip_identity(tmp_path):
    pair = generate_maze_pair(3, 6, 5, 0.4)
    path = tmp_path / "m.json"
    save_maze(pair, path)
    loaded = load_maze(path)
    assert loaded.side_e == pair.side_e
    assert loaded.side_h == pair.side_h


def test_empty_wall_lists_mean_fully_open():
    doc = {"format_version": 1, "width": 3, "height": 3, "sides": {"E": [], "H": []}}
    pair = maze_from_dict(doc)
    for side in (pair.side_e, pair.side_h):
        for col in range(3):
            for row in range(3):
                expected = len([a for a in MOVE_ACTIONS
                                if 0 <= col + [1, 0, -1, 0][a] < 3 and 0 <= row + [0, 1, 0, -1][a] < 3])
                assert len(side.legal_moves(GridPos(col, row))) == expected


def test_bad_direction_is_parse_error():
    doc = {"format_version": 1, "width": 3, "height": 3,
           "sides": {"E": [{"col": 1, "row": 1, "dir": "L"}], "H": []}}
    with pytest.raises(MazeFormatError, match=r"sides\.E\[0\].*implied by symmetry"):
        maze_from_dict(doc)


def test_duplicate_wall_is_parse_error():
    doc = {"format_version": 1, "width": 3, "height": 3,
           "sides": {"E": [{"col": 0, "row": 0, "dir": "R"}, {"col": 0, "row": 0, "dir": "R"}], "H": []}}
    with pytest.raises(MazeFormatError, match="duplicate"):
        maze_from_dict(doc)


def test_missing_fields_and_version():
    with pytest.raises(MazeFormatError, match="format_version"):
        maze_from_dict({"width": 3, "height": 3, "sides": {"E": [], "H": []}})
    with pytest.raises(MazeFormatError, match="missing field"):
        maze_from_dict({"format_version": 1, "width": 3})
    with pytest.raises(MazeFormatError, match="missing side"):
        maze_from_dict({"format_version": 1, "width": 3, "height": 3, "sides": {"E": []}})


def test_out_of_bounds_wall_is_parse_error():
    doc = {"format_version": 1, "width": 3, "height": 3,
           "sides": {"E": [{"col": 7, "row": 0, "dir": "R"}], "H": []}}
    with pytest.raises(MazeFormatError, match="sides.E"):
        maze_from_dict(doc)


def test_invalid_json_reports_location(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(MazeFormatError, match="line"):
        load_maze(path)


def test_config_round_trip(tmp_path):
    configs = [
        GameConfig(GridPos(0, 0), GridPos(2, 2), PlayerId.E),
        GameConfig(GridPos(1, 2), GridPos(0, 1), PlayerId.H),
    ]
    path = tmp_path / "configs.json"
    save_configs(configs, path)
    assert load_configs(path) == configs


def test_config_bad_record():
    with pytest.raises(MazeFormatError, match=r"configs\[0\]"):
        configs_from_list([{"init": [0, 0]}])
