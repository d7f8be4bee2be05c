"""JSON on-disk formats for maze pairs and game configurations.

Maze file (format_version 1): width, height, and per-side lists of wall
records {"col", "row", "dir"} with dir "R" or "U" naming the blocked
undirected edge anchored at its lower-left cell. An empty wall list
means a fully open side.
"""

import json
from pathlib import Path
from typing import Union

from .game import GameConfig, GridPos, MazeError, MazePair, MazeSide, PlayerId

FORMAT_VERSION = 1


class MazeFormatError(MazeError):
    """Malformed maze/config document, with field-level diagnostics."""


def maze_to_dict(pair: MazePair) -> dict:
    def side_walls(side: MazeSide) -> list:
        records = sorted(side.walls)
        return [{"col": w.col, "row": w.row, "dir": w.direction} for w in records]

    return {
        "format_version": FORMAT_VERSION,
        "width": pair.width,
        "height": pair.height,
        "sides": {"E": side_walls(pair.side_e), "H": side_walls(pair.side_h)},
    }


def maze_from_dict(doc: dict) -> MazePair:
    if not isinstance(doc, dict):
        raise MazeFormatError("maze document must be a JSON object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise MazeFormatError(f"format_version: expected {FORMAT_VERSION}, got {version!r}")
    try:
        width = int(doc["width"])
        height = int(doc["height"])
        sides = doc["sides"]
    except KeyError as exc:
        raise MazeFormatError(f"missing field {exc.args[0]!r}") from None

    built = {}
    for key in ("E", "H"):
        if key not in sides:
            raise MazeFormatError(f"sides: missing side {key!r}")
        walls = []
        seen = set()
        for i, rec in enumerate(sides[key]):
            where = f"sides.{key}[{i}]"
            try:
                col, row, direction = int(rec["col"]), int(rec["row"]), rec["dir"]
            except (KeyError, TypeError) as exc:
                raise MazeFormatError(f"{where}: bad wall record {rec!r} ({exc})") from None
            if direction not in ("R", "U"):
                raise MazeFormatError(
                    f"{where}: dir must be 'R' or 'U' (left/down walls are implied by symmetry), got {direction!r}"
                )
            if (col, row, direction) in seen:
                raise MazeFormatError(f"{where}: duplicate wall ({col},{row},{direction})")
            seen.add((col, row, direction))
            walls.append((col, row, direction))
        try:
            built[key] = MazeSide(width, height, walls)
        except MazeError as exc:
            raise MazeFormatError(f"sides.{key}: {exc}") from None
    return MazePair(built["E"], built["H"])


def save_maze(pair: MazePair, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(maze_to_dict(pair), indent=2) + "\n")


def load_maze(path: Union[str, Path]) -> MazePair:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise MazeFormatError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}") from None
    try:
        return maze_from_dict(doc)
    except MazeFormatError as exc:
        raise MazeFormatError(f"{path}: {exc}") from None


def configs_to_list(configs) -> list:
    return [
        {"init": [c.init[0], c.init[1]], "goal": [c.goal[0], c.goal[1]], "start": c.start.value}
        for c in configs
    ]


def configs_from_list(docs) -> list:
    if not isinstance(docs, list):
        raise MazeFormatError("config document must be a JSON list")
    out = []
    for i, rec in enumerate(docs):
        try:
            init = GridPos(int(rec["init"][0]), int(rec["init"][1]))
            goal = GridPos(int(rec["goal"][0]), int(rec["goal"][1]))
            start = PlayerId(rec.get("start", "E"))
        except (KeyError, TypeError, IndexError, ValueError) as exc:
            raise MazeFormatError(f"configs[{i}]: bad record {rec!r} ({exc})") from None
        out.append(GameConfig(init, goal, start))
    return out


def save_configs(configs, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(configs_to_list(configs), indent=2) + "\n")


def load_configs(path: Union[str, Path]) -> list:
    try:
        docs = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MazeFormatError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}") from None
    return configs_from_list(docs)
