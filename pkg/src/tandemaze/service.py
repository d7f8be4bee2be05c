"""Session service for live human-vs-agent play.

Owns in-memory game sessions, validates human moves against the human's
true maze side, runs the agent's turns, exchanges intents, and streams
every state change as sequenced JSON messages over a WebSocket. Each
session also appends both directions of traffic to a JSONL log; folding
the logged pushes reconstructs the session exactly.
"""

import json
import threading
import uuid
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect

from .agents import Agent, AgentKind
from .game import (
    Action,
    ControllerState,
    DEFAULT_STEP_CAP,
    GameConfig,
    GridPos,
    MazePair,
    PlayerId,
    step,
)
from .harness import AgentSpec, derive_seed
from .intent import InvalidIntentError, validate_intent
from .mcts import PlannerParams, RewardScheme
from . import mazefile, mazegen

FORMAT_VERSION = 1

PHASE_HUMAN = "human_turn"
PHASE_AGENT = "agent_turn"
PHASE_FINISHED = "finished"


@dataclass
class Session:
    session_id: str
    pair: MazePair
    config: GameConfig
    human: PlayerId
    agent: Agent
    cap: int
    seed: int
    log_path: Optional[Path]
    state: ControllerState = None
    phase: str = PHASE_HUMAN
    steps: int = 0
    switches: int = 0
    success: bool = False
    seq: int = 0
    human_intent: tuple = ()
    agent_intent: tuple = ()
    outbox: list = dc_field(default_factory=list)
    lock: threading.Lock = dc_field(default_factory=threading.Lock)

    @property
    def agent_player(self) -> PlayerId:
        return self.human.other

    def push(self, msg_type: str, payload: dict) -> dict:
        self.seq += 1
        msg = {
            "format_version": FORMAT_VERSION,
            "type": msg_type,
            "session_id": self.session_id,
            "seq": self.seq,
            "payload": payload,
        }
        self.outbox.append(msg)
        self._log("out", msg)
        return msg

    def _log(self, direction: str, msg: dict) -> None:
        if self.log_path is not None:
            with self.log_path.open("a") as fh:
                fh.write(json.dumps({"dir": direction, "msg": msg}) + "\n")

    def log_inbound(self, msg: dict) -> None:
        self._log("in", msg)

    def drain(self) -> list:
        out, self.outbox = self.outbox, []
        return out

    def state_payload(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "cell": [self.state.cell[0], self.state.cell[1]],
            "controller": self.state.controller.value,
            "phase": self.phase,
            "steps": self.steps,
            "switches": self.switches,
            "success": self.success,
        }


def _human_side_walls(session: Session) -> list:
    side = session.pair.side(session.human)
    return [{"col": w.col, "row": w.row, "dir": w.direction} for w in sorted(side.walls)]


class SessionStore:
    def __init__(self, log_dir: Optional[Path], fixtures: dict):
        self.sessions = {}
        self.log_dir = log_dir
        self.fixtures = fixtures
        self.lock = threading.Lock()

    def get(self, session_id: str) -> Session:
        session = self.sessions.get(session_id)
        if session is None:
            raise KeyError(session_id)
        return session


def _resolve_maze(store: SessionStore, ref) -> MazePair:
    if isinstance(ref, dict):
        return mazefile.maze_from_dict(ref)
    if isinstance(ref, str):
        if ref.startswith("fixture:"):
            name = ref.split(":", 1)[1]
            if name not in store.fixtures:
                raise ValueError(f"unknown fixture maze {name!r}")
            return store.fixtures[name]
        if ref.startswith("gen:"):
            parts = ref.split(":")
            seed = int(parts[1])
            width = height = 9
            if len(parts) > 2:
                width, height = (int(x) for x in parts[2].split("x"))
            return mazegen.generate_maze_pair(seed, width, height)
    raise ValueError(f"maze_ref must be a maze document, 'fixture:NAME', or 'gen:SEED[:WxH]', got {ref!r}")


def _agent_spec(agent_kind: str, scheme: Optional[str]) -> AgentSpec:
    kind = AgentKind(agent_kind)
    planner = PlannerParams()
    if scheme is not None:
        planner = PlannerParams(scheme=RewardScheme(scheme))
    return AgentSpec(kind=kind, planner=planner)


def create_session(store: SessionStore, payload: dict) -> Session:
    """Build, register, and kick off a session from a create payload."""
    try:
        pair = _resolve_maze(store, payload.get("maze"))
        cfg_doc = payload["config"]
        config = GameConfig(
            GridPos(int(cfg_doc["init"][0]), int(cfg_doc["init"][1])),
            GridPos(int(cfg_doc["goal"][0]), int(cfg_doc["goal"][1])),
            PlayerId(cfg_doc.get("start", "E")),
        )
        if not (0 <= config.init[0] < pair.width and 0 <= config.init[1] < pair.height):
            raise ValueError(f"init {cfg_doc['init']} outside maze")
        if not (0 <= config.goal[0] < pair.width and 0 <= config.goal[1] < pair.height):
            raise ValueError(f"goal {cfg_doc['goal']} outside maze")
        human = PlayerId(payload.get("human_side", "H"))
        seed = int(payload.get("seed", 0))
        spec = _agent_spec(payload.get("agent_kind", "mcts-intent"), payload.get("scheme"))
        cap = int(payload.get("cap", DEFAULT_STEP_CAP))
        session_id = payload.get("session_id") or uuid.uuid4().hex
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(str(exc)) from None

    agent_player = human.other
    agent = spec.build(agent_player, pair, config.goal, derive_seed(seed, "agent", agent_player.value))
    log_path = None
    if store.log_dir is not None:
        store.log_dir.mkdir(parents=True, exist_ok=True)
        log_path = store.log_dir / f"{session_id}.jsonl"
    session = Session(
        session_id=session_id,
        pair=pair,
        config=config,
        human=human,
        agent=agent,
        cap=cap,
        seed=seed,
        log_path=log_path,
        state=ControllerState(config.init, config.start),
        phase=PHASE_HUMAN if config.start is human else PHASE_AGENT,
    )
    with store.lock:
        if session_id in store.sessions:
            raise ValueError(f"session {session_id!r} already exists")
        store.sessions[session_id] = session

    session.push("created", {
        "session_id": session_id,
        "width": pair.width,
        "height": pair.height,
        "human_side": human.value,
        "walls": _human_side_walls(session),
        "config": {
            "init": [config.init[0], config.init[1]],
            "goal": [config.goal[0], config.goal[1]],
            "start": config.start.value,
        },
        "cap": cap,
        "agent_kind": spec.kind.value,
    })
    session.push("state_update", session.state_payload())
    if session.phase == PHASE_AGENT:
        _run_agent_turn(session)
    return session


def _finish(session: Session, success: bool) -> None:
    session.success = success
    session.phase = PHASE_FINISHED
    session.push("finished", {
        "success": success,
        "steps": session.steps,
        "switches": session.switches,
    })


def _check_terminal(session: Session) -> bool:
    if tuple(session.state.cell) == tuple(session.config.goal):
        _finish(session, True)
        return True
    if session.steps >= session.cap:
        _finish(session, False)
        return True
    return False


def _run_agent_turn(session: Session) -> None:
    """Let the agent act until it switches back, wins, or hits the cap."""
    agent = session.agent
    while session.phase == PHASE_AGENT:
        if _check_terminal(session):
            return
        action = agent.choose_action(session.state)
        if action is Action.SWITCH:
            outgoing = agent.outgoing_intent(session.state.cell)
            session.agent_intent = outgoing
            session.state = ControllerState(session.state.cell, session.human)
            session.steps += 1
            session.switches += 1
            session.phase = PHASE_HUMAN
            session.push("agent_moved", {
                "action": "Switch",
                "cell": [session.state.cell[0], session.state.cell[1]],
                "controller": session.state.controller.value,
                "steps": session.steps,
                "switches": session.switches,
            })
            session.push("intent_received", {
                "from": session.agent_player.value,
                "cells": [[c, r] for c, r in outgoing],
            })
            session.push("state_update", session.state_payload())
            _check_terminal(session)
            return
        nxt = step(session.pair.side(session.agent_player), session.state, action)
        assert nxt is not None, "agent chose a blocked move"
        session.state = nxt
        session.steps += 1
        session.push("agent_moved", {
            "action": action.name.capitalize(),
            "cell": [nxt.cell[0], nxt.cell[1]],
            "controller": nxt.controller.value,
            "steps": session.steps,
            "switches": session.switches,
        })


_ACTION_NAMES = {
    "Right": Action.RIGHT,
    "Up": Action.UP,
    "Left": Action.LEFT,
    "Down": Action.DOWN,
    "Switch": Action.SWITCH,
}


def submit_human_action(session: Session, action_name: str) -> None:
    """Validate and apply one human action; may trigger a whole agent turn."""
    if session.phase == PHASE_FINISHED:
        session.push("error", {"code": "finished", "message": "session is over"})
        return
    if session.phase != PHASE_HUMAN:
        session.push("error", {"code": "not_your_turn", "message": "agent is in control"})
        return
    action = _ACTION_NAMES.get(action_name)
    if action is None:
        session.push("error", {"code": "bad_action", "message": f"unknown action {action_name!r}"})
        return

    if action is Action.SWITCH:
        session.state = ControllerState(session.state.cell, session.agent_player)
        session.steps += 1
        session.switches += 1
        session.phase = PHASE_AGENT
        session.push("state_update", session.state_payload())
        if not _check_terminal(session):
            _run_agent_turn(session)
        return

    nxt = step(session.pair.side(session.human), session.state, action)
    if nxt is None:
        # rejected moves never reach the agent's memory
        session.push("error", {"code": "blocked", "message": f"{action_name} is blocked here"})
        return
    session.agent.note_partner_move(session.state.cell, action)
    session.state = nxt
    session.steps += 1
    session.push("state_update", session.state_payload())
    _check_terminal(session)


def submit_human_intent(session: Session, cells) -> None:
    """Store the human's requested path for the agent's next searches."""
    if session.phase == PHASE_FINISHED:
        session.push("error", {"code": "finished", "message": "session is over"})
        return
    if session.phase != PHASE_HUMAN:
        session.push("error", {"code": "not_your_turn", "message": "agent is in control"})
        return
    try:
        intent = validate_intent(cells, session.pair.width, session.pair.height, allow_empty=True)
    except InvalidIntentError as exc:
        session.push("error", {"code": "invalid_intent", "message": str(exc)})
        return
    session.human_intent = intent
    session.agent.receive_intent(intent)
    session.push("intent_received", {"from": session.human.value, "cells": [[c, r] for c, r in intent]})


def replay_log(lines) -> dict:
    """Fold a session's logged pushes back into a final-state summary."""
    snapshot = {}
    max_seq = 0
    for line in lines:
        entry = json.loads(line) if isinstance(line, str) else line
        if entry["dir"] != "out":
            continue
        msg = entry["msg"]
        max_seq = max(max_seq, msg["seq"])
        payload = msg["payload"]
        if msg["type"] == "state_update":
            snapshot = {
                "cell": payload["cell"],
                "controller": payload["controller"],
                "phase": payload["phase"],
                "steps": payload["steps"],
                "switches": payload["switches"],
                "success": payload["success"],
            }
        elif msg["type"] == "agent_moved":
            snapshot.update({
                "cell": payload["cell"],
                "controller": payload["controller"],
                "steps": payload["steps"],
                "switches": payload["switches"],
            })
        elif msg["type"] == "finished":
            snapshot.update({
                "phase": PHASE_FINISHED,
                "success": payload["success"],
                "steps": payload["steps"],
                "switches": payload["switches"],
            })
    snapshot["seq"] = max_seq
    return snapshot


def _load_fixtures(fixtures_dir: Optional[Path]) -> dict:
    fixtures = {}
    if fixtures_dir is not None and Path(fixtures_dir).is_dir():
        for path in sorted(Path(fixtures_dir).glob("*.json")):
            try:
                fixtures[path.stem] = mazefile.load_maze(path)
            except mazefile.MazeFormatError:
                continue
    return fixtures


def default_fixtures_dir() -> Path:
    return Path(__file__).parent / "fixtures"


def create_app(log_dir=None, fixtures_dir=None, ui_dir=None) -> FastAPI:
    """Build the HTTP + WebSocket app around one in-memory session store.

    ui_dir, when given, is served at / so the browser client and the
    session endpoints share an origin.
    """
    app = FastAPI(title="tandemaze coordination service")
    store = SessionStore(
        Path(log_dir) if log_dir is not None else None,
        _load_fixtures(fixtures_dir if fixtures_dir is not None else default_fixtures_dir()),
    )
    app.state.store = store

    @app.get("/mazes")
    def list_mazes():
        return {
            "format_version": FORMAT_VERSION,
            "mazes": [
                {"name": name, "width": pair.width, "height": pair.height}
                for name, pair in sorted(store.fixtures.items())
            ],
        }

    @app.post("/sessions")
    def post_session(payload: dict):
        try:
            session = create_session(store, payload)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {
            "format_version": FORMAT_VERSION,
            "session_id": session.session_id,
            "state": session.state_payload(),
        }

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str):
        try:
            session = store.get(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        with session.lock:
            return {"format_version": FORMAT_VERSION, "session_id": session_id, **session.state_payload()}

    @app.get("/sessions/{session_id}/belief")
    def get_belief(session_id: str):
        try:
            session = store.get(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        with session.lock:
            return session.agent.belief.snapshot()

    async def _flush(ws: WebSocket, session: Session) -> None:
        with session.lock:
            outgoing = session.drain()
        for msg in outgoing:
            await ws.send_json(msg)

    async def _message_loop(ws: WebSocket, session: Session) -> None:
        await _flush(ws, session)
        while True:
            inbound = await ws.receive_json()
            with session.lock:
                session.log_inbound(inbound)
                _dispatch(session, inbound)
            await _flush(ws, session)

    @app.websocket("/ws")
    async def root_ws(ws: WebSocket):
        """Wire entry point: the first message must be create."""
        await ws.accept()
        try:
            first = await ws.receive_json()
            if first.get("type") != "create":
                await ws.send_json(_error_msg("", "bad_message", "first message must be create"))
                await ws.close()
                return
            try:
                session = create_session(store, first.get("payload", {}))
            except ValueError as exc:
                await ws.send_json(_error_msg("", "bad_create", str(exc)))
                await ws.close()
                return
            session.log_inbound(first)
            await _message_loop(ws, session)
        except WebSocketDisconnect:
            return

    @app.websocket("/sessions/{session_id}/ws")
    async def session_ws(ws: WebSocket, session_id: str):
        """Attach to an existing session; buffered pushes are flushed first."""
        await ws.accept()
        try:
            session = store.get(session_id)
        except KeyError:
            await ws.send_json(_error_msg(session_id, "unknown_session", f"unknown session {session_id!r}"))
            await ws.close()
            return
        try:
            await _message_loop(ws, session)
        except WebSocketDisconnect:
            return

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def _error_msg(session_id: str, code: str, message: str) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "type": "error",
        "session_id": session_id,
        "seq": 0,
        "payload": {"code": code, "message": message},
    }


def _dispatch(session: Session, inbound: dict) -> None:
    msg_type = inbound.get("type")
    payload = inbound.get("payload", {})
    if msg_type == "human_action":
        submit_human_action(session, payload.get("action"))
    elif msg_type == "human_intent":
        submit_human_intent(session, payload.get("cells", []))
    elif msg_type == "belief_snapshot":
        session.push("belief_snapshot", session.agent.belief.snapshot())
    else:
        session.push("error", {"code": "bad_message", "message": f"unknown message type {msg_type!r}"})


app = create_app()
