"""Regenerate test/fixtures/session1.json from a live service session.

Drives the coordination service through a scripted human session over
the wire protocol and records every inbound push, the exact outbound
bytes the UI client is expected to produce for each scripted event, and
the server's final state. Run from the repository root:

    python3 frontend/tools/make_fixture.py
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from tandemaze.mazefile import maze_to_dict
from tandemaze.mazegen import generate_maze_pair
from tandemaze.service import create_app

OUT = Path(__file__).parent.parent / "test" / "fixtures" / "session1.json"

SESSION_ID = "fixture-session-1"
PAIR = generate_maze_pair(35, 5, 5, 0.4)  # human at (0,0): Right open, Up blocked


def compact(obj) -> str:
    """Byte-for-byte what JSON.stringify produces for our builders."""
    return json.dumps(obj, separators=(",", ":"))


def outbound_action(action: str) -> dict:
    return {"type": "human_action", "session_id": SESSION_ID, "payload": {"action": action}}


def outbound_intent(cells) -> dict:
    return {"type": "human_intent", "session_id": SESSION_ID, "payload": {"cells": cells}}


def outbound_belief() -> dict:
    return {"type": "belief_snapshot", "session_id": SESSION_ID, "payload": {}}


def main() -> None:
    create_payload = {
        "maze": maze_to_dict(PAIR),
        "config": {"init": [0, 0], "goal": [4, 4], "start": "H"},
        "human_side": "H",
        "agent_kind": "mcts-intent",
        "seed": 77,
        "session_id": SESSION_ID,
    }

    script = [
        {"events": [{"kind": "key", "key": "ArrowUp"}], "outbound": [outbound_action("Up")]},
        {"events": [{"kind": "key", "key": "ArrowRight"}], "outbound": [outbound_action("Right")]},
        {
            "events": [{"kind": "drag", "cells": [[1, 1], [1, 2], [2, 2]]}],
            "outbound": [outbound_intent([[1, 1], [1, 2], [2, 2]])],
        },
        {"events": [{"kind": "key", "key": " "}], "outbound": [outbound_action("Switch")]},
        {"events": [{"kind": "toggle_heatmap"}], "outbound": [outbound_belief()]},
    ]

    client = TestClient(create_app())
    steps = []
    with client.websocket_connect("/ws") as ws:
        ws.send_json({"type": "create", "payload": create_payload})
        initial = [ws.receive_json(), ws.receive_json()]  # created + state_update
        for entry in script:
            inbound = []
            for msg in entry["outbound"]:
                ws.send_json(msg)
                while True:
                    push = ws.receive_json()
                    inbound.append(push)
                    if push["type"] in ("error", "finished", "belief_snapshot"):
                        break
                    if push["type"] == "intent_received" and push["payload"]["from"] == "H":
                        break
                    if push["type"] == "state_update" and push["payload"]["phase"] in ("human_turn", "finished"):
                        break
            steps.append({
                "events": entry["events"],
                "expected_outbound": [compact(m) for m in entry["outbound"]],
                "inbound": inbound,
            })

    final_state = client.get(f"/sessions/{SESSION_ID}/state").json()
    fixture = {
        "description": "scripted human-vs-agent session used by the UI replay tests",
        "session_id": SESSION_ID,
        "create_payload": create_payload,
        "initial_inbound": initial,
        "steps": steps,
        "final_state": final_state,
    }
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(fixture, indent=2) + "\n")
    print(f"wrote {OUT} ({sum(len(s['inbound']) for s in steps) + len(initial)} messages)")


if __name__ == "__main__":
    main()
