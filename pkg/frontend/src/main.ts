// Browser entry point: creates a session over the wire protocol and
// wires canvas rendering, keyboard moves, and pointer intent drawing.
//
// Query parameters:
//   maze=fixture:nine_a | gen:SEED[:WxH]   (default fixture:nine_a)
//   side=E|H        which side the human plays (default H)
//   agent=KIND      mcts-intent | mcts-single | mcts-none | heuristic
//   seed=N          session seed
//   study=1         hide step/switch counters

import { beliefRequestMessage, createMessage } from "./protocol.js";
import type { ServerMessage } from "./protocol.js";
import { applyMessage, initialState } from "./state.js";
import type { ClientState } from "./state.js";
import { DEFAULT_LAYOUT, canvasToCell, renderBoard } from "./board.js";
import type { Draw2D } from "./board.js";
import { buildHeatmap } from "./heatmap.js";
import { IntentSketch, keyToMessage } from "./input.js";
import { Connection } from "./net.js";

const params = new URLSearchParams(window.location.search);
const canvas = document.getElementById("board") as HTMLCanvasElement;
const ctx = canvas.getContext("2d") as unknown as Draw2D;
const heatmapToggle = document.getElementById("heatmap") as HTMLInputElement;
const switchButton = document.getElementById("switch") as HTMLButtonElement;

let state: ClientState = initialState();
const sketch = new IntentSketch();
const studyMode = params.get("study") === "1";

function draw(): void {
  const heatmap = heatmapToggle.checked && state.belief ? buildHeatmap(state.belief) : null;
  // while a path is being dragged, preview it in place of the sent intent
  const view = sketch.active && sketch.cells.length > 0 ? { ...state, ownIntent: sketch.cells } : state;
  renderBoard(ctx, { state: view, heatmap, studyMode }, DEFAULT_LAYOUT);
}

const wsProto = window.location.protocol === "https:" ? "wss" : "ws";
const conn = new Connection(`${wsProto}://${window.location.host}/ws`, (msg: ServerMessage) => {
  state = applyMessage(state, msg);
  if (msg.type === "created") {
    canvas.width = state.width * DEFAULT_LAYOUT.cellSize + 2 * DEFAULT_LAYOUT.margin;
    canvas.height = state.height * DEFAULT_LAYOUT.cellSize + 2 * DEFAULT_LAYOUT.margin;
  }
  draw();
});

conn.ready().then(() => {
  conn.send(
    createMessage({
      maze: params.get("maze") ?? "fixture:nine_a",
      config: { init: [0, 0], goal: [8, 8], start: params.get("side") === "E" ? "E" : "H" },
      human_side: params.get("side") === "E" ? "E" : "H",
      agent_kind: params.get("agent") ?? "mcts-intent",
      seed: Number(params.get("seed") ?? 0),
    }),
  );
});

window.addEventListener("keydown", event => {
  const msg = keyToMessage(state, event.key);
  if (msg) {
    event.preventDefault();
    conn.send(msg);
  }
});

switchButton.addEventListener("click", () => {
  const msg = keyToMessage(state, " ");
  if (msg) conn.send(msg);
});

heatmapToggle.addEventListener("change", () => {
  if (heatmapToggle.checked) conn.send(beliefRequestMessage(state.sessionId));
  draw();
});

function pointerCell(event: PointerEvent) {
  const rect = canvas.getBoundingClientRect();
  return canvasToCell(state, DEFAULT_LAYOUT, event.clientX - rect.left, event.clientY - rect.top);
}

canvas.addEventListener("pointerdown", event => {
  sketch.begin(state, pointerCell(event));
  draw();
});
canvas.addEventListener("pointermove", event => {
  if (sketch.active) {
    sketch.extend(pointerCell(event));
    draw();
  }
});
canvas.addEventListener("pointerup", () => {
  const msg = sketch.finish(state);
  if (msg) conn.send(msg);
  else if (sketch.error) {
    state = { ...state, lastError: `invalid_intent: ${sketch.error}` };
  }
  draw();
});
