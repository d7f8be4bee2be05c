// Canvas renderer for the human's view: own walls, token, goal, both
// intent overlays, and the optional belief heatmap. Drawing goes through
// a minimal context interface so tests can record the operations.

import type { Cell, WallRecord } from "./protocol.js";
import type { ClientState } from "./state.js";
import type { EdgeShade } from "./heatmap.js";

export interface Draw2D {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  globalAlpha: number;
  lineWidth: number;
  font: string;
  textAlign: string;
  textBaseline: string;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  stroke(): void;
  fill(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number): void;
}

export interface BoardLayout {
  cellSize: number;
  margin: number;
}

export const DEFAULT_LAYOUT: BoardLayout = { cellSize: 48, margin: 24 };

export interface BoardView {
  state: ClientState;
  heatmap: EdgeShade[] | null; // null when the overlay is toggled off
  studyMode: boolean;          // hides running counters
}

// row 0 sits at the bottom of the canvas
export function cellOrigin(state: ClientState, layout: BoardLayout, cell: Cell): [number, number] {
  const [col, row] = cell;
  return [
    layout.margin + col * layout.cellSize,
    layout.margin + (state.height - 1 - row) * layout.cellSize,
  ];
}

export function cellCenter(state: ClientState, layout: BoardLayout, cell: Cell): [number, number] {
  const [x, y] = cellOrigin(state, layout, cell);
  return [x + layout.cellSize / 2, y + layout.cellSize / 2];
}

export function canvasToCell(state: ClientState, layout: BoardLayout, x: number, y: number): Cell | null {
  const col = Math.floor((x - layout.margin) / layout.cellSize);
  const rowFromTop = Math.floor((y - layout.margin) / layout.cellSize);
  const row = state.height - 1 - rowFromTop;
  if (col < 0 || col >= state.width || row < 0 || row >= state.height) return null;
  return [col, row];
}

function wallSegment(state: ClientState, layout: BoardLayout, wall: WallRecord): [number, number, number, number] {
  const [x, y] = cellOrigin(state, layout, [wall.col, wall.row]);
  const s = layout.cellSize;
  if (wall.dir === "R") return [x + s, y, x + s, y + s];
  return [x, y, x + s, y]; // "U": top edge of the cell's box
}

function drawLine(ctx: Draw2D, seg: [number, number, number, number]): void {
  ctx.beginPath();
  ctx.moveTo(seg[0], seg[1]);
  ctx.lineTo(seg[2], seg[3]);
  ctx.stroke();
}

export function renderBoard(ctx: Draw2D, view: BoardView, layout: BoardLayout = DEFAULT_LAYOUT): void {
  const { state } = view;
  if (!state.width || !state.height) return;
  const s = layout.cellSize;
  const w = state.width * s;
  const h = state.height * s;
  ctx.clearRect(0, 0, w + 2 * layout.margin, h + 2 * layout.margin);
  ctx.globalAlpha = 1;

  // grid
  ctx.strokeStyle = "#d8d8d8";
  ctx.lineWidth = 1;
  for (let c = 0; c <= state.width; c++) {
    drawLine(ctx, [layout.margin + c * s, layout.margin, layout.margin + c * s, layout.margin + h]);
  }
  for (let r = 0; r <= state.height; r++) {
    drawLine(ctx, [layout.margin, layout.margin + r * s, layout.margin + w, layout.margin + r * s]);
  }

  // belief heatmap under the hard walls: darker = stronger wall belief
  if (view.heatmap) {
    ctx.strokeStyle = "#7b2d8b";
    ctx.lineWidth = 4;
    for (const shade of view.heatmap) {
      if (shade.dir !== "R" && shade.dir !== "U") continue; // one record per undirected edge
      ctx.globalAlpha = shade.opacity;
      drawLine(ctx, wallSegment(state, layout, { col: shade.col, row: shade.row, dir: shade.dir }));
    }
    ctx.globalAlpha = 1;
  }

  // the human player's own walls
  ctx.strokeStyle = "#1b1b1b";
  ctx.lineWidth = 5;
  for (const wall of state.walls) {
    drawLine(ctx, wallSegment(state, layout, wall));
  }
  // border
  ctx.lineWidth = 5;
  drawLine(ctx, [layout.margin, layout.margin, layout.margin + w, layout.margin]);
  drawLine(ctx, [layout.margin, layout.margin + h, layout.margin + w, layout.margin + h]);
  drawLine(ctx, [layout.margin, layout.margin, layout.margin, layout.margin + h]);
  drawLine(ctx, [layout.margin + w, layout.margin, layout.margin + w, layout.margin + h]);

  // goal
  if (state.goal) {
    const [gx, gy] = cellOrigin(state, layout, state.goal);
    ctx.fillStyle = "#f6c343";
    ctx.fillRect(gx + 4, gy + 4, s - 8, s - 8);
  }

  // received agent intent: large green squares, ordered by size fade
  drawIntent(ctx, view, state.agentIntent, "#2e9e44", 0.34, layout);
  // own drawn intent: small red squares
  drawIntent(ctx, view, state.ownIntent, "#d03a2f", 0.18, layout);

  // token
  if (state.token) {
    const [cx, cy] = cellCenter(state, layout, state.token);
    ctx.fillStyle = state.phase === "human_turn" ? "#2563c9" : "#8896ad";
    ctx.beginPath();
    ctx.arc(cx, cy, s * 0.3, 0, Math.PI * 2);
    ctx.fill();
  }

  // status line
  ctx.fillStyle = "#222";
  ctx.font = "14px sans-serif";
  ctx.textAlign = "left";
  ctx.textBaseline = "top";
  const status =
    state.phase === "finished"
      ? state.success
        ? "finished: goal reached!"
        : "finished: out of steps"
      : state.phase === "human_turn"
        ? "your turn"
        : "partner's turn";
  const counters = view.studyMode ? "" : `  steps ${state.steps}  switches ${state.switches}`;
  ctx.fillText(status + counters, layout.margin, 2);
  if (state.lastError) {
    ctx.fillStyle = "#c02020";
    ctx.fillText(state.lastError, layout.margin, layout.margin + h + 8);
  }
}

function drawIntent(
  ctx: Draw2D,
  view: BoardView,
  cells: Cell[],
  color: string,
  scale: number,
  layout: BoardLayout,
): void {
  const s = layout.cellSize;
  ctx.fillStyle = color;
  cells.forEach((cell, i) => {
    const [cx, cy] = cellCenter(view.state, layout, cell);
    // later cells draw slightly larger so the ordering reads at a glance
    const half = s * scale * (0.55 + (0.45 * (i + 1)) / cells.length);
    ctx.globalAlpha = 0.85;
    ctx.fillRect(cx - half, cy - half, half * 2, half * 2);
    ctx.globalAlpha = 1;
    ctx.fillStyle = "#ffffff";
    ctx.font = "10px sans-serif";
    ctx.textAlign = "center";
    ctx.textBaseline = "middle";
    ctx.fillText(String(i + 1), cx, cy);
    ctx.fillStyle = color;
  });
}
