// Keyboard and pointer handling. Keys map to moves, Space hands over
// control, and dragging across adjacent cells sketches an intent path
// that is sent on release. Nothing is emitted outside the human's turn.

import type { ActionName, Cell, OutboundMessage } from "./protocol.js";
import { humanActionMessage, humanIntentMessage } from "./protocol.js";
import type { ClientState } from "./state.js";
import { canAct } from "./state.js";

export const KEY_ACTIONS: Record<string, ActionName> = {
  ArrowRight: "Right",
  ArrowUp: "Up",
  ArrowLeft: "Left",
  ArrowDown: "Down",
  " ": "Switch",
  Space: "Switch",
};

export function keyToMessage(state: ClientState, key: string): OutboundMessage | null {
  if (!canAct(state)) return null;
  const action = KEY_ACTIONS[key];
  if (!action) return null;
  return humanActionMessage(state.sessionId, action);
}

function adjacent(a: Cell, b: Cell): boolean {
  return Math.abs(a[0] - b[0]) + Math.abs(a[1] - b[1]) === 1;
}

export class IntentSketch {
  cells: Cell[] = [];
  active = false;
  error: string | null = null;

  begin(state: ClientState, cell: Cell | null): void {
    this.cells = [];
    this.error = null;
    this.active = canAct(state) && cell !== null;
    if (this.active && cell) this.cells.push(cell);
  }

  extend(cell: Cell | null): void {
    if (!this.active || !cell) return;
    const last = this.cells[this.cells.length - 1];
    if (last && last[0] === cell[0] && last[1] === cell[1]) return;
    if (this.cells.some(c => c[0] === cell[0] && c[1] === cell[1])) {
      this.error = "intent path cannot revisit a cell";
      this.active = false;
      return;
    }
    if (last && !adjacent(last, cell)) {
      this.error = "intent path must follow adjacent cells";
      this.active = false;
      return;
    }
    this.cells.push(cell);
  }

  finish(state: ClientState): OutboundMessage | null {
    const wasActive = this.active;
    this.active = false;
    if (!wasActive || this.error || !canAct(state) || this.cells.length === 0) {
      return null;
    }
    return humanIntentMessage(state.sessionId, this.cells);
  }
}
