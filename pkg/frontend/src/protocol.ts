// Wire protocol (format_version 1) shared with the coordination service.

export const FORMAT_VERSION = 1;

export type Cell = [number, number];
export type PlayerSide = "E" | "H";
export type Phase = "human_turn" | "agent_turn" | "finished";
export type ActionName = "Right" | "Up" | "Left" | "Down" | "Switch";

export interface WallRecord {
  col: number;
  row: number;
  dir: "R" | "U";
}

export interface ServerMessage {
  format_version: number;
  type: string;
  session_id: string;
  seq: number;
  payload: any;
}

export interface CreatedPayload {
  session_id: string;
  width: number;
  height: number;
  human_side: PlayerSide;
  walls: WallRecord[];
  config: { init: Cell; goal: Cell; start: PlayerSide };
  cap: number;
  agent_kind: string;
}

export interface StatePayload {
  format_version: number;
  cell: Cell;
  controller: PlayerSide;
  phase: Phase;
  steps: number;
  switches: number;
  success: boolean;
}

export interface AgentMovedPayload {
  action: ActionName;
  cell: Cell;
  controller: PlayerSide;
  steps: number;
  switches: number;
}

export interface IntentPayload {
  from: PlayerSide;
  cells: Cell[];
}

export interface BeliefEntry {
  alpha: number;
  beta: number;
  mean: number;
}

export interface BeliefSnapshotPayload {
  format_version: number;
  width: number;
  height: number;
  entries: Record<string, BeliefEntry>;
}

export interface OutboundMessage {
  type: string;
  session_id: string;
  payload: any;
}

// Builders keep key order fixed so serialized bytes are reproducible.

export function humanActionMessage(sessionId: string, action: ActionName): OutboundMessage {
  return { type: "human_action", session_id: sessionId, payload: { action } };
}

export function humanIntentMessage(sessionId: string, cells: Cell[]): OutboundMessage {
  return { type: "human_intent", session_id: sessionId, payload: { cells } };
}

export function beliefRequestMessage(sessionId: string): OutboundMessage {
  return { type: "belief_snapshot", session_id: sessionId, payload: {} };
}

export function createMessage(payload: any): OutboundMessage {
  return { type: "create", session_id: "", payload };
}

export function encode(msg: OutboundMessage): string {
  return JSON.stringify(msg);
}
