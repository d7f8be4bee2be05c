// Client-side session state: a pure fold over server messages, so a
// recorded message log replays into exactly the view the server had.

import type {
  AgentMovedPayload,
  BeliefSnapshotPayload,
  Cell,
  CreatedPayload,
  IntentPayload,
  Phase,
  PlayerSide,
  ServerMessage,
  StatePayload,
  WallRecord,
} from "./protocol.js";

export interface ClientState {
  sessionId: string;
  width: number;
  height: number;
  walls: WallRecord[];
  humanSide: PlayerSide;
  token: Cell | null;
  goal: Cell | null;
  controller: PlayerSide | null;
  phase: Phase | "connecting";
  steps: number;
  switches: number;
  success: boolean | null;
  ownIntent: Cell[];
  agentIntent: Cell[];
  belief: BeliefSnapshotPayload | null;
  lastError: string | null;
  seq: number;
}

export function initialState(): ClientState {
  return {
    sessionId: "",
    width: 0,
    height: 0,
    walls: [],
    humanSide: "H",
    token: null,
    goal: null,
    controller: null,
    phase: "connecting",
    steps: 0,
    switches: 0,
    success: null,
    ownIntent: [],
    agentIntent: [],
    belief: null,
    lastError: null,
    seq: 0,
  };
}

export function applyMessage(state: ClientState, msg: ServerMessage): ClientState {
  const next = { ...state, seq: Math.max(state.seq, msg.seq ?? 0), lastError: null };
  switch (msg.type) {
    case "created": {
      const p = msg.payload as CreatedPayload;
      return {
        ...next,
        sessionId: p.session_id,
        width: p.width,
        height: p.height,
        walls: p.walls,
        humanSide: p.human_side,
        token: p.config.init,
        goal: p.config.goal,
        controller: p.config.start,
      };
    }
    case "state_update": {
      const p = msg.payload as StatePayload;
      return {
        ...next,
        token: p.cell,
        controller: p.controller,
        phase: p.phase,
        steps: p.steps,
        switches: p.switches,
        success: p.success,
      };
    }
    case "agent_moved": {
      const p = msg.payload as AgentMovedPayload;
      return {
        ...next,
        token: p.cell,
        controller: p.controller,
        steps: p.steps,
        switches: p.switches,
      };
    }
    case "intent_received": {
      const p = msg.payload as IntentPayload;
      if (p.from === state.humanSide) {
        return { ...next, ownIntent: p.cells };
      }
      return { ...next, agentIntent: p.cells };
    }
    case "belief_snapshot":
      return { ...next, belief: msg.payload as BeliefSnapshotPayload };
    case "finished": {
      return {
        ...next,
        phase: "finished",
        success: msg.payload.success,
        steps: msg.payload.steps,
        switches: msg.payload.switches,
      };
    }
    case "error":
      return { ...next, lastError: `${msg.payload.code}: ${msg.payload.message}` };
    default:
      return next;
  }
}

export function replay(messages: ServerMessage[]): ClientState {
  return messages.reduce(applyMessage, initialState());
}

export function canAct(state: ClientState): boolean {
  return state.phase === "human_turn";
}
