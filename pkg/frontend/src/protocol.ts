// Wire protocol types, version 1. Mirrors PROTOCOL.md in the backend repo:
// every frame is {v, type, session_id, revision, payload}; indices 0-based.

export const PROTOCOL_VERSION = 1;

export type GateName = "and" | "or" | "not" | "xor";

export interface NetworkPayload {
  layer_sizes: number[];
  /** weights[k][i][j]: layer k neuron j -> layer k+1 neuron i */
  weights: number[][][];
  /** pinned input index (stringified) -> held value */
  pinned: Record<string, number>;
  free_inputs: number[];
}

export interface TracePayload {
  outputs: number[][];
  /** null for layer 0: input levers have no net input */
  nets: (number[] | null)[];
  slack: (boolean[] | null)[];
}

export interface PulleyPayload {
  fan_in: number;
  stages: number;
  attachment_fraction: number;
}

export interface MechanicalPayload {
  angles: number[][];
  string_displacements: number[][][];
  pulley_outputs: number[][];
  taut: boolean[][];
  pulleys: PulleyPayload[];
}

export interface MechanicalDelta {
  angles: [number, number, number][];
  taut: [number, number, boolean][];
}

export interface StateUpdatePayload {
  network: NetworkPayload;
  input_angles: number[];
  challenge: GateName | null;
  trace: TracePayload;
  mechanical: MechanicalPayload;
  mechanical_delta: MechanicalDelta;
}

export interface ChallengeRowPayload {
  bits: number[];
  raw: number | null;
  got: boolean | null;
  expected: boolean;
  passed: boolean;
}

export interface ChallengePayload {
  kind: GateName;
  threshold: number;
  ready: boolean;
  message: string | null;
  passed: boolean;
  rows: ChallengeRowPayload[];
  reveal?: { network: NetworkPayload; threshold: number };
}

export interface ErrorPayload {
  code:
    | "conflict"
    | "unknown_session"
    | "no_challenge"
    | "range"
    | "shape"
    | "bad_message"
    | string;
  message: string;
  expected_revision?: number;
  actual_revision?: number;
}

interface EnvelopeBase {
  v: number;
  session_id: string | null;
  revision: number | null;
}

export interface StateUpdateMessage extends EnvelopeBase {
  type: "state_update";
  payload: StateUpdatePayload;
}

export interface ChallengeMessage extends EnvelopeBase {
  type: "check_challenge";
  payload: ChallengePayload;
}

export interface ErrorMessage extends EnvelopeBase {
  type: "error";
  payload: ErrorPayload;
}

export type ServerMessage = StateUpdateMessage | ChallengeMessage | ErrorMessage;

// client -> server

export type EditCommand =
  | {
      command: "set_clamp";
      send: [number, number];
      recv: [number, number];
      position: number;
    }
  | { command: "set_input_lever"; index: number; angle: number }
  | { command: "pin_input"; index: number; value: number | null }
  | { command: "load_gate"; kind: GateName }
  | { command: "reset" };

export interface CreateSessionOptions {
  gate?: GateName;
  challenge?: GateName;
  topology?: number[];
}

export interface ClientFrame {
  v: number;
  type: "create_session" | "apply_edit" | "check_challenge";
  session_id?: string;
  payload: Record<string, unknown>;
}

export function createSessionFrame(opts: CreateSessionOptions): ClientFrame {
  const payload: Record<string, unknown> = {};
  if (opts.gate) payload.gate = opts.gate;
  if (opts.challenge) payload.challenge = opts.challenge;
  if (opts.topology) payload.topology = opts.topology;
  return { v: PROTOCOL_VERSION, type: "create_session", payload };
}

export function applyEditFrame(
  sessionId: string,
  cmd: EditCommand,
  expectedRevision: number,
): ClientFrame {
  return {
    v: PROTOCOL_VERSION,
    type: "apply_edit",
    session_id: sessionId,
    payload: { ...cmd, expected_revision: expectedRevision },
  };
}

export function checkChallengeFrame(
  sessionId: string,
  reveal = false,
): ClientFrame {
  return {
    v: PROTOCOL_VERSION,
    type: "check_challenge",
    session_id: sessionId,
    payload: reveal ? { reveal: true } : {},
  };
}

export function isServerMessage(value: unknown): value is ServerMessage {
  if (typeof value !== "object" || value === null) return false;
  const t = (value as { type?: unknown }).type;
  return t === "state_update" || t === "check_challenge" || t === "error";
}
