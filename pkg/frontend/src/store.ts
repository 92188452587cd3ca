// Session store: the single client-side copy of server-acknowledged state.
//
// Nothing in here computes a forward pass. Lever angles, slack flags and
// challenge results are copied verbatim from server frames; between an edit
// being sent and its state_update arriving, the display keeps showing the
// last acknowledged revision. On disconnect the state freezes read-only.

import {
  ChallengePayload,
  CreateSessionOptions,
  EditCommand,
  ErrorPayload,
  GateName,
  MechanicalPayload,
  NetworkPayload,
  ServerMessage,
  StateUpdatePayload,
  TracePayload,
  applyEditFrame,
  checkChallengeFrame,
  createSessionFrame,
} from "./protocol.js";
import { Transport } from "./transport.js";

export type Connection = "connecting" | "live" | "closed";

export interface SessionState {
  connection: Connection;
  sessionId: string | null;
  /** latest server-acknowledged revision */
  revision: number;
  network: NetworkPayload | null;
  inputAngles: number[];
  challenge: GateName | null;
  trace: TracePayload | null;
  mechanical: MechanicalPayload | null;
  challengeReport: ChallengePayload | null;
  lastError: ErrorPayload | null;
}

const INITIAL: SessionState = {
  connection: "connecting",
  sessionId: null,
  revision: 0,
  network: null,
  inputAngles: [],
  challenge: null,
  trace: null,
  mechanical: null,
  challengeReport: null,
  lastError: null,
};

type Listener = (state: SessionState) => void;

export class SessionStore {
  private transport: Transport;
  private state: SessionState = INITIAL;
  private listeners: Listener[] = [];
  // edits wait here until the previous one is acknowledged, so every frame
  // carries the revision the server will actually be at
  private queue: EditCommand[] = [];
  private inFlight = false;

  constructor(transport: Transport) {
    this.transport = transport;
    transport.onMessage((msg) => this.receive(msg));
    transport.onClose(() => {
      this.patch({ connection: "closed" });
    });
  }

  get current(): SessionState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  createSession(opts: CreateSessionOptions): void {
    this.transport.send(createSessionFrame(opts));
  }

  /** Queue one edit; it is sent once every earlier edit is acknowledged. */
  queueEdit(cmd: EditCommand): void {
    if (this.state.connection === "closed") return; // frozen
    this.queue.push(cmd);
    this.pump();
  }

  checkChallenge(reveal = false): void {
    if (this.state.connection === "closed" || !this.state.sessionId) return;
    this.transport.send(checkChallengeFrame(this.state.sessionId, reveal));
  }

  private pump(): void {
    if (this.inFlight || this.queue.length === 0) return;
    if (!this.state.sessionId || this.state.connection !== "live") return;
    const cmd = this.queue.shift() as EditCommand;
    this.inFlight = true;
    this.transport.send(
      applyEditFrame(this.state.sessionId, cmd, this.state.revision),
    );
  }

  private receive(msg: ServerMessage): void {
    if (msg.type === "state_update") {
      const payload: StateUpdatePayload = msg.payload;
      this.inFlight = false;
      this.patch({
        connection: "live",
        sessionId: msg.session_id,
        revision: msg.revision ?? 0,
        network: payload.network,
        inputAngles: payload.input_angles,
        challenge: payload.challenge,
        trace: payload.trace,
        mechanical: payload.mechanical,
        lastError: null,
      });
    } else if (msg.type === "check_challenge") {
      this.patch({ challengeReport: msg.payload });
    } else {
      // surfaced verbatim; a conflict additionally tells us where the
      // session really is, so later edits are tagged correctly
      this.inFlight = false;
      const patch: Partial<SessionState> = { lastError: msg.payload };
      if (msg.payload.code === "conflict" && msg.revision !== null) {
        patch.revision = msg.revision;
      }
      this.patch(patch);
    }
    this.pump();
  }

  private patch(partial: Partial<SessionState>): void {
    this.state = { ...this.state, ...partial };
    for (const listener of this.listeners) listener(this.state);
  }
}
