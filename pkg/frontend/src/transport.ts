// Transports: a thin WebSocket wrapper for the real backend and a mock that
// replays frames recorded from it (tests/fixtures/*.json, written by
// scripts/record_ui_fixtures.py in the backend repo).

import { ClientFrame, ServerMessage, isServerMessage } from "./protocol.js";

export interface Transport {
  send(frame: ClientFrame): void;
  onMessage(cb: (msg: ServerMessage) => void): void;
  onClose(cb: () => void): void;
  close(): void;
}

export class WsTransport implements Transport {
  private socket: WebSocket;
  private messageCb: (msg: ServerMessage) => void = () => {};
  private closeCb: () => void = () => {};
  private openCb: () => void = () => {};

  constructor(url: string) {
    this.socket = new WebSocket(url);
    this.socket.onopen = () => this.openCb();
    this.socket.onmessage = (evt) => {
      let parsed: unknown;
      try {
        parsed = JSON.parse(String(evt.data));
      } catch {
        console.error("unparseable frame", evt.data);
        return;
      }
      if (isServerMessage(parsed)) this.messageCb(parsed);
    };
    this.socket.onclose = () => this.closeCb();
    this.socket.onerror = () => this.closeCb();
  }

  send(frame: ClientFrame): void {
    if (this.socket.readyState !== WebSocket.OPEN) return;
    this.socket.send(JSON.stringify(frame));
  }

  onMessage(cb: (msg: ServerMessage) => void): void {
    this.messageCb = cb;
  }

  onClose(cb: () => void): void {
    this.closeCb = cb;
  }

  /** Fires once the socket is ready; send() before that silently drops. */
  onOpen(cb: () => void): void {
    this.openCb = cb;
  }

  close(): void {
    this.socket.close();
  }
}

export interface RecordedFrame {
  send: ClientFrame & { session_id?: string };
  recv: ServerMessage;
}

function deepEqual(a: unknown, b: unknown): boolean {
  if (a === b) return true;
  if (typeof a !== typeof b) return false;
  if (typeof a !== "object" || a === null || b === null) return false;
  if (Array.isArray(a) !== Array.isArray(b)) return false;
  const ka = Object.keys(a as object).sort();
  const kb = Object.keys(b as object).sort();
  if (ka.length !== kb.length) return false;
  return ka.every(
    (k, i) =>
      k === kb[i] &&
      deepEqual(
        (a as Record<string, unknown>)[k],
        (b as Record<string, unknown>)[k],
      ),
  );
}

/**
 * Replays a recorded exchange. Each send() must match the next recorded
 * client frame (type and payload; session_id is taken from the recording
 * since ids are minted per recording run), and the recorded server reply is
 * delivered asynchronously. A mismatch throws: the client diverged from the
 * protocol as actually spoken by the backend.
 */
export class MockTransport implements Transport {
  private frames: RecordedFrame[];
  private cursor = 0;
  private messageCb: (msg: ServerMessage) => void = () => {};
  private closeCb: () => void = () => {};
  private pending = 0;
  private closed = false;

  /** frames sent after close(), which a correct client never produces */
  sentWhileClosed: ClientFrame[] = [];

  constructor(frames: RecordedFrame[]) {
    this.frames = frames;
  }

  /** The session id the recording ran under, for building client frames. */
  get sessionId(): string {
    const withId = this.frames.find((f) => f.recv.session_id);
    if (!withId || !withId.recv.session_id) {
      throw new Error("recording has no session id");
    }
    return withId.recv.session_id;
  }

  send(frame: ClientFrame): void {
    if (this.closed) {
      this.sentWhileClosed.push(frame);
      return;
    }
    const expected = this.frames[this.cursor];
    if (!expected) {
      throw new Error(`unexpected frame past end of recording: ${frame.type}`);
    }
    if (
      frame.type !== expected.send.type ||
      !deepEqual(frame.payload, expected.send.payload)
    ) {
      throw new Error(
        `frame ${this.cursor} diverges from recording:\n` +
          `sent     ${JSON.stringify(frame)}\n` +
          `recorded ${JSON.stringify(expected.send)}`,
      );
    }
    this.cursor += 1;
    this.pending += 1;
    queueMicrotask(() => {
      this.pending -= 1;
      if (!this.closed) this.messageCb(expected.recv);
    });
  }

  onMessage(cb: (msg: ServerMessage) => void): void {
    this.messageCb = cb;
  }

  onClose(cb: () => void): void {
    this.closeCb = cb;
  }

  close(): void {
    if (this.closed) return;
    this.closed = true;
    this.closeCb();
  }

  /** Resolves once in-flight replies have been delivered. */
  async flush(): Promise<void> {
    while (this.pending > 0) {
      await new Promise((resolve) => setTimeout(resolve, 0));
    }
    await Promise.resolve();
  }

  get exhausted(): boolean {
    return this.cursor === this.frames.length;
  }
}
