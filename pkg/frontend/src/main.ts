// Browser entry point. Query parameters pick the backend and the session:
//
//   ?ws=ws://localhost:8000/ws   backend WebSocket endpoint (this is the default)
//   ?gate=xor                    start from a canonical gate network
//   ?challenge=xor               start a blank challenge to wire up by hand
//   ?topology=2,3,1              start from a zeroed custom topology
//
// Exactly one of gate/challenge/topology, or none for the default network.

import { CreateSessionOptions, GateName } from "./protocol.js";
import { Renderer } from "./render.js";
import { SessionStore } from "./store.js";
import { WsTransport } from "./transport.js";

const GATE_NAMES: ReadonlyArray<GateName> = ["and", "or", "not", "xor"];

function asGate(value: string | null): GateName | undefined {
  return GATE_NAMES.find((g) => g === value);
}

function sessionOptions(params: URLSearchParams): CreateSessionOptions {
  const opts: CreateSessionOptions = {};
  const gate = asGate(params.get("gate"));
  const challenge = asGate(params.get("challenge"));
  const topology = params.get("topology");
  if (gate) opts.gate = gate;
  else if (challenge) opts.challenge = challenge;
  else if (topology) {
    const sizes = topology
      .split(",")
      .map((s) => Number.parseInt(s.trim(), 10))
      .filter((n) => Number.isFinite(n) && n > 0);
    if (sizes.length >= 2) opts.topology = sizes;
  }
  return opts;
}

function start(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");
  const params = new URLSearchParams(window.location.search);
  const url = params.get("ws") ?? "ws://localhost:8000/ws";

  const transport = new WsTransport(url);
  const store = new SessionStore(transport);
  new Renderer(root, store);
  transport.onOpen(() => store.createSession(sessionOptions(params)));
}

start();
