"""Session backend for the interactive UI.

One session holds the single authoritative network plus the current input
lever angles; every accepted edit recomputes the forward trace and the
mechanical state and bumps a revision counter.  Edits carry the revision the
client last saw (optimistic concurrency): a stale edit is rejected without
touching anything, which keeps rejected edits trivially atomic.

The wire protocol (see PROTOCOL.md) is JSON messages of the shape
``{"v": 1, "type": ..., "session_id": ..., "revision": ..., "payload": ...}``
with message types create_session, apply_edit, state_update, check_challenge
and error.  Indices on the wire are 0-based like the Python API; the 1-based
convention is reserved for human-facing text artifacts.
"""

from __future__ import annotations

import secrets
import threading
from dataclasses import dataclass, replace
from typing import Any, Mapping, Sequence

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .core import (
    ForwardTrace,
    LeverNetError,
    Network,
    RangeError,
    ShapeError,
    forward,
    pin_input,
    unpin_input,
    zero_network,
)
from .gates import GateKind, GateSpec, TRUTH_TABLES, make_gate, verify_gate
from .mechanics import MechanicalState, mechanical_forward

PROTOCOL_VERSION = 1

# Challenges start from an empty network of the gate's canonical topology;
# the student recreates the wiring (and, for NOT, pins the bias input).
CHALLENGE_TOPOLOGY: dict[GateKind, tuple[int, ...]] = {
    GateKind.AND: (2, 1, 1),
    GateKind.OR: (2, 1, 1),
    GateKind.NOT: (2, 1, 1),
    GateKind.XOR: (2, 2, 1),
}


class SessionError(LeverNetError):
    """Base class for session-level failures; carries a wire error code."""

    code = "session"


class UnknownSessionError(SessionError):
    code = "unknown_session"


class RevisionConflict(SessionError):
    code = "conflict"

    def __init__(self, expected: int, actual: int):
        super().__init__(
            f"edit expected revision {expected}, session is at {actual}"
        )
        self.expected = expected
        self.actual = actual


class NoChallengeError(SessionError):
    code = "no_challenge"


# ---------------------------------------------------------------------------
# edit commands


@dataclass(frozen=True)
class EditCommand:
    expected_revision: int


@dataclass(frozen=True)
class SetClamp(EditCommand):
    """Move one clamp along its lever arc: sets the connection weight."""

    send: tuple[int, int]
    recv: tuple[int, int]
    position: float


@dataclass(frozen=True)
class SetInputLever(EditCommand):
    """Rotate a free input lever to an angle in [-1, 1]."""

    index: int
    angle: float


@dataclass(frozen=True)
class PinInput(EditCommand):
    """Hold an input lever at a fixed angle, or release it (value None)."""

    index: int
    value: float | None


@dataclass(frozen=True)
class LoadGate(EditCommand):
    """Replace the network with a canonical gate configuration."""

    kind: GateKind


@dataclass(frozen=True)
class Reset(EditCommand):
    """Zero all clamps and input levers and release all pins."""


# ---------------------------------------------------------------------------
# sessions


@dataclass(frozen=True)
class Session:
    """One student's machine: immutable snapshot, replaced on every edit."""

    id: str
    network: Network
    input_angles: tuple[float, ...]  # one per free input, in index order
    challenge: GateKind | None
    revision: int

    @property
    def trace(self) -> ForwardTrace:
        return forward(self.network, self.input_angles)

    @property
    def mechanical(self) -> MechanicalState:
        return mechanical_forward(self.network, self.input_angles)


@dataclass(frozen=True)
class EditResult:
    session: Session
    trace: ForwardTrace
    mechanical: MechanicalState
    previous: MechanicalState


@dataclass(frozen=True)
class ChallengeRow:
    bits: tuple[int, ...]
    raw: float | None
    got: bool | None
    expected: bool
    passed: bool


@dataclass(frozen=True)
class ChallengeReport:
    kind: GateKind
    threshold: float
    ready: bool  # false when the network cannot run the table yet
    message: str | None
    rows: tuple[ChallengeRow, ...]
    passed: bool
    reveal: GateSpec | None


def _fresh_inputs(net: Network) -> tuple[float, ...]:
    return (0.0,) * len(net.free_inputs)


class SessionStore:
    """In-memory session registry; single-writer per session."""

    def __init__(self) -> None:
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create(
        self,
        topology: Sequence[int] | None = None,
        challenge: GateKind | str | None = None,
        gate: GateKind | str | None = None,
    ) -> Session:
        """New session: a configured gate, a challenge blank, or a bare net.

        ``gate`` loads the canonical configuration (exploration mode);
        ``challenge`` starts from zero weights so the student builds the gate
        themselves.  With neither, ``topology`` (default 2-4-2) gives an
        empty playground.
        """
        if gate is not None and topology is not None:
            raise ShapeError("give either a gate or a topology, not both")
        challenge_kind = GateKind(challenge) if challenge is not None else None
        if gate is not None:
            network = make_gate(GateKind(gate)).network
        elif challenge_kind is not None and topology is None:
            network = zero_network(CHALLENGE_TOPOLOGY[challenge_kind])
        else:
            network = zero_network(tuple(topology) if topology else (2, 4, 2))
        session = Session(
            id=secrets.token_hex(8),
            network=network,
            input_angles=_fresh_inputs(network),
            challenge=challenge_kind,
            revision=0,
        )
        with self._lock:
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            try:
                return self._sessions[session_id]
            except KeyError:
                raise UnknownSessionError(
                    f"no session {session_id!r}"
                ) from None

    def drop(self, session_id: str) -> None:
        with self._lock:
            self._sessions.pop(session_id, None)

    def apply(self, session_id: str, cmd: EditCommand) -> EditResult:
        """Apply one edit atomically; stale revisions reject without mutation."""
        with self._lock:
            try:
                session = self._sessions[session_id]
            except KeyError:
                raise UnknownSessionError(
                    f"no session {session_id!r}"
                ) from None
            if cmd.expected_revision != session.revision:
                raise RevisionConflict(cmd.expected_revision, session.revision)
            previous = session.mechanical
            # _edit raises before anything is swapped in, so a failed edit
            # leaves the stored session untouched
            network, angles = _edit(session, cmd)
            updated = replace(
                session,
                network=network,
                input_angles=angles,
                revision=session.revision + 1,
            )
            self._sessions[session_id] = updated
        return EditResult(
            session=updated,
            trace=updated.trace,
            mechanical=updated.mechanical,
            previous=previous,
        )

    def check(self, session_id: str, reveal: bool = False) -> ChallengeReport:
        session = self.get(session_id)
        if session.challenge is None:
            raise NoChallengeError("session has no challenge set")
        return check_challenge(session.network, session.challenge, reveal)


def _edit(
    session: Session, cmd: EditCommand
) -> tuple[Network, tuple[float, ...]]:
    net = session.network
    angles = session.input_angles

    if isinstance(cmd, SetClamp):
        send_layer, send_idx = (int(v) for v in cmd.send)
        recv_layer, recv_idx = (int(v) for v in cmd.recv)
        if recv_layer != send_layer + 1:
            raise ShapeError("a clamp connects a lever to the next layer only")
        if not 0 <= send_layer < len(net.weights):
            raise ShapeError(f"no connections leave layer {send_layer}")
        position = float(cmd.position)
        if not -1.0 <= position <= 1.0:
            raise RangeError(
                f"clamp position must lie in [-1, 1], got {position!r}"
            )
        return net.with_weight(send_layer, recv_idx, send_idx, position), angles

    if isinstance(cmd, SetInputLever):
        index = int(cmd.index)
        free = net.free_inputs
        if index in net.pinned:
            raise RangeError(f"input {index} is pinned; release it first")
        if index not in free:
            raise ShapeError(f"no input lever {index}")
        angle = float(cmd.angle)
        if not -1.0 <= angle <= 1.0:
            raise RangeError(f"lever angle must lie in [-1, 1], got {angle!r}")
        slot = free.index(index)
        new_angles = list(angles)
        new_angles[slot] = angle
        return net, tuple(new_angles)

    if isinstance(cmd, PinInput):
        index = int(cmd.index)
        if cmd.value is None:
            released = unpin_input(net, index)
            # the released lever reappears horizontal
            slot = released.free_inputs.index(index)
            new_angles = list(angles)
            new_angles.insert(slot, 0.0)
            return released, tuple(new_angles)
        pinned = pin_input(net, index, float(cmd.value))
        if index in net.pinned:
            return pinned, angles  # re-pin: free inputs unchanged
        slot = net.free_inputs.index(index)
        new_angles = list(angles)
        del new_angles[slot]
        return pinned, tuple(new_angles)

    if isinstance(cmd, LoadGate):
        loaded = make_gate(GateKind(cmd.kind)).network
        return loaded, _fresh_inputs(loaded)

    if isinstance(cmd, Reset):
        blank = zero_network(net.layer_sizes)
        return blank, _fresh_inputs(blank)

    raise ShapeError(f"unknown edit command {type(cmd).__name__}")


def check_challenge(
    network: Network, kind: GateKind, reveal: bool = False
) -> ChallengeReport:
    """Grade the student's network against the challenge truth table.

    The canonical weights stay hidden unless ``reveal`` is set; the report
    only says which rows pass.  A network whose free-input count does not
    match the gate arity (NOT before the student pins a bias input) is
    reported not-ready instead of failing.
    """
    canonical = make_gate(kind)
    table = TRUTH_TABLES[kind]
    free = len(network.free_inputs)
    if free != table.arity:
        rows = tuple(
            ChallengeRow(
                bits=bits, raw=None, got=None, expected=bool(exp), passed=False
            )
            for bits, exp in table.rows
        )
        message = (
            f"the {kind.value} table takes {table.arity} input(s) but the "
            f"network has {free} free input lever(s)"
        )
        if kind is GateKind.NOT and free == 2:
            message += "; pin one input fully clockwise to use it as a bias"
        return ChallengeReport(
            kind=kind,
            threshold=canonical.threshold,
            ready=False,
            message=message,
            rows=rows,
            passed=False,
            reveal=canonical if reveal else None,
        )

    spec = GateSpec(
        kind=kind,
        network=network,
        threshold=canonical.threshold,
        arity=table.arity,
    )
    report = verify_gate(spec)
    rows = tuple(
        ChallengeRow(
            bits=r.bits,
            raw=r.raw,
            got=r.got,
            expected=r.expected,
            passed=r.passed,
        )
        for r in report.rows
    )
    return ChallengeReport(
        kind=kind,
        threshold=canonical.threshold,
        ready=True,
        message=None,
        rows=rows,
        passed=report.passed,
        reveal=canonical if reveal else None,
    )


# ---------------------------------------------------------------------------
# wire payloads
#
# Everything below is plain JSON-able data.  numpy scalars are converted to
# Python floats so the encoder never sees them.


def _floats(arr) -> list[float]:
    return [float(v) for v in np.asarray(arr).ravel()]


def _matrix(arr) -> list[list[float]]:
    return [[float(v) for v in row] for row in np.asarray(arr)]


def network_payload(net: Network) -> dict[str, Any]:
    return {
        "layer_sizes": list(net.layer_sizes),
        "weights": [_matrix(w) for w in net.weights],
        "pinned": {str(i): float(v) for i, v in net.pinned.items()},
        "free_inputs": list(net.free_inputs),
    }


def trace_payload(trace: ForwardTrace) -> dict[str, Any]:
    return {
        "outputs": [_floats(o) for o in trace.outputs],
        "nets": [None] + [_floats(n) for n in trace.nets[1:]],
        "slack": [None] + [[bool(b) for b in s] for s in trace.slack[1:]],
    }


def mechanical_payload(state: MechanicalState) -> dict[str, Any]:
    # raw (unclipped) pulley results stay internal; angles, displacements
    # and taut flags carry everything the UI may show
    return {
        "angles": [_floats(a) for a in state.angles],
        "string_displacements": [_matrix(d) for d in state.string_displacements],
        "pulley_outputs": [_floats(p) for p in state.pulley_outputs],
        "taut": [[bool(b) for b in t] for t in state.taut],
        "pulleys": [
            {
                "fan_in": p.fan_in,
                "stages": p.stages,
                "attachment_fraction": p.attachment_fraction,
            }
            for p in state.pulleys
        ],
    }


def mechanical_delta(
    previous: MechanicalState | None, current: MechanicalState
) -> dict[str, Any]:
    """Changed lever angles and taut flags, as [layer, index, value] triples."""
    angles = []
    taut = []
    for k, arr in enumerate(current.angles):
        for i in range(arr.size):
            val = float(arr[i])
            if previous is None or float(previous.angles[k][i]) != val:
                angles.append([k, i, val])
    for k, arr in enumerate(current.taut):
        for i in range(arr.size):
            val = bool(arr[i])
            if previous is None or bool(previous.taut[k][i]) != val:
                taut.append([k + 1, i, val])
    return {"angles": angles, "taut": taut}


def state_update_message(
    session: Session,
    trace: ForwardTrace,
    mechanical: MechanicalState,
    previous: MechanicalState | None = None,
) -> dict[str, Any]:
    return {
        "v": PROTOCOL_VERSION,
        "type": "state_update",
        "session_id": session.id,
        "revision": session.revision,
        "payload": {
            "network": network_payload(session.network),
            "input_angles": list(session.input_angles),
            "challenge": session.challenge.value if session.challenge else None,
            "trace": trace_payload(trace),
            "mechanical": mechanical_payload(mechanical),
            "mechanical_delta": mechanical_delta(previous, mechanical),
        },
    }


def challenge_message(session: Session, report: ChallengeReport) -> dict[str, Any]:
    payload: dict[str, Any] = {
        "kind": report.kind.value,
        "threshold": report.threshold,
        "ready": report.ready,
        "message": report.message,
        "passed": report.passed,
        "rows": [
            {
                "bits": list(r.bits),
                "raw": r.raw,
                "got": r.got,
                "expected": r.expected,
                "passed": r.passed,
            }
            for r in report.rows
        ],
    }
    if report.reveal is not None:
        spec = report.reveal
        payload["reveal"] = {
            "network": network_payload(spec.network),
            "threshold": spec.threshold,
        }
    return {
        "v": PROTOCOL_VERSION,
        "type": "check_challenge",
        "session_id": session.id,
        "revision": session.revision,
        "payload": payload,
    }


def error_message(
    code: str,
    message: str,
    session_id: str | None = None,
    revision: int | None = None,
    **extra: Any,
) -> dict[str, Any]:
    payload = {"code": code, "message": message}
    payload.update(extra)
    return {
        "v": PROTOCOL_VERSION,
        "type": "error",
        "session_id": session_id,
        "revision": revision,
        "payload": payload,
    }


# ---------------------------------------------------------------------------
# message handling (transport-independent)

_GATE_NAMES = {k.value for k in GateKind}


def _parse_command(payload: Mapping[str, Any]) -> EditCommand:
    if not isinstance(payload, Mapping):
        raise ShapeError("apply_edit payload must be an object")
    try:
        expected = int(payload["expected_revision"])
        command = payload["command"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ShapeError(
            "apply_edit payload needs command and expected_revision"
        ) from exc
    try:
        if command == "set_clamp":
            send = payload["send"]
            recv = payload["recv"]
            return SetClamp(
                expected_revision=expected,
                send=(int(send[0]), int(send[1])),
                recv=(int(recv[0]), int(recv[1])),
                position=float(payload["position"]),
            )
        if command == "set_input_lever":
            return SetInputLever(
                expected_revision=expected,
                index=int(payload["index"]),
                angle=float(payload["angle"]),
            )
        if command == "pin_input":
            value = payload.get("value")
            return PinInput(
                expected_revision=expected,
                index=int(payload["index"]),
                value=None if value is None else float(value),
            )
        if command == "load_gate":
            kind = payload["kind"]
            if kind not in _GATE_NAMES:
                raise ShapeError(f"unknown gate kind {kind!r}")
            return LoadGate(expected_revision=expected, kind=GateKind(kind))
        if command == "reset":
            return Reset(expected_revision=expected)
    except (KeyError, TypeError, IndexError) as exc:
        raise ShapeError(f"malformed {command} command: {exc}") from exc
    raise ShapeError(f"unknown edit command {command!r}")


def handle_message(
    store: SessionStore, msg: Mapping[str, Any]
) -> dict[str, Any]:
    """Process one client message, returning the reply message.

    Transport-agnostic so tests and fixture recording can drive it directly.
    """
    if not isinstance(msg, Mapping) or "type" not in msg:
        return error_message("bad_message", "message must have a type field")
    mtype = msg["type"]
    session_id = msg.get("session_id")
    payload = msg.get("payload") or {}

    try:
        if mtype == "create_session":
            if not isinstance(payload, Mapping):
                return error_message("bad_message", "payload must be an object")
            gate = payload.get("gate")
            challenge = payload.get("challenge")
            for name in (gate, challenge):
                if name is not None and name not in _GATE_NAMES:
                    return error_message(
                        "bad_message", f"unknown gate kind {name!r}"
                    )
            session = store.create(
                topology=payload.get("topology"),
                challenge=challenge,
                gate=gate,
            )
            return state_update_message(
                session, session.trace, session.mechanical, previous=None
            )

        if mtype == "apply_edit":
            if not isinstance(session_id, str):
                return error_message("bad_message", "apply_edit needs session_id")
            cmd = _parse_command(payload)
            result = store.apply(session_id, cmd)
            return state_update_message(
                result.session,
                result.trace,
                result.mechanical,
                previous=result.previous,
            )

        if mtype == "check_challenge":
            if not isinstance(session_id, str):
                return error_message(
                    "bad_message", "check_challenge needs session_id"
                )
            reveal = bool(payload.get("reveal", False))
            report = store.check(session_id, reveal=reveal)
            return challenge_message(store.get(session_id), report)

        return error_message(
            "bad_message", f"unknown message type {mtype!r}", session_id
        )

    except RevisionConflict as exc:
        actual = exc.actual
        return error_message(
            "conflict",
            str(exc),
            session_id,
            revision=actual,
            expected_revision=exc.expected,
            actual_revision=actual,
        )
    except UnknownSessionError as exc:
        return error_message("unknown_session", str(exc), session_id)
    except NoChallengeError as exc:
        sid = session_id if isinstance(session_id, str) else None
        rev = store.get(sid).revision if sid else None
        return error_message("no_challenge", str(exc), sid, revision=rev)
    except RangeError as exc:
        return error_message("range", str(exc), session_id)
    except (ShapeError, IndexError) as exc:
        return error_message("shape", str(exc), session_id)


# ---------------------------------------------------------------------------
# ASGI app


def create_app(store: SessionStore | None = None) -> FastAPI:
    """FastAPI app exposing the store over a WebSocket at /ws."""
    app = FastAPI(title="levernet session service")
    app.state.store = store if store is not None else SessionStore()

    @app.get("/health")
    def health() -> dict[str, Any]:
        return {"status": "ok", "protocol": PROTOCOL_VERSION}

    @app.websocket("/ws")
    async def ws(websocket: WebSocket) -> None:
        await websocket.accept()
        try:
            while True:
                try:
                    msg = await websocket.receive_json()
                except ValueError:
                    await websocket.send_json(
                        error_message("bad_message", "frame is not valid JSON")
                    )
                    continue
                await websocket.send_json(handle_message(app.state.store, msg))
        except WebSocketDisconnect:
            pass

    return app
