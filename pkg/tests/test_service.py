"""Session service tests: store semantics, challenge checks, wire protocol.

The store is exercised directly for the state-machine contracts (atomicity,
optimistic concurrency, consistency with a fresh forward pass) and through
the WebSocket endpoint for the message protocol.
"""

import numpy as np
import pytest
from fastapi.testclient import TestClient

from levernet import GateKind, forward, make_gate, zero_network
from levernet.service import (
    LoadGate,
    NoChallengeError,
    PinInput,
    Reset,
    RevisionConflict,
    SessionStore,
    SetClamp,
    SetInputLever,
    UnknownSessionError,
    check_challenge,
    create_app,
    handle_message,
)
from levernet.core import RangeError, ShapeError

XOR_CLAMPS = [
    ((0, 0), (1, 0), 1.0),
    ((0, 1), (1, 0), -1.0),
    ((0, 0), (1, 1), -1.0),
    ((0, 1), (1, 1), 1.0),
    ((1, 0), (2, 0), 1.0),
    ((1, 1), (2, 0), 1.0),
]


# ---------------------------------------------------------------------------
# store


def test_create_default_session():
    store = SessionStore()
    s = store.create()
    assert s.revision == 0
    assert s.network == zero_network((2, 4, 2))
    assert s.input_angles == (0.0, 0.0)
    assert s.challenge is None
    assert store.get(s.id) == s


def test_create_gate_session():
    store = SessionStore()
    s = store.create(gate="xor")
    assert s.network == make_gate(GateKind.XOR).network
    assert s.input_angles == (0.0, 0.0)


def test_create_challenge_session_starts_blank():
    store = SessionStore()
    s = store.create(challenge="xor")
    assert s.challenge is GateKind.XOR
    assert s.network == zero_network((2, 2, 1))


def test_create_rejects_gate_plus_topology():
    with pytest.raises(ShapeError):
        SessionStore().create(gate="xor", topology=(2, 2, 1))


def test_unknown_session():
    store = SessionStore()
    with pytest.raises(UnknownSessionError):
        store.get("missing")
    with pytest.raises(UnknownSessionError):
        store.apply("missing", Reset(expected_revision=0))


def test_set_input_lever_drives_the_output():
    store = SessionStore()
    s = store.create(gate="xor")
    result = store.apply(s.id, SetInputLever(expected_revision=0, index=0, angle=1.0))
    assert result.session.revision == 1
    assert result.session.input_angles == (1.0, 0.0)
    assert float(result.trace.output[0]) == 1.0
    assert result.mechanical.angle(2, 0) == 1.0


def test_zeroing_every_clamp_kills_the_output():
    store = SessionStore()
    s = store.create(gate="xor")
    rev = 0
    for send, recv, _ in XOR_CLAMPS:
        store.apply(
            s.id,
            SetClamp(expected_revision=rev, send=send, recv=recv, position=0.0),
        )
        rev += 1
    store.apply(s.id, SetInputLever(expected_revision=rev, index=0, angle=1.0))
    current = store.get(s.id)
    assert np.all(current.trace.output == 0.0)
    assert current.network == zero_network((2, 2, 1))


def test_stale_revision_rejected_without_mutation():
    store = SessionStore()
    s = store.create(gate="xor")
    store.apply(s.id, SetInputLever(expected_revision=0, index=0, angle=1.0))
    before = store.get(s.id)
    with pytest.raises(RevisionConflict) as exc:
        store.apply(s.id, SetInputLever(expected_revision=0, index=1, angle=1.0))
    assert exc.value.expected == 0
    assert exc.value.actual == 1
    assert store.get(s.id) is before  # the very same snapshot object


def test_invalid_edit_rejected_without_mutation():
    store = SessionStore()
    s = store.create(gate="xor")
    before = store.get(s.id)
    with pytest.raises(RangeError):
        store.apply(
            s.id,
            SetClamp(expected_revision=0, send=(0, 0), recv=(1, 0), position=1.5),
        )
    with pytest.raises(ShapeError):
        store.apply(
            s.id,
            SetClamp(expected_revision=0, send=(0, 0), recv=(2, 0), position=0.5),
        )
    with pytest.raises(RangeError):
        store.apply(s.id, SetInputLever(expected_revision=0, index=0, angle=-2.0))
    with pytest.raises(ShapeError):
        store.apply(s.id, SetInputLever(expected_revision=0, index=9, angle=0.0))
    assert store.get(s.id) is before


def test_revisions_increase_by_one_per_accepted_edit():
    store = SessionStore()
    s = store.create()
    seen = [store.get(s.id).revision]
    for n in range(4):
        result = store.apply(
            s.id, SetInputLever(expected_revision=n, index=0, angle=0.25)
        )
        seen.append(result.session.revision)
    assert seen == [0, 1, 2, 3, 4]


def test_returned_trace_matches_fresh_forward():
    store = SessionStore()
    s = store.create(gate="xor")
    result = store.apply(
        s.id, SetInputLever(expected_revision=0, index=0, angle=0.75)
    )
    fresh = forward(result.session.network, result.session.input_angles)
    for got, want in zip(result.trace.outputs, fresh.outputs):
        assert np.all(np.abs(got - want) <= 1e-12)


def test_pin_and_release_input_lever():
    store = SessionStore()
    s = store.create(gate="not")  # input 1 already pinned as the bias
    assert store.get(s.id).input_angles == (0.0,)

    with pytest.raises(RangeError):
        store.apply(s.id, SetInputLever(expected_revision=0, index=1, angle=0.5))

    store.apply(s.id, PinInput(expected_revision=0, index=1, value=None))
    assert store.get(s.id).network.pinned == {}
    assert store.get(s.id).input_angles == (0.0, 0.0)

    store.apply(s.id, PinInput(expected_revision=1, index=1, value=1.0))
    assert dict(store.get(s.id).network.pinned) == {1: 1.0}
    assert store.get(s.id).input_angles == (0.0,)


def test_load_gate_and_reset():
    store = SessionStore()
    s = store.create(challenge="xor")
    store.apply(s.id, SetInputLever(expected_revision=0, index=0, angle=1.0))
    store.apply(s.id, LoadGate(expected_revision=1, kind=GateKind.XOR))
    loaded = store.get(s.id)
    assert loaded.network == make_gate(GateKind.XOR).network
    assert loaded.input_angles == (0.0, 0.0)
    assert loaded.challenge is GateKind.XOR  # challenge survives loading

    store.apply(s.id, Reset(expected_revision=2))
    reset = store.get(s.id)
    assert reset.network == zero_network((2, 2, 1))
    assert reset.challenge is GateKind.XOR


# ---------------------------------------------------------------------------
# challenges


def test_check_requires_a_challenge():
    store = SessionStore()
    s = store.create(gate="xor")
    with pytest.raises(NoChallengeError):
        store.check(s.id)


def test_blank_network_passes_only_false_rows():
    report = check_challenge(zero_network((2, 2, 1)), GateKind.XOR)
    assert report.ready
    assert not report.passed
    by_bits = {r.bits: r.passed for r in report.rows}
    assert by_bits == {(0, 0): True, (0, 1): False, (1, 0): False, (1, 1): True}


def test_student_solving_xor_passes_all_rows():
    store = SessionStore()
    s = store.create(challenge="xor")
    rev = 0
    for send, recv, position in XOR_CLAMPS:
        store.apply(
            s.id,
            SetClamp(expected_revision=rev, send=send, recv=recv, position=position),
        )
        rev += 1
    report = store.check(s.id)
    assert report.passed
    assert all(r.passed for r in report.rows)
    assert report.reveal is None


def test_not_challenge_needs_a_pinned_bias_first():
    store = SessionStore()
    s = store.create(challenge="not")
    report = store.check(s.id)
    assert not report.ready
    assert not report.passed
    assert "pin one input" in report.message
    assert all(r.raw is None for r in report.rows)

    store.apply(s.id, PinInput(expected_revision=0, index=1, value=1.0))
    store.apply(
        s.id, SetClamp(expected_revision=1, send=(0, 0), recv=(1, 0), position=-1.0)
    )
    store.apply(
        s.id, SetClamp(expected_revision=2, send=(0, 1), recv=(1, 0), position=1.0)
    )
    store.apply(
        s.id, SetClamp(expected_revision=3, send=(1, 0), recv=(2, 0), position=1.0)
    )
    report = store.check(s.id)
    assert report.ready
    assert report.passed


def test_reveal_returns_the_canonical_spec():
    report = check_challenge(zero_network((2, 2, 1)), GateKind.XOR, reveal=True)
    assert report.reveal is not None
    assert report.reveal.network == make_gate(GateKind.XOR).network
    assert report.reveal.threshold == 0.5


# ---------------------------------------------------------------------------
# message handling (transport-independent)


def _create(store, payload=None):
    return handle_message(
        store, {"v": 1, "type": "create_session", "payload": payload or {}}
    )


def test_create_session_message_shape():
    store = SessionStore()
    msg = _create(store, {"gate": "xor"})
    assert msg["v"] == 1
    assert msg["type"] == "state_update"
    assert isinstance(msg["session_id"], str)
    assert msg["revision"] == 0
    payload = msg["payload"]
    assert payload["network"]["layer_sizes"] == [2, 2, 1]
    assert payload["network"]["weights"][0] == [[1.0, -1.0], [-1.0, 1.0]]
    assert payload["input_angles"] == [0.0, 0.0]
    assert payload["trace"]["outputs"][-1] == [0.0]
    assert payload["trace"]["nets"][0] is None
    assert payload["mechanical"]["angles"] == payload["trace"]["outputs"]
    # initial delta covers every lever
    assert len(payload["mechanical_delta"]["angles"]) == 5


def test_apply_edit_message_round_trip():
    store = SessionStore()
    created = _create(store, {"gate": "xor"})
    sid = created["session_id"]
    reply = handle_message(
        store,
        {
            "v": 1,
            "type": "apply_edit",
            "session_id": sid,
            "payload": {
                "command": "set_input_lever",
                "index": 0,
                "angle": 1.0,
                "expected_revision": 0,
            },
        },
    )
    assert reply["type"] == "state_update"
    assert reply["revision"] == 1
    assert reply["payload"]["trace"]["outputs"][-1] == [1.0]
    delta = reply["payload"]["mechanical_delta"]["angles"]
    # input lever 0, hidden lever 0 and the output lever moved
    assert [e[:2] for e in delta] == [[0, 0], [1, 0], [2, 0]]


def test_pulley_payload_describes_the_reduction():
    store = SessionStore()
    msg = _create(store)  # default 2-4-2
    pulleys = msg["payload"]["mechanical"]["pulleys"]
    assert pulleys[0] == {"fan_in": 2, "stages": 1, "attachment_fraction": 0.5}
    assert pulleys[1] == {"fan_in": 4, "stages": 2, "attachment_fraction": 0.25}


def test_conflict_error_message():
    store = SessionStore()
    sid = _create(store, {"gate": "xor"})["session_id"]
    edit = {
        "v": 1,
        "type": "apply_edit",
        "session_id": sid,
        "payload": {
            "command": "set_input_lever",
            "index": 0,
            "angle": 1.0,
            "expected_revision": 0,
        },
    }
    assert handle_message(store, edit)["type"] == "state_update"
    reply = handle_message(store, edit)  # same expected_revision again
    assert reply["type"] == "error"
    assert reply["payload"]["code"] == "conflict"
    assert reply["payload"]["expected_revision"] == 0
    assert reply["payload"]["actual_revision"] == 1
    assert reply["revision"] == 1


def test_error_codes():
    store = SessionStore()
    sid = _create(store, {"gate": "xor"})["session_id"]

    def edit(payload):
        return handle_message(
            store,
            {"v": 1, "type": "apply_edit", "session_id": sid, "payload": payload},
        )

    out_of_range = edit(
        {"command": "set_clamp", "send": [0, 0], "recv": [1, 0],
         "position": 2.0, "expected_revision": 0}
    )
    assert out_of_range["payload"]["code"] == "range"

    bad_command = edit({"command": "warp", "expected_revision": 0})
    assert bad_command["payload"]["code"] == "shape"

    missing_fields = edit({"command": "set_clamp", "expected_revision": 0})
    assert missing_fields["payload"]["code"] == "shape"

    unknown = handle_message(
        store,
        {"v": 1, "type": "apply_edit", "session_id": "nope",
         "payload": {"command": "reset", "expected_revision": 0}},
    )
    assert unknown["payload"]["code"] == "unknown_session"

    no_challenge = handle_message(
        store, {"v": 1, "type": "check_challenge", "session_id": sid, "payload": {}}
    )
    assert no_challenge["payload"]["code"] == "no_challenge"

    bad_type = handle_message(store, {"v": 1, "type": "bogus"})
    assert bad_type["payload"]["code"] == "bad_message"

    untyped = handle_message(store, {"hello": "world"})
    assert untyped["payload"]["code"] == "bad_message"

    bad_gate = handle_message(
        store, {"v": 1, "type": "create_session", "payload": {"gate": "nand"}}
    )
    assert bad_gate["payload"]["code"] == "bad_message"


def test_check_challenge_message_reveal():
    store = SessionStore()
    sid = _create(store, {"challenge": "and"})["session_id"]
    reply = handle_message(
        store,
        {"v": 1, "type": "check_challenge", "session_id": sid,
         "payload": {"reveal": True}},
    )
    assert reply["type"] == "check_challenge"
    assert reply["payload"]["kind"] == "and"
    assert reply["payload"]["threshold"] == 1.0
    assert reply["payload"]["reveal"]["network"]["weights"][0] == [[0.5, 0.5]]


# ---------------------------------------------------------------------------
# websocket endpoint


def test_health_endpoint():
    client = TestClient(create_app())
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok", "protocol": 1}


def test_websocket_session_flow():
    client = TestClient(create_app())
    with client.websocket_connect("/ws") as ws:
        ws.send_json({"v": 1, "type": "create_session", "payload": {"challenge": "xor"}})
        created = ws.receive_json()
        assert created["type"] == "state_update"
        sid = created["session_id"]

        rev = 0
        for send, recv, position in XOR_CLAMPS:
            ws.send_json(
                {
                    "v": 1,
                    "type": "apply_edit",
                    "session_id": sid,
                    "payload": {
                        "command": "set_clamp",
                        "send": list(send),
                        "recv": list(recv),
                        "position": position,
                        "expected_revision": rev,
                    },
                }
            )
            update = ws.receive_json()
            assert update["type"] == "state_update"
            rev = update["revision"]
        assert rev == 6

        ws.send_json(
            {"v": 1, "type": "check_challenge", "session_id": sid, "payload": {}}
        )
        report = ws.receive_json()
        assert report["type"] == "check_challenge"
        assert report["payload"]["passed"] is True
        assert [r["passed"] for r in report["payload"]["rows"]] == [True] * 4


def test_websocket_rejects_non_json_frames():
    client = TestClient(create_app())
    with client.websocket_connect("/ws") as ws:
        ws.send_text("{this is not json")
        reply = ws.receive_json()
        assert reply["type"] == "error"
        assert reply["payload"]["code"] == "bad_message"


def test_websocket_sessions_are_independent():
    client = TestClient(create_app())
    with client.websocket_connect("/ws") as a, client.websocket_connect("/ws") as b:
        a.send_json({"v": 1, "type": "create_session", "payload": {"gate": "xor"}})
        b.send_json({"v": 1, "type": "create_session", "payload": {"gate": "and"}})
        sid_a = a.receive_json()["session_id"]
        sid_b = b.receive_json()["session_id"]
        assert sid_a != sid_b

        a.send_json(
            {
                "v": 1,
                "type": "apply_edit",
                "session_id": sid_a,
                "payload": {
                    "command": "set_input_lever",
                    "index": 0,
                    "angle": 1.0,
                    "expected_revision": 0,
                },
            }
        )
        assert a.receive_json()["revision"] == 1

        # session b is untouched by a's edit
        b.send_json(
            {
                "v": 1,
                "type": "apply_edit",
                "session_id": sid_b,
                "payload": {
                    "command": "set_input_lever",
                    "index": 0,
                    "angle": 1.0,
                    "expected_revision": 0,
                },
            }
        )
        assert b.receive_json()["revision"] == 1
