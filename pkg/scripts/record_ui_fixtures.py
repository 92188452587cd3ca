#!/usr/bin/env python3
"""Record real backend replies into JSON fixtures for the frontend tests.

Each fixture is a list of {"send": <client frame>, "recv": <server frame>}
pairs produced by driving levernet.service.handle_message directly, so the
frontend's mocked transport replays genuine server payloads instead of
hand-written guesses.  Re-run after any wire-protocol change:

    python3 scripts/record_ui_fixtures.py
"""

import json
from pathlib import Path

from levernet.service import SessionStore, handle_message

OUT_DIR = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"

XOR_CLAMPS = [
    ((0, 0), (1, 0), 1.0),
    ((0, 1), (1, 0), -1.0),
    ((0, 0), (1, 1), -1.0),
    ((0, 1), (1, 1), 1.0),
    ((1, 0), (2, 0), 1.0),
    ((1, 1), (2, 0), 1.0),
]


def record(store, frames, msg):
    reply = handle_message(store, msg)
    frames.append({"send": msg, "recv": reply})
    return reply


def edit(store, frames, sid, rev, command, **fields):
    payload = {"command": command, "expected_revision": rev, **fields}
    return record(
        store,
        frames,
        {"v": 1, "type": "apply_edit", "session_id": sid, "payload": payload},
    )


def xor_gate_walkthrough():
    """Canonical xor loaded, both input levers stepped through all 4 rows."""
    store = SessionStore()
    frames = []
    created = record(
        store,
        frames,
        {"v": 1, "type": "create_session", "payload": {"gate": "xor"}},
    )
    sid = created["session_id"]
    rev = created["revision"]
    for a, b in ((0.0, 1.0), (1.0, 1.0), (1.0, 0.0), (0.0, 0.0)):
        rev = edit(store, frames, sid, rev, "set_input_lever", index=0, angle=a)[
            "revision"
        ]
        rev = edit(store, frames, sid, rev, "set_input_lever", index=1, angle=b)[
            "revision"
        ]
    return frames


def xor_challenge_solve():
    """Blank challenge session solved clamp by clamp, checked along the way."""
    store = SessionStore()
    frames = []
    created = record(
        store,
        frames,
        {"v": 1, "type": "create_session", "payload": {"challenge": "xor"}},
    )
    sid = created["session_id"]
    rev = created["revision"]
    record(  # blank network: only the rows expecting false pass
        store,
        frames,
        {"v": 1, "type": "check_challenge", "session_id": sid, "payload": {}},
    )
    for send, recv, position in XOR_CLAMPS:
        rev = edit(
            store,
            frames,
            sid,
            rev,
            "set_clamp",
            send=list(send),
            recv=list(recv),
            position=position,
        )["revision"]
    record(
        store,
        frames,
        {"v": 1, "type": "check_challenge", "session_id": sid, "payload": {}},
    )
    record(
        store,
        frames,
        {
            "v": 1,
            "type": "check_challenge",
            "session_id": sid,
            "payload": {"reveal": True},
        },
    )
    return frames


def conflict_and_errors():
    """A stale edit and a range violation, for client error handling."""
    store = SessionStore()
    frames = []
    created = record(
        store,
        frames,
        {"v": 1, "type": "create_session", "payload": {"gate": "and"}},
    )
    sid = created["session_id"]
    edit(store, frames, sid, 0, "set_input_lever", index=0, angle=1.0)
    edit(store, frames, sid, 0, "set_input_lever", index=1, angle=1.0)  # stale
    edit(store, frames, sid, 1, "set_clamp", send=[0, 0], recv=[1, 0], position=7.0)
    return frames


def main():
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    fixtures = {
        "xor_gate_walkthrough": xor_gate_walkthrough(),
        "xor_challenge_solve": xor_challenge_solve(),
        "conflict_and_errors": conflict_and_errors(),
    }
    for name, frames in fixtures.items():
        path = OUT_DIR / f"{name}.json"
        path.write_text(json.dumps(frames, indent=2) + "\n")
        print(f"wrote {path} ({len(frames)} frames)")


if __name__ == "__main__":
    main()
