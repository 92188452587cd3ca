"""The `.net` network document: a versioned, hand-editable YAML text format.

Classroom files get edited by hand, so the format is YAML with a fixed field
order and a header comment.  Indices inside documents are 1-based (they label
physical levers); the Python API stays 0-based.  Floats are written with
full shortest-round-trip precision, so parse(serialize(network)) reproduces
the network exactly and serializing again yields byte-identical text.

Schema (version 1):

    version: 1
    layer_sizes: [2, 4, 2]
    weights:            # one matrix per non-input layer,
      - [[...], ...]    # row = receiving neuron, column = sending neuron
      - ...
    pinned:             # optional; 1-based input index -> value in [-1, 1]
      2: 1.0
    gate:               # optional readout block
      kind: xor         # and | or | not | xor
      threshold: 0.5
    metadata:           # optional
      name: ...
      description: ...
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import yaml

from .core import LeverNetError, Network
from .gates import GateKind, GateSpec

DOCUMENT_VERSION = 1

_HEADER = "# levernet network document (indices in this file are 1-based)\n"


class DocumentError(LeverNetError):
    """The text is not a valid network document."""


@dataclass(frozen=True)
class NetworkDocument:
    """Parsed document: the network plus optional gate readout and metadata."""

    network: Network
    gate_kind: GateKind | None = None
    threshold: float | None = None
    name: str | None = None
    description: str | None = None

    def gate_spec(self) -> GateSpec:
        if self.gate_kind is None or self.threshold is None:
            raise DocumentError("document carries no gate block")
        return GateSpec(
            kind=self.gate_kind,
            network=self.network,
            threshold=self.threshold,
            arity=len(self.network.free_inputs),
        )


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise DocumentError(msg)


def parse_document(text: str) -> NetworkDocument:
    """Parse and validate a document; raises DocumentError on any defect."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise DocumentError(f"not valid YAML: {exc}") from exc
    _require(isinstance(data, dict), "document must be a mapping")
    unknown = set(data) - {
        "version",
        "layer_sizes",
        "weights",
        "pinned",
        "gate",
        "metadata",
    }
    _require(not unknown, f"unknown document fields: {sorted(unknown)}")
    _require(data.get("version") == DOCUMENT_VERSION,
             f"unsupported document version {data.get('version')!r}")

    sizes = data.get("layer_sizes")
    _require(
        isinstance(sizes, list)
        and len(sizes) >= 2
        and all(isinstance(s, int) and s >= 1 for s in sizes),
        "layer_sizes must be a list of at least two positive integers",
    )

    weights = data.get("weights")
    _require(isinstance(weights, list), "weights must be a list of matrices")
    matrices = []
    for k, matrix in enumerate(weights):
        _require(
            isinstance(matrix, list) and all(isinstance(r, list) for r in matrix),
            f"weight matrix {k + 1} must be a list of rows",
        )
        for row in matrix:
            for v in row:
                _require(
                    isinstance(v, (int, float)) and not isinstance(v, bool),
                    f"weight matrix {k + 1} contains a non-numeric entry",
                )
        matrices.append([[float(v) for v in row] for row in matrix])

    pinned_raw = data.get("pinned", {}) or {}
    _require(isinstance(pinned_raw, dict), "pinned must be a mapping")
    pinned: dict[int, float] = {}
    for idx, val in pinned_raw.items():
        _require(
            isinstance(idx, int) and idx >= 1,
            f"pinned index {idx!r} must be a 1-based integer",
        )
        _require(
            isinstance(val, (int, float)) and not isinstance(val, bool)
            and math.isfinite(float(val)),
            f"pinned value for input {idx} must be a finite number",
        )
        pinned[idx - 1] = float(val)

    try:
        network = Network(tuple(sizes), tuple(matrices), pinned)
    except (LeverNetError, IndexError) as exc:
        raise DocumentError(str(exc)) from exc

    gate_kind = None
    threshold = None
    gate = data.get("gate")
    if gate is not None:
        _require(isinstance(gate, dict), "gate must be a mapping")
        _require(
            set(gate) == {"kind", "threshold"},
            "gate block needs exactly the fields kind and threshold",
        )
        try:
            gate_kind = GateKind(gate["kind"])
        except ValueError as exc:
            raise DocumentError(f"unknown gate kind {gate['kind']!r}") from exc
        t = gate["threshold"]
        _require(
            isinstance(t, (int, float)) and not isinstance(t, bool)
            and 0.0 < float(t) <= 1.0,
            "gate threshold must be a number in (0, 1]",
        )
        threshold = float(t)

    name = description = None
    meta = data.get("metadata")
    if meta is not None:
        _require(isinstance(meta, dict), "metadata must be a mapping")
        unknown = set(meta) - {"name", "description"}
        _require(not unknown, f"unknown metadata fields: {sorted(unknown)}")
        for key in ("name", "description"):
            if key in meta:
                _require(
                    isinstance(meta[key], str), f"metadata {key} must be a string"
                )
        name = meta.get("name")
        description = meta.get("description")

    return NetworkDocument(
        network=network,
        gate_kind=gate_kind,
        threshold=threshold,
        name=name,
        description=description,
    )


def serialize_document(doc: NetworkDocument) -> str:
    """Canonical text form: fixed field order, empty optionals omitted."""
    net = doc.network
    parts: list[str] = [_HEADER]
    parts.append(f"version: {DOCUMENT_VERSION}\n")
    parts.append(
        "layer_sizes: [" + ", ".join(str(s) for s in net.layer_sizes) + "]\n"
    )
    parts.append("weights:\n")
    for w in net.weights:
        rows = ", ".join(
            "[" + ", ".join(_fmt(v) for v in row) + "]" for row in w.tolist()
        )
        parts.append(f"- [{rows}]\n")
    if net.pinned:
        parts.append("pinned:\n")
        for idx, val in net.pinned.items():
            parts.append(f"  {idx + 1}: {_fmt(val)}\n")
    if doc.gate_kind is not None and doc.threshold is not None:
        parts.append("gate:\n")
        parts.append(f"  kind: {doc.gate_kind.value}\n")
        parts.append(f"  threshold: {_fmt(doc.threshold)}\n")
    if doc.name is not None or doc.description is not None:
        meta: dict[str, str] = {}
        if doc.name is not None:
            meta["name"] = doc.name
        if doc.description is not None:
            meta["description"] = doc.description
        parts.append(
            yaml.safe_dump(
                {"metadata": meta},
                default_flow_style=False,
                sort_keys=False,
                allow_unicode=True,
            )
        )
    return "".join(parts)


def serialize_network(
    net: Network,
    gate_kind: GateKind | None = None,
    threshold: float | None = None,
    name: str | None = None,
    description: str | None = None,
) -> str:
    return serialize_document(
        NetworkDocument(
            network=net,
            gate_kind=gate_kind,
            threshold=threshold,
            name=name,
            description=description,
        )
    )


def _fmt(v: float) -> str:
    # repr of a Python float is the shortest string that round-trips.  YAML's
    # resolver only accepts exponent forms that contain a dot, so 1e-05 must
    # become 1.0e-05 or it would load back as a string.
    value = repr(float(v))
    if "." not in value and "e" in value:
        value = value.replace("e", ".0e", 1)
    return value


def load_document(path) -> NetworkDocument:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_document(fh.read())
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc


def save_document(path, doc: NetworkDocument) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_document(doc))
