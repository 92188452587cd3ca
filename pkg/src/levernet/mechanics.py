"""Physical transmission layer: levers, clamps, pulley stages, slack strings.

Everything is in normalized units.  A lever angle of +1 means full clockwise
contact with the ground plane, -1 full counterclockwise (input levers only;
hidden and output levers carry a rod that blocks counterclockwise rotation).
A clamp's position along the lever arc equals the connection weight, so the
weight-to-position map is the identity.  The levers are arcs centred on the
string's deflection eye, which is what makes the normalized linear model
exact; physical dimensions would add nothing, so none are modelled here.

Summation happens in a pulley assembly above each receiving lever: each stage
of movable pulleys halves the travel, and the output string attaches to the
receiving lever at exactly that fraction of the lever length, so the two
factors cancel and the lever sees the plain weighted sum.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    Network,
    RangeError,
    ShapeError,
    _clip01,
    merged_inputs,
)


def weight_to_clamp(w: float) -> float:
    """Arc position of the clamp realizing weight ``w`` (identity map).

    Position 0 is the pivot, +1 full right (receiving lever turns the same
    way), -1 full left (opposite way).
    """
    w = float(w)
    if not (math.isfinite(w) and -1.0 <= w <= 1.0):
        raise RangeError(f"weight must lie in [-1, 1], got {w!r}")
    return w


@dataclass(frozen=True)
class LeverState:
    """One lever's normalized rotation."""

    layer: int
    index: int
    angle: float

    def __post_init__(self) -> None:
        if abs(self.angle) > 1.0:
            raise RangeError(f"lever angle {self.angle!r} outside [-1, 1]")
        if self.layer > 0 and self.angle < 0.0:
            raise RangeError(
                "hidden/output levers cannot rotate counterclockwise "
                f"(layer {self.layer}, angle {self.angle!r})"
            )


@dataclass(frozen=True)
class ClampPosition:
    """A clamp on the sending lever's arc; its position is the weight."""

    send: tuple[int, int]  # (layer, index) of the sending neuron
    recv: tuple[int, int]  # (layer, index) of the receiving neuron
    arc_position: float

    def __post_init__(self) -> None:
        if abs(self.arc_position) > 1.0:
            raise RangeError(
                f"clamp arc position {self.arc_position!r} outside [-1, 1]"
            )
        if self.recv[0] != self.send[0] + 1:
            raise ShapeError("a clamp connects a lever to the next layer only")


@dataclass(frozen=True)
class PulleyAssembly:
    """Stacked movable-pulley stages summing the string displacements.

    Each stage halves the travel, so ``fan_in`` strings need
    ceil(log2(fan_in)) stages and the combined displacement is reduced by
    1/2**stages.  The output string attaches to the receiving lever at that
    same fraction of the lever length (``attachment_fraction``), cancelling
    the reduction.
    """

    fan_in: int
    stages: int
    attachment_fraction: float

    @classmethod
    def for_fan_in(cls, fan_in: int) -> "PulleyAssembly":
        fan_in = int(fan_in)
        if fan_in < 1:
            raise ShapeError(f"fan-in must be positive, got {fan_in}")
        # ceil(log2(n)) without float logs; 1 -> 0 stages (plain string).
        stages = (fan_in - 1).bit_length()
        return cls(fan_in=fan_in, stages=stages, attachment_fraction=0.5**stages)

    @property
    def reduction(self) -> float:
        return self.attachment_fraction

    def reduce(self, displacements: Sequence[float]) -> float:
        d = np.asarray(displacements, dtype=float)
        if d.ndim != 1 or d.size != self.fan_in:
            raise ShapeError(
                f"expected {self.fan_in} displacements, got shape {d.shape}"
            )
        return float(self.reduction * d.sum())


def pulley_reduce(displacements: Sequence[float]) -> float:
    """Combined (reduced) output displacement for the given input strings."""
    d = np.asarray(displacements, dtype=float)
    if d.ndim != 1 or d.size == 0:
        raise ShapeError("pulley_reduce needs a non-empty displacement vector")
    return PulleyAssembly.for_fan_in(d.size).reduce(d)


@dataclass(frozen=True, eq=False)
class MechanicalState:
    """Snapshot of every lever, string and pulley for one evaluation.

    Arrays are grouped per layer: ``angles[k]`` for layer k,
    ``string_displacements[k]`` / ``pulley_outputs[k]`` / ``raw_inputs[k]`` /
    ``taut[k]`` for the strings arriving at layer k+1 (same shapes as the
    weight matrices / receiving layers).  ``raw_inputs`` keeps the unclipped
    weighted sums: they are needed for slack detection and by the trainer,
    but they are not angles and are never exposed as such.
    """

    angles: tuple[np.ndarray, ...]
    string_displacements: tuple[np.ndarray, ...]
    pulley_outputs: tuple[np.ndarray, ...]
    raw_inputs: tuple[np.ndarray, ...]
    taut: tuple[np.ndarray, ...]
    pulleys: tuple[PulleyAssembly, ...]
    clamps: tuple[ClampPosition, ...]

    @property
    def levers(self) -> tuple[LeverState, ...]:
        return tuple(
            LeverState(layer=k, index=i, angle=float(a[i]))
            for k, a in enumerate(self.angles)
            for i in range(a.size)
        )

    def angle(self, layer: int, index: int) -> float:
        return float(self.angles[layer][index])

    def displacement(self, recv_layer: int, recv: int, send: int) -> float:
        return float(self.string_displacements[recv_layer - 1][recv, send])

    def is_taut(self, layer: int, index: int) -> bool:
        if layer == 0:
            raise ShapeError("input levers have no input string")
        return bool(self.taut[layer - 1][index])


def clamp_layout(net: Network) -> tuple[ClampPosition, ...]:
    """All clamps in canonical order: receiving layer, receiving, sending."""
    out = []
    for k, w in enumerate(net.weights):
        for i in range(w.shape[0]):
            for j in range(w.shape[1]):
                out.append(
                    ClampPosition(
                        send=(k, j), recv=(k + 1, i), arc_position=float(w[i, j])
                    )
                )
    return tuple(out)


def mechanical_forward(net: Network, x: Sequence[float]) -> MechanicalState:
    """Evaluate through the transmission model instead of the abstract MLP.

    Kinematics are ideal (rigid strings, no friction, quasi-static), so the
    resulting hidden/output angles equal the abstract forward pass outputs.
    """
    angles: list[np.ndarray] = [merged_inputs(net, x)]
    displacements: list[np.ndarray] = []
    pulley_outputs: list[np.ndarray] = []
    raws: list[np.ndarray] = []
    tauts: list[np.ndarray] = []
    pulleys: list[PulleyAssembly] = []
    for w in net.weights:
        assembly = PulleyAssembly.for_fan_in(w.shape[1])
        disp = w * angles[-1][np.newaxis, :]
        combined = assembly.reduction * disp.sum(axis=1)
        # The attachment point divides the reduction back out; both factors
        # are powers of two, so this recovers the weighted sum exactly.
        raw = combined / assembly.attachment_fraction
        angles.append(_clip01(raw))
        displacements.append(disp)
        pulley_outputs.append(combined)
        raws.append(raw)
        tauts.append(raw >= 0)
        pulleys.append(assembly)
    for group in (angles, displacements, pulley_outputs, raws, tauts):
        for arr in group:
            arr.setflags(write=False)
    return MechanicalState(
        angles=tuple(angles),
        string_displacements=tuple(displacements),
        pulley_outputs=tuple(pulley_outputs),
        raw_inputs=tuple(raws),
        taut=tuple(tauts),
        pulleys=tuple(pulleys),
        clamps=clamp_layout(net),
    )


# -- build sheets ----------------------------------------------------------
#
# A build sheet is the instruction list for configuring the physical model:
# one line per clamp plus one line per pinned input.  The text format uses
# 1-based labels (layer 1 = input column) because the sheet is read standing
# at the machine; positions are printed to 4 decimal places, which is finer
# than a hand on a clamp.  The in-memory sheet keeps full precision and
# round-trips to the originating network exactly.

_CLAMP_RE = re.compile(
    r"^layer=(\d+)\s+recv=(\d+)\s+send=(\d+)\s+clamp=(-?\d+(?:\.\d+)?)$"
)
_PIN_RE = re.compile(r"^pin\s+input=(\d+)\s+value=(-?\d+(?:\.\d+)?)$")


@dataclass(frozen=True)
class BuildEntry:
    """One clamp setting; indices are 0-based here, 1-based in the text form."""

    recv_layer: int
    recv: int
    send: int
    position: float


@dataclass(frozen=True)
class BuildSheet:
    layer_sizes: tuple[int, ...]
    entries: tuple[BuildEntry, ...]
    pins: tuple[tuple[int, float], ...]

    def to_network(self) -> Network:
        sizes = self.layer_sizes
        ws = [np.zeros((sizes[k + 1], sizes[k])) for k in range(len(sizes) - 1)]
        for e in self.entries:
            ws[e.recv_layer - 1][e.recv, e.send] = e.position
        return Network(sizes, tuple(ws), dict(self.pins))

    def to_text(self) -> str:
        lines = []
        for e in self.entries:
            lines.append(
                f"layer={e.recv_layer + 1} recv={e.recv + 1} "
                f"send={e.send + 1} clamp={e.position:.4f}"
            )
        for idx, val in self.pins:
            # value 1 means: rotate that input lever fully clockwise.
            lines.append(f"pin input={idx + 1} value={val:.4f}")
        return "\n".join(lines) + "\n"


def export_build_sheet(net: Network) -> BuildSheet:
    """Clamp positions and pin directives for setting up the physical model."""
    entries = []
    for k, w in enumerate(net.weights):
        for i in range(w.shape[0]):
            for j in range(w.shape[1]):
                entries.append(
                    BuildEntry(
                        recv_layer=k + 1, recv=i, send=j, position=float(w[i, j])
                    )
                )
    pins = tuple(sorted(net.pinned.items()))
    return BuildSheet(
        layer_sizes=net.layer_sizes, entries=tuple(entries), pins=pins
    )


def parse_build_sheet(text: str) -> BuildSheet:
    """Parse the text form back into a sheet.

    The network is reconstructed from the connection labels; since the model
    is fully connected, every (receiving, sending) pair must appear exactly
    once per layer.
    """
    entries: list[BuildEntry] = []
    pins: list[tuple[int, float]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        m = _CLAMP_RE.match(line)
        if m:
            layer, recv, send = (int(m.group(g)) for g in (1, 2, 3))
            position = float(m.group(4))
            if layer < 2:
                raise ShapeError(
                    f"line {lineno}: layer {layer} cannot receive strings"
                )
            entries.append(
                BuildEntry(
                    recv_layer=layer - 1,
                    recv=recv - 1,
                    send=send - 1,
                    position=weight_to_clamp(position),
                )
            )
            continue
        m = _PIN_RE.match(line)
        if m:
            pins.append((int(m.group(1)) - 1, float(m.group(2))))
            continue
        raise ShapeError(f"line {lineno}: not a build sheet line: {line!r}")
    if not entries:
        raise ShapeError("build sheet contains no clamp lines")

    n_matrices = max(e.recv_layer for e in entries)
    sizes = [0] * (n_matrices + 1)
    for e in entries:
        sizes[e.recv_layer] = max(sizes[e.recv_layer], e.recv + 1)
        sizes[e.recv_layer - 1] = max(sizes[e.recv_layer - 1], e.send + 1)

    seen: set[tuple[int, int, int]] = set()
    for e in entries:
        key = (e.recv_layer, e.recv, e.send)
        if key in seen:
            raise ShapeError(
                f"duplicate clamp line for layer={e.recv_layer + 1} "
                f"recv={e.recv + 1} send={e.send + 1}"
            )
        seen.add(key)
    for k in range(1, n_matrices + 1):
        for i in range(sizes[k]):
            for j in range(sizes[k - 1]):
                if (k, i, j) not in seen:
                    raise ShapeError(
                        f"missing clamp line for layer={k + 1} "
                        f"recv={i + 1} send={j + 1}"
                    )

    entries.sort(key=lambda e: (e.recv_layer, e.recv, e.send))
    return BuildSheet(
        layer_sizes=tuple(sizes),
        entries=tuple(entries),
        pins=tuple(sorted(pins)),
    )
