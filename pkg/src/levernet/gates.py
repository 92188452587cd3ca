"""Canonical gate configurations, truth-table verification, separability search.

All four gates read out through a threshold on the output lever's angle: the
machine has no comparator, a person reads the lever.  A horizontal lever is
false, fully clockwise is true, so boolean inputs map to angles 0 and 1.

AND and OR share one network (0.5/0.5 into a single hidden neuron, 1.0 to the
output) and differ only in the threshold: 1.0 for AND, 0.5 for OR.  NOT pins
the second input fully clockwise and uses its weight as the bias.  XOR uses
the symmetric two-hidden-neuron configuration; on boolean inputs hidden
neuron 0 computes x1 AND NOT x2 and hidden neuron 1 computes NOT x1 AND x2,
which the output neuron simply sums.

Every raw output of the shipped gates lands on an exact dyadic value, so all
verification is tolerance-free.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .core import Network, RangeError, ShapeError, forward


class GateKind(str, Enum):
    AND = "and"
    OR = "or"
    NOT = "not"
    XOR = "xor"


@dataclass(frozen=True)
class TruthTable:
    """Exhaustive (inputs, expected bit) rows for one operator."""

    rows: tuple[tuple[tuple[int, ...], int], ...]

    def __post_init__(self) -> None:
        arities = {len(bits) for bits, _ in self.rows}
        if len(arities) != 1:
            raise ShapeError("truth table rows have mixed arity")
        arity = arities.pop()
        inputs = [bits for bits, _ in self.rows]
        if len(set(inputs)) != len(inputs) or len(inputs) != 2**arity:
            raise ShapeError("truth table rows must be exhaustive and distinct")

    @property
    def arity(self) -> int:
        return len(self.rows[0][0])


TRUTH_TABLES: dict[GateKind, TruthTable] = {
    GateKind.NOT: TruthTable((((0,), 1), ((1,), 0))),
    GateKind.AND: TruthTable(
        (((0, 0), 0), ((0, 1), 0), ((1, 0), 0), ((1, 1), 1))
    ),
    GateKind.OR: TruthTable(
        (((0, 0), 0), ((0, 1), 1), ((1, 0), 1), ((1, 1), 1))
    ),
    GateKind.XOR: TruthTable(
        (((0, 0), 0), ((0, 1), 1), ((1, 0), 1), ((1, 1), 0))
    ),
}


@dataclass(frozen=True)
class GateSpec:
    """A network plus the readout threshold that turns its output into a bit."""

    kind: GateKind
    network: Network
    threshold: float
    arity: int

    def __post_init__(self) -> None:
        if not 0.0 < self.threshold <= 1.0:
            raise RangeError(
                f"readout threshold must lie in (0, 1], got {self.threshold!r}"
            )
        if self.arity != len(self.network.free_inputs):
            raise ShapeError(
                f"gate arity {self.arity} does not match the network's "
                f"{len(self.network.free_inputs)} free inputs"
            )


# Shared AND/OR wiring: raw outputs 0, 0.5, 0.5, 1 over the four input rows.
_AND_OR_NET = Network((2, 1, 1), (np.array([[0.5, 0.5]]), np.array([[1.0]])))

_XOR_NET = Network(
    (2, 2, 1),
    (np.array([[1.0, -1.0], [-1.0, 1.0]]), np.array([[1.0, 1.0]])),
)

# NOT: input weight -1, pinned-input (bias) weight +1.  This is the
# sign-swapped form of the wiring one might first write down (+1 / -1), which
# outputs 0 for both inputs; see not_gate_sign_swapped.
_NOT_NET = Network(
    (2, 1, 1),
    (np.array([[-1.0, 1.0]]), np.array([[1.0]])),
    pinned={1: 1.0},
)


def make_gate(kind: GateKind) -> GateSpec:
    """Canonical configuration for the given operator."""
    kind = GateKind(kind)
    if kind is GateKind.AND:
        return GateSpec(kind, _AND_OR_NET, threshold=1.0, arity=2)
    if kind is GateKind.OR:
        return GateSpec(kind, _AND_OR_NET, threshold=0.5, arity=2)
    if kind is GateKind.XOR:
        return GateSpec(kind, _XOR_NET, threshold=0.5, arity=2)
    return GateSpec(kind, _NOT_NET, threshold=0.5, arity=1)


def not_gate_sign_swapped() -> GateSpec:
    """NOT wiring with both input-weight signs flipped: +1 from the input,
    -1 from the pinned bias input.

    Reads naturally but does not work: the clipped activation kills the
    negative net for input 0, so both inputs yield output 0.  Kept so the
    failure can be demonstrated next to the working configuration.
    """
    net = Network(
        (2, 1, 1),
        (np.array([[1.0, -1.0]]), np.array([[1.0]])),
        pinned={1: 1.0},
    )
    return GateSpec(GateKind.NOT, net, threshold=0.5, arity=1)


def evaluate_gate(spec: GateSpec, bits: Sequence[int | bool]) -> bool:
    """Map bits to lever angles (false -> 0, true -> 1), run, threshold."""
    if len(bits) != spec.arity:
        raise ShapeError(f"expected {spec.arity} input bits, got {len(bits)}")
    x = [1.0 if b else 0.0 for b in bits]
    trace = forward(spec.network, x)
    return float(trace.output[0]) >= spec.threshold


@dataclass(frozen=True)
class GateRow:
    bits: tuple[int, ...]
    raw: float
    got: bool
    expected: bool
    passed: bool


@dataclass(frozen=True)
class GateReport:
    kind: GateKind
    threshold: float
    rows: tuple[GateRow, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def n_passed(self) -> int:
        return sum(r.passed for r in self.rows)


def verify_gate(spec: GateSpec) -> GateReport:
    """Evaluate every truth-table row; failures are report content, not errors."""
    table = TRUTH_TABLES[spec.kind]
    rows = []
    for bits, expected in table.rows:
        x = [float(b) for b in bits]
        raw = float(forward(spec.network, x).output[0])
        got = raw >= spec.threshold
        rows.append(
            GateRow(
                bits=bits,
                raw=raw,
                got=got,
                expected=bool(expected),
                passed=got == bool(expected),
            )
        )
    return GateReport(kind=spec.kind, threshold=spec.threshold, rows=tuple(rows))


# -- single-layer separability search ---------------------------------------


@dataclass(frozen=True)
class SeparabilityReport:
    """Outcome of brute-forcing direct input-to-output configurations."""

    kind: GateKind
    resolution: float
    with_bias: bool
    tested: int
    solutions: int
    example: tuple[float, float, float, float] | None  # (w1, w2, bias, threshold)

    @property
    def separable(self) -> bool:
        return self.solutions > 0


def single_layer_search(
    kind: GateKind, resolution: float = 0.1, with_bias: bool = True
) -> SeparabilityReport:
    """Exhaustively test y = clip(w1*x1 + w2*x2 + b) >= t against the table.

    Weights (and the optional pinned-input bias weight b) run over a grid of
    the given resolution on [-1, 1]; thresholds over the same grid on (0, 1].
    Grid points are built as integer ratios so dyadic values stay exact.
    """
    kind = GateKind(kind)
    table = TRUTH_TABLES[kind]
    if table.arity != 2:
        raise ShapeError("the separability search is defined for 2-input gates")
    resolution = float(resolution)
    if not 0 < resolution <= 1:
        raise RangeError(f"resolution must lie in (0, 1], got {resolution!r}")
    n = round(1.0 / resolution)
    grid = np.arange(-n, n + 1) / n  # [-1, 1]
    thresholds = np.arange(1, n + 1) / n  # (0, 1]
    biases = grid if with_bias else np.zeros(1)

    inputs = np.array([bits for bits, _ in table.rows], dtype=float)
    expected = np.array([bool(out) for _, out in table.rows])

    w1, w2, b = np.meshgrid(grid, grid, biases, indexing="ij")
    # nets: one row of 4 per candidate, columns follow the table rows
    nets = (
        w1.reshape(-1, 1) * inputs[:, 0]
        + w2.reshape(-1, 1) * inputs[:, 1]
        + b.reshape(-1, 1)
    )
    raw = np.minimum(1.0, np.maximum(0.0, nets))

    solutions = 0
    example = None
    tested = 0
    for t in thresholds:
        got = raw >= t
        hits = np.all(got == expected, axis=1)
        tested += hits.size
        count = int(hits.sum())
        if count and example is None:
            idx = int(np.argmax(hits))
            example = (
                float(w1.reshape(-1)[idx]),
                float(w2.reshape(-1)[idx]),
                float(b.reshape(-1)[idx]),
                float(t),
            )
        solutions += count
    return SeparabilityReport(
        kind=kind,
        resolution=resolution,
        with_bias=with_bias,
        tested=tested,
        solutions=solutions,
        example=example,
    )


def single_layer_xor_search(resolution: float = 0.1) -> SeparabilityReport:
    """The classroom demonstration that no direct wiring realizes XOR."""
    return single_layer_search(GateKind.XOR, resolution=resolution)
