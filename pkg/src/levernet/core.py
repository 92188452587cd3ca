"""Biasless, box-constrained multilayer perceptron with clipped-linear activation.

This is the abstract side of the lever machine: weights are clamp positions and
therefore live in [-1, 1], hidden and output activations are lever angles
clipped to [0, 1] by the two mechanical stops, and there are no bias
parameters.  A bias is emulated by pinning an input neuron to a constant
output (canonically 1, the fully-clockwise lever), so that neuron's outgoing
weights act as bias terms.

Layers and neurons are indexed from 0 throughout the Python API; layer 0 is
the input layer.  Human-facing text artifacts (network documents, build
sheets) use 1-based labels instead, see the `netdoc` and `mechanics` modules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

WEIGHT_MIN = -1.0
WEIGHT_MAX = 1.0

# Equality tolerance for trace comparisons; everything else in the package
# inherits this unless a tighter (exact) check is possible.
TRACE_TOL = 1e-12

DEFAULT_LAYER_SIZES = (2, 4, 2)


class LeverNetError(Exception):
    """Base class for all errors raised by this package."""


class RangeError(LeverNetError, ValueError):
    """A value lies outside its legal interval (or is not finite)."""


class ShapeError(LeverNetError, ValueError):
    """Dimensions do not match the network topology."""


def dorelu(x: float) -> float:
    """Double-sided clipped linear activation: min(1, max(0, x)).

    The mechanical counterpart is a lever with a hard stop at each end of its
    travel.  Monotone non-decreasing; result always in [0, 1].
    """
    x = float(x)
    if not math.isfinite(x):
        raise RangeError(f"activation input must be finite, got {x!r}")
    return min(1.0, max(0.0, x))


def _clip01(z: np.ndarray) -> np.ndarray:
    # Vector form of dorelu, same arithmetic.
    return np.minimum(1.0, np.maximum(0.0, z))


def net_input(prev_outputs: Sequence[float], weight_row: Sequence[float]) -> float:
    """Weighted sum of the previous layer's outputs.  No bias term exists."""
    o = np.asarray(prev_outputs, dtype=float)
    w = np.asarray(weight_row, dtype=float)
    if o.ndim != 1 or w.ndim != 1 or o.shape != w.shape:
        raise ShapeError(
            f"outputs and weight row must be equal-length vectors, "
            f"got shapes {o.shape} and {w.shape}"
        )
    return float(o @ w)


def _as_weight_matrices(
    weights: Sequence[np.ndarray], sizes: tuple[int, ...]
) -> tuple[np.ndarray, ...]:
    if len(weights) != len(sizes) - 1:
        raise ShapeError(
            f"expected {len(sizes) - 1} weight matrices for layer sizes "
            f"{list(sizes)}, got {len(weights)}"
        )
    out = []
    for k, w in enumerate(weights):
        w = np.array(w, dtype=float)  # private copy
        want = (sizes[k + 1], sizes[k])
        if w.shape != want:
            raise ShapeError(
                f"weight matrix {k} has shape {w.shape}, expected {want} "
                f"(rows index the receiving neuron)"
            )
        if not np.all(np.isfinite(w)):
            raise RangeError(f"weight matrix {k} contains non-finite entries")
        if np.any(w < WEIGHT_MIN) or np.any(w > WEIGHT_MAX):
            raise RangeError(
                f"weight matrix {k} has entries outside [{WEIGHT_MIN}, {WEIGHT_MAX}]"
            )
        w.setflags(write=False)
        out.append(w)
    return tuple(out)


@dataclass(frozen=True, eq=False)
class Network:
    """Topology plus weights plus pinned-input flags.  Immutable once built.

    ``weights[k]`` maps layer k to layer k+1; entry ``[i, j]`` is the weight
    from neuron j of layer k to neuron i of layer k+1.  ``pinned`` maps input
    neuron indices to a constant output in [-1, 1]; a pinned input ignores the
    supplied input vector (the physical act is rotating that lever to a fixed
    angle and leaving it there, which persists across evaluations).
    """

    layer_sizes: tuple[int, ...]
    weights: tuple[np.ndarray, ...]
    pinned: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        sizes = tuple(int(s) for s in self.layer_sizes)
        if len(sizes) < 2:
            raise ShapeError("a network needs at least an input and an output layer")
        if any(s < 1 for s in sizes):
            raise ShapeError(f"layer sizes must be positive, got {list(sizes)}")
        ws = _as_weight_matrices(self.weights, sizes)
        pins: dict[int, float] = {}
        for idx, val in dict(self.pinned).items():
            idx = int(idx)
            val = float(val)
            if not 0 <= idx < sizes[0]:
                raise IndexError(
                    f"pinned index {idx} out of range for {sizes[0]} input neurons"
                )
            if not (math.isfinite(val) and -1.0 <= val <= 1.0):
                raise RangeError(f"pinned value must lie in [-1, 1], got {val!r}")
            pins[idx] = val
        object.__setattr__(self, "layer_sizes", sizes)
        object.__setattr__(self, "weights", ws)
        object.__setattr__(
            self, "pinned", MappingProxyType(dict(sorted(pins.items())))
        )

    # -- topology helpers -------------------------------------------------

    @property
    def n_layers(self) -> int:
        return len(self.layer_sizes)

    @property
    def input_size(self) -> int:
        return self.layer_sizes[0]

    @property
    def output_size(self) -> int:
        return self.layer_sizes[-1]

    @property
    def free_inputs(self) -> tuple[int, ...]:
        """Indices of input neurons that still take a value from the caller."""
        return tuple(i for i in range(self.input_size) if i not in self.pinned)

    def connection_count(self) -> int:
        return sum(w.size for w in self.weights)

    # -- derived networks --------------------------------------------------

    def with_weights(self, weights: Sequence[np.ndarray]) -> "Network":
        return Network(self.layer_sizes, tuple(weights), dict(self.pinned))

    def with_weight(self, layer: int, recv: int, send: int, value: float) -> "Network":
        """New network with one connection weight replaced.

        ``layer`` indexes the weight matrix (0 = input-to-first-hidden).
        """
        if not 0 <= layer < len(self.weights):
            raise IndexError(f"no weight matrix {layer}")
        ws = [w.copy() for w in self.weights]
        try:
            ws[layer][recv, send] = float(value)
        except IndexError as exc:
            raise IndexError(
                f"connection ({recv}, {send}) out of range in weight matrix {layer}"
            ) from exc
        return self.with_weights(ws)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Network):
            return NotImplemented
        return (
            self.layer_sizes == other.layer_sizes
            and all(
                np.array_equal(a, b) for a, b in zip(self.weights, other.weights)
            )
            and dict(self.pinned) == dict(other.pinned)
        )

    def __repr__(self) -> str:
        sizes = "-".join(str(s) for s in self.layer_sizes)
        pins = f", pinned={dict(self.pinned)}" if self.pinned else ""
        return f"Network({sizes}{pins})"


def zero_network(
    layer_sizes: Sequence[int], pinned: Mapping[int, float] | None = None
) -> Network:
    """All clamp positions at the pivot: every weight 0."""
    sizes = tuple(int(s) for s in layer_sizes)
    ws = tuple(np.zeros((sizes[k + 1], sizes[k])) for k in range(len(sizes) - 1))
    return Network(sizes, ws, dict(pinned or {}))


@dataclass(frozen=True, eq=False)
class ForwardTrace:
    """Per-neuron record of one evaluation.

    ``outputs[k]`` holds layer k's outputs.  ``nets[k]`` and ``slack[k]`` are
    None for the input layer (input levers have no summation and no
    activation); for every other layer ``slack[k][i]`` is True exactly when
    the net input is negative, i.e. when the lever's input string goes slack.
    """

    outputs: tuple[np.ndarray, ...]
    nets: tuple[np.ndarray | None, ...]
    slack: tuple[np.ndarray | None, ...]

    @property
    def output(self) -> np.ndarray:
        """Outputs of the final layer."""
        return self.outputs[-1]

    def out(self, layer: int, index: int) -> float:
        return float(self.outputs[layer][index])

    def net(self, layer: int, index: int) -> float:
        nets = self.nets[layer]
        if nets is None:
            raise ShapeError("input neurons have no net input")
        return float(nets[index])

    def is_slack(self, layer: int, index: int) -> bool:
        flags = self.slack[layer]
        if flags is None:
            raise ShapeError("input neurons have no input string")
        return bool(flags[index])


def merged_inputs(net: Network, x: Sequence[float]) -> np.ndarray:
    """Input-layer outputs: caller values for free inputs, pins elsewhere.

    Raises ShapeError if ``x`` does not have one value per free input, and
    RangeError if any value leaves [-1, 1].  Out-of-range inputs are an error
    rather than being clamped: silent clamping would hide caller bugs, and the
    physical input levers cannot travel past their stops anyway.
    """
    free = net.free_inputs
    xs = [float(v) for v in x]
    if len(xs) != len(free):
        raise ShapeError(
            f"expected {len(free)} input values (network has {net.input_size} "
            f"inputs, {len(net.pinned)} pinned), got {len(xs)}"
        )
    for v in xs:
        if not (math.isfinite(v) and -1.0 <= v <= 1.0):
            raise RangeError(f"input values must lie in [-1, 1], got {v!r}")
    merged = np.zeros(net.input_size)
    for i, v in zip(free, xs):
        merged[i] = v
    for i, v in net.pinned.items():
        merged[i] = v
    return merged


def forward(net: Network, x: Sequence[float]) -> ForwardTrace:
    """Evaluate the network, recording net, output and slack for every neuron."""
    inputs = merged_inputs(net, x)
    inputs.setflags(write=False)
    outputs: list[np.ndarray] = [inputs]
    nets: list[np.ndarray | None] = [None]
    slack: list[np.ndarray | None] = [None]
    for w in net.weights:
        z = w @ outputs[-1]
        o = _clip01(z)
        for arr in (z, o):
            arr.setflags(write=False)
        nets.append(z)
        outputs.append(o)
        slack.append(z < 0)
    return ForwardTrace(tuple(outputs), tuple(nets), tuple(slack))


def pin_input(net: Network, index: int, value: float) -> Network:
    """Hold one input lever at a fixed angle across all future evaluations.

    Pinning to 1 (fully clockwise) makes the neuron's outgoing weights act as
    biases of the receiving neurons.
    """
    index = int(index)
    if not 0 <= index < net.input_size:
        raise IndexError(f"input index {index} out of range")
    value = float(value)
    if not (math.isfinite(value) and -1.0 <= value <= 1.0):
        raise RangeError(f"pinned value must lie in [-1, 1], got {value!r}")
    pins = dict(net.pinned)
    pins[index] = value
    return Network(net.layer_sizes, net.weights, pins)


def unpin_input(net: Network, index: int) -> Network:
    """Release a pinned input lever so it takes caller values again."""
    index = int(index)
    if index not in net.pinned:
        raise IndexError(f"input {index} is not pinned")
    pins = dict(net.pinned)
    del pins[index]
    return Network(net.layer_sizes, net.weights, pins)
