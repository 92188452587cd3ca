"""Projected-gradient trainer for the box-constrained, biasless network.

Backpropagation here differs from the textbook version in three ways, all
forced by the machine: the activation derivative is a subgradient of the
double-sided clip (taken as 0 at both kinks, matching a lever resting against
a hard stop, which transmits no motion), there are no bias gradients because
there are no biases, and every SGD step is followed by clipping the weights
back into [-1, 1] so that each iterate remains a realizable set of clamp
positions.  When an input is pinned to 1, its outgoing weights receive
ordinary gradients, which is exactly bias training.

Clipped activations have dead zones; the supported remedy is multi-restart
(see train_restarts), not leaky variants, which the hardware could not
realize.  A finite-difference oracle is included for checking the gradients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import LeverNetError, Network, RangeError, ShapeError, forward
from .gates import TRUTH_TABLES, GateKind


class TrainingDiverged(LeverNetError):
    """The loss became non-finite; training aborted."""


def dorelu_subgrad(x: float) -> float:
    """Subgradient of the clipped activation: 1 strictly inside (0, 1), else 0.

    Both kinks return 0; at a stop the lever transmits nothing.
    """
    x = float(x)
    if not math.isfinite(x):
        raise RangeError(f"subgradient input must be finite, got {x!r}")
    return 1.0 if 0.0 < x < 1.0 else 0.0


def _subgrad_vec(z: np.ndarray) -> np.ndarray:
    return ((z > 0.0) & (z < 1.0)).astype(float)


@dataclass(frozen=True)
class Dataset:
    """Training samples: inputs in [-1, 1] paired with targets in [0, 1]."""

    name: str
    inputs: tuple[tuple[float, ...], ...]
    targets: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        if len(self.inputs) != len(self.targets) or not self.inputs:
            raise ShapeError("dataset needs equally many inputs and targets")
        in_dims = {len(x) for x in self.inputs}
        out_dims = {len(t) for t in self.targets}
        if len(in_dims) != 1 or len(out_dims) != 1:
            raise ShapeError("dataset rows have inconsistent dimensions")
        for x in self.inputs:
            if any(not (-1.0 <= v <= 1.0) for v in x):
                raise RangeError("dataset inputs must lie in [-1, 1]")
        for t in self.targets:
            if any(not (0.0 <= v <= 1.0) for v in t):
                raise RangeError("dataset targets must lie in [0, 1]")

    def __len__(self) -> int:
        return len(self.inputs)

    @property
    def is_boolean(self) -> bool:
        """True when every target component is exactly 0 or 1 (a gate dataset)."""
        return all(v in (0.0, 1.0) for t in self.targets for v in t)


def gate_dataset(kind: GateKind) -> Dataset:
    """Truth table of the operator as a training set."""
    kind = GateKind(kind)
    table = TRUTH_TABLES[kind]
    return Dataset(
        name=kind.value,
        inputs=tuple(tuple(float(b) for b in bits) for bits, _ in table.rows),
        targets=tuple((float(out),) for _, out in table.rows),
    )


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    epochs: int = 1000
    seed: int = 0
    init_range: tuple[float, float] = (-0.5, 0.5)
    loss: str = "mse"
    shuffle: bool = True
    # Stop as soon as every thresholded output is correct (gate datasets
    # only).  Off by default so a run records exactly `epochs` losses.
    stop_when_fit: bool = False

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise RangeError("learning_rate must be positive")
        if self.epochs < 1:
            raise RangeError("epochs must be at least 1")
        lo, hi = self.init_range
        if not (-1.0 <= lo <= hi <= 1.0):
            raise RangeError("init_range must be an interval inside [-1, 1]")
        if self.loss != "mse":
            raise RangeError(f"unsupported loss {self.loss!r}")


@dataclass(frozen=True)
class TrainRun:
    """Outcome of one training run."""

    losses: tuple[float, ...]  # mean loss per epoch actually run
    max_abs_weights: tuple[float, ...]  # per-epoch projection audit
    network: Network
    success: bool | None  # None for non-boolean datasets
    seed: int
    epochs_run: int


def random_network(
    layer_sizes: Sequence[int],
    seed: int | np.random.Generator = 0,
    init_range: tuple[float, float] = (-0.5, 0.5),
    pinned: dict[int, float] | None = None,
) -> Network:
    """Uniform random weights inside init_range.

    The default [-0.5, 0.5] keeps initial net inputs inside the active region
    of the activation, which mitigates dead neurons.
    """
    rng = (
        seed
        if isinstance(seed, np.random.Generator)
        else np.random.default_rng(seed)
    )
    lo, hi = init_range
    if not (-1.0 <= lo <= hi <= 1.0):
        raise RangeError("init_range must be an interval inside [-1, 1]")
    sizes = tuple(int(s) for s in layer_sizes)
    ws = tuple(
        rng.uniform(lo, hi, size=(sizes[k + 1], sizes[k]))
        for k in range(len(sizes) - 1)
    )
    return Network(sizes, ws, dict(pinned or {}))


def mse_loss(net: Network, x: Sequence[float], target: Sequence[float]) -> float:
    """Mean squared error of one sample: mean_i (out_i - target_i)^2."""
    t = np.asarray(target, dtype=float)
    out = forward(net, x).output
    if out.shape != t.shape:
        raise ShapeError(
            f"target has shape {t.shape}, network outputs {out.shape}"
        )
    return float(np.mean((out - t) ** 2))


def _backprop(
    net: Network, x: Sequence[float], target: Sequence[float]
) -> tuple[tuple[np.ndarray, ...], float]:
    t = np.asarray(target, dtype=float)
    trace = forward(net, x)
    out = trace.output
    if out.shape != t.shape:
        raise ShapeError(
            f"target has shape {t.shape}, network outputs {out.shape}"
        )
    m = t.size
    loss = float(np.mean((out - t) ** 2))

    grads: list[np.ndarray] = [np.empty(0)] * len(net.weights)
    # dL/dout at the output layer, then walk the layers backwards.  The
    # subgradient zeroes the path through any neuron resting on a stop.
    d_out = (2.0 / m) * (out - t)
    for k in range(len(net.weights), 0, -1):
        d_net = d_out * _subgrad_vec(trace.nets[k])
        grads[k - 1] = np.outer(d_net, trace.outputs[k - 1])
        if k > 1:
            d_out = net.weights[k - 1].T @ d_net
    return tuple(grads), loss


def backprop(
    net: Network, x: Sequence[float], target: Sequence[float]
) -> tuple[np.ndarray, ...]:
    """Gradient of the per-sample MSE with respect to every weight."""
    grads, _ = _backprop(net, x, target)
    return grads


def finite_diff_grads(
    net: Network,
    x: Sequence[float],
    target: Sequence[float],
    h: float = 1e-6,
) -> tuple[np.ndarray, ...]:
    """Central-difference gradient oracle.

    Perturbations are clipped to the weight box, which degrades to a
    one-sided difference at the -1/+1 boundary.
    """
    if h <= 0:
        raise RangeError("h must be positive")
    grads = []
    for k, w in enumerate(net.weights):
        g = np.zeros_like(w)
        for i in range(w.shape[0]):
            for j in range(w.shape[1]):
                up = min(w[i, j] + h, 1.0)
                down = max(w[i, j] - h, -1.0)
                loss_up = mse_loss(net.with_weight(k, i, j, up), x, target)
                loss_down = mse_loss(net.with_weight(k, i, j, down), x, target)
                g[i, j] = (loss_up - loss_down) / (up - down)
        grads.append(g)
    return tuple(grads)


def sgd_step(
    net: Network, grads: Sequence[np.ndarray], learning_rate: float
) -> Network:
    """One projected step: w <- clip(w - lr * g, -1, 1), elementwise."""
    if len(grads) != len(net.weights):
        raise ShapeError("gradient list does not match the weight matrices")
    ws = []
    for w, g in zip(net.weights, grads):
        if g.shape != w.shape:
            raise ShapeError(
                f"gradient shape {g.shape} does not match weights {w.shape}"
            )
        ws.append(np.clip(w - learning_rate * g, -1.0, 1.0))
    return net.with_weights(ws)


def _all_fit(net: Network, data: Dataset) -> bool:
    # Gate success readout: threshold every output at 0.5.
    for x, t in zip(data.inputs, data.targets):
        out = forward(net, x).output
        if any((o >= 0.5) != (tv >= 0.5) for o, tv in zip(out, t)):
            return False
    return True


def train(net: Network, data: Dataset, cfg: TrainConfig) -> TrainRun:
    """Per-sample projected SGD, deterministic for a given seed.

    Epoch loss is the mean of each sample's loss at the moment it was visited
    (standard SGD bookkeeping).  Weights are verified to stay inside the box
    after every epoch.
    """
    if len(data.inputs[0]) != len(net.free_inputs):
        raise ShapeError(
            f"dataset inputs have dimension {len(data.inputs[0])}, network "
            f"takes {len(net.free_inputs)}"
        )
    if len(data.targets[0]) != net.output_size:
        raise ShapeError(
            f"dataset targets have dimension {len(data.targets[0])}, network "
            f"outputs {net.output_size}"
        )
    rng = np.random.default_rng(cfg.seed)
    n = len(data)
    losses: list[float] = []
    max_abs: list[float] = []
    epochs_run = 0
    for _ in range(cfg.epochs):
        order = rng.permutation(n) if cfg.shuffle else np.arange(n)
        epoch_loss = 0.0
        for s in order:
            grads, loss = _backprop(net, data.inputs[s], data.targets[s])
            epoch_loss += loss
            net = sgd_step(net, grads, cfg.learning_rate)
        epoch_loss /= n
        if not math.isfinite(epoch_loss):
            raise TrainingDiverged(
                f"non-finite epoch loss after {epochs_run} epochs: {epoch_loss!r}"
            )
        losses.append(epoch_loss)
        peak = max(float(np.max(np.abs(w))) for w in net.weights)
        assert peak <= 1.0, "projection failed to keep weights in the box"
        max_abs.append(peak)
        epochs_run += 1
        if cfg.stop_when_fit and data.is_boolean and _all_fit(net, data):
            break
    success = _all_fit(net, data) if data.is_boolean else None
    return TrainRun(
        losses=tuple(losses),
        max_abs_weights=tuple(max_abs),
        network=net,
        success=success,
        seed=cfg.seed,
        epochs_run=epochs_run,
    )


@dataclass(frozen=True)
class RestartSummary:
    seed: int
    success: bool | None
    final_loss: float
    epochs_run: int


@dataclass(frozen=True)
class RestartResult:
    """First-success-wins sweep over seeded restarts."""

    runs: tuple[RestartSummary, ...]
    best: TrainRun
    best_seed: int

    @property
    def any_success(self) -> bool:
        return any(r.success for r in self.runs)


def train_restarts(
    layer_sizes: Sequence[int],
    data: Dataset,
    cfg: TrainConfig,
    restarts: int,
    pinned: dict[int, float] | None = None,
) -> RestartResult:
    """Train from `restarts` random initializations, seeds cfg.seed + r.

    Dead activation zones make some seeds unrecoverable; restarting is the
    supported remedy.  Stops at the first run that fits every sample;
    otherwise returns the run with the lowest final loss.
    """
    if restarts < 1:
        raise RangeError("restarts must be at least 1")
    summaries: list[RestartSummary] = []
    best: TrainRun | None = None
    best_seed = cfg.seed
    for r in range(restarts):
        seed = cfg.seed + r
        net0 = random_network(
            layer_sizes, seed=seed, init_range=cfg.init_range, pinned=pinned
        )
        run_cfg = TrainConfig(
            learning_rate=cfg.learning_rate,
            epochs=cfg.epochs,
            seed=seed,
            init_range=cfg.init_range,
            loss=cfg.loss,
            shuffle=cfg.shuffle,
            stop_when_fit=True,
        )
        run = train(net0, data, run_cfg)
        summaries.append(
            RestartSummary(
                seed=seed,
                success=run.success,
                final_loss=run.losses[-1],
                epochs_run=run.epochs_run,
            )
        )
        if best is None or run.losses[-1] < best.losses[-1]:
            best, best_seed = run, seed
        if run.success:
            best, best_seed = run, seed
            break
    assert best is not None
    return RestartResult(runs=tuple(summaries), best=best, best_seed=best_seed)
