"""Simulator for a lever-and-string mechanical neural network.

A biasless multilayer perceptron whose weights are clamp positions in
[-1, 1] and whose hidden/output activations are lever angles clipped to
[0, 1].  The package covers the abstract network, the mechanical
transmission model that realizes it, canonical logic-gate configurations,
projected-gradient training, a hand-editable document format with build-sheet
export, a CLI, and a session server for interactive classroom use.
"""

from .core import (
    DEFAULT_LAYER_SIZES,
    TRACE_TOL,
    WEIGHT_MAX,
    WEIGHT_MIN,
    ForwardTrace,
    LeverNetError,
    Network,
    RangeError,
    ShapeError,
    dorelu,
    forward,
    merged_inputs,
    net_input,
    pin_input,
    unpin_input,
    zero_network,
)
from .gates import (
    TRUTH_TABLES,
    GateKind,
    GateReport,
    GateRow,
    GateSpec,
    SeparabilityReport,
    TruthTable,
    evaluate_gate,
    make_gate,
    not_gate_sign_swapped,
    single_layer_search,
    single_layer_xor_search,
    verify_gate,
)
from .mechanics import (
    BuildEntry,
    BuildSheet,
    ClampPosition,
    LeverState,
    MechanicalState,
    PulleyAssembly,
    clamp_layout,
    export_build_sheet,
    mechanical_forward,
    parse_build_sheet,
    pulley_reduce,
    weight_to_clamp,
)
from .netdoc import (
    DOCUMENT_VERSION,
    DocumentError,
    NetworkDocument,
    load_document,
    parse_document,
    save_document,
    serialize_document,
    serialize_network,
)
from .training import (
    Dataset,
    RestartResult,
    RestartSummary,
    TrainConfig,
    TrainingDiverged,
    TrainRun,
    backprop,
    dorelu_subgrad,
    finite_diff_grads,
    gate_dataset,
    mse_loss,
    random_network,
    sgd_step,
    train,
    train_restarts,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_LAYER_SIZES",
    "DOCUMENT_VERSION",
    "TRACE_TOL",
    "TRUTH_TABLES",
    "WEIGHT_MAX",
    "WEIGHT_MIN",
    "BuildEntry",
    "BuildSheet",
    "ClampPosition",
    "Dataset",
    "DocumentError",
    "ForwardTrace",
    "GateKind",
    "GateReport",
    "GateRow",
    "GateSpec",
    "LeverNetError",
    "LeverState",
    "MechanicalState",
    "Network",
    "NetworkDocument",
    "PulleyAssembly",
    "RangeError",
    "RestartResult",
    "RestartSummary",
    "SeparabilityReport",
    "ShapeError",
    "TrainConfig",
    "TrainRun",
    "TrainingDiverged",
    "TruthTable",
    "backprop",
    "clamp_layout",
    "dorelu",
    "dorelu_subgrad",
    "evaluate_gate",
    "export_build_sheet",
    "finite_diff_grads",
    "forward",
    "gate_dataset",
    "load_document",
    "make_gate",
    "mechanical_forward",
    "merged_inputs",
    "mse_loss",
    "net_input",
    "not_gate_sign_swapped",
    "parse_build_sheet",
    "parse_document",
    "pin_input",
    "pulley_reduce",
    "random_network",
    "save_document",
    "serialize_document",
    "serialize_network",
    "sgd_step",
    "single_layer_search",
    "single_layer_xor_search",
    "train",
    "train_restarts",
    "unpin_input",
    "verify_gate",
    "weight_to_clamp",
    "zero_network",
]
