"""Command-line surface.

Commands: eval, verify, train, buildsheet, activation, serve.

Exit codes: 0 success (and: all gate rows passed), 1 verification failure,
2 parse or usage error, 3 range error, 4 training divergence.  Tables print
numbers with 4 decimal places; documents keep full precision.  Indices in all
printed tables are 1-based, matching documents and build sheets.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .core import (
    LeverNetError,
    Network,
    RangeError,
    ShapeError,
    dorelu,
    forward,
)
from .gates import GateKind, make_gate, not_gate_sign_swapped, verify_gate
from .mechanics import export_build_sheet, parse_build_sheet
from .netdoc import (
    DocumentError,
    NetworkDocument,
    load_document,
    save_document,
    serialize_document,
)
from .training import (
    Dataset,
    TrainConfig,
    TrainingDiverged,
    gate_dataset,
    random_network,
    train,
    train_restarts,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_RANGE = 3
EXIT_DIVERGED = 4

_GATE_NAMES = [k.value for k in GateKind]

# default training topologies per gate; NOT pins its second input as bias
_GATE_TOPOLOGY = {
    GateKind.AND: ((2, 1, 1), {}),
    GateKind.OR: ((2, 1, 1), {}),
    GateKind.XOR: ((2, 2, 1), {}),
    GateKind.NOT: ((2, 1, 1), {1: 1.0}),
}


def _f4(v: float) -> str:
    return f"{float(v):.4f}"


# ---------------------------------------------------------------------------
# eval


def cmd_eval(args: argparse.Namespace) -> int:
    doc = load_document(args.file)
    net = doc.network
    trace = forward(net, args.input)
    print(f"network {'-'.join(str(s) for s in net.layer_sizes)}")
    for k in range(net.n_layers):
        label = "input" if k == 0 else ("output" if k == net.n_layers - 1 else "hidden")
        print(f"layer {k + 1} ({label})")
        for i in range(net.layer_sizes[k]):
            if k == 0:
                origin = " (pinned)" if i in net.pinned else ""
                print(f"  neuron {i + 1}  out {_f4(trace.outputs[0][i])}{origin}")
            else:
                state = "slack" if trace.is_slack(k, i) else "taut"
                print(
                    f"  neuron {i + 1}  net {_f4(trace.net(k, i))}  "
                    f"out {_f4(trace.out(k, i))}  {state}"
                )
    print("y = " + " ".join(_f4(v) for v in trace.output))
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def _print_report(report, note: str | None = None) -> None:
    header = f"gate {report.kind.value} threshold {_f4(report.threshold)}"
    if note:
        header += f"  [{note}]"
    print(header)
    for row in report.rows:
        bits = ",".join(str(b) for b in row.bits)
        verdict = "pass" if row.passed else "FAIL"
        print(
            f"  in ({bits})  raw {_f4(row.raw)}  "
            f"got {str(row.got).lower()}  want {str(row.expected).lower()}  {verdict}"
        )
    print(f"result {report.n_passed}/{len(report.rows)} pass")


def cmd_verify(args: argparse.Namespace) -> int:
    kind = GateKind(args.gate)
    if args.swapped_signs:
        if kind is not GateKind.NOT:
            print("error: --swapped-signs applies to the not gate only", file=sys.stderr)
            return EXIT_USAGE
        report = verify_gate(not_gate_sign_swapped())
        _print_report(report, note="input +1, bias -1")
        return EXIT_OK if report.passed else EXIT_FAIL

    report = verify_gate(make_gate(kind))
    _print_report(report)
    if kind is GateKind.NOT:
        # the wiring one might write down first, with the signs the other
        # way around, silently fails; show it next to the working gate
        alt = verify_gate(not_gate_sign_swapped())
        print()
        print("alternate wiring (input +1, bias -1) for comparison:")
        _print_report(alt, note="does not implement not")
    return EXIT_OK if report.passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# train


def _load_dataset(name: str) -> tuple[Dataset, GateKind | None]:
    if name in _GATE_NAMES:
        kind = GateKind(name)
        return gate_dataset(kind), kind
    path = Path(name)
    if not path.exists():
        raise DocumentError(
            f"no such dataset: {name!r} (gate name {_GATE_NAMES} or a file)"
        )
    import yaml

    data = yaml.safe_load(path.read_text())
    if not isinstance(data, dict) or "inputs" not in data or "targets" not in data:
        raise DocumentError(f"{name}: dataset file needs inputs and targets lists")
    return (
        Dataset(
            name=str(data.get("name", path.stem)),
            inputs=tuple(tuple(float(v) for v in row) for row in data["inputs"]),
            targets=tuple(tuple(float(v) for v in row) for row in data["targets"]),
        ),
        None,
    )


def _write_loss_log(path: str, losses) -> None:
    lines = [f"epoch,{n + 1},loss,{loss!r}" for n, loss in enumerate(losses)]
    Path(path).write_text("\n".join(lines) + "\n")


def _save_trained(args, network: Network, kind: GateKind | None) -> None:
    if not args.output:
        return
    doc = NetworkDocument(
        network=network,
        gate_kind=kind,
        threshold=make_gate(kind).threshold if kind else None,
        name=args.dataset if kind else None,
    )
    save_document(args.output, doc)
    print(f"network written to {args.output}")


def cmd_train(args: argparse.Namespace) -> int:
    data, kind = _load_dataset(args.dataset)

    if args.from_file:
        start = load_document(args.from_file).network
        sizes, pinned = start.layer_sizes, dict(start.pinned)
    elif args.layers:
        sizes, pinned = tuple(args.layers), {}
        start = None
    elif kind is not None:
        sizes, pinned = _GATE_TOPOLOGY[kind]
        start = None
    else:
        print("error: file datasets need --layers or --from", file=sys.stderr)
        return EXIT_USAGE

    cfg = TrainConfig(
        learning_rate=args.lr,
        epochs=args.epochs,
        seed=args.seed,
        stop_when_fit=True,
    )
    print(f"dataset {data.name}")
    print(f"layers {'-'.join(str(s) for s in sizes)}")

    if args.seed_sweep:
        result = train_restarts(
            sizes, data, cfg, restarts=args.seed_sweep, pinned=pinned or None
        )
        for run in result.runs:
            print(
                f"seed {run.seed}  success {str(bool(run.success)).lower()}  "
                f"final_loss {_f4(run.final_loss)}  epochs {run.epochs_run}"
            )
        print(f"best_seed {result.best_seed}")
        print(f"any_success {str(result.any_success).lower()}")
        if args.loss_log:
            _write_loss_log(args.loss_log, result.best.losses)
        _save_trained(args, result.best.network, kind)
        return EXIT_OK if result.any_success else EXIT_FAIL

    if start is None:
        start = random_network(sizes, seed=args.seed, pinned=pinned or None)
    run = train(start, data, cfg)
    print(f"seed {args.seed}")
    print(f"epochs_run {run.epochs_run}")
    print(f"final_loss {_f4(run.losses[-1])}")
    success = run.success if run.success is not None else "n/a"
    print(f"success {str(success).lower()}")
    if args.loss_log:
        _write_loss_log(args.loss_log, run.losses)
    _save_trained(args, run.network, kind)
    if run.success is None:
        return EXIT_OK
    return EXIT_OK if run.success else EXIT_FAIL


# ---------------------------------------------------------------------------
# buildsheet


def cmd_buildsheet(args: argparse.Namespace) -> int:
    if args.import_sheet:
        sheet = parse_build_sheet(Path(args.import_sheet).read_text())
        doc = NetworkDocument(network=sheet.to_network())
        if args.output:
            save_document(args.output, doc)
            print(f"network written to {args.output}")
        else:
            print(serialize_document(doc), end="")
        return EXIT_OK

    if not args.file:
        print("error: buildsheet needs --file or --import", file=sys.stderr)
        return EXIT_USAGE
    doc = load_document(args.file)
    text = export_build_sheet(doc.network).to_text()
    if args.output:
        Path(args.output).write_text(text)
        print(f"build sheet written to {args.output}")
    else:
        print(text, end="")
    return EXIT_OK


# ---------------------------------------------------------------------------
# activation


def cmd_activation(args: argparse.Namespace) -> int:
    if args.samples < 2:
        print("error: --samples must be at least 2", file=sys.stderr)
        return EXIT_USAGE
    print("x,phi")
    for x in np.linspace(-2.0, 2.0, args.samples):
        print(f"{_f4(x)},{_f4(dorelu(float(x)))}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# serve


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levernet",
        description="Simulate a lever-and-string mechanical neural network.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a network on one input vector")
    p.add_argument("--file", required=True, help="network document (.net)")
    p.add_argument(
        "--input",
        required=True,
        nargs="+",
        type=float,
        help="one value in [-1, 1] per free input",
    )
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="check a gate against its truth table")
    p.add_argument("gate", choices=_GATE_NAMES)
    p.add_argument(
        "--swapped-signs",
        action="store_true",
        help="verify the non-working not wiring (+1 input, -1 bias) alone",
    )
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("train", help="projected-gradient training")
    p.add_argument("dataset", help="gate name (and/or/not/xor) or dataset file")
    p.add_argument("--lr", type=float, default=0.1, help="learning rate")
    p.add_argument("--epochs", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--seed-sweep",
        type=int,
        metavar="N",
        help="restart from N seeded initializations, stop at first success",
    )
    p.add_argument("--from", dest="from_file", help="start from this .net file")
    p.add_argument(
        "--layers", type=int, nargs="+", help="layer sizes for random init"
    )
    p.add_argument("--output", help="write the trained network document here")
    p.add_argument("--loss-log", help="write per-epoch losses here (CSV lines)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("buildsheet", help="export or import clamp settings")
    p.add_argument("--file", help="network document to export")
    p.add_argument(
        "--import",
        dest="import_sheet",
        help="parse a build sheet file back into a network document",
    )
    p.add_argument("--output", help="write the result here instead of stdout")
    p.set_defaults(func=cmd_buildsheet)

    p = sub.add_parser("activation", help="sample the clipped activation curve")
    p.add_argument("--samples", type=int, default=81, help="points over [-2, 2]")
    p.set_defaults(func=cmd_activation)

    p = sub.add_parser("serve", help="run the interactive session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8714)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except TrainingDiverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except RangeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RANGE
    except (DocumentError, ShapeError, LeverNetError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
