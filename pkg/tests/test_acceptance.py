"""Acceptance gate: one test per release criterion, one printed line each.

Every test prints `ACCEPT PASS <criterion>` or `ACCEPT FAIL <criterion>`
directly to the terminal (bypassing capture) so a full `pytest` run shows the
scorecard at a glance.  Stated runtime budgets are asserted, not advisory.
"""

import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

from levernet import (
    GateKind,
    GateSpec,
    NetworkDocument,
    TrainConfig,
    forward,
    gate_dataset,
    make_gate,
    mechanical_forward,
    not_gate_sign_swapped,
    parse_document,
    pin_input,
    serialize_document,
    single_layer_search,
    single_layer_xor_search,
    train,
    train_restarts,
    verify_gate,
)
from levernet.cli import main as cli_main
from levernet.training import backprop, finite_diff_grads, random_network

GATES_DIR = Path(__file__).resolve().parent.parent / "gates"

# (x1, x2, not(x1), and, or, xor): 4 rows x 4 gates = 16 table entries
TRUTH_TABLE_16 = [
    (0, 0, 1, 0, 0, 0),
    (0, 1, 1, 0, 1, 1),
    (1, 0, 0, 0, 1, 1),
    (1, 1, 0, 1, 1, 0),
]


@contextmanager
def criterion(capsys, name, budget=None):
    t0 = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - t0
        if budget is not None:
            assert elapsed < budget, (
                f"{name}: took {elapsed:.2f}s, budget {budget:.0f}s"
            )
    except BaseException:
        with capsys.disabled():
            print(f"\nACCEPT FAIL  {name}")
        raise
    with capsys.disabled():
        print(f"\nACCEPT PASS  {name}  [{elapsed:.2f}s]")


def test_gate_truth_tables(capsys):
    with criterion(
        capsys,
        "gate truth tables: all 16 table entries exact, zero tolerance",
        budget=1.0,
    ):
        specs = {kind: make_gate(kind) for kind in GateKind}
        checked = 0
        for x1, x2, t_not, t_and, t_or, t_xor in TRUTH_TABLE_16:
            for kind, bits, expected in (
                (GateKind.NOT, (x1,), t_not),
                (GateKind.AND, (x1, x2), t_and),
                (GateKind.OR, (x1, x2), t_or),
                (GateKind.XOR, (x1, x2), t_xor),
            ):
                spec = specs[kind]
                x = [1.0 if b else 0.0 for b in bits]
                raw = float(forward(spec.network, x).output[0])
                got = raw >= spec.threshold
                assert got == bool(expected), (kind, bits)
                checked += 1
        assert checked == 16
        # raw lever angles are exact dyadics, compared with == (no tolerance)
        raws = {
            kind: tuple(r.raw for r in verify_gate(specs[kind]).rows)
            for kind in GateKind
        }
        assert raws[GateKind.AND] == (0.0, 0.5, 0.5, 1.0)
        assert raws[GateKind.OR] == (0.0, 0.5, 0.5, 1.0)
        assert raws[GateKind.XOR] == (0.0, 1.0, 1.0, 0.0)
        assert raws[GateKind.NOT] == (1.0, 0.0)


def test_xor_raw_outputs(capsys):
    with criterion(capsys, "xor raw outputs are exactly {0, 1, 1, 0}"):
        net = make_gate(GateKind.XOR).network
        raws = [
            float(forward(net, [float(a), float(b)]).output[0])
            for a, b in ((0, 0), (0, 1), (1, 0), (1, 1))
        ]
        assert raws == [0.0, 1.0, 1.0, 0.0]


def test_not_gate_discrepancy(capsys):
    with criterion(
        capsys,
        "not gate: swapped-sign wiring yields raw 0 on both rows and fails; "
        "canonical wiring passes; `verify not` emits both",
    ):
        swapped = verify_gate(not_gate_sign_swapped())
        assert tuple(r.raw for r in swapped.rows) == (0.0, 0.0)
        assert not swapped.passed
        assert swapped.n_passed == 1  # only the x=1 row comes out right

        canonical = verify_gate(make_gate(GateKind.NOT))
        assert canonical.passed
        assert canonical.n_passed == 2

        assert cli_main(["verify", "not"]) == 0
        out = capsys.readouterr().out
        assert "alternate wiring" in out
        assert out.count("FAIL") == 1  # the swapped table's x=0 row


def test_mechanical_equals_abstract(capsys):
    with criterion(
        capsys,
        "mechanical forward matches abstract forward on 1000 random 2-4-2 "
        "samples within 1e-12; fan-in-4 pulley output is exactly 1/4 of the "
        "summed string displacements",
    ):
        rng = np.random.default_rng(20260821)
        for _ in range(1000):
            net = random_network((2, 4, 2), seed=rng, init_range=(-1.0, 1.0))
            x = rng.uniform(-1.0, 1.0, size=2)
            trace = forward(net, x)
            state = mechanical_forward(net, x)
            for k in range(3):
                gap = np.abs(state.angles[k] - trace.outputs[k])
                assert float(np.max(gap)) <= 1e-12
            # output layer: four strings, two pulley stages
            assert state.pulleys[1].fan_in == 4
            assert state.pulleys[1].stages == 2
            assert state.pulleys[1].attachment_fraction == 0.25
            summed = state.string_displacements[1].sum(axis=1)
            assert np.array_equal(state.pulley_outputs[1], 0.25 * summed)


def test_gradient_oracle(capsys):
    with criterion(
        capsys,
        "backprop matches central differences (h=1e-6) within 1e-4 relative "
        "on 200 random interior points",
        budget=10.0,
    ):
        margin = 1e-3  # stay away from the activation kinks at 0 and 1
        topologies = ((2, 3, 1), (2, 4, 2), (3, 2, 2))
        rng = np.random.default_rng(7)
        checked = 0
        while checked < 200:
            sizes = topologies[checked % len(topologies)]
            net = random_network(sizes, seed=rng)
            x = rng.uniform(-1.0, 1.0, size=sizes[0])
            t = rng.uniform(0.0, 1.0, size=sizes[-1])
            interior = all(
                np.all(np.abs(nets) > margin)
                and np.all(np.abs(nets - 1.0) > margin)
                for nets in forward(net, x).nets[1:]
            )
            if not interior:
                continue
            analytic = backprop(net, x, t)
            numeric = finite_diff_grads(net, x, t, h=1e-6)
            for g, f in zip(analytic, numeric):
                assert np.allclose(g, f, rtol=1e-4, atol=1e-8)
            checked += 1
        assert checked == 200


def test_projection_every_epoch(capsys):
    with criterion(
        capsys, "projection: max |w| <= 1 after every epoch at any step size"
    ):
        data = gate_dataset(GateKind.XOR)
        for lr in (0.1, 1.0, 5.0):
            cfg = TrainConfig(learning_rate=lr, epochs=200, seed=3)
            run = train(random_network((2, 3, 1), seed=3), data, cfg)
            assert len(run.max_abs_weights) == run.epochs_run
            assert all(m <= 1.0 for m in run.max_abs_weights)


def test_training_smoke_xor(capsys):
    with criterion(
        capsys,
        "xor learned by at least one of 20 restarts "
        "(lr 0.1, <=5000 epochs, 2-2-1)",
        budget=30.0,
    ):
        cfg = TrainConfig(learning_rate=0.1, epochs=5000, seed=0)
        result = train_restarts((2, 2, 1), gate_dataset(GateKind.XOR), cfg, 20)
        assert result.any_success
        learned = GateSpec(
            kind=GateKind.XOR,
            network=result.best.network,
            threshold=0.5,
            arity=2,
        )
        assert verify_gate(learned).passed


def test_xor_not_single_layer_separable(capsys):
    with criterion(
        capsys,
        "direct-wiring sweep at resolution 0.1: zero xor solutions, "
        "and/or both solvable",
        budget=10.0,
    ):
        report = single_layer_xor_search(resolution=0.1)
        assert report.solutions == 0
        assert not report.separable
        for kind in (GateKind.AND, GateKind.OR):
            found = single_layer_search(kind, resolution=0.1)
            assert found.solutions >= 1
            assert found.separable


def test_document_round_trip(capsys):
    with criterion(
        capsys,
        "document round-trip identity on shipped .net files "
        "and 100 random networks",
    ):
        shipped = sorted(GATES_DIR.glob("*.net"))
        assert len(shipped) == 4
        for path in shipped:
            text = path.read_text()
            assert serialize_document(parse_document(text)) == text

        rng = np.random.default_rng(99)
        for _ in range(100):
            depth = int(rng.integers(2, 5))
            sizes = tuple(int(v) for v in rng.integers(1, 5, size=depth))
            net = random_network(sizes, seed=rng, init_range=(-1.0, 1.0))
            if sizes[0] > 1 and rng.random() < 0.3:
                net = pin_input(net, 0, float(rng.uniform(-1.0, 1.0)))
            text = serialize_document(NetworkDocument(network=net))
            parsed = parse_document(text)
            assert parsed.network == net  # bitwise: exact weights and pins
            assert serialize_document(parsed) == text


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
