"""Command-line tests, driven through main() with captured stdout.

Exit codes: 0 ok, 1 verification/training failure, 2 parse or usage,
3 range, 4 divergence.
"""

import re
from pathlib import Path

import pytest

from levernet import GateKind, make_gate, parse_document, verify_gate
from levernet.cli import main

GATES_DIR = Path(__file__).resolve().parent.parent / "gates"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# ---------------------------------------------------------------------------
# eval


def test_eval_xor_rows(capsys):
    want = {"0 0": "0.0000", "0 1": "1.0000", "1 0": "1.0000", "1 1": "0.0000"}
    for bits, y in want.items():
        code, out, _ = run(
            capsys, "eval", "--file", str(GATES_DIR / "xor.net"),
            "--input", *bits.split(),
        )
        assert code == 0
        assert out.strip().splitlines()[-1] == f"y = {y}"


def test_eval_prints_per_neuron_table(capsys):
    code, out, _ = run(
        capsys, "eval", "--file", str(GATES_DIR / "xor.net"), "--input", "1", "0"
    )
    assert code == 0
    assert "layer 2 (hidden)" in out
    assert "net -1.0000  out 0.0000  slack" in out
    assert "net 1.0000  out 1.0000  taut" in out


def test_eval_marks_pinned_inputs(capsys):
    code, out, _ = run(
        capsys, "eval", "--file", str(GATES_DIR / "not.net"), "--input", "0"
    )
    assert code == 0
    assert "(pinned)" in out
    assert out.strip().splitlines()[-1] == "y = 1.0000"


def test_eval_all_zero_input(capsys):
    code, out, _ = run(
        capsys, "eval", "--file", str(GATES_DIR / "xor.net"), "--input", "0", "0"
    )
    assert code == 0
    assert out.count("out 0.0000") == 5  # every neuron horizontal


def test_eval_range_error_exits_3(capsys):
    code, _, err = run(
        capsys, "eval", "--file", str(GATES_DIR / "xor.net"), "--input", "2", "0"
    )
    assert code == 3
    assert "[-1, 1]" in err


def test_eval_missing_file_exits_2(capsys):
    code, _, err = run(capsys, "eval", "--file", "nope.net", "--input", "1", "0")
    assert code == 2
    assert "error" in err


def test_eval_unparseable_file_exits_2(capsys, tmp_path):
    bad = tmp_path / "bad.net"
    bad.write_text("version: 7\n")
    code, _, err = run(capsys, "eval", "--file", str(bad), "--input", "1")
    assert code == 2


# ---------------------------------------------------------------------------
# verify


@pytest.mark.parametrize("gate,rows", [("and", 4), ("or", 4), ("xor", 4), ("not", 2)])
def test_verify_shipped_gates_pass(capsys, gate, rows):
    code, out, _ = run(capsys, "verify", gate)
    assert code == 0
    assert f"result {rows}/{rows} pass" in out


def test_verify_not_also_shows_the_failing_wiring(capsys):
    code, out, _ = run(capsys, "verify", "not")
    assert code == 0
    assert "result 2/2 pass" in out
    assert "alternate wiring" in out
    assert "result 1/2 pass" in out
    assert out.count("FAIL") == 1


def test_verify_swapped_signs_fails(capsys):
    code, out, _ = run(capsys, "verify", "not", "--swapped-signs")
    assert code == 1
    assert "result 1/2 pass" in out


def test_swapped_signs_is_not_specific(capsys):
    code, _, err = run(capsys, "verify", "xor", "--swapped-signs")
    assert code == 2


def test_verify_unknown_gate_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nand"])
    assert exc.value.code == 2
    capsys.readouterr()


# ---------------------------------------------------------------------------
# train


def test_train_from_canonical_and_succeeds_immediately(capsys):
    code, out, _ = run(
        capsys, "train", "and", "--from", str(GATES_DIR / "and.net")
    )
    assert code == 0
    assert "epochs_run 1" in out
    assert "success true" in out
    assert "seed 0" in out


def test_train_xor_known_seed(capsys, tmp_path):
    out_doc = tmp_path / "trained.net"
    loss_log = tmp_path / "losses.csv"
    code, out, _ = run(
        capsys, "train", "xor", "--seed", "9",
        "--output", str(out_doc), "--loss-log", str(loss_log),
    )
    assert code == 0
    assert "success true" in out
    assert "seed 9" in out

    doc = parse_document(out_doc.read_text())
    assert doc.gate_kind == GateKind.XOR
    assert verify_gate(doc.gate_spec()).passed

    lines = loss_log.read_text().strip().splitlines()
    epochs_run = int(re.search(r"epochs_run (\d+)", out).group(1))
    assert len(lines) == epochs_run
    assert all(re.fullmatch(r"epoch,\d+,loss,[0-9.eE+-]+", ln) for ln in lines)
    assert [int(ln.split(",")[1]) for ln in lines] == list(range(1, epochs_run + 1))


def test_train_seed_sweep_reports_seeds(capsys):
    code, out, _ = run(
        capsys, "train", "xor", "--seed", "9", "--seed-sweep", "3"
    )
    assert code == 0
    assert "seed 9  success true" in out
    assert "best_seed 9" in out
    assert "any_success true" in out


def test_train_missing_dataset_exits_2(capsys):
    code, _, err = run(capsys, "train", "nonesuch")
    assert code == 2
    assert "no such dataset" in err


def test_train_file_dataset_needs_layers(capsys, tmp_path):
    data = tmp_path / "data.yaml"
    data.write_text("inputs:\n- [0.5]\ntargets:\n- [0.25]\n")
    code, _, err = run(capsys, "train", str(data))
    assert code == 2
    assert "--layers" in err


def test_train_file_dataset_runs(capsys, tmp_path):
    data = tmp_path / "data.yaml"
    data.write_text(
        "name: halving\ninputs:\n- [0.5]\n- [1.0]\ntargets:\n- [0.25]\n- [0.5]\n"
    )
    code, out, _ = run(
        capsys, "train", str(data), "--layers", "1", "1", "--epochs", "200"
    )
    assert code == 0
    assert "dataset halving" in out
    assert "success n/a" in out


def test_train_bad_learning_rate_exits_3(capsys):
    code, _, err = run(capsys, "train", "xor", "--lr", "-1")
    assert code == 3


def test_train_not_gate_pins_bias_by_default(capsys, tmp_path):
    out_doc = tmp_path / "not.net"
    code, out, _ = run(
        capsys, "train", "not", "--seed", "0", "--seed-sweep", "10",
        "--output", str(out_doc),
    )
    assert code == 0
    assert "any_success true" in out
    net = parse_document(out_doc.read_text()).network
    assert dict(net.pinned) == {1: 1.0}


# ---------------------------------------------------------------------------
# buildsheet

XOR_SHEET = """\
layer=2 recv=1 send=1 clamp=1.0000
layer=2 recv=1 send=2 clamp=-1.0000
layer=2 recv=2 send=1 clamp=-1.0000
layer=2 recv=2 send=2 clamp=1.0000
layer=3 recv=1 send=1 clamp=1.0000
layer=3 recv=1 send=2 clamp=1.0000
"""


def test_buildsheet_export_xor(capsys):
    code, out, _ = run(capsys, "buildsheet", "--file", str(GATES_DIR / "xor.net"))
    assert code == 0
    assert out == XOR_SHEET


def test_buildsheet_import_round_trip(capsys, tmp_path):
    sheet_path = tmp_path / "xor.sheet"
    doc_path = tmp_path / "back.net"
    code, _, _ = run(
        capsys, "buildsheet", "--file", str(GATES_DIR / "xor.net"),
        "--output", str(sheet_path),
    )
    assert code == 0
    code, _, _ = run(
        capsys, "buildsheet", "--import", str(sheet_path), "--output", str(doc_path)
    )
    assert code == 0
    net = parse_document(doc_path.read_text()).network
    assert net == make_gate(GateKind.XOR).network


def test_buildsheet_pin_directive(capsys):
    code, out, _ = run(capsys, "buildsheet", "--file", str(GATES_DIR / "not.net"))
    assert code == 0
    assert "pin input=2 value=1.0000" in out


def test_buildsheet_needs_a_source(capsys):
    code, _, err = run(capsys, "buildsheet")
    assert code == 2


def test_buildsheet_bad_sheet_exits_2(capsys, tmp_path):
    bad = tmp_path / "bad.sheet"
    bad.write_text("layer=2 recv=1 send=1 clamp=1.0\nnot a sheet line\n")
    code, _, err = run(capsys, "buildsheet", "--import", str(bad))
    assert code == 2


# ---------------------------------------------------------------------------
# activation


def test_activation_endpoints_and_shape(capsys):
    code, out, _ = run(capsys, "activation", "--samples", "5")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "x,phi"
    assert lines[1] == "-2.0000,0.0000"
    assert lines[-1] == "2.0000,1.0000"
    assert len(lines) == 6


def test_activation_hits_knee_points(capsys):
    # default 81 samples step 0.05, so 0 and 1 land exactly on the grid
    code, out, _ = run(capsys, "activation")
    assert code == 0
    assert "\n0.0000,0.0000\n" in out
    assert "\n1.0000,1.0000\n" in out
    assert "\n0.5000,0.5000\n" in out


def test_activation_column_is_monotone(capsys):
    code, out, _ = run(capsys, "activation", "--samples", "41")
    values = [float(ln.split(",")[1]) for ln in out.strip().splitlines()[1:]]
    assert values == sorted(values)
    assert values[0] == 0.0 and values[-1] == 1.0


def test_activation_samples_validated(capsys):
    code, _, err = run(capsys, "activation", "--samples", "1")
    assert code == 2
