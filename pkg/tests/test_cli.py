import csv
import io
import json
from fractions import Fraction
from pathlib import Path

import pytest

from gatenoise.cli import main, render_value
from gatenoise.numeric import BETA2, RationalInterval

SAMPLES = Path(__file__).resolve().parent.parent / "samples"
AMPLIFY_LEAVES = ["--leaf", "u=0.85:0.75", "--leaf", "v=0.85:0.75"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_or_amplification_delta(capsys):
    code, out, _ = run(capsys, "propagate", str(SAMPLES / "or_amplify.gf"), *AMPLIFY_LEAVES)
    assert code == 0
    assert out.splitlines()[0] == "node_id,depth,p0_world0,p0_world1,a,delta,weighted_bias"
    assert rows(out)[-1]["delta"] == "0.128"


def test_or_amplification_exact_render(capsys):
    code, out, _ = run(capsys, "propagate", str(SAMPLES / "or_amplify.gf"), *AMPLIFY_LEAVES, "--exact-render")
    assert code == 0 and rows(out)[-1]["delta"] == "16/125"
    assert "sqrt7" in rows(out)[-1]["weighted_bias"]


def test_propagate_normalizes_with_note(capsys, tmp_path):
    target = tmp_path / "trace.csv"
    code, out, err = run(
        capsys, "propagate", str(SAMPLES / "xor4.gf"), "-d", "x1", "--set", "x2=0,x3=1", "--set", "x4=0",
        "-o", str(target),
    )
    assert code == 0 and out == "" and "normalized" in err
    trace = rows(target.read_text())
    assert trace[0]["depth"] == "2" and trace[-1]["depth"] == "0"


def test_propagate_interval_mode(capsys):
    code, out, _ = run(
        capsys, "propagate", str(SAMPLES / "xor4.gf"), "-d", "x1", "--set", "x2=0,x3=1,x4=0", "--mode", "interval"
    )
    assert code == 0 and rows(out)[-1]["delta"].startswith("[")


def test_propagate_stdin(capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO("(in x1)"))
    code, out, _ = run(capsys, "propagate", "-", "-d", "x1")
    assert code == 0 and rows(out)[0]["delta"] == "1"


def test_propagate_missing_input_fails(capsys):
    code, _, err = run(capsys, "propagate", str(SAMPLES / "xor4.gf"), "-d", "x1")
    assert code == 1 and "not fixed" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["frobnicate"],
        ["propagate", "missing-file.gf", "-d", "x1"],
        ["propagate", "-", "--set", "x=2"],
        ["scan", "--eps", "0.7"],
        ["scan", "--depths", "a..b"],
        ["scan", "--leaves", "sparse"],
        ["potential", "--step", "0"],
        ["verify", "--only", "fact9"],
        ["verify", "--beta", "0.6"],
        ["verify", "--budget", "0"],
    ],
)
def test_usage_errors(capsys, argv, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO("(in x1)"))
    with pytest.raises(SystemExit) as exc:
        raise SystemExit(main(argv))
    assert exc.value.code == 64


def test_malformed_formula(capsys, tmp_path):
    bad = tmp_path / "bad.gf"
    bad.write_text("(or 1/10 (in x1)")
    code, _, err = run(capsys, "propagate", str(bad), "-d", "x1")
    assert code == 65 and "formula error" in err
    bad.write_text("(or 3/4 (in x1) (in x2))")
    assert run(capsys, "normalize", str(bad))[0] == 65


def test_normalize(capsys):
    code, out, _ = run(capsys, "normalize", str(SAMPLES / "xor4.gf"))
    assert code == 0 and "nand" not in out and out.startswith("(")


def test_potential_table(capsys):
    code, out, _ = run(capsys, "potential", "--step", "1/4")
    table = rows(out)
    assert code == 0 and [r["x"] for r in table] == ["0", "0.25", "0.5", "0.75", "1"]
    assert table[2]["q"] == "0.958374344468"
    assert table[1]["q"] == table[3]["q"]


def test_scan_parity(capsys):
    code, out, _ = run(capsys, "scan", "--gate", "parity", "--eps", "b2", "--depths", "1..8")
    table = rows(out)
    assert code == 0 and len(table) == 8
    assert list(table[0]) == ["epsilon", "depth", "delta_out", "weighted_bias_out", "max_gate_ratio"]
    wb = [float(r["weighted_bias_out"]) for r in table]
    assert all(y <= x for x, y in zip(wb, wb[1:]))


def test_scan_full_noise(capsys):
    code, out, _ = run(capsys, "scan", "--eps", "0.5", "--depths", "1,2,3")
    assert code == 0 and all(r["delta_out"] == "0" for r in rows(out))


def test_verify_subset_success(capsys, tmp_path):
    target = tmp_path / "summary.json"
    code, out, _ = run(capsys, "verify", "--only", "fact2b_plus,fact3_mu0", "--json", str(target))
    assert code == 0 and "certified" in out
    data = json.loads(target.read_text())
    assert data["status"] == "certified"
    assert {d["name"] for d in data["certificates"]} == {"fact2b_plus", "fact3_mu0"}


def test_verify_failure_exit(capsys):
    code, out, _ = run(capsys, "verify", "--only", "fact2a_minus")
    assert code == 1 and "failed" in out


def test_verify_budget_exit(capsys):
    assert run(capsys, "verify", "--only", "fact1_mu0", "--budget", "1")[0] == 2


def test_render_value():
    assert render_value(Fraction(1, 3), digits=4) == "0.3333"
    assert render_value(Fraction(1, 3), exact=True) == "1/3"
    assert render_value(BETA2, digits=6) == "0.0885622"
    assert render_value(BETA2, exact=True) == "3/4 - 1/4*sqrt7"
    assert render_value(RationalInterval(Fraction(1, 4), Fraction(1, 2))) == "[0.25; 0.5]"
    assert render_value(None) == ""
