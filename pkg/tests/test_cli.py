import io
import json
import os
from pathlib import Path

import pytest

from structnet.harness.cli import run_cli
from structnet.harness.reports import validate_report

DATA = Path(__file__).resolve().parents[1] / "data"
GOLDEN = Path(__file__).parent / "golden"
UPDATE = os.environ.get("STRUCTNET_UPDATE_GOLDEN") == "1"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_cli([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


CASES = {
    "analyze_dilation": ("analyze", DATA / "dilation.graph"),
    "drivers_chain": ("drivers", DATA / "chain.graph"),
    "sensors_dilation": ("sensors", DATA / "dilation.graph"),
    "compare_dilation": ("compare", DATA / "dilation.graph"),
    "ablate_chain": ("ablate", DATA / "chain.graph"),
    "gen_forest": ("gen", "random_forest", "n=4", "m_roots=2", "--seed", "7"),
    "verify_graph_nonlin": ("verify", DATA / "nonlinear_dilation.dyn", "--check", "graph"),
    "verify_obs_nonlin": ("verify", DATA / "nonlinear_dilation.dyn", "--check", "observability"),
    "verify_acc_lin": ("verify", DATA / "linear_dilation.dyn", "--check", "accessibility"),
    "verify_auto_lin": ("verify", DATA / "linear_dilation.dyn", "--check", "autonomous", "x1 - 1/2*x2"),
    "verify_hidden_lin": ("verify", DATA / "linear_dilation.dyn", "--check", "hidden", "x1 - x2"),
    "witness_dilation": ("witness", DATA / "dilation.graph", "--mode", "accessible"),
    "simulate_lin": ("simulate", DATA / "linear_dilation.dyn", "--x0", "1", "1", "--T", "0.05", "--dt", "0.01"),
}


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name):
    code, out, err = run(*CASES[name])
    assert code == 0, err
    doc = json.loads(out)
    validate_report(doc["command"], doc)
    path = GOLDEN / f"{name}.json"
    if UPDATE or not path.exists():
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    assert doc == json.loads(path.read_text())


def test_analyze_dilation_values():
    doc = json.loads(run("analyze", DATA / "dilation.graph")[1])
    assert doc["accessible"] and doc["observable"]
    assert not doc["lin_controllable"] and not doc["lin_observable"]
    assert doc["linear"]["controllability"]["witness"] == ["x1", "x2"]


def test_dot_output():
    code, out, _ = run("analyze", DATA / "dilation.graph", "--dot")
    assert code == 0 and out.lstrip().startswith("digraph")


def test_csv_to_stdout():
    code, out, _ = run("simulate", DATA / "linear_dilation.dyn", "--x0", "1", "1", "--T", "0.02", "--dt", "0.01", "--csv", "-")
    assert code == 0 and out.splitlines()[0] == "t,x1,x2,u1"


def test_strict_failures():
    assert run("verify", DATA / "linear_dilation.dyn", "--check", "accessibility", "--strict")[0] == 1
    assert run("verify", DATA / "nonlinear_dilation.dyn", "--check", "accessibility", "--strict")[0] == 0
    assert run("analyze", DATA / "chain.graph", "--strict")[0] == 0
    # autonomous: a confirmed candidate means accessibility fails
    assert run("verify", DATA / "linear_dilation.dyn", "--check", "autonomous", "x1 - 1/2*x2", "--strict")[0] == 1


def test_strict_profile_accepted():
    code, out, _ = run("verify", DATA / "nonlinear_dilation.dyn", "--check", "observability", "--tolerance-profile", "strict")
    assert code == 0 and json.loads(out)["decision"] == "yes"


@pytest.mark.parametrize(
    "argv",
    [
        ("analyze", "/nonexistent.graph"),
        ("frobnicate",),
        ("gen", "random_dag", "p=2"),
        ("gen", "random_dag", "oops"),
        ("verify", DATA / "linear_dilation.dyn", "--check", "autonomous"),
        ("verify", DATA / "linear_dilation.dyn", "--check", "autonomous", "x1 +"),
        ("simulate", DATA / "linear_dilation.dyn", "--x0", "1", "--T", "1", "--dt", "0.1"),
        ("witness", DATA / "linear_dilation.dyn", "--mode", "accessible"),
    ],
)
def test_input_errors_exit_2(argv):
    code, out, err = run(*argv)
    assert code == 2 and err


def test_error_document_with_json():
    code, out, err = run("analyze", "/nonexistent.graph", "--json")
    assert code == 2
    validate_report("error", json.loads(out))


def test_bad_graph_file(tmp_path):
    p = tmp_path / "bad.graph"
    p.write_text("state x1\nx1 -> u1\n")
    code, out, err = run("analyze", p, "--json")
    assert code == 2
    assert json.loads(out)["line"] == 2


def test_gen_round_trips_through_analyze(tmp_path):
    out_file = tmp_path / "g.graph"
    assert run("gen", "erdos_renyi_directed", "n=5", "p=0.4", "--seed", "1", "--out", out_file)[0] == 0
    code, out, _ = run("analyze", out_file)
    assert code == 0 and json.loads(out)["accessible"]


def test_witness_output_parses(tmp_path):
    p = tmp_path / "w.dyn"
    assert run("witness", DATA / "dilation.graph", "--mode", "observable", "--out", p)[0] == 0
    code, out, _ = run("verify", p, "--check", "observability")
    assert code == 0 and json.loads(out)["decision"] == "yes"
