import json
import subprocess
import sys
from fractions import Fraction

import pytest

from cramlab.cli import dispatch, load_graph, main
from cramlab.density import density_report
from cramlab.experiments import TrialConfig, janson_bound, run_experiment
from cramlab.graph import graph_from_name, serialize_graph
from cramlab.oracle import decide_cram
from cramlab.rainbow import rainbow_colour
from cramlab.triangle import colour_graph_triangle_mode


def test_no_arguments_is_an_error():
    res = dispatch([])
    assert res.status == "error" and res.exit_code != 0
    assert "usage" in res.payload


def test_unknown_subcommand_and_flag():
    assert dispatch(["frobnicate"]).status == "error"
    assert dispatch(["density", "--input", "K5", "--bogus"]).status == "error"


def test_randomized_commands_need_a_seed():
    res = dispatch(["experiment", "--mode", "scan", "--n", "50", "--c", "0.05", "--trials", "1"])
    assert res.status == "error"


def test_density_payload():
    res = dispatch(["density", "--input", "K5"])
    assert res.status == "ok" and res.payload["m2"] == "3/1"
    assert res.payload == density_report(graph_from_name("K5")).to_json()


def test_decide_tight_host():
    res = dispatch(["decide", "--mode", "cram", "--k", "3", "--pattern", "K3", "--input", "K6-minus-triangle"])
    assert res.status == "ok" and res.payload["arrows"] is True
    direct = decide_cram(graph_from_name("K6-minus-triangle"), 3, graph_from_name("K3"))
    assert res.payload == direct.to_json()


def test_decide_budget_is_indeterminate():
    res = dispatch(["decide", "--mode", "cram", "--k", "3", "--pattern", "K3", "--input", "K6", "--budget", "5"])
    assert res.status == "indeterminate" and res.exit_code == 2


def test_file_takes_precedence(tmp_path):
    path = tmp_path / "K5"
    path.write_text(serialize_graph(graph_from_name("C4")))
    assert load_graph(str(path)) == graph_from_name("C4")
    res = dispatch(["density", "--input", str(path)])
    assert res.payload["m2"] == "3/2"


def test_colour_matches_module():
    res = dispatch(["colour", "--mode", "aram", "--pattern", "C5", "--input", "C5"])
    trace = rainbow_colour(graph_from_name("C5"), graph_from_name("C5"))
    assert res.status == "ok" and res.payload["trace"] == trace.to_json()


def test_colour_triangle_certificate():
    res = dispatch(["colour-triangle", "--k", "3", "--input", "K5"])
    assert res.status == "error" and len(res.payload["certificate"]) == 10
    res = dispatch(["colour-triangle", "--k", "4", "--input", "K5"])
    direct = colour_graph_triangle_mode(graph_from_name("K5"), 4)
    assert res.status == "ok" and res.payload["colouring"] == direct.to_json()["colouring"]


def test_triangles_and_blocks():
    res = dispatch(["triangles", "--input", "bowtie"])
    assert [(c["v"], c["e"], c["r"]) for c in res.payload["components"]] == [(3, 3, 0), (3, 3, 0)]
    res = dispatch(["blocks", "--input", "bowtie", "--pattern", "K3"])
    assert res.payload["blocks"] is None and not res.payload["closed"]["is_closed"]


def test_check_reports_precondition_errors_inline():
    res = dispatch(["check", "--input", "K3"])
    assert res.status == "ok"
    assert "error" in res.payload["gate"] and "error" in res.payload["superspacious"]


def test_janson_payload():
    res = dispatch(["janson", "--pattern", "K3", "--n", "4", "--p", "1/2"])
    assert res.payload == janson_bound(graph_from_name("K3"), 4, Fraction(1, 2)).to_json()


def test_experiment_payload(tmp_path):
    out = tmp_path / "r.json"
    argv = ["experiment", "--mode", "scan", "--n", "80", "--c", "1/20", "--exponent", "1/2",
            "--trials", "3", "--seed", "5", "--jobs", "1", "--out", str(out)]
    res = dispatch(argv)
    cfg = TrialConfig(80, 0.05, Fraction(1, 2), 3, 5)
    direct = run_experiment(cfg, jobs=1).to_json(include_timing=False)
    assert res.payload["rows"] == direct["rows"]
    assert json.loads(out.read_text())["rows"] == direct["rows"]


def test_payloads_are_json(capsys):
    code = main(["density", "--input", "C4"])
    line = capsys.readouterr().out.strip()
    assert code == 0 and json.loads(line)["status"] == "ok"


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "cramlab", "density", "--input", "K3"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["m2"] == "2/1"
