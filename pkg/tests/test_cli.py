import io
import json
import subprocess
import sys

import pytest

from fixtures import star_doc
from wgalaxy.cli import run
from wgalaxy.ordinal import parse


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def machine(*argv):
    code, out, _ = call(*argv, "--machine")
    return code, dict(line.split("=", 1) for line in out.splitlines())


def test_catalog_lists_families():
    code, out, _ = call("catalog")
    assert code == 0
    for name in ("ray0", "ladder1", "ladder2", "hub1", "hub2"):
        assert name in out


def test_dist():
    code, out, _ = call("dist", "ladder1", "b1[0]", "b1[2]")
    assert code == 0 and out.startswith("w*2 (certified, window=16)")
    code, kv = machine("dist", "ladder1", "b1[0]", "b1[2]")
    assert kv["distance"] == "w*2" and kv["certified"] == "true" and kv["exit"] == "0"


def test_walk_reports_length():
    code, kv = machine("walk", "ladder1", "r[0,0]", "b1[2]")
    assert code == 0 and parse(kv["length"]) == parse("w*3")


def test_sections():
    code, kv = machine("sections", "ladder1", "0", "--window", "5")
    assert kv["count"] == "6"


def test_hyperdist():
    code, kv = machine("hyperdist", "ladder1", "const(b1[0])", "b1[n^2]")
    assert code == 0 and kv["profile"] == "w*(n^2)"
    assert parse(kv["sample.3"]) == parse("w*9")


def test_classify_two_blocks():
    code, kv = machine("classify", "ladder1", "1", "const(b1[0])", "diag(b1[n])")
    assert code == 0 and kv["blocks"] == "2"
    assert kv["block.0.principal"] == "true" and kv["block.1.principal"] == "false"


def test_order_chain():
    code, out, _ = call("order", "ladder1", "1", "b1[n]", "b1[2n]", "b1[n^2]")
    assert code == 0 and "partial order verified" in out


def test_ladder():
    code, kv = machine("ladder", "ladder1", "1", "const(b1[0])", "b1[n]", "1")
    assert code == 0 and kv["count"] == "3" and kv["adjacent_closer"] == "true"
    code, _, err = call("ladder", "ladder1", "1", "b1[n]", "b1[n]", "1")
    assert code == 1 and "standard" in err


def test_witness_exit_codes():
    assert machine("witness", "ladder1", "1", "--window", "8")[1]["principal"] == "OutFilter"
    code, kv = machine("witness", "hub1", "1")
    assert code == 2 and "error" in kv


def test_verify_single_suite():
    code, out, _ = call("verify", "metric", "--window", "6")
    assert code == 0
    assert "triangle inequality" in out and "symmetry" in out
    code, kv = machine("verify", "--suite", "ordinal")
    assert kv["suite.ordinal"] == "pass"


@pytest.mark.parametrize("argv", [
    ("bogus",),
    ("--window", "1", "catalog"),
    ("dist", "nograph", "a[0]", "a[1]"),
    ("dist", "ladder1", "q[0]", "b1[0]"),
    ("classify", "ladder1", "1", "b1[2n+"),
    ("verify", "nope"),
    ("sections", "ladder1", "5"),
])
def test_usage_errors(argv):
    assert call(*argv)[0] == 1


def test_spec_error_has_column():
    _, _, err = call("hyperdist", "ladder1", "b1[n-5]", "b1[n]")
    assert "column 4" in err


def test_bad_graph_file_has_line_and_column(tmp_path):
    f = tmp_path / "bad.json"
    f.write_text('{"name": "x",\n  "nu": 1,\n  oops}\n')
    code, _, err = call("dist", str(f), "a[0]", "a[1]")
    assert code == 1 and "line 3 column 3" in err


def test_graph_from_file(tmp_path):
    f = tmp_path / "stars.json"
    f.write_text(json.dumps(star_doc()))
    code, kv = machine("dist", str(f), "h[0]", "r[0,1,2]", "--window", "4")
    assert code == 0 and kv["distance"] == "3"
    code, kv = machine("--family-file", str(f), "dist", "stars", "h[0]", "h[1]", "--window", "4")
    assert code == 0 and parse(kv["distance"]) == parse("w*2 + 2")


def test_disconnected_presentation(tmp_path):
    doc = {"name": "two", "nu": 0,
           "nodes": [{"id": "a", "rank": 0, "params": ["k"]}, {"id": "b", "rank": 0, "params": ["k"]}],
           "branches": [{"params": ["k"], "ends": [["a", ["k"]], ["a", ["k+1"]]]},
                        {"params": ["k"], "ends": [["b", ["k"]], ["b", ["k+1"]]]}],
           "tips": []}
    f = tmp_path / "two.json"
    f.write_text(json.dumps(doc))
    code, kv = machine("dist", str(f), "a[0]", "b[1]")
    assert code == 2 and kv["components"] == "separate"
    assert machine("dist", str(f), "a[0]", "a[4]")[1]["distance"] == "4"


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "wgalaxy", "--machine", "dist", "ray0", "n[2]", "n[7]"],
                       capture_output=True, text=True)
    assert p.returncode == 0 and "distance=5" in p.stdout
