import io
import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from lucent.cli import EXIT_CAP, EXIT_INPUT, EXIT_OK, EXIT_USAGE, run_cli
from lucent.fixtures import FIXTURES
from lucent.generator import scaling_family
from lucent.netfile import parse_net, serialize_net

SCHEMA = json.loads(resources.files("lucent").joinpath("schema/report.schema.json").read_text())
VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)


@pytest.fixture
def nets(tmp_path):
    out = {}
    for name, make in FIXTURES.items():
        path = tmp_path / f"{name}.net"
        path.write_text(serialize_net(*make(), name))
        out[name] = str(path)
    return out


def run(*args):
    out, err = io.StringIO(), io.StringIO()
    code = run_cli(list(args), out, err)
    return code, out.getvalue(), err.getvalue()


def run_json(*args):
    code, out, err = run("--json", *args)
    report = json.loads(out)
    VALIDATOR.validate(report)
    return code, report


def test_schema_is_valid():
    jsonschema.Draft202012Validator.check_schema(SCHEMA)


def test_lucency_n2(nets):
    code, rep = run_json("lucency", nets["n2"])
    assert code == EXIT_OK
    assert rep["lucent"] is False
    assert rep["witness"] == ["[p2,p5]", "[p2,p6]"]
    code, out, _ = run("lucency", nets["n2"])
    assert "lucent: false" in out and "[p2,p5]" in out


def test_home_clusters_n1(nets):
    code, rep = run_json("home-clusters", nets["n1"])
    assert code == EXIT_OK and rep["home_clusters"] == [["p4"]]
    code, rep = run_json("home-clusters", "--mode", "both", nets["n1"])
    assert rep["home_clusters"] == [["p4"]]
    assert rep["counters"]["short_circuit"] == 4


def test_analyze(nets):
    code, rep = run_json("analyze", nets["n3"])
    assert code == EXIT_OK
    assert rep["behavior"]["live"] and rep["reachable_markings"] == 8
    assert rep["home_clusters"] == []
    assert rep["conflict_pairs"][0]["agree"] == "[p2,p5]"


def test_analyze_unbounded(tmp_path):
    path = tmp_path / "u.net"
    path.write_text("net u\nplace p init 1\nplace q\ntrans t : p -> p q\n")
    code, rep = run_json("analyze", str(path))
    assert code == EXIT_OK
    assert rep["behavior"]["bounded"] is False and rep["lucency"]["lucent"] is False
    code, _, err = run("conflict-pairs", str(path))
    assert code == EXIT_INPUT and "unbounded" in err


def test_cap_exceeded(tmp_path):
    net, m0 = scaling_family(5)
    path = tmp_path / "s.net"
    path.write_text(serialize_net(net, m0))
    code, _, err = run("analyze", "--cap", "1", str(path))
    assert code == EXIT_CAP and "cap" in err
    code, rep = run_json("analyze", "--cap", "1", str(path))
    assert code == EXIT_CAP and rep["error"]["kind"] == "state_space_exceeded"


def test_cap_flag_before_command(nets):
    assert run("--cap", "3", "analyze", nets["n3"])[0] == EXIT_CAP


def test_conflict_pairs_and_paths(nets):
    code, rep = run_json("conflict-pairs", nets["n3"])
    assert [p["m1"] for p in rep["conflict_pairs"]] == ["[p2,p3,p5]"]
    code, rep = run_json("paths", nets["n1"], "--cluster", "p4", "--from", "p1")
    assert rep["paths"] == [{"from": "p1", "path": ["p1", "t1", "p2", "t3", "p3", "t4", "p4"], "max_tokens": 1}]
    code, rep = run_json("paths", nets["n1"], "--cluster", "p4")
    assert [r["from"] for r in rep["paths"]] == ["p1", "p2", "p3", "p4"]


def test_short_circuit_emits_net(nets):
    code, out, _ = run("short-circuit", nets["n1"], "--cluster", "p4")
    assert code == EXIT_OK
    net, m0 = parse_net(out)
    assert net.preset("t_C__p4") == {"p4"} and net.postset("t_C__p4") == {"p1"}
    code, rep = run_json("short-circuit", nets["n1"], "--cluster", "p4")
    assert rep["transition"] == "t_C__p4"


def test_generate_is_deterministic():
    a = run("generate", "--seed", "7")[1]
    b = run("generate", "--seed", "7")[1]
    assert a == b
    parse_net(a)
    code, rep = run_json("generate", "--seed", "7")
    assert rep["document"] == a


def test_check_theorems_small():
    code, rep = run_json("check-theorems", "--seeds", "3")
    assert code == EXIT_OK and rep["ok"]


def test_dot(nets):
    code, out, _ = run("dot", nets["n1"], "--highlight", "p1", "t1")
    assert code == EXIT_OK and out.startswith("digraph")
    assert run("dot", nets["n1"], "--highlight", "zz")[0] == EXIT_INPUT


@pytest.mark.parametrize(
    "args",
    [
        [],
        ["bogus"],
        ["lucency"],
        ["paths", "x.net"],
        ["home-clusters", "--mode", "odd", "x.net"],
        ["--cap", "zero", "lucency", "x.net"],
        ["--cap", "0", "lucency", "x.net"],
    ],
)
def test_usage_errors(args):
    assert run(*args)[0] == EXIT_USAGE


def test_input_errors(nets, tmp_path):
    assert run("lucency", str(tmp_path / "missing.net"))[0] == EXIT_INPUT
    bad = tmp_path / "bad.net"
    bad.write_text("net x\nplace p\ntrans t : p -> q\n")
    code, out, err = run("--json", "lucency", str(bad))
    assert code == EXIT_INPUT and "UndeclaredPlace" in out
    VALIDATOR.validate(json.loads(out))
    assert run("paths", nets["n1"], "--cluster", "t1")[0] == EXIT_INPUT
    unsafe = tmp_path / "unsafe.net"
    unsafe.write_text("net x\nplace p init 2\nplace q\ntrans t : p -> q\n")
    assert run("home-clusters", "--mode", "structural", str(unsafe))[0] == EXIT_INPUT


def test_json_field_names_stable(nets):
    _, a = run_json("analyze", nets["n1"])
    _, b = run_json("analyze", nets["n1"])
    assert a == b and list(a) == sorted(a)


def test_module_entry_point(nets):
    proc = subprocess.run(
        [sys.executable, "-m", "lucent", "home-clusters", nets["n1"]], capture_output=True, text=True
    )
    assert proc.returncode == 0 and "{p4}" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "lucent", "nope"], capture_output=True, text=True)
    assert proc.returncode == 1
