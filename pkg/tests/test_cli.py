import json
import subprocess
import sys
from importlib.resources import files

import pytest

from ptsem.cli import run_command
from ptsem.conflict import ConflictWitness
from ptsem.multiset import Multiset
from ptsem.net import fire_sequence

FIX = files("ptsem").joinpath("fixtures")
A, B, C = (str(FIX / f"{n}.net") for n in ("NET-A", "NET-B", "NET-C"))


def test_validate():
    r = run_command(["validate", A])
    assert r.code == 0 and "5 places, 3 transitions" in r.out


def test_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.net"
    bad.write_text("place s 1\ntrans t\n")
    r = run_command(["validate", str(bad)])
    assert r.code == 65 and "line 2" in r.err and "empty preset" in r.err


@pytest.mark.parametrize("argv", [
    [], ["nope"], ["runs", A, "--depth", "x"], ["fire", A, "--seq", "a z"],
    ["trace-class", C, "--seq", "t u"], ["runs", A, "--depth", "-1"], ["validate", "/no/such.net"],
    ["swap-equiv", A, "--proc", "a b c"],
])
def test_usage_errors(argv):
    assert run_command(argv).code == 64


def test_fire():
    assert run_command(["fire", A, "--seq", "a b c"]).out.strip() == "{4:1, 5:1}"
    r = run_command(["fire", C, "--seq", "t u"])
    assert r.code == 1 and "position 2" in r.out
    assert run_command(["fire", B, "--step", "a b"]).out.strip() == "{pc:1, pd:1, q:2}"


def test_reach():
    r = run_command(["reach", A, "--depth", "3"])
    assert r.code == 0 and "7 markings, truncated=false" in r.out
    assert run_command(["reach", B, "--depth", "0"]).code == 2


def test_structural_witness():
    r = run_command(["structural", B])
    assert r.code == 1
    assert "marking M0" in r.out and "step {a, b}" in r.out and "shared preplace p" in r.out
    assert run_command(["structural", A]).code == 0


def test_runs():
    r = run_command(["runs", B, "--depth", "4"])
    assert r.code == 0
    assert "1 maximal run (12 sequences), representative a b d c" in r.out
    assert "truncated=false" in r.out
    r = run_command(["runs", C, "--depth", "1"])
    assert r.code == 1 and r.out.startswith("2 maximal runs")
    assert run_command(["runs", B, "--depth", "2"]).code == 2


def test_conflicts_and_replay(net_c, net_b):
    r = run_command(["conflicts", C])
    assert r.code == 1 and "(ε, {s:1}, {t, u})" in r.out
    assert ConflictWitness((), net_c.initial, Multiset("tu")).replay(net_c)
    r = run_command(["conflicts", B])
    first = r.out.splitlines()[0]
    assert first == "(ε, {p:2, pa:1, pb:1, pc:1, pd:1}, {a, b, c})"
    assert run_command(["conflicts", A]).code == 0


def test_run_conflict_free():
    r = run_command(["run-conflict-free", B, "--depth", "4"])
    assert r.code == 1 and "step {a, b, c} not enabled" in r.out
    assert run_command(["run-conflict-free", C, "--seq", "t"]).code == 0
    assert run_command(["run-conflict-free", C, "--depth", "1"]).code == 64


def test_processes(tmp_path):
    r = run_command(["pi", A, "--seq", "a b c", "--out", str(tmp_path)])
    assert r.code == 0 and "2 processes up to isomorphism" in r.out
    p1, p2 = (f"@{tmp_path / f'process-{i}.json'}" for i in (1, 2))
    for method in ("via-traces", "direct-bfs"):
        r = run_command(["swap-equiv", A, "--proc", p1, "--proc", p2, "--method", method])
        assert (r.code, r.out.strip()) == (0, "true")
    r = run_command(["swap-equiv", C, "--proc", "t", "--proc", "u"])
    assert (r.code, r.out.strip()) == (1, "false")
    r = run_command(["lin", A, "--proc", "a b c | 3:4=1"])
    assert r.out.splitlines()[:3] == ["a b c", "b a c", "b c a"]
    assert run_command(["lin", A, "--proc", "a b c | 3:4=7"]).code == 64
    r = run_command(["process", A, "--proc", "a b c", "--format", "graph"])
    assert r.out.startswith("digraph") and r.out.count("shape=box") == 3
    doc = json.loads(run_command(["process", C, "--proc", ""]).out)
    assert doc["transitions"] == [] and len(doc["places"]) == 1


def test_max_processes_and_bdify():
    r = run_command(["max-processes", A, "--depth", "3"])
    assert r.code == 0 and "verdict unique" in r.out
    assert run_command(["max-processes", C, "--depth", "1"]).code == 1
    assert run_command(["max-processes", B, "--depth", "2"]).code == 2
    r = run_command(["bdify", A, "--proc", "a b c"])
    assert r.out.splitlines()[-1] == "7 classes"


def test_trace_commands():
    r = run_command(["trace-class", B, "--seq", "a b d c"])
    assert r.out.startswith("class size 12, representative a b d c")
    assert run_command(["trace-equiv", A, "--seq", "a b c", "--seq", "b c a"]).code == 0
    assert run_command(["trace-equiv", A, "--seq", "a b c", "--seq", "a b"]).code == 1


def test_generate_is_deterministic(tmp_path):
    argv = ["generate", "--seed", "5", "--kind", "structural", "--places", "5"]
    first, second = run_command(argv), run_command(argv)
    assert first.code == 0 and first.out == second.out
    out = tmp_path / "g.net"
    run_command(argv + ["--out", str(out)])
    assert out.read_text() == first.out
    assert run_command(["validate", str(out)]).code == 0


def test_witnesses_replay_through_fire(net_b):
    """Printed witnesses use net-file names and can be fed back to ``fire``."""
    seqs = [line.split(",")[0].strip("(") for line in run_command(["conflicts", B]).out.splitlines()[:-1]]
    for s in seqs:
        seq = "" if s == "ε" else s
        r = run_command(["fire", B, "--seq", seq])
        assert r.code == 0
        assert r.out.strip() == str(fire_sequence(net_b, net_b.initial, seq.split()))


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "ptsem", "runs", C, "--depth", "1"],
                       capture_output=True, text=True)
    assert r.returncode == 1 and "2 maximal runs" in r.stdout


def test_help_exits_zero():
    assert run_command(["--help"]).code == 0
