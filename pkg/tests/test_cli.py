import io
import os
import subprocess
import sys

import pytest

from ehk.cli import SWEEP_FIELDS, main


def run(*argv):
    buf = io.StringIO()
    code = main(list(map(str, argv)), out=buf)
    return code, buf.getvalue()


def fields(text):
    out = {}
    for line in text.splitlines():
        if "=" in line:
            k, v = line.split("=", 1)
            out.setdefault(k, v)
    return out


def stable(text):
    return [l for l in text.splitlines() if not l.startswith("time_")]


@pytest.fixture
def graph(tmp_path):
    path = tmp_path / "g.txt"
    code, out = run("gen", "--family", "gadget", "--n", 20, "--seed", 1, "-o", path)
    assert code == 0
    return path


def test_gen_is_deterministic(tmp_path):
    p = tmp_path / "a.txt"
    run("gen", "--family", "ehf", "--n", 20, "--seed", 1, "-o", p)
    first = p.read_text()
    run("gen", "--family", "ehf", "--n", 20, "--seed", 1, "-o", p)
    assert p.read_text() == first


def test_class_reports_ehf(graph):
    code, out = run("class", graph)
    assert code == 0
    assert fields(out)["EHF"] == "true"


def test_decompose_validate_solve_round_trip(graph, tmp_path):
    td = tmp_path / "t.txt"
    code, out = run("decompose", graph, "-o", td)
    assert code == 0 and fields(out)["valid"] == "true"
    code, out = run("validate", graph, td)
    assert code == 0 and fields(out)["valid"] == "true"
    for problem in ("mwis", "maxclique"):
        code, out = run("solve", problem, graph, td)
        assert code == 0 and fields(out)["verified"] == "true"
    code, out = run("solve", "kcolor", graph, td, "--k", 3)
    assert code == 0 and fields(out)["colourable"] == "true"


def test_solve_with_weights(tmp_path):
    g = tmp_path / "p.txt"
    g.write_text("p 3 2\ne 0 1\ne 1 2\n")
    w = tmp_path / "w.txt"
    w.write_text("w 0 1\nw 1 5\nw 2 1\n")
    code, out = run("solve", "mwis", g, "--weights", w)
    assert code == 0
    f = fields(out)
    assert f["weight"] == "5" and f["set"] == "1"


@pytest.fixture
def hexagon(tmp_path):
    path = tmp_path / "c6.txt"
    path.write_text("p 6 6\n" + "".join(f"e {i} {(i + 1) % 6}\n" for i in range(6)))
    return path


@pytest.mark.parametrize("extra", [[], ["--eps", "1/5"], ["--route", "induction"], ["--f", "1"]])
def test_separate(hexagon, extra):
    code, out = run("separate", hexagon, "--a", 0, "--b", 3, *extra)
    assert code == 0
    f = fields(out)
    assert f["verified"] == "true" and f["kappa"] == "2"


def test_hubfree_separate(hexagon, tmp_path):
    rec = tmp_path / "rec.txt"
    code, out = run("hubfree-separate", hexagon, "--a", 0, "--b", 3, "--report", rec)
    assert code == 0 and fields(out)["verified"] == "true"
    assert rec.read_text()


def test_separate_adjacent_pair_fails(hexagon):
    code, out = run("separate", hexagon, "--a", 0, "--b", 1)
    assert code == 1


def test_detect_runs(graph):
    code, out = run("detect", graph)
    assert code == 0
    assert "input_hash" in fields(out)


def test_reports_are_deterministic(graph, tmp_path):
    td = tmp_path / "t.txt"
    _, a = run("decompose", graph, "-o", td)
    _, b = run("decompose", graph, "-o", td)
    assert stable(a) == stable(b)
    _, a = run("sweep", "--sizes", "10", "--count", 2)
    _, b = run("sweep", "--sizes", "10", "--count", 2)
    assert stable(a) == stable(b)


def test_invalid_decomposition_exits_one(graph, tmp_path):
    td = tmp_path / "bad.txt"
    td.write_text("td 1 0 1\nb 0 0\n")
    code, out = run("validate", graph, td)
    assert code == 1
    assert fields(out)["valid"] == "false"


@pytest.mark.parametrize("argv", [
    ["validate", "/nonexistent/g.txt", "/nonexistent/t.txt"],
    ["nosuchcommand"],
    ["solve", "kcolor", "__GRAPH__"],
])
def test_usage_errors_exit_two(argv, graph):
    argv = [str(graph) if a == "__GRAPH__" else a for a in argv]
    code, _ = run(*argv)
    assert code == 2


def test_malformed_graph_exits_two(tmp_path):
    g = tmp_path / "g.txt"
    g.write_text("p 2 1\ne 0 5\n")
    code, _ = run("class", g)
    assert code == 2


def test_sweep_table_and_figures(tmp_path):
    table = tmp_path / "sweep.csv"
    figs = tmp_path / "figs"
    code, out = run("sweep", "--sizes", "10,12", "--count", 2, "--delimiter", "comma",
                    "--table", table, "--figures", figs)
    assert code == 0
    rows = table.read_text().splitlines()
    assert rows[0].split(",") == list(SWEEP_FIELDS)
    assert len(rows) == 5
    pngs = sorted(os.listdir(figs))
    assert pngs and all(p.endswith(".png") for p in pngs)
    assert all((figs / p).stat().st_size > 0 for p in pngs)
    assert fields(out)["verified"] == "true"


def test_console_entry_point(graph):
    proc = subprocess.run([sys.executable, "-m", "ehk.cli", "class", str(graph)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "EHF=true" in proc.stdout
