import json
import random

import pytest

from distoracle.cli import main, verify
from distoracle.container import (ALL_TAGS, ContainerError, build_oracle, deserialize, load_oracle, peek,
                                  read_header, save_oracle, serialize)
from distoracle.graph import Graph, load_graph, random_graph, save_graph
from support import cycle_graph, random_tree


def run(capsys, *argv):
    rc = main([str(a) for a in argv])
    out = capsys.readouterr()
    return rc, out.out, out.err


@pytest.fixture
def graph_file(tmp_path):
    g = random_graph(60, 180, 1, seed=3)
    path = tmp_path / "g.txt"
    save_graph(g, path)
    return g, path


def test_gen_k5(tmp_path, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert run(capsys, "gen", "--n", 5, "--m", 10, "--seed", 1, "--out", a)[0] == 0
    assert run(capsys, "gen", "--n", 5, "--m", 10, "--seed", 1, "--out", b)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    g = load_graph(a)
    assert g.n == 5 and g.m == 10
    assert g == random_graph(5, 10, 1, seed=1)


def test_build_query(graph_file, tmp_path, capsys):
    g, path = graph_file
    out = tmp_path / "o.bin"
    rc, text, _ = run(capsys, "build", "--graph", path, "--variant", "tz", "--k", 3, "--seed", 4, "--out", out)
    assert rc == 0 and "wrote" in text
    o = load_oracle(out, g)
    rc, text, _ = run(capsys, "query", "--graph", path, "--oracle", out, 0, 7)
    assert rc == 0
    u, v, est = text.split()
    assert (int(u), int(v)) == (0, 7) and int(est) == o.query(0, 7).value
    rc, text, _ = run(capsys, "query", "--graph", path, "--oracle", out, "--witness", "--json", 0, 7)
    row = json.loads(text)[0]
    assert row["witness"][0] == 0 and row["witness"][-1] == 7
    again = tmp_path / "o2.bin"
    run(capsys, "build", "--graph", path, "--variant", "tz", "--k", 3, "--seed", 4, "--out", again)
    assert out.read_bytes() == again.read_bytes()


def test_build_parameter_error(graph_file, tmp_path, capsys):
    _, path = graph_file
    rc, _, err = run(capsys, "build", "--graph", path, "--variant", "borderline-a", "--k", 4, "--c", 2,
                     "--out", tmp_path / "x.bin")
    assert rc == 2 and "c < k/2-1" in err


def test_verify_pass_and_digest(graph_file, tmp_path, capsys):
    g, path = graph_file
    out = tmp_path / "o.bin"
    run(capsys, "build", "--graph", path, "--variant", "q3", "--out", out)
    rc, text, _ = run(capsys, "verify", "--graph", path, "--oracle", out, "--json")
    rep = json.loads(text)
    assert rc == 0 and rep["violations"] == 0 and rep["bound"] == "3d+2_ODD"
    other = tmp_path / "h.txt"
    save_graph(random_graph(60, 181, 1, seed=3), other)
    rc, _, err = run(capsys, "verify", "--graph", other, "--oracle", out)
    assert rc == 2 and "digest mismatch" in err


def test_verify_report(graph_file, tmp_path, capsys):
    _, path = graph_file
    out = tmp_path / "o.bin"
    run(capsys, "build", "--graph", path, "--variant", "u-av", "--t", 2, "--out", out)
    rep_dir = tmp_path / "rep"
    rc, text, _ = run(capsys, "verify", "--graph", path, "--oracle", out, "--pairs", "sample:300",
                      "--report", rep_dir)
    assert rc == 0 and text.strip().endswith("PASS")
    for name in ("verify.json", "verify.txt", "estimate_vs_exact.png", "stretch_hist.png"):
        assert (rep_dir / name).stat().st_size > 0
    rc, _, _ = run(capsys, "stats", "--graph", path, "--oracle", out, "--report", rep_dir)
    assert rc == 0 and (rep_dir / "bunch_sizes.png").exists() and (rep_dir / "stats.json").exists()


def test_verify_threads_identical():
    g = random_graph(80, 240, 5, seed=8)
    o = build_oracle(g, "borderline-c", seed=2)
    pairs = [(u, v) for u in range(g.n) for v in range(u + 1, g.n)]
    r1, rows1 = verify(o, pairs, threads=1)
    r4, rows4 = verify(o, pairs, threads=4)
    assert rows1 == rows4
    assert (r1.violations, r1.max_stretch, r1.below_exact) == (r4.violations, r4.max_stretch, r4.below_exact)
    assert r1.ok


def test_npsp_lines(graph_file, tmp_path, capsys):
    g, path = graph_file
    pf = tmp_path / "pairs.txt"
    pairs = [(i, (3 * i + 1) % g.n) for i in range(20)]
    pf.write_text("# s t\n" + "".join(f"{u} {v}\n" for u, v in pairs))
    rc, text, _ = run(capsys, "npsp", "--graph", path, "--pairs", pf, "--k", 2)
    lines = text.splitlines()
    assert rc == 0 and len(lines) == 20
    assert all(x.isdigit() or x == "inf" for x in lines)


def test_ansc_c5(tmp_path, capsys):
    path = tmp_path / "c5.txt"
    save_graph(cycle_graph(5), path)
    rc, text, _ = run(capsys, "ansc", "--graph", path, "--k", 3, "--exact")
    assert rc == 0
    assert text.splitlines() == [f"{u} 5 ≤ 5 ≤ 9 pass" for u in range(5)]


def test_ansc_tree(tmp_path, capsys):
    path = tmp_path / "t.txt"
    save_graph(random_tree(12, seed=1), path)
    rc, text, _ = run(capsys, "ansc", "--graph", path)
    assert rc == 0 and [ln.split()[1] for ln in text.splitlines()] == ["inf"] * 12


@pytest.mark.parametrize("tag", ALL_TAGS)
def test_round_trip(tag, tmp_path):
    wmax = 1 if tag in ("q3", "q4", "q4wide", "q2k5", "u-av", "u-aa") else 9
    g = random_graph(70, 200, wmax, seed=11)
    k = 5 if tag == "q2k5" else None
    o = build_oracle(g, tag, k=k, seed=5)
    data = serialize(o)
    assert read_header(data)["variant"] == tag
    o2 = deserialize(data, g)
    rng = random.Random(0)
    for _ in range(100):
        u, v = rng.randrange(g.n), rng.randrange(g.n)
        a, b = o.query(u, v), o2.query(u, v)
        assert a.value == b.value and a.witness == b.witness
    assert serialize(build_oracle(g, tag, k=k, seed=5)) == data
    p = tmp_path / "o.bin"
    save_oracle(o, p)
    assert peek(p)["digest"] == read_header(data)["digest"]


def test_container_rejects():
    g = random_graph(30, 60, 1, seed=1)
    data = serialize(build_oracle(g, "tz"))
    with pytest.raises(ContainerError):
        deserialize(b"NOTMAGIC" + data[8:], g)
    with pytest.raises(ContainerError):
        deserialize(data + b"\0", g)
    with pytest.raises(ContainerError):
        deserialize(data, random_graph(30, 61, 1, seed=1))
