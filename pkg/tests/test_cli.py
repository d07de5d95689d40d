import json

import pytest

from legalsys.cli import EXIT_INCONCLUSIVE, EXIT_NEGATIVE, EXIT_OK, EXIT_USAGE, main
from legalsys.graph import Graph


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr().out


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as e:
        main(["gen", "--model", "nope", "--n", "5"])
    assert e.value.code == EXIT_USAGE
    assert main(["gen", "--model", "gnp", "--n", "5"]) == EXIT_USAGE
    assert main(["construct", "--method", "dense"]) == EXIT_USAGE
    assert main(["search"]) == EXIT_USAGE


def test_bad_graph_file(tmp_path, capsys):
    f = tmp_path / "bad.txt"
    f.write_text("3 1\n0 7\n")
    assert main(["search", "--in", str(f)]) == EXIT_USAGE
    assert main(["search", "--in", str(tmp_path / "missing.txt")]) == EXIT_USAGE


def test_gen_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert main(["gen", "--model", "gnp", "--n", "50", "--p", "0.2", "--seed", "3", "--out", str(a)]) == EXIT_OK
    assert main(["gen", "--model", "gnp", "--n", "50", "--p", "0.2", "--seed", "3", "--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    assert Graph.read(a).n == 50


def test_gen_process(tmp_path, capsys):
    trace = tmp_path / "t.json"
    code, out = run(["gen", "--model", "process", "--n", "30", "--seed", "1", "--trace", str(trace)], capsys)
    assert code == EXIT_OK
    doc = json.loads(trace.read_text())
    g = Graph.parse(out)
    assert doc["schema"] == "legalsys.trace/1" and g.edge_count == doc["T2"] and g.min_degree() >= 2
    _, before = run(["gen", "--model", "process", "--n", "30", "--seed", "1", "--at-t2-minus-1"], capsys)
    assert Graph.parse(before).min_degree() <= 1


def test_search_exit_codes(tmp_path, capsys):
    path = tmp_path / "p3.txt"
    Graph.path(3).write(path)
    code, out = run(["search", "--in", str(path)], capsys)
    assert code == EXIT_OK and json.loads(out)["verdict"] == "yes"
    Graph.complete(3).write(path)
    code, out = run(["search", "--in", str(path)], capsys)
    assert code == EXIT_NEGATIVE and json.loads(out)["verdict"] == "no"
    Graph.complete(5).write(path)
    code, out = run(["search", "--in", str(path), "--budget", "1"], capsys)
    assert code == EXIT_INCONCLUSIVE and json.loads(out)["verdict"] == "unknown"


def test_classify(capsys):
    code, out = run(["search", "--classify", "3"], capsys)
    doc = json.loads(out)
    assert code == EXIT_OK and len(doc["rows"]) == 4


def test_construct_then_verify(tmp_path, capsys):
    g = tmp_path / "g.txt"
    t = tmp_path / "c.json"
    main(["gen", "--model", "gnp", "--n", "40", "--p", "0.5", "--seed", "2", "--out", str(g)])
    code = main(["construct", "--in", str(g), "--method", "colouring", "--seed", "5", "--out", str(t)])
    doc = json.loads(t.read_text())
    assert doc["schema"] == "legalsys.construct/1" and "transcript" in doc
    assert code in (EXIT_OK, EXIT_NEGATIVE)
    vcode, out = run(["verify", "--in", str(g), "--transcript", str(t), "--mode", "sampled:500"], capsys)
    assert vcode == code and json.loads(out)["verdict"] in ("legal", "counterexample")
    t2 = tmp_path / "c2.json"
    main(["construct", "--in", str(g), "--method", "colouring", "--seed", "5", "--out", str(t2)])
    assert t.read_bytes() == t2.read_bytes()


def test_construct_complete_graph(capsys):
    code, out = run(["construct", "--gen", "gnp:8:1.0", "--method", "dense"], capsys)
    assert code == EXIT_NEGATIVE and json.loads(out)["error"]["error"] == "graph_complete"


def test_construct_bad_gen(capsys):
    assert main(["construct", "--gen", "gnp:x", "--method", "dense"]) == EXIT_USAGE


def test_verify_rejects_mismatched_n(tmp_path, capsys):
    g = tmp_path / "g.txt"
    t = tmp_path / "c.json"
    main(["construct", "--gen", "gnp:20:0.5", "--method", "dense", "--verify", "none", "--out", str(t)])
    Graph.path(5).write(g)
    assert main(["verify", "--in", str(g), "--transcript", str(t)]) == EXIT_USAGE


def test_check_pseudorandom(tmp_path, capsys):
    g = tmp_path / "g.txt"
    Graph.complete(20).write(g)
    code, out = run(["check-pseudorandom", "--in", str(g)], capsys)
    doc = json.loads(out)
    assert code == EXIT_NEGATIVE and doc["properties"]["viii"]["verdict"] == "fail"
    Graph.complete(5).write(g)
    assert main(["check-pseudorandom", "--in", str(g)]) == EXIT_USAGE


def test_prob_verify(capsys):
    code, out = run(["prob-verify", "--claim", "domin", "--max-m", "10"], capsys)
    lines = out.strip().splitlines()
    assert code == EXIT_OK and lines[0] == "claim,ms,holds,detail" and len(lines) == 11
    code, out = run(["prob-verify", "--claim", "coupling", "--max-total", "5"], capsys)
    assert code == EXIT_OK and len(out.strip().splitlines()) == 1 + 31
    code, out = run(["prob-verify", "--claim", "sized1", "--log-n", "404", "--threshold", "2"], capsys)
    assert code == EXIT_OK and out.splitlines()[1].startswith("2,2,0.75")
    assert main(["prob-verify", "--claim", "sized1"]) == EXIT_USAGE


def test_experiment_curve(capsys):
    argv = ["experiment", "curve", "--n", "30", "--trials", "3", "--p-grid", "0.5,0.9", "--absolute", "--method", "dense"]
    code, out = run(argv, capsys)
    rows = out.strip().splitlines()
    assert code == EXIT_OK and rows[0].startswith("p_units,p,trials,successes,success_rate")
    assert len(rows) == 3
    assert run(argv, capsys)[1] == out


def test_experiment_hitting_time(tmp_path, capsys):
    js = tmp_path / "h.json"
    code, out = run(["experiment", "hitting-time", "--n", "40", "--trials", "2", "--json", str(js)], capsys)
    rows = out.strip().splitlines()
    assert code == EXIT_OK and rows[0] == "seed,T2,verdict_at_T2_minus_1,verdict_at_T2,outcome"
    assert all(r.split(",")[2] == "no" for r in rows[1:])
    assert json.loads(js.read_text())["schema"] == "legalsys.experiment/1"
