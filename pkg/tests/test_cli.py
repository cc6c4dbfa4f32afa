import json

import pytest

from approvalties.cli import main
from approvalties.model import parse_election

E1_TEXT = "m 3\nn 4\nv 0 1\nv 0\nv 1\nv 2\n"

PB_FIXTURE = """PROJECTS
project_id;cost
p1;10
p2;20
VOTES
voter_id;vote
a;p1
b;p1,p2
c;p2
"""


@pytest.fixture
def e1_file(tmp_path):
    path = tmp_path / "e1.appr"
    path.write_text(E1_TEXT, encoding="utf-8")
    return str(path)


def test_unique_tied_exit_code(e1_file, capsys):
    code = main(["unique", "--rule", "greedy-ccav", "-k", "2", e1_file])
    out = capsys.readouterr().out
    assert code == 3
    assert "TIED" in out
    assert out.count("witness") == 2


def test_unique_unique_exit_code(e1_file, capsys):
    code = main(["unique", "--rule", "phragmen", "-k", "2", e1_file])
    assert code == 0
    assert "UNIQUE" in capsys.readouterr().out


def test_unique_json(e1_file, capsys):
    code = main(["unique", "--rule", "pav-exact", "-k", "2", "--json", e1_file])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["verdict"] == "unique"
    assert payload["witnesses"] == [[0, 1]]
    assert payload["optimum"] == "7/2"


def test_count_av(e1_file, capsys):
    code = main(["count", "--rule", "av", "-k", "1", e1_file])
    assert code == 0
    assert capsys.readouterr().out.strip() == "2"


def test_count_sequential(e1_file, capsys):
    code = main(["count", "--rule", "greedy-ccav", "-k", "2", e1_file])
    assert code == 0
    assert capsys.readouterr().out.strip() == "3"


def test_enumerate_json(e1_file, capsys):
    code = main(["enumerate", "--rule", "ccav-exact", "-k", "2", "--json", e1_file])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["committees"] == [[0, 1], [0, 2], [1, 2]]


def test_eval_trace(e1_file, capsys):
    code = main(["eval", "--rule", "greedy-ccav", "-k", "2", e1_file])
    out = capsys.readouterr().out
    assert code == 0
    assert "committee {0, 1}" in out
    assert "step 1: tie {0, 1} merit 2" in out


def test_gen_deterministic(tmp_path, capsys):
    args = [
        "gen", "--culture", "resampling", "--m", "30", "--n", "50",
        "--p", "1/6", "--phi", "3/4", "--seed", "42",
    ]
    first = tmp_path / "a.appr"
    second = tmp_path / "b.appr"
    assert main(args + ["-o", str(first)]) == 0
    assert main(args + ["-o", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    election = parse_election(first.read_text())
    assert election.num_candidates == 30
    assert election.num_voters == 50


def test_gen_requires_culture_params(capsys):
    with pytest.raises(SystemExit) as info:
        main(["gen", "--culture", "resampling", "--m", "5", "--n", "5"])
    assert info.value.code == 2


def test_unknown_rule_is_usage_error(e1_file):
    with pytest.raises(SystemExit) as info:
        main(["unique", "--rule", "borda", "-k", "1", e1_file])
    assert info.value.code == 2


def test_enumerate_limit_exceeded(tmp_path, capsys):
    symmetric = tmp_path / "sym.appr"
    symmetric.write_text("m 6\nn 2\nv 0 1 2 3 4 5\nv 0 1 2 3 4 5\n", encoding="utf-8")
    code = main(["enumerate", "--rule", "pav-exact", "-k", "2", "--limit", "3", str(symmetric)])
    assert code == 1
    assert "exceeding limit 3" in capsys.readouterr().err
    # counting a score rule needs no limit; the tally is closed-form
    code = main(["count", "--rule", "av", "-k", "2", str(symmetric)])
    assert code == 0
    assert capsys.readouterr().out.strip() == "15"


def test_domain_error_exit_one(tmp_path, capsys):
    bad = tmp_path / "bad.appr"
    bad.write_text("m 2\nn 1\nv 7\n", encoding="utf-8")
    code = main(["count", "--rule", "av", "-k", "1", str(bad)])
    assert code == 1
    assert "out of range" in capsys.readouterr().err


def test_gadget_is(tmp_path, capsys):
    graph = tmp_path / "k3.graph"
    graph.write_text("p 3 3\ne 0 1\ne 1 2\ne 0 2\n", encoding="utf-8")
    out = tmp_path / "gadget.appr"
    code = main(["gadget", "is", "--graph", str(graph), "-k", "2", "-o", str(out)])
    assert code == 0
    text = out.read_text()
    assert "# ground truth: optimal committees = 1; unique = yes" in text
    election = parse_election(text)
    assert election.num_candidates == 5
    assert election.num_voters == 11


def test_gadget_matching(tmp_path, capsys):
    graph = tmp_path / "k3.graph"
    graph.write_text("p 3 3\ne 0 1\ne 1 2\ne 0 2\n", encoding="utf-8")
    out = tmp_path / "match.appr"
    code = main(["gadget", "matching", "--graph", str(graph), "-k", "1", "-o", str(out)])
    assert code == 0
    pair = tmp_path / "match_p.appr"
    assert pair.exists()
    assert "matchings = 3" in out.read_text()
    assert parse_election(out.read_text()).num_candidates == 3
    assert parse_election(pair.read_text()).num_candidates == 4


def test_pabulib_sample(tmp_path, capsys):
    source = tmp_path / "fixture.pb"
    source.write_text(PB_FIXTURE, encoding="utf-8")
    out = tmp_path / "sampled.appr"
    code = main([
        "pabulib-sample", "--source", str(source), "--m", "2", "--n", "7",
        "--seed", "3", "-o", str(out),
    ])
    assert code == 0
    election = parse_election(out.read_text())
    assert election.num_candidates == 2
    assert election.num_voters == 7


def test_experiment_csv_and_figure(tmp_path, capsys):
    config = tmp_path / "cfg.json"
    config.write_text(json.dumps({
        "m": 4,
        "k": 2,
        "culture": {"culture": "resampling", "p": "1/2", "phi": "3/4"},
        "rules": ["av", "sav", "phragmen"],
        "n_grid": {"start": 4, "stop": 6, "step": 2},
        "repetitions": 4,
        "master_seed": 7,
        "workers": 1,
    }), encoding="utf-8")
    out = tmp_path / "result.csv"
    code = main(["experiment", "--config", str(config), "-o", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "rule,n,reps,unique,tie_frequency"
    assert len(lines) == 1 + 2 * 3
    figure = tmp_path / "result.png"
    assert figure.exists() and figure.stat().st_size > 0
    # repeat run is byte-identical
    out2 = tmp_path / "result2.csv"
    code = main(["experiment", "--config", str(config), "-o", str(out2), "--no-plot"])
    assert code == 0
    assert out.read_bytes() == out2.read_bytes()
    assert not (tmp_path / "result2.png").exists()
