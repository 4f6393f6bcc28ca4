import json

import pytest
from click.testing import CliRunner

from causalpipe.cli import main
from causalpipe.dataset import save_csv, save_schema
from causalpipe.graph import CausalGraph, Variable
from causalpipe.scm import random_scm, sample


@pytest.fixture()
def runner():
    return CliRunner()


def world(tmp_path, n=6000):
    g = CausalGraph(
        [Variable("Z", "binary"), Variable("X", "binary"), Variable("Y", "binary")],
        [("Z", "X"), ("Z", "Y"), ("X", "Y")], flag="dag")
    scm = random_scm(g, seed=6)
    d = sample(scm, n, seed=1)
    save_csv(d, tmp_path / "data.csv")
    save_schema(d.schema, tmp_path / "schema.json")
    (tmp_path / "graph.json").write_text(g.to_json())
    return g


def test_simulate_learn_vote_consensus_roundtrip(runner, tmp_path):
    g = world(tmp_path)
    r = runner.invoke(main, ["simulate", "--graph", str(tmp_path / "graph.json"),
                             "--rows", "4000", "--seed", "2",
                             "--out", str(tmp_path / "sim")])
    assert r.exit_code == 0, r.output
    cfg = {"data_csv": str(tmp_path / "sim" / "data.csv"),
           "schema_json": str(tmp_path / "sim" / "schema.json"),
           "learners": ["hc", "ges"]}
    (tmp_path / "learn.json").write_text(json.dumps(cfg))
    r = runner.invoke(main, ["learn", "--config", str(tmp_path / "learn.json"),
                             "--out", str(tmp_path / "learned")])
    assert r.exit_code == 0, r.output
    graphs = sorted(str(p) for p in (tmp_path / "learned").glob("learner_*.json"))
    assert len(graphs) == 2
    (tmp_path / "vote.json").write_text(json.dumps({"graphs": graphs}))
    r = runner.invoke(main, ["vote", "--config", str(tmp_path / "vote.json"),
                             "--out", str(tmp_path / "voted")])
    assert r.exit_code == 0, r.output
    r = runner.invoke(main, ["consensus", "--votes",
                             str(tmp_path / "voted" / "votes.csv"),
                             "-m", "2", "--out", str(tmp_path / "cons")])
    assert r.exit_code == 0, r.output
    assert (tmp_path / "cons" / "consensus.json").exists()


def test_edit_finalize_identify_estimate(runner, tmp_path):
    world(tmp_path)
    # edit: remove Z->Y then add it back via script
    script = (tmp_path / "script.jsonl")
    script.write_text(json.dumps(
        {"kind": "reorient", "from": "Y", "to": "X", "note": "test"}) + "\n")
    r = runner.invoke(main, ["edit", "--graph", str(tmp_path / "graph.json"),
                             "--script", str(script),
                             "--out", str(tmp_path / "edited")])
    assert r.exit_code == 0, r.output
    assert json.loads(r.output)["reoriented"] == 1

    r = runner.invoke(main, ["finalize", "--graph", str(tmp_path / "graph.json"),
                             "--out", str(tmp_path / "final")])
    assert r.exit_code == 0, r.output

    r = runner.invoke(main, ["identify", "--graph",
                             str(tmp_path / "final" / "final_graph.json"),
                             "-x", "X", "-y", "Y"])
    assert r.exit_code == 0, r.output
    assert "(sum" in r.output

    est_cfg = {"data_csv": str(tmp_path / "data.csv"),
               "schema_json": str(tmp_path / "schema.json"),
               "query": {"treatment": "X", "outcome": "Y"},
               "estimator": {"bootstrap_k": 10}}
    (tmp_path / "est.json").write_text(json.dumps(est_cfg))
    r = runner.invoke(main, ["estimate", "--graph",
                             str(tmp_path / "final" / "final_graph.json"),
                             "--config", str(tmp_path / "est.json"),
                             "--seed", "3"])
    assert r.exit_code == 0, r.output
    body = json.loads(r.output)
    assert body["adjustment"] == ["Z"]


def test_finalize_failure_lists_cycles(runner, tmp_path):
    g = CausalGraph("AB", [("A", "B"), ("B", "A")])
    (tmp_path / "g.json").write_text(g.to_json())
    r = runner.invoke(main, ["finalize", "--graph", str(tmp_path / "g.json"),
                             "--out", str(tmp_path / "x")])
    assert r.exit_code == 1
    assert "cycles" in r.output


def test_identify_hedge_exit_code(runner, tmp_path):
    bow = CausalGraph(["X", "Y"], [("X", "Y")], [("X", "Y")])
    (tmp_path / "bow.json").write_text(bow.to_json())
    r = runner.invoke(main, ["identify", "--graph", str(tmp_path / "bow.json"),
                             "-x", "X", "-y", "Y"])
    assert r.exit_code == 2
    assert json.loads(r.output)["identifiable"] is False


def test_validate_command(runner, tmp_path):
    world(tmp_path)
    cfg = {"data_csv": str(tmp_path / "data.csv"),
           "schema_json": str(tmp_path / "schema.json")}
    (tmp_path / "v.json").write_text(json.dumps(cfg))
    r = runner.invoke(main, ["validate", "--graph", str(tmp_path / "graph.json"),
                             "--config", str(tmp_path / "v.json"),
                             "--out", str(tmp_path / "val")])
    assert r.exit_code == 0, r.output
    report = json.loads((tmp_path / "val" / "independence_report.json").read_text())
    assert isinstance(report, list)
