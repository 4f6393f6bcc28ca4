import json

import numpy as np
import pytest

from causalpipe.dataset import save_csv, save_schema
from causalpipe.learners import run_ensemble
from causalpipe.review import apply_script
from causalpipe.voting import consensus as vote_consensus, tally
from helpers import oracle_expert_script
from causalpipe.graph import CausalGraph, Variable
from causalpipe.pipeline import (
    CausalQuery, PipelineConfig, PipelineError, run_pipeline,
    validate_independencies,
)
from causalpipe.scm import exact_interventional, random_scm, sample


def six_node_world(seed=202):
    g = CausalGraph(
        [Variable(n, "binary") for n in ("U", "W", "X", "M", "Y", "S")],
        [("U", "X"), ("U", "Y"), ("W", "X"), ("W", "M"), ("X", "M"),
         ("M", "Y"), ("X", "Y"), ("S", "W")],
        flag="dag")
    return g, random_scm(g, seed=seed)


def write_world(tmp_path, scm, n=20_000, seed=11):
    d = sample(scm, n, seed=seed)
    save_csv(d, tmp_path / "data.csv")
    save_schema(d.schema, tmp_path / "schema.json")
    return d


def expert_script_path(tmp_path, d, truth, learners=("pc", "hc", "ges"),
                       alpha=0.01):
    """Generate the oracle-expert ledger against the run's own consensus."""
    outs = run_ensemble(d, learners, alpha=alpha)
    cons = vote_consensus(tally(outs, d.schema))
    script = oracle_expert_script(cons, truth)
    reviewed, _ = apply_script(cons, script)
    assert reviewed.directed_edges == truth.directed_edges
    path = tmp_path / "expert.jsonl"
    path.write_text(script.to_jsonl())
    return str(path)


def config_for(tmp_path, **over):
    base = dict(
        data_csv=str(tmp_path / "data.csv"),
        schema_json=str(tmp_path / "schema.json"),
        query=CausalQuery("X", 1, "Y"),
        learners=("pc", "hc", "ges"),
        estimator={"bootstrap_k": 30},
        seed=7,
    )
    base.update(over)
    return PipelineConfig(**base)


class TestRunPipeline:
    def test_end_to_end_close_to_oracle(self, tmp_path):
        g, scm = six_node_world()
        d = write_world(tmp_path, scm, n=40_000)
        truth = exact_interventional(scm, {"X": 1}, ["Y"]).value({"Y": 1})
        cfg = config_for(tmp_path,
                         edit_script_path=expert_script_path(tmp_path, d, g))
        manifest = run_pipeline(cfg, tmp_path / "run")
        assert manifest["status"] == "complete"
        est = json.loads((tmp_path / "run" / "estimate.json").read_text())
        assert abs(est["plugin"]["point"] - truth) <= 0.02
        assert abs(est["ipw"] - truth) <= 0.02

    def test_rerun_same_seed_bit_identical_manifest(self, tmp_path):
        g, scm = six_node_world()
        d = write_world(tmp_path, scm, n=8_000)
        cfg = config_for(tmp_path,
                         edit_script_path=expert_script_path(tmp_path, d, g))
        m1 = run_pipeline(cfg, tmp_path / "r1")
        m2 = run_pipeline(cfg, tmp_path / "r2")
        assert m1["artifacts"] == m2["artifacts"]

    def test_all_stage_artifacts_present(self, tmp_path):
        g, scm = six_node_world()
        d = write_world(tmp_path, scm, n=8_000)
        cfg = config_for(tmp_path,
                         edit_script_path=expert_script_path(tmp_path, d, g))
        run_pipeline(cfg, tmp_path / "run")
        names = {p.name for p in (tmp_path / "run").iterdir()}
        for expected in ("ingest.json", "votes.csv", "consensus.json",
                         "edit_report.json", "final_graph.json",
                         "independence_report.json", "estimand.txt",
                         "estimate.json", "manifest.json"):
            assert expected in names

    def test_unresolved_2cycle_without_script_errors(self, tmp_path):
        # a Markov-equivalent chain stays undirected under PC, so the
        # consensus carries 2-cycles and cannot finalize without an expert
        chain = CausalGraph(
            [Variable(n, "binary") for n in "ABC"],
            [("A", "B"), ("B", "C")], flag="dag")
        scm = random_scm(chain, seed=5)
        write_world(tmp_path, scm, n=8_000)
        cfg = config_for(tmp_path, learners=("pc",), vote_threshold=1,
                         query=CausalQuery("A", 1, "C"))
        with pytest.raises(PipelineError, match="finalize"):
            run_pipeline(cfg, tmp_path / "run")

    def test_hedge_halts_before_estimation(self, tmp_path):
        # craft a consensus whose finalized graph leaves X->Y confounded and
        # unidentifiable: single-learner world with a latent proxy removed
        # from schema is overkill; instead patch the query onto a graph where
        # backdoor fails by hiding the confounder column from adjustment...
        # Simplest honest route: an edit script that deletes every edge into
        # X and Y except a bidirected stand-in is not expressible; hedges are
        # exercised at the identify layer instead (test_identify), and here
        # we assert the halt plumbing via a monkeypatched identifier.
        import causalpipe.pipeline as pl
        from causalpipe.identify import Hedge

        g, scm = six_node_world()
        d = write_world(tmp_path, scm, n=2_000)
        bow = CausalGraph(["X", "Y"], [("X", "Y")], [("X", "Y")])
        fake = Hedge(("X",), ("Y",), bow, bow.induced({"Y"}))
        cfg = config_for(tmp_path,
                         edit_script_path=expert_script_path(tmp_path, d, g))
        orig = pl.identify_conditional
        pl.identify_conditional = lambda *a, **k: fake
        try:
            manifest = run_pipeline(cfg, tmp_path / "run")
        finally:
            pl.identify_conditional = orig
        assert manifest["status"] == "halted:identification"
        hedge = json.loads((tmp_path / "run" / "hedge.json").read_text())
        assert hedge["treatment"] == ["X"]
        assert not (tmp_path / "run" / "estimate.json").exists()

    def test_stage_failure_names_stage(self, tmp_path):
        cfg = config_for(tmp_path)  # no data written
        with pytest.raises(PipelineError, match="ingest"):
            run_pipeline(cfg, tmp_path / "run")


class TestValidation:
    def test_report_rows_never_gate(self, tmp_path):
        g, scm = six_node_world()
        d = sample(scm, 5_000, seed=3)
        rows = validate_independencies(g, d, alpha=0.01)
        assert rows, "expected at least one implication"
        for r in rows:
            assert {"x", "y", "given"} <= set(r)
        consistent = [r for r in rows if r.get("consistent") is True]
        assert len(consistent) >= len(rows) // 2
