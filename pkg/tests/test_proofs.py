import pytest

from causalpipe import fixtures
from causalpipe.graph import CausalGraph
from causalpipe.proofs import (
    ProofError, ProofScript, ProofStep, load_proof_script, verify_derivation,
    verify_step,
)


def load_fixture_script():
    return load_proof_script(fixtures.proof_script_dict(),
                             fixtures.appendix_sets())


class TestLoading:
    def test_set_references_resolve(self):
        script = load_fixture_script()
        by_id = {s.step_id: s for s in script.steps}
        t14 = by_id["task14-rule3"]
        assert "apsiii" not in t14.x          # Q - {apsiii}
        assert len(t14.x) == 10
        assert len(t14.z) == 15               # P
        assert by_id["task17-rule2"].z == fixtures.appendix_sets()["H"]

    def test_unknown_set_rejected(self):
        with pytest.raises(ProofError, match="unknown set"):
            load_proof_script(
                {"steps": [{"id": "s", "kind": "rule3", "y": ["a"],
                            "z": {"set": "NOPE"}, "x": []}]}, {})

    def test_unknown_kind_rejected(self):
        with pytest.raises(ProofError, match="unknown kind"):
            load_proof_script({"steps": [{"id": "s", "kind": "rule9"}]}, {})


class TestReplay:
    def test_fixture_derivation_fully_passes(self):
        g = fixtures.fixture_graph()
        report = verify_derivation(g, load_fixture_script())
        assert report.all_passed, report.summary()
        assert report.rule_steps_checked == 31
        assert len(report.results) == 35

    def test_eq3_premise_is_the_mutilated_dsep(self):
        g = fixtures.fixture_graph()
        gm = g.mutilate(cut_incoming={"oxygenation", "pao2", "vt", "minVentVol"})
        assert gm.d_separated({"pao2", "vt", "minVentVol"},
                              {"death", "apsiii", "sofa"}, {"oxygenation"})

    def test_perturbed_step_fails_alone(self):
        g = fixtures.fixture_graph()
        script = load_fixture_script()
        steps = []
        for s in script.steps:
            if s.step_id == "task02-rule3":
                # claim peep needs no conditioning: false, age is its parent
                steps.append(ProofStep(s.step_id, s.kind, y=s.y,
                                       z=s.z + ("age",), x=(), w=()))
            else:
                steps.append(s)
        report = verify_derivation(g, ProofScript(tuple(steps)))
        failed = [r.step_id for r in report.failures()]
        assert failed == ["task02-rule3"]

    def test_wrong_graph_reports_failures_without_crash(self):
        pre_edit = fixtures.consensus_graph()
        report = verify_derivation(pre_edit, load_fixture_script())
        assert not report.all_passed
        assert len(report.failures()) > 0
        assert len(report.results) == 35

    def test_malformed_step_raises(self):
        g = fixtures.fixture_graph()
        bad = ProofStep("bad", "rule3", y=("death",), z=("death",), x=())
        with pytest.raises(ProofError, match="malformed"):
            verify_step(g, bad)

    def test_structural_steps_validated(self):
        g = fixtures.fixture_graph()
        ok = verify_step(g, ProofStep("cf", "c-factorize",
                                      over=("age", "death")))
        assert ok.passed
        confounded = CausalGraph(["a", "b"], [], [("a", "b")])
        bad = verify_step(confounded, ProofStep("cf", "c-factorize",
                                                over=("a", "b")))
        assert not bad.passed

    def test_summary_mentions_every_step(self):
        g = fixtures.fixture_graph()
        report = verify_derivation(g, load_fixture_script())
        text = report.summary()
        assert "task18-rule2" in text and "eq3" in text
        assert "35/35 steps passed" in text
