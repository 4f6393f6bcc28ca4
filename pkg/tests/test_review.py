import pytest

from causalpipe.graph import CausalGraph
from causalpipe.review import (
    Edit, EditError, EditScript, FinalizeError, apply_edit, apply_script,
    finalize,
)
from causalpipe import fixtures


def g0():
    return CausalGraph("ABCD", [("A", "B"), ("B", "C")])


class TestApplyEdit:
    def test_remove(self):
        g = apply_edit(g0(), Edit("remove", ("A", "B")))
        assert ("A", "B") not in g.directed_edges

    def test_remove_resolves_2cycle_pair(self):
        g = CausalGraph("AB", [("A", "B"), ("B", "A")])
        out = apply_edit(g, Edit("remove", ("A", "B")))
        assert out.directed_edges == frozenset()

    def test_reorient_states_final_orientation(self):
        g = apply_edit(g0(), Edit("reorient", ("B", "A")))
        assert ("B", "A") in g.directed_edges
        assert ("A", "B") not in g.directed_edges

    def test_add(self):
        g = apply_edit(g0(), Edit("add", ("C", "D")))
        assert ("C", "D") in g.directed_edges

    def test_keep_is_identity(self):
        assert apply_edit(g0(), Edit("keep", ("A", "B"))) == g0()

    @pytest.mark.parametrize("edit,msg", [
        (Edit("remove", ("A", "C")), "not present"),
        (Edit("reorient", ("A", "B")), "reversed edge"),
        (Edit("add", ("A", "B")), "already present"),
        (Edit("keep", ("A", "D")), "not present"),
    ])
    def test_precondition_errors_name_edge_and_kind(self, edit, msg):
        with pytest.raises(EditError, match=msg) as exc:
            apply_edit(g0(), edit)
        assert exc.value.kind == edit.kind
        assert exc.value.edge == edit.edge

    def test_unknown_variable(self):
        with pytest.raises(EditError, match="unknown"):
            apply_edit(g0(), Edit("add", ("A", "Z")))

    def test_remove_then_add_is_identity(self):
        g = apply_edit(g0(), Edit("remove", ("A", "B")))
        g = apply_edit(g, Edit("add", ("A", "B")))
        assert g == g0()

    def test_reorient_twice_is_identity(self):
        g = apply_edit(g0(), Edit("reorient", ("B", "A")))
        g = apply_edit(g, Edit("reorient", ("A", "B")))
        assert g == g0()


class TestApplyScript:
    def test_empty_script_identity(self):
        g, report = apply_script(g0(), EditScript(()))
        assert g == g0()
        assert report.total == 0

    def test_failing_edit_reports_index(self):
        script = EditScript((Edit("remove", ("A", "B")),
                             Edit("remove", ("A", "B"))))
        with pytest.raises(EditError, match="edit 1") as exc:
            apply_script(g0(), script)
        assert exc.value.index == 1

    def test_counts_match_edge_set_deltas(self):
        script = EditScript((
            Edit("remove", ("A", "B")),
            Edit("add", ("A", "D")),
            Edit("reorient", ("C", "B")),
            Edit("keep", ("A", "D")),
        ))
        g, report = apply_script(g0(), script)
        assert (report.added, report.removed, report.reoriented, report.kept) \
            == (1, 1, 1, 1)
        assert report.total == len(script)
        assert report.edges_removed == len(
            g0().directed_edges - g.directed_edges)
        assert report.edges_added == len(
            g.directed_edges - g0().directed_edges)

    def test_cycle_created_detected_at_finalize(self):
        script = EditScript((Edit("add", ("C", "A")),))
        g, report = apply_script(g0(), script)
        assert not report.acyclic
        with pytest.raises(FinalizeError) as exc:
            finalize(g)
        assert any(set(c) >= {"A", "B", "C"} for c in exc.value.cycles)


class TestFinalize:
    def test_acyclic_flagged_dag(self):
        assert finalize(g0()).flag == "dag"

    def test_2cycle_error_names_both_edges(self):
        g = CausalGraph(
            ["paco2", "hemoglobin"],
            [("paco2", "hemoglobin"), ("hemoglobin", "paco2")])
        with pytest.raises(FinalizeError) as exc:
            finalize(g)
        (cycle,) = exc.value.cycles
        assert set(cycle) == {"paco2", "hemoglobin"}

    def test_never_mutates_input(self):
        g = CausalGraph("AB", [("A", "B"), ("B", "A")])
        before = g.directed_edges
        with pytest.raises(FinalizeError):
            finalize(g)
        assert g.directed_edges == before


class TestTable4Golden:
    def test_ledger_counts(self):
        _, report = fixtures.reviewed_graph()
        assert report.added == 16
        assert report.removed == 10
        assert report.reoriented == 15
        assert report.kept == 0

    def test_result_finalizes(self):
        g, report = fixtures.reviewed_graph()
        assert report.acyclic
        final = finalize(g)
        assert final.flag == "dag"
        two_cycles = [e for e in final.directed_edges
                      if (e[1], e[0]) in final.directed_edges]
        assert not two_cycles

    def test_spot_rows(self):
        g, _ = fixtures.reviewed_graph()
        cons = fixtures.consensus_graph()
        assert ("age", "gender") in cons.directed_edges
        assert ("age", "gender") not in g.directed_edges       # Removed
        assert ("death", "apsiii") in cons.directed_edges      # 5 votes
        assert ("apsiii", "death") in g.directed_edges         # Changed Orientation
        assert ("oxygenation", "death") not in cons.directed_edges
        assert ("oxygenation", "death") in g.directed_edges    # Added

    def test_fixture_graph_matches_rebuild(self):
        rebuilt = fixtures.rebuild_fixture_graph()
        fixture = fixtures.fixture_graph()
        assert rebuilt.directed_edges == fixture.directed_edges
        assert len(fixture.directed_edges) == 64

    def test_script_jsonl_roundtrip(self):
        script = fixtures.edit_script()
        assert len(script) == 41
        back = EditScript.from_jsonl(script.to_jsonl())
        assert back.edits == script.edits
