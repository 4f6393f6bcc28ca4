import numpy as np
import pytest

from causalpipe.dataset import Dataset
from causalpipe.graph import Variable
from causalpipe.learners import (
    LearnerError, lingam_learn, mmhc_learn, pc_learn, run_ensemble,
    score_search_learn,
)


def cont(cols: dict[str, np.ndarray]) -> Dataset:
    names = list(cols)
    return Dataset(tuple(Variable(n, "continuous") for n in names),
                   np.column_stack([cols[n] for n in names]))


def chain_data(seed, n=10_000):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=n)
    b = 1.2 * a + rng.normal(size=n)
    c = -0.9 * b + rng.normal(size=n)
    return cont({"A": a, "B": b, "C": c})


def collider_data(seed, n=10_000):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=n)
    c = rng.normal(size=n)
    b = a + c + rng.normal(size=n)
    return cont({"A": a, "B": b, "C": c})


def independent_data(seed, n=5000, k=3):
    rng = np.random.default_rng(seed)
    return cont({f"V{i}": rng.normal(size=n) for i in range(k)})


class TestPc:
    def test_chain_left_undirected(self):
        out = pc_learn(chain_data(0), alpha=0.01)
        assert out.undirected == frozenset(
            {frozenset({"A", "B"}), frozenset({"B", "C"})})
        # undirected edges are encoded as 2-cycles
        assert ("A", "B") in out.graph.directed_edges
        assert ("B", "A") in out.graph.directed_edges

    def test_collider_oriented(self):
        out = pc_learn(collider_data(0), alpha=0.01)
        assert ("A", "B") in out.graph.directed_edges
        assert ("C", "B") in out.graph.directed_edges
        assert ("B", "A") not in out.graph.directed_edges
        assert frozenset({"A", "C"}) not in {
            frozenset(e) for e in out.graph.directed_edges}

    def test_independent_columns_empty(self):
        out = pc_learn(independent_data(2), alpha=0.01)
        assert out.graph.directed_edges == frozenset()

    def test_constant_column_isolated_with_warning(self):
        d = chain_data(3)
        data = np.column_stack([d.data, np.full(d.n, 7.0)])
        d2 = Dataset(d.schema + (Variable("K", "continuous"),), data)
        out = pc_learn(d2, alpha=0.01)
        assert "K" in out.diagnostics["constant_columns"]
        assert "warning" in out.diagnostics
        assert all("K" not in e for e in out.graph.directed_edges)

    def test_column_order_invariance(self):
        d = chain_data(4)
        perm = ["C", "A", "B"]
        data = np.column_stack([d.column(n) for n in perm])
        d2 = Dataset(tuple(Variable(n, "continuous") for n in perm), data)
        out1 = pc_learn(d, alpha=0.01)
        out2 = pc_learn(d2, alpha=0.01)
        skel1 = {frozenset(e) for e in out1.graph.directed_edges}
        skel2 = {frozenset(e) for e in out2.graph.directed_edges}
        assert skel1 == skel2

    def test_no_self_loops_and_schema_vars_only(self):
        out = pc_learn(chain_data(5), alpha=0.01)
        for u, v in out.graph.directed_edges:
            assert u != v
            assert u in ("A", "B", "C") and v in ("A", "B", "C")


class TestScoreSearch:
    @pytest.mark.parametrize("strategy", ["hill", "tabu", "ges"])
    def test_chain_adjacencies(self, strategy):
        out = score_search_learn(chain_data(6), strategy=strategy)
        skel = {frozenset(e) for e in out.graph.directed_edges}
        assert skel == {frozenset({"A", "B"}), frozenset({"B", "C"})}
        assert out.graph.flag == "dag"

    @pytest.mark.parametrize("strategy", ["hill", "tabu", "ges"])
    def test_independent_empty(self, strategy):
        out = score_search_learn(independent_data(7), strategy=strategy)
        assert out.graph.directed_edges == frozenset()

    def test_score_at_least_empty(self):
        out = score_search_learn(chain_data(8), strategy="hill")
        assert out.diagnostics["score"] >= out.diagnostics["empty_score"]

    def test_hill_trace_monotone(self):
        out = score_search_learn(chain_data(9), strategy="hill")
        trace = out.diagnostics["trace"]
        assert all(b >= a - 1e-9 for a, b in zip(trace, trace[1:]))

    def test_tabu_excludes_immediate_reversal(self):
        from causalpipe.learners.score import _inverse
        assert _inverse(("add", "A", "B")) == ("delete", "A", "B")
        assert _inverse(("delete", "A", "B")) == ("add", "A", "B")
        assert _inverse(("reverse", "A", "B")) == ("reverse", "B", "A")

    def test_tabu_tenure_contract(self):
        # after an accepted move, its inverse stays excluded for `tenure` steps
        from collections import deque
        tenure = 5
        tabu = deque(maxlen=tenure)
        moves = [("add", "A", "B"), ("add", "B", "C"), ("add", "C", "D"),
                 ("add", "D", "E"), ("add", "E", "F"), ("add", "F", "G")]
        from causalpipe.learners.score import _inverse
        for i, m in enumerate(moves):
            tabu.append(_inverse(m))
            if i < tenure:
                assert _inverse(moves[0]) in tabu
        assert _inverse(moves[0]) not in tabu  # rolled off after tenure

    def test_max_iters_exhaustion_flagged(self):
        out = score_search_learn(chain_data(10), strategy="hill",
                                 config={"max_iters": 1})
        assert out.diagnostics["max_iters_exhausted"] is True

    def test_discrete_bic(self):
        rng = np.random.default_rng(11)
        n = 8000
        x = rng.integers(0, 2, n)
        y = (x ^ (rng.random(n) < 0.2)).astype(int)
        d = Dataset((Variable("x", "binary"), Variable("y", "binary")),
                    np.column_stack([x, y]).astype(float))
        out = score_search_learn(d, strategy="hill")
        assert {frozenset(e) for e in out.graph.directed_edges} == \
            {frozenset({"x", "y"})}


class TestMmhc:
    def test_chain_recovery(self):
        out = mmhc_learn(chain_data(12), alpha=0.01)
        skel = {frozenset(e) for e in out.graph.directed_edges}
        assert skel == {frozenset({"A", "B"}), frozenset({"B", "C"})}

    def test_restriction_respected(self):
        out = mmhc_learn(chain_data(13), alpha=0.01)
        allowed = {frozenset(p) for p in out.diagnostics["restricted_pairs"]}
        for e in out.graph.directed_edges:
            assert frozenset(e) in allowed

    def test_ci_removed_edge_never_appears(self):
        # A-C is separated by B, so the restriction stage drops it
        out = mmhc_learn(chain_data(14), alpha=0.01)
        assert frozenset({"A", "C"}) not in {
            frozenset(e) for e in out.graph.directed_edges}

    def test_collider_candidates(self):
        out = mmhc_learn(collider_data(15), alpha=0.01)
        assert set(out.diagnostics["candidate_sets"]["B"]) == {"A", "C"}


class TestLingam:
    def test_two_variable_uniform_direction(self):
        wins = 0
        for seed in range(100):
            rng = np.random.default_rng(seed)
            n = 10_000
            x = rng.uniform(-1, 1, n)
            y = 1.0 * x + rng.uniform(-1, 1, n)
            d = cont({"X": x, "Y": y})
            out = lingam_learn(d)
            if ("X", "Y") in out.graph.directed_edges and \
                    ("Y", "X") not in out.graph.directed_edges:
                wins += 1
        assert wins >= 90

    def test_gaussian_flagged_low_confidence(self):
        rng = np.random.default_rng(16)
        n = 10_000
        x = rng.normal(size=n)
        y = x + rng.normal(size=n)
        out = lingam_learn(cont({"X": x, "Y": y}))
        assert out.diagnostics["low_confidence"] is True

    def test_three_variable_chain_order(self):
        rng = np.random.default_rng(17)
        n = 20_000
        a = rng.uniform(-1, 1, n)
        b = 1.0 * a + 0.5 * rng.uniform(-1, 1, n)
        c = 1.0 * b + 0.5 * rng.uniform(-1, 1, n)
        out = lingam_learn(cont({"A": a, "B": b, "C": c}))
        order = out.diagnostics["order"]
        assert order.index("A") < order.index("B") < order.index("C")

    def test_categorical_rejected(self):
        d = Dataset((Variable("x", "binary"), Variable("y", "continuous")),
                    np.column_stack([np.zeros(10), np.ones(10)]))
        with pytest.raises(LearnerError, match="continuous"):
            lingam_learn(d)


class TestEnsemble:
    def test_outputs_in_request_order_and_deterministic(self):
        d = chain_data(18, n=3000)
        ids = ("pc", "hc", "ges")
        a = run_ensemble(d, ids, alpha=0.01)
        b = run_ensemble(d, ids, alpha=0.01, max_workers=1)
        assert [o.learner_id for o in a] == list(ids)
        for oa, ob in zip(a, b):
            assert oa.graph == ob.graph
