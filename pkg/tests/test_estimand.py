import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from causalpipe.estimand import (
    EstimandError, One, Prob, Product, Quotient, Sum, ZeroConditioningError,
    evaluate_estimand, evaluate_scalar, parse, simplify,
)
from causalpipe.tables import Factor
from causalpipe.scm import TableJoint


def backdoor_estimand():
    return Sum(("z",), Product((Prob(("y",), ("x", "z")), Prob(("z",)))))


class TestSerialization:
    def test_sexpr_shapes(self):
        e = backdoor_estimand()
        assert e.to_sexpr() == "(sum (z) (prod (p (y) (x z)) (p (z) ())))"
        assert e.to_text() == "\\sum_{z} P(y|x,z) P(z)"

    def test_roundtrip_examples(self):
        cases = [
            One(),
            Prob(("y",)),
            Prob(("y", "w"), ("x",)),
            backdoor_estimand(),
            Quotient(Prob(("y",), ("x",)), Sum(("y",), Prob(("y",), ("x",)))),
            Product((Prob(("a",)), Sum(("b",), Prob(("b", "c"))))),
        ]
        for e in cases:
            assert parse(e.to_sexpr()) == e

    def test_parse_rejects_garbage(self):
        with pytest.raises(EstimandError):
            parse("(p (y)")
        with pytest.raises(EstimandError):
            parse("(frob (y) ())")

    def test_vars_cannot_repeat_across_bar(self):
        with pytest.raises(EstimandError):
            Prob(("y",), ("y",))


@st.composite
def estimands(draw, depth=0):
    vars_pool = ["a", "b", "c", "d"]
    kind = draw(st.sampled_from(
        ["prob", "prob"] + (["sum", "prod", "div"] if depth < 2 else [])))
    if kind == "prob":
        k = draw(st.integers(1, 2))
        vs = tuple(draw(st.permutations(vars_pool))[:k])
        given_pool = [v for v in vars_pool if v not in vs]
        ng = draw(st.integers(0, len(given_pool)))
        return Prob(vs, tuple(given_pool[:ng]))
    if kind == "sum":
        child = draw(estimands(depth + 1))
        free = sorted(child.free_variables())
        if not free:
            return child
        nb = draw(st.integers(1, len(free)))
        return Sum(tuple(free[:nb]), child)
    if kind == "prod":
        return Product((draw(estimands(depth + 1)), draw(estimands(depth + 1))))
    num = draw(estimands(depth + 1))
    return Quotient(num, num)


@settings(max_examples=80, deadline=None)
@given(estimands())
def test_roundtrip_property(e):
    assert parse(e.to_sexpr()) == e


class TestSimplify:
    def test_quotient_by_one(self):
        assert simplify(Quotient(Prob(("y",)), One())) == Prob(("y",))

    def test_empty_sum_dropped(self):
        assert simplify(Sum((), Prob(("y",)))) == Prob(("y",))

    def test_nested_sums_merge(self):
        e = Sum(("a",), Sum(("b",), Prob(("a", "b", "c"))))
        assert simplify(e) == Prob(("c",))

    def test_marginal_absorbed(self):
        assert simplify(Sum(("a",), Prob(("a", "b")))) == Prob(("b",))

    def test_product_flattening(self):
        e = Product((One(), Product((Prob(("a",)), Prob(("b",))))))
        assert simplify(e) == Product((Prob(("a",)), Prob(("b",))))


class TestEvaluation:
    def joint(self):
        # hand-built joint over x,z,y (binary); P(x,z,y)
        table = np.array([
            [[0.10, 0.05], [0.15, 0.05]],
            [[0.05, 0.20], [0.10, 0.30]],
        ])  # axes x, z, y
        return TableJoint(Factor(("x", "z", "y"), table))

    def test_conditional_matches_hand_arithmetic(self):
        j = self.joint()
        # P(y=1 | x=1) = P(x=1,y=1)/P(x=1) = (0.20+0.30)/0.65
        val = evaluate_scalar(Prob(("y",), ("x",)), j, {"y": 1, "x": 1})
        assert val == pytest.approx(0.5 / 0.65)

    def test_backdoor_sums_to_one_over_y(self):
        j = self.joint()
        f = evaluate_estimand(backdoor_estimand(), j)
        table = f.transpose_to(("x", "y")).table
        assert np.allclose(table.sum(axis=1), 1.0)

    def test_quotient_form_equals_direct_conditional(self):
        j = self.joint()
        q = Quotient(Prob(("y", "x")), Sum(("y",), Prob(("y", "x"))))
        direct = Prob(("y",), ("x",))
        a = evaluate_estimand(q, j).transpose_to(("x", "y"))
        b = evaluate_estimand(direct, j).transpose_to(("y", "x")).transpose_to(("x", "y"))
        assert np.allclose(a.table, b.table)

    def test_sum_of_constant_multiplies_cardinality(self):
        j = self.joint()
        f = evaluate_estimand(Sum(("z",), One()), j)
        assert f.table == pytest.approx(2.0)

    def test_zero_conditioning_raises_with_event(self):
        table = np.array([[0.5, 0.5], [0.0, 0.0]])  # P(x=1) = 0
        j = TableJoint(Factor(("x", "y"), table))
        with pytest.raises(ZeroConditioningError, match="x"):
            evaluate_estimand(Prob(("y",), ("x",)), j)

    def test_zero_policy_scores_zero(self):
        table = np.array([[0.5, 0.5], [0.0, 0.0]])
        j = TableJoint(Factor(("x", "y"), table))
        f = evaluate_estimand(Prob(("y",), ("x",)), j, on_zero_given="zero")
        assert f.value({"y": 1, "x": 1}) == 0.0
