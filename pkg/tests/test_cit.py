import numpy as np
import pytest

from causalpipe.cit import CiError, ci_test
from causalpipe.dataset import Dataset
from causalpipe.graph import Variable


def cont_dataset(cols: dict[str, np.ndarray]) -> Dataset:
    names = list(cols)
    return Dataset(tuple(Variable(n, "continuous") for n in names),
                   np.column_stack([cols[n] for n in names]))


def cat_dataset(cols: dict[str, np.ndarray], cards: dict[str, int]) -> Dataset:
    names = list(cols)
    return Dataset(
        tuple(Variable(n, "binary") if cards[n] == 2
              else Variable(n, "categorical", cards[n]) for n in names),
        np.column_stack([cols[n] for n in names]).astype(float))


class TestFisherZ:
    def test_zero_correlation_gives_zero_statistic(self):
        # orthogonal columns by construction: exact r = 0
        x = np.array([1.0, -1.0, 1.0, -1.0, 1.0, -1.0])
        y = np.array([1.0, 1.0, -1.0, -1.0, 1.0, -1.0]) * 0 + \
            np.array([1.0, 1.0, -1.0, 1.0, -1.0, -1.0])
        y = y - y.mean()
        x = x - x.mean()
        y = y - (x @ y) / (x @ x) * x  # residualize: exact orthogonality
        d = cont_dataset({"x": x, "y": y})
        res = ci_test(d, "x", "y", (), alpha=0.05)
        assert res.statistic == pytest.approx(0.0, abs=1e-12)
        assert res.p_value == pytest.approx(1.0)
        assert res.independent
        assert res.test_kind == "fisher_z"

    def test_collinear_pair_dependent(self):
        x = np.linspace(0, 1, 50)
        d = cont_dataset({"x": x, "y": 2 * x})
        res = ci_test(d, "x", "y")
        assert res.p_value == pytest.approx(0.0)
        assert not res.independent

    def test_insufficient_sample(self):
        rng = np.random.default_rng(0)
        d = cont_dataset({k: rng.normal(size=5) for k in "xyzw"})
        with pytest.raises(CiError, match="n > "):
            ci_test(d, "x", "y", ("z", "w"))

    def test_chain_conditional_independence_monte_carlo(self):
        accepted = 0
        trials = 100
        for seed in range(trials):
            rng = np.random.default_rng(seed)
            n = 10_000
            x = rng.normal(size=n)
            y = 1.5 * x + rng.normal(size=n)
            z = -0.8 * y + rng.normal(size=n)
            d = cont_dataset({"x": x, "y": y, "z": z})
            if ci_test(d, "x", "z", ("y",), alpha=0.01).independent:
                accepted += 1
        assert accepted >= 95

    def test_marginal_dependence_detected(self):
        rng = np.random.default_rng(5)
        n = 10_000
        x = rng.normal(size=n)
        z = 0.7 * x + rng.normal(size=n)
        d = cont_dataset({"x": x, "z": z})
        assert not ci_test(d, "x", "z").independent

    def test_constant_column_independent(self):
        rng = np.random.default_rng(1)
        d = cont_dataset({"x": np.ones(100), "y": rng.normal(size=100)})
        res = ci_test(d, "x", "y")
        assert res.independent and res.p_value == 1.0


class TestG2:
    def test_discrete_dependence(self):
        rng = np.random.default_rng(2)
        n = 5000
        x = rng.integers(0, 2, n)
        y = (x + (rng.random(n) < 0.1)) % 2
        d = cat_dataset({"x": x, "y": y}, {"x": 2, "y": 2})
        res = ci_test(d, "x", "y")
        assert res.test_kind == "g2"
        assert not res.independent

    def test_conditional_independence_in_chain(self):
        rng = np.random.default_rng(3)
        n = 20_000
        x = rng.integers(0, 2, n)
        y = (x ^ (rng.random(n) < 0.3)).astype(int)
        z = (y ^ (rng.random(n) < 0.3)).astype(int)
        d = cat_dataset({"x": x, "y": y, "z": z}, {"x": 2, "y": 2, "z": 2})
        assert ci_test(d, "x", "z", ("y",), alpha=0.01).independent
        assert not ci_test(d, "x", "z", (), alpha=0.01).independent

    def test_independent_uniform(self):
        rng = np.random.default_rng(4)
        n = 5000
        d = cat_dataset({"x": rng.integers(0, 3, n), "y": rng.integers(0, 2, n)},
                        {"x": 3, "y": 2})
        assert ci_test(d, "x", "y").independent


class TestValidation:
    def test_mixed_types_rejected(self):
        rng = np.random.default_rng(0)
        d = Dataset((Variable("x", "continuous"), Variable("y", "binary")),
                    np.column_stack([rng.normal(size=50),
                                     rng.integers(0, 2, 50).astype(float)]))
        with pytest.raises(CiError, match="mixed"):
            ci_test(d, "x", "y")

    def test_same_variable_rejected(self):
        rng = np.random.default_rng(0)
        d = cont_dataset({"x": rng.normal(size=50), "y": rng.normal(size=50)})
        with pytest.raises(CiError):
            ci_test(d, "x", "x")
        with pytest.raises(CiError):
            ci_test(d, "x", "y", ("x",))

    def test_alpha_defines_independence(self):
        rng = np.random.default_rng(8)
        n = 2000
        x = rng.normal(size=n)
        y = 0.05 * x + rng.normal(size=n)  # weak dependence
        d = cont_dataset({"x": x, "y": y})
        res = ci_test(d, "x", "y", alpha=0.5)
        assert res.independent == (res.p_value > 0.5)
