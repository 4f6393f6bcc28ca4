"""Ground-truth structural causal models: the exact oracle every estimator
and identification claim is verified against.

Discrete SCMs carry one CPT per variable (axes ordered parent..., self);
interventions sever mechanisms by dropping the intervened factor and slicing
it out of downstream CPTs. Exact interventional queries run truncated-
factorization variable elimination; sampling is ancestral, chunk-seeded for
determinism.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .dataset import Dataset
from .graph import CausalGraph, Variable
from .tables import Factor, contract

CHUNK = 1 << 16


class ScmError(ValueError):
    pass


class BudgetExceededError(ScmError):
    """Exact elimination refused; use Monte-Carlo mode (``sample``) instead."""


@dataclass(frozen=True)
class DiscreteScm:
    graph: CausalGraph
    cpts: Mapping[str, np.ndarray]  # shape: cards of parents (graph order) + self

    def __post_init__(self):
        if not self.graph.is_acyclic():
            raise ScmError("SCM graph must be acyclic")
        for name in self.graph.names:
            cpt = self.cpts.get(name)
            if cpt is None:
                raise ScmError(f"missing CPT for {name!r}")
            pars = self.graph.parents(name)
            if cpt.ndim != len(pars) + 1:
                raise ScmError(
                    f"CPT for {name!r} has rank {cpt.ndim}, expected {len(pars) + 1}")
            sums = cpt.sum(axis=-1)
            if not np.allclose(sums, 1.0, atol=1e-12):
                raise ScmError(f"CPT rows for {name!r} do not sum to 1")

    @property
    def cards(self) -> dict[str, int]:
        return {n: self.cpts[n].shape[-1] for n in self.graph.names}

    def factor(self, name: str) -> Factor:
        return Factor(self.graph.parents(name) + (name,),
                      np.asarray(self.cpts[name], dtype=float))

    def factors(self, interventions: Mapping[str, int] | None = None) -> list[Factor]:
        """Truncated factorization: intervened factors dropped, their values
        sliced out of every downstream CPT."""
        interventions = dict(interventions or {})
        for k, v in interventions.items():
            self.graph.index(k)
            if not 0 <= v < self.cpts[k].shape[-1]:
                raise ScmError(f"invalid assignment {k}={v}")
        out: list[Factor] = []
        for name in self.graph.names:
            if name in interventions:
                continue
            f = self.factor(name)
            fixed = {v: interventions[v] for v in f.vars if v in interventions}
            if fixed:
                f = f.slice_at(fixed)
            out.append(f)
        return out

    def total_bits(self) -> float:
        return float(sum(math.log2(c) for c in self.cards.values()))

    def to_json_dict(self) -> dict:
        return {
            "graph": self.graph.to_json_dict(),
            "cpts": {k: np.asarray(v).tolist() for k, v in self.cpts.items()},
        }

    @staticmethod
    def from_json_dict(d: dict) -> "DiscreteScm":
        return DiscreteScm(
            CausalGraph.from_json_dict(d["graph"]),
            {k: np.array(v, dtype=float) for k, v in d["cpts"].items()},
        )

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @staticmethod
    def from_json(text: str) -> "DiscreteScm":
        return DiscreteScm.from_json_dict(json.loads(text))


@dataclass(frozen=True)
class LinearScm:
    graph: CausalGraph
    weights: Mapping[tuple[str, str], float]
    noise: Mapping[str, tuple[str, float]]  # name -> (family, scale)

    def __post_init__(self):
        if not self.graph.is_acyclic():
            raise ScmError("SCM graph must be acyclic")
        for e, w in self.weights.items():
            if e not in self.graph.directed_edges:
                raise ScmError(f"weight for non-edge {e}")
            if not np.isfinite(w):
                raise ScmError(f"non-finite weight on {e}")
        for name in self.graph.names:
            fam, _scale = self.noise[name]
            if fam not in ("gaussian", "uniform"):
                raise ScmError(f"unknown noise family {fam!r} for {name!r}")


def random_scm(g: CausalGraph, seed: int, family: str = "discrete",
               noise: str = "gaussian"):
    """Random parameterization: Dirichlet(1,..,1) CPT rows (discrete) or
    +-[0.5, 1.5] weights (linear). Deterministic per seed."""
    if not g.is_acyclic():
        raise ScmError("random_scm needs an acyclic graph")
    rng = np.random.default_rng(seed)
    if family == "discrete":
        cpts: dict[str, np.ndarray] = {}
        for name in g.names:
            card = g.variable(name).cardinality
            if card is None:
                raise ScmError(
                    f"variable {name!r} is continuous; discrete SCM needs "
                    "binary/categorical kinds")
            pcards = [g.variable(p).cardinality for p in g.parents(name)]
            rows = int(np.prod(pcards)) if pcards else 1
            table = rng.dirichlet(np.ones(card), size=rows)
            cpts[name] = table.reshape(tuple(pcards) + (card,))
        return DiscreteScm(g, cpts)
    if family == "linear":
        weights = {}
        for e in g.sorted_directed():
            mag = rng.uniform(0.5, 1.5)
            sign = 1.0 if rng.random() < 0.5 else -1.0
            weights[e] = sign * mag
        noises = {name: (noise, 1.0) for name in g.names}
        return LinearScm(g, weights, noises)
    raise ScmError(f"unknown SCM family {family!r}")


def _binary_schema(g: CausalGraph) -> tuple[Variable, ...]:
    out = []
    for v in g.variables:
        card = v.cardinality
        if card is None:
            out.append(Variable(v.name, "continuous"))
        elif card == 2:
            out.append(Variable(v.name, "binary"))
        else:
            out.append(Variable(v.name, "categorical", levels=card))
    return tuple(out)


def sample(scm, n: int, intervention: Mapping[str, float] | None = None,
           seed: int = 0) -> Dataset:
    """Ancestral sampling in topological order; intervened variables are
    pinned and their mechanisms severed. Chunk-seeded: the result for a given
    (scm, n, intervention, seed) is schedule-independent."""
    intervention = dict(intervention or {})
    for k in intervention:
        scm.graph.index(k)
    order = scm.graph.topological_order()
    names = scm.graph.names
    col_of = {name: i for i, name in enumerate(names)}

    chunks = []
    n_chunks = (n + CHUNK - 1) // CHUNK
    for ci in range(n_chunks):
        rows = min(CHUNK, n - ci * CHUNK)
        rng = np.random.default_rng([seed, ci])
        data = np.empty((rows, len(names)), dtype=float)
        if isinstance(scm, DiscreteScm):
            for name in order:
                j = col_of[name]
                if name in intervention:
                    val = int(intervention[name])
                    if not 0 <= val < scm.cpts[name].shape[-1]:
                        raise ScmError(f"invalid assignment {name}={val}")
                    data[:, j] = val
                    continue
                pars = scm.graph.parents(name)
                cpt = np.asarray(scm.cpts[name], dtype=float)
                if pars:
                    pcols = tuple(data[:, col_of[p]].astype(np.int64) for p in pars)
                    probs = cpt[pcols]
                else:
                    probs = np.broadcast_to(cpt, (rows, cpt.shape[-1]))
                u = rng.random(rows)
                data[:, j] = (u[:, None] > np.cumsum(probs, axis=1)[:, :-1]).sum(axis=1)
        elif isinstance(scm, LinearScm):
            for name in order:
                j = col_of[name]
                if name in intervention:
                    data[:, j] = float(intervention[name])
                    continue
                fam, scale = scm.noise[name]
                if fam == "gaussian":
                    vals = rng.normal(0.0, scale, size=rows)
                else:
                    vals = rng.uniform(-scale * math.sqrt(3), scale * math.sqrt(3),
                                       size=rows)
                for p in scm.graph.parents(name):
                    vals = vals + scm.weights[(p, name)] * data[:, col_of[p]]
                data[:, j] = vals
        else:
            raise ScmError(f"cannot sample from {type(scm)}")
        chunks.append(data)
    full = np.vstack(chunks) if chunks else np.empty((0, len(names)))
    return Dataset(_binary_schema(scm.graph), full)


def exact_interventional(scm: DiscreteScm, x_assignments: Mapping[str, int],
                         y: Iterable[str], z: Iterable[str] | None = None,
                         max_bits: float = 20.0) -> Factor:
    """P(y | do(x)) (or P(y | z, do(x)) when z is given) by variable
    elimination over the mutilated factorization.

    Raises BudgetExceededError past ``max_bits`` binary-equivalent variables;
    Monte-Carlo mode (``sample`` + empirical evaluation) covers larger models.
    """
    y = tuple(y)
    z = tuple(z or ())
    if not y:
        raise ScmError("y must be nonempty")
    for name in set(y) | set(z) | set(x_assignments):
        scm.graph.index(name)
    if set(y) & set(x_assignments) or set(z) & set(x_assignments) or set(y) & set(z):
        raise ScmError("y, z and intervention sets must be disjoint")
    if scm.total_bits() > max_bits:
        raise BudgetExceededError(
            f"{scm.total_bits():.1f} binary-equivalent variables exceed the "
            f"exact-elimination budget of {max_bits}; use Monte-Carlo mode")
    factors = scm.factors(x_assignments)
    joint = contract(factors, tuple(y) + z).transpose_to(tuple(y) + z)
    if not z:
        return joint.normalize()
    # normalize per z-configuration: P(y|z,do(x)) = P(y,z|do(x)) / P(z|do(x))
    pz = joint.marginalize_out(y)
    pz_t = pz.transpose_to(tuple(v for v in joint.vars if v in set(z)))
    shape = tuple(
        joint.table.shape[i] if joint.vars[i] in set(z) else 1
        for i in range(len(joint.vars)))
    with np.errstate(divide="ignore", invalid="ignore"):
        table = joint.table / pz_t.table.reshape(shape)
    table = np.where(np.isfinite(table), table, 0.0)
    return Factor(joint.vars, table)


class ExactJoint:
    """JointDistribution over a DiscreteScm's observational law (or a
    mutilated interventional law), with marginals by variable elimination."""

    def __init__(self, scm: DiscreteScm,
                 interventions: Mapping[str, int] | None = None):
        self._scm = scm
        self._interventions = dict(interventions or {})
        self._factors = scm.factors(self._interventions)
        self._names = tuple(n for n in scm.graph.names
                            if n not in self._interventions)

    def variable_names(self) -> tuple[str, ...]:
        return self._names

    def marginal(self, names: tuple[str, ...]) -> Factor:
        for n in names:
            if n not in self._names:
                raise ScmError(f"variable {n!r} not in this joint")
        out = contract(self._factors, tuple(names))
        return out.transpose_to(tuple(names)).normalize()


class EmpiricalJoint:
    """JointDistribution backed by integer-coded samples."""

    def __init__(self, codes: np.ndarray, names: Sequence[str],
                 cards: Mapping[str, int]):
        self._codes = np.asarray(codes, dtype=np.int64)
        self._names = tuple(names)
        self._cards = dict(cards)
        if self._codes.ndim != 2 or self._codes.shape[1] != len(self._names):
            raise ScmError("codes must be (n, len(names))")

    @staticmethod
    def from_dataset(d: Dataset, names: Sequence[str] | None = None) -> "EmpiricalJoint":
        names = tuple(names or d.names)
        cards = {}
        for n in names:
            card = d.variable(n).cardinality
            if card is None:
                raise ScmError(f"column {n!r} is continuous; discretize first")
            cards[n] = card
        return EmpiricalJoint(d.int_codes(names), names, cards)

    def variable_names(self) -> tuple[str, ...]:
        return self._names

    def marginal(self, names: tuple[str, ...]) -> Factor:
        cols = [self._names.index(n) for n in names]
        shape = tuple(self._cards[n] for n in names)
        flat = np.ravel_multi_index(
            tuple(self._codes[:, c] for c in cols), shape) if names else np.zeros(
                self._codes.shape[0], dtype=np.int64)
        counts = np.bincount(flat, minlength=int(np.prod(shape)) if names else 1)
        table = counts.reshape(shape if names else ()).astype(float)
        return Factor(tuple(names), table / self._codes.shape[0])


class TableJoint:
    """JointDistribution from one dense table (tiny hand-built cases)."""

    def __init__(self, factor: Factor):
        self._factor = factor.normalize()

    def variable_names(self) -> tuple[str, ...]:
        return self._factor.vars

    def marginal(self, names: tuple[str, ...]) -> Factor:
        out = self._factor.marginalize_out(
            tuple(v for v in self._factor.vars if v not in names))
        return out.transpose_to(tuple(names))
