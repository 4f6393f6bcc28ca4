"""BIC-scored DAG search: greedy hill climbing, TABU search, and a
simplified two-phase GES (forward adds, backward deletes).

The score is decomposable: per-node Gaussian log-likelihood (continuous) or
multinomial (categorical), penalized by (log n)/2 per free parameter.
"""
from __future__ import annotations

import math
from collections import deque
from typing import Mapping

import numpy as np

from ..dataset import Dataset
from ..graph import CausalGraph
from .base import LearnerError, LearnerOutput


class BicScorer:
    """Caches per-(node, parent-set) local scores."""

    def __init__(self, d: Dataset):
        self.d = d
        self.n = d.n
        self._cache: dict[tuple[str, frozenset], float] = {}
        self._kinds = {v.name: v.kind for v in d.schema}

    def local(self, node: str, parents: frozenset) -> float:
        key = (node, parents)
        if key not in self._cache:
            self._cache[key] = self._compute(node, sorted(parents))
        return self._cache[key]

    def total(self, parent_map: Mapping[str, frozenset]) -> float:
        return sum(self.local(v, parent_map[v]) for v in self.d.names)

    def _compute(self, node: str, parents: list[str]) -> float:
        if self._kinds[node] == "continuous":
            return self._gaussian(node, parents)
        return self._multinomial(node, parents)

    def _gaussian(self, node: str, parents: list[str]) -> float:
        y = self.d.column(node)
        n = self.n
        if parents:
            X = np.column_stack([np.ones(n), self.d.columns(parents)])
            coef, *_ = np.linalg.lstsq(X, y, rcond=None)
            resid = y - X @ coef
        else:
            resid = y - y.mean()
        var = float(resid @ resid) / n
        var = max(var, 1e-300)
        loglik = -0.5 * n * (math.log(2 * math.pi * var) + 1)
        k = len(parents) + 2  # coefficients + intercept + variance
        return loglik - 0.5 * math.log(n) * k

    def _multinomial(self, node: str, parents: list[str]) -> float:
        card = self.d.variable(node).cardinality
        codes = self.d.int_codes([node] + parents)
        if parents:
            pcards = [self.d.variable(p).cardinality for p in parents]
            strata = np.ravel_multi_index(
                tuple(codes[:, 1 + k] for k in range(len(parents))),
                tuple(pcards))
            n_strata = int(np.prod(pcards))
        else:
            strata = np.zeros(self.n, dtype=np.int64)
            n_strata = 1
        counts = np.zeros((n_strata, card))
        np.add.at(counts, (strata, codes[:, 0]), 1.0)
        rowsums = counts.sum(axis=1, keepdims=True)
        nz = counts > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            ll = float(np.sum(counts[nz] * np.log(
                (counts / np.where(rowsums == 0, 1, rowsums))[nz])))
        k = n_strata * (card - 1)
        return ll - 0.5 * math.log(self.n) * k


Move = tuple[str, str, str]  # (op, u, v); op in {add, delete, reverse}


def _inverse(move: Move) -> Move:
    op, u, v = move
    if op == "add":
        return ("delete", u, v)
    if op == "delete":
        return ("add", u, v)
    return ("reverse", v, u)


class _DagState:
    def __init__(self, names):
        self.names = list(names)
        self.parents: dict[str, frozenset] = {n: frozenset() for n in names}

    def edges(self) -> set[tuple[str, str]]:
        return {(p, v) for v, ps in self.parents.items() for p in ps}

    def would_cycle(self, u: str, v: str) -> bool:
        """True if adding u->v creates a cycle (path v ~> u exists)."""
        seen = {v}
        stack = [v]
        children: dict[str, list[str]] = {n: [] for n in self.names}
        for child, ps in self.parents.items():
            for p in ps:
                children[p].append(child)
        while stack:
            w = stack.pop()
            if w == u:
                return True
            for c in children[w]:
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return False

    def apply(self, move: Move):
        op, u, v = move
        if op == "add":
            self.parents[v] = self.parents[v] | {u}
        elif op == "delete":
            self.parents[v] = self.parents[v] - {u}
        else:
            self.parents[v] = self.parents[v] - {u}
            self.parents[u] = self.parents[u] | {v}


def _candidate_moves(state: _DagState, allowed: set[frozenset] | None,
                     ops=("add", "delete", "reverse")):
    names = state.names
    edges = state.edges()
    for u in names:
        for v in names:
            if u == v:
                continue
            pair_ok = allowed is None or frozenset((u, v)) in allowed
            if "add" in ops and (u, v) not in edges and (v, u) not in edges \
                    and pair_ok and not state.would_cycle(u, v):
                yield ("add", u, v)
            if (u, v) in edges:
                if "delete" in ops:
                    yield ("delete", u, v)
                if "reverse" in ops:
                    state.parents[v] = state.parents[v] - {u}
                    cyc = state.would_cycle(v, u)
                    state.parents[v] = state.parents[v] | {u}
                    if not cyc:
                        yield ("reverse", u, v)


def _move_delta(scorer: BicScorer, state: _DagState, move: Move) -> float:
    op, u, v = move
    if op == "add":
        return (scorer.local(v, state.parents[v] | {u})
                - scorer.local(v, state.parents[v]))
    if op == "delete":
        return (scorer.local(v, state.parents[v] - {u})
                - scorer.local(v, state.parents[v]))
    return (scorer.local(v, state.parents[v] - {u})
            - scorer.local(v, state.parents[v])
            + scorer.local(u, state.parents[u] | {v})
            - scorer.local(u, state.parents[u]))


def score_search_learn(d: Dataset, strategy: str = "hill",
                       config: Mapping | None = None,
                       allowed_pairs: set[frozenset] | None = None,
                       learner_id: str | None = None) -> LearnerOutput:
    """Local BIC optimum over DAGs; 'ges' restricts to forward adds then
    backward deletes, 'tabu' permits non-improving moves with a tabu list."""
    if strategy not in ("hill", "tabu", "ges"):
        raise LearnerError(f"unknown strategy {strategy!r}")
    config = dict(config or {})
    max_iters = int(config.get("max_iters", 200))
    tenure = int(config.get("tenure", 5))
    patience = int(config.get("patience", 10))

    scorer = BicScorer(d)
    state = _DagState(d.names)
    score = scorer.total(state.parents)
    trace = [score]
    exhausted = False

    if strategy == "ges":
        for ops in (("add",), ("delete",)):
            improved = True
            it = 0
            while improved:
                it += 1
                if it > max_iters:
                    exhausted = True
                    break
                improved = False
                best = None
                for move in _candidate_moves(state, allowed_pairs, ops):
                    delta = _move_delta(scorer, state, move)
                    if delta > 1e-10 and (best is None or delta > best[0]):
                        best = (delta, move)
                if best:
                    state.apply(best[1])
                    score += best[0]
                    trace.append(score)
                    improved = True
    elif strategy == "hill":
        for it in range(max_iters):
            best = None
            for move in _candidate_moves(state, allowed_pairs):
                delta = _move_delta(scorer, state, move)
                if delta > 1e-10 and (best is None or delta > best[0]):
                    best = (delta, move)
            if best is None:
                break
            state.apply(best[1])
            score += best[0]
            trace.append(score)
        else:
            exhausted = True
    else:  # tabu
        tabu: deque[Move] = deque(maxlen=tenure)
        best_parents = dict(state.parents)
        best_score = score
        stall = 0
        for it in range(max_iters):
            best = None
            for move in _candidate_moves(state, allowed_pairs):
                if move in tabu:
                    continue
                delta = _move_delta(scorer, state, move)
                if best is None or delta > best[0]:
                    best = (delta, move)
            if best is None:
                break
            state.apply(best[1])
            score += best[0]
            trace.append(score)
            tabu.append(_inverse(best[1]))
            if score > best_score + 1e-10:
                best_score = score
                best_parents = dict(state.parents)
                stall = 0
            else:
                stall += 1
                if stall >= patience:
                    break
        else:
            exhausted = True
        state.parents = best_parents
        score = best_score

    graph = CausalGraph(
        d.schema,
        [(p, v) for v, ps in state.parents.items() for p in sorted(ps)],
        flag="dag")
    empty_score = scorer.total({n: frozenset() for n in d.names})
    return LearnerOutput(
        learner_id or strategy, graph, frozenset(),
        {"score": score, "empty_score": empty_score, "trace": trace,
         "max_iters_exhausted": exhausted})
