"""Do-calculus rule checking, backdoor-set discovery, and the complete
identification algorithms (ID / IDC) with hedge witnesses.

Identification returns an Estimand over observational conditionals, or a
Hedge value on failure (failure is data, not an exception). Sum nodes bind
locally: an inner sum may reuse a name that is free outside it (the classic
front-door x-prime); the evaluator contracts inner sums before products, so
no capture occurs.

Atomic prefix conditionals P(v | topological prefix) are reduced to
P(v | parents(v)) only when the extra conditioning variables are d-separated
from v given the parents in the full (semi-Markovian) graph, so the rewrite
is value-preserving for every graph-compatible joint. Without it,
study-scale estimands would need dense marginals over 2^26 states.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from .estimand import Estimand, Prob, Product, Quotient, Sum, simplify
from .graph import CausalGraph, SeparationQuery


class IdentifyError(ValueError):
    pass


@dataclass(frozen=True)
class Hedge:
    """Witness of non-identifiability: c-forests F' subset of F with the
    same root set, both intersecting the treatment context."""
    treatment: tuple[str, ...]
    outcome: tuple[str, ...]
    forest: CausalGraph
    subforest: CausalGraph

    def to_json_dict(self) -> dict:
        return {
            "treatment": list(self.treatment),
            "outcome": list(self.outcome),
            "forest": self.forest.to_json_dict(),
            "subforest": self.subforest.to_json_dict(),
        }


def _check_sets(g: CausalGraph, *sets: Iterable[str]) -> list[set[str]]:
    out = [set(s) for s in sets]
    for s in out:
        for n in s:
            g.index(n)
    for a, b in itertools.combinations(range(len(out)), 2):
        inter = out[a] & out[b]
        if inter:
            raise IdentifyError(f"sets must be disjoint; shared: {sorted(inter)}")
    return out


def check_rule(g: CausalGraph, rule: int, x: Iterable[str], y: Iterable[str],
               z: Iterable[str], w: Iterable[str] = ()) -> bool:
    """Do-calculus rule premise as a d-separation test on a mutilated graph.

    rule 1 (insert/delete observations):  (Y ind Z | X,W) in G with incoming
    edges of X cut; rule 2 (action/observation exchange): additionally Z's
    outgoing edges cut; rule 3 (insert/delete actions): incoming edges of
    X and of Z(W) cut, where Z(W) = Z-nodes that are not ancestors of any
    W-node in the X-mutilated graph.
    """
    xs, ys, zs, ws = _check_sets(g, x, y, z, w)
    if not ys:
        raise IdentifyError("y must be nonempty")
    if not zs:
        return True
    cond = xs | ws
    if rule == 1:
        gm = g.mutilate(cut_incoming=xs)
    elif rule == 2:
        gm = g.mutilate(cut_incoming=xs, cut_outgoing=zs)
    elif rule == 3:
        gx = g.mutilate(cut_incoming=xs)
        if ws:
            anc_w = set(gx.ancestors(ws))
            z_w = zs - anc_w
        else:
            z_w = zs
        gm = g.mutilate(cut_incoming=xs | z_w)
    else:
        raise IdentifyError(f"rule must be 1, 2 or 3, got {rule}")
    return gm.d_separated(ys, zs, cond)


def backdoor_sets(g: CausalGraph, x: str, y: str,
                  max_size: int | None = None) -> list[tuple[str, ...]]:
    """All minimal backdoor-admissible sets, sorted by size then name.

    A set is admissible when it contains no descendant of x and blocks every
    path into x from y (d-separation in the graph with x's outgoing edges
    removed). An empty list means nothing admissible up to max_size.
    """
    if g.flag != "dag":
        raise IdentifyError("backdoor_sets needs a graph flagged dag")
    if x == y:
        raise IdentifyError("x and y must differ")
    g.index(x), g.index(y)
    desc_x = set(g.descendants({x}))
    candidates = [n for n in g.names if n not in desc_x and n != y]
    limit = len(candidates) if max_size is None else max_size
    g_back = g.mutilate(cut_outgoing={x})

    admissible: list[tuple[str, ...]] = []
    for size in range(limit + 1):
        for combo in itertools.combinations(candidates, size):
            zset = set(combo)
            if any(set(prev) <= zset for prev in admissible):
                continue  # a subset already works; not minimal
            if g_back.d_separated({x}, {y}, zset):
                admissible.append(g.in_order(combo))
    admissible.sort(key=lambda t: (len(t), t))
    return admissible


# -- the ID algorithm ---------------------------------------------------------

@dataclass(frozen=True)
class _Dist:
    """The distribution threaded through the recursion.

    ``atomic`` marks it as the original observational joint over ``vars_``,
    for which prefix conditionals are plain Prob atoms.
    """
    expr: Estimand
    vars_: tuple[str, ...]
    atomic: bool


def _marginal_dist(dist: _Dist, keep: tuple[str, ...]) -> _Dist:
    drop = tuple(v for v in dist.vars_ if v not in set(keep))
    if not drop:
        return dist
    if dist.atomic:
        return _Dist(Prob(keep), keep, atomic=True)
    return _Dist(Sum(drop, dist.expr), keep, atomic=False)


def _prefix_conditional(dist: _Dist, vi: str, prefix: tuple[str, ...],
                        g0: CausalGraph) -> Estimand:
    if dist.atomic:
        pa = tuple(p for p in g0.parents(vi) if p in set(prefix))
        extra = tuple(v for v in prefix if v not in set(pa))
        if set(g0.parents(vi)) <= set(prefix) and extra:
            if g0.d_separated({vi}, extra, pa):
                return Prob((vi,), pa)
        return Prob((vi,), prefix)
    num_drop = tuple(v for v in dist.vars_ if v != vi and v not in set(prefix))
    den_drop = tuple(v for v in dist.vars_ if v not in set(prefix))
    num = Sum(num_drop, dist.expr) if num_drop else dist.expr
    den = Sum(den_drop, dist.expr)
    return Quotient(num, den)


def _id(y: set[str], x: set[str], dist: _Dist, g: CausalGraph,
        g0: CausalGraph):
    v_all = set(g.names)
    order = g.topological_order()
    if order is None:
        raise IdentifyError("identification requires an acyclic directed part")

    # line 1: no interventions left
    if not x:
        return _marginal_dist(dist, g.in_order(y)).expr if v_all != y else dist.expr

    # line 2: restrict to ancestors of y
    anc = set(g.ancestors(y))
    if v_all != anc:
        keep = g.in_order(anc)
        return _id(y, x & anc, _marginal_dist(dist, keep), g.induced(anc), g0)

    # line 3: force interventions on non-ancestors of y in the mutilated graph
    gx = g.mutilate(cut_incoming=x)
    w = v_all - x - set(gx.ancestors(y))
    if w:
        return _id(y, x | w, dist, g, g0)

    # line 4: factor over the c-components of G minus X
    comps = g.induced(v_all - x).c_components()
    if len(comps) > 1:
        terms = []
        for s in comps:
            r = _id(set(s), v_all - set(s), dist, g, g0)
            if isinstance(r, Hedge):
                return r
            terms.append(r)
        bound = g.in_order(v_all - y - x)
        prod: Estimand = Product(tuple(terms))
        return Sum(bound, prod) if bound else prod

    s = set(comps[0])
    g_comps = [set(c) for c in g.c_components()]

    # line 5: the whole graph is one c-component -> hedge
    if len(g_comps) == 1:
        return Hedge(
            treatment=g.in_order(x), outcome=g.in_order(y),
            forest=g, subforest=g.induced(s))

    # line 6: S is itself a c-component of G
    if s in g_comps:
        terms = []
        for vi in g.in_order(s):
            prefix = tuple(order[: order.index(vi)])
            terms.append(_prefix_conditional(dist, vi, prefix, g0))
        body: Estimand = Product(tuple(terms)) if len(terms) > 1 else terms[0]
        bound = g.in_order(s - y)
        return Sum(bound, body) if bound else body

    # line 7: recurse into the enclosing c-component S'
    s_prime = next(c for c in g_comps if s < c)
    sp = g.in_order(s_prime)
    factors = []
    for vi in sp:
        prefix = tuple(order[: order.index(vi)])
        factors.append(_prefix_conditional(dist, vi, prefix, g0))
    new_expr: Estimand = Product(tuple(factors)) if len(factors) > 1 else factors[0]
    new_dist = _Dist(new_expr, sp, atomic=False)
    return _id(y, x & s_prime, new_dist, g.induced(s_prime), g0)


def identify(g: CausalGraph, x: Iterable[str], y: Iterable[str]):
    """P(y | do(x)) via c-component factorization: Estimand, or Hedge on
    failure."""
    xs, ys = _check_sets(g, x, y)
    if not ys:
        raise IdentifyError("outcome set must be nonempty")
    dist = _Dist(Prob(g.names), g.names, atomic=True)
    result = _id(set(ys), set(xs), dist, g, g)
    if isinstance(result, Hedge):
        return result
    return simplify(result)


def identify_conditional(g: CausalGraph, x: Iterable[str], y: Iterable[str],
                         z: Iterable[str]):
    """P(y | do(x), z) via IDC: rule-2 exchanges of conditioning variables
    into interventions, then a quotient of ID results."""
    xs, ys, zs = _check_sets(g, x, y, z)
    if not ys:
        raise IdentifyError("outcome set must be nonempty")
    xs, zs = set(xs), set(zs)
    moved = True
    while moved and zs:
        moved = False
        for w in sorted(zs):
            if check_rule(g, 2, x=xs, y=ys, z={w}, w=zs - {w}):
                xs.add(w)
                zs.remove(w)
                moved = True
                break
    if not zs:
        return identify(g, xs, ys)
    num = identify(g, xs, set(ys) | zs)
    if isinstance(num, Hedge):
        return num
    den = Sum(g.in_order(ys), num)
    return simplify(Quotient(num, den))


def implied_independencies(g: CausalGraph) -> list[SeparationQuery]:
    """Local-Markov testable implications: v independent of its
    non-descendants given its parents (nonempty entries only)."""
    if not g.is_acyclic():
        raise IdentifyError("implied_independencies needs a DAG")
    out: list[SeparationQuery] = []
    for v in g.names:
        pa = set(g.parents(v))
        nd = set(g.names) - set(g.descendants({v}))
        others = nd - pa
        if others:
            out.append(SeparationQuery(frozenset({v}), frozenset(others),
                                       frozenset(pa)))
    return out
