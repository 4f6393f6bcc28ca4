"""Max-min hill climbing: a CI stage restricts candidate adjacencies, then
hill climbing searches only over the restricted skeleton."""
from __future__ import annotations

from itertools import combinations
from typing import Mapping

from ..cit import ci_test
from ..dataset import Dataset
from .base import LearnerOutput
from .score import score_search_learn


def _mmpc(d: Dataset, target: str, alpha: float, max_cond: int) -> set[str]:
    """Candidate parent-children set for one target (max-min heuristic)."""
    others = [n for n in d.names if n != target]
    cpc: list[str] = []

    def max_pvalue(x: str) -> float:
        """Strength of the weakest association of x with target across
        conditioning subsets of the current candidate set."""
        worst = 0.0
        for size in range(0, min(len(cpc), max_cond) + 1):
            for s in combinations(cpc, size):
                p = ci_test(d, target, x, s, alpha).p_value
                worst = max(worst, p)
                if worst > alpha:
                    return worst
        return worst

    # forward: admit the strongest candidate while it stays dependent
    remaining = list(others)
    while remaining:
        scores = [(max_pvalue(x), x) for x in remaining]
        best_p, best_x = min(scores)
        if best_p > alpha:
            break
        cpc.append(best_x)
        remaining.remove(best_x)

    # backward: drop members separated by some subset of the others
    for x in list(cpc):
        rest = [c for c in cpc if c != x]
        for size in range(0, min(len(rest), max_cond) + 1):
            found = False
            for s in combinations(rest, size):
                if ci_test(d, target, x, s, alpha).independent:
                    cpc.remove(x)
                    found = True
                    break
            if found:
                break
    return set(cpc)


def mmhc_learn(d: Dataset, alpha: float = 0.01,
               config: Mapping | None = None) -> LearnerOutput:
    config = dict(config or {})
    max_cond = int(config.get("max_cond", 3))

    cpc = {t: _mmpc(d, t, alpha, max_cond) for t in d.names}
    # symmetry: keep a pair only when each endpoint proposes the other
    allowed = {
        frozenset((a, b))
        for a in d.names for b in cpc[a]
        if a in cpc[b]
    }
    out = score_search_learn(d, strategy="hill", config=config,
                             allowed_pairs=allowed, learner_id="mmhc")
    diagnostics = dict(out.diagnostics)
    diagnostics["restricted_pairs"] = sorted(tuple(sorted(p)) for p in allowed)
    diagnostics["candidate_sets"] = {t: sorted(c) for t, c in cpc.items()}
    return LearnerOutput("mmhc", out.graph, out.undirected, diagnostics)
