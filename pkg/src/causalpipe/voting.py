"""Majority voting over learner-ensemble edge endorsements.

The vote matrix counts, per ordered variable pair (i, j), how many learners
emitted the directed edge i->j. Undirected learner edges are encoded by the
learners as 2-cycles, so plain directed-edge counting credits both
directions. Consensus thresholds at floor(m/2)+1 and may retain 2-cycles,
which are resolved later by expert review.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import CausalGraph, Variable


class VotingError(ValueError):
    pass


@dataclass(frozen=True)
class VoteMatrix:
    names: tuple[str, ...]
    counts: np.ndarray  # (n, n) nonnegative ints, zero diagonal
    m: int              # number of voters

    def __post_init__(self):
        n = len(self.names)
        c = self.counts
        if c.shape != (n, n):
            raise VotingError(f"counts shape {c.shape} does not match {n} names")
        if np.any(np.diag(c) != 0):
            raise VotingError("vote matrix diagonal must be zero")
        if np.any(c < 0) or np.any(c > self.m):
            raise VotingError("vote counts must lie in [0, m]")

    def count(self, u: str, v: str) -> int:
        i, j = self.names.index(u), self.names.index(v)
        return int(self.counts[i, j])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow([""] + list(self.names))
        for i, name in enumerate(self.names):
            w.writerow([name] + [int(x) for x in self.counts[i]])
        return buf.getvalue()

    @staticmethod
    def from_csv(text: str, m: int) -> "VoteMatrix":
        rows = list(csv.reader(io.StringIO(text)))
        rows = [r for r in rows if r]
        header = rows[0][1:]
        names = tuple(header)
        counts = np.zeros((len(names), len(names)), dtype=int)
        for i, row in enumerate(rows[1:]):
            if row[0] != names[i]:
                raise VotingError(
                    f"row label {row[0]!r} does not match column order ({names[i]!r})"
                )
            counts[i] = [int(x) for x in row[1:]]
        return VoteMatrix(names, counts, m)


def majority_threshold(m: int) -> int:
    """Simple majority: floor(m/2) + 1 (4 when m=7)."""
    return m // 2 + 1


def tally(outputs: Sequence, schema: Sequence[Variable | str]) -> VoteMatrix:
    """Count per-edge endorsements across learner outputs.

    ``outputs`` may be LearnerOutput objects or bare CausalGraphs sharing the
    schema's variable names.
    """
    if not outputs:
        raise VotingError("tally needs at least one learner output")
    names = tuple(v.name if isinstance(v, Variable) else str(v) for v in schema)
    idx = {n: i for i, n in enumerate(names)}
    counts = np.zeros((len(names), len(names)), dtype=int)
    for out in outputs:
        g: CausalGraph = getattr(out, "graph", out)
        if set(g.names) != set(names):
            raise VotingError(
                f"learner output variables {sorted(g.names)} do not match schema"
            )
        for u, v in g.directed_edges:
            counts[idx[u], idx[v]] += 1
    return VoteMatrix(names, counts, m=len(outputs))


def consensus(v: VoteMatrix, threshold: int | None = None) -> CausalGraph:
    """Edges with count >= floor(m/2)+1 (or an explicit threshold override).

    The result may contain 2-cycles and is flagged ``pdag-like``.
    """
    if v.m < 1:
        raise VotingError("vote matrix has no voters")
    thr = majority_threshold(v.m) if threshold is None else threshold
    edges = [
        (v.names[i], v.names[j])
        for i in range(len(v.names))
        for j in range(len(v.names))
        if v.counts[i, j] >= thr
    ]
    return CausalGraph(v.names, edges, flag="pdag-like")
