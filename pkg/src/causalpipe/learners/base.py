from __future__ import annotations

from dataclasses import dataclass, field

from ..graph import CausalGraph


class LearnerError(ValueError):
    pass


@dataclass(frozen=True)
class LearnerOutput:
    """One learner's estimate. Undirected edges appear in ``graph`` as
    2-cycles and are listed in ``undirected`` so voting credits both
    directions while consumers can still tell them apart."""
    learner_id: str
    graph: CausalGraph
    undirected: frozenset[frozenset[str]] = frozenset()
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        for u, v in self.graph.directed_edges:
            if u == v:
                raise LearnerError("learner graph contains a self-loop")
