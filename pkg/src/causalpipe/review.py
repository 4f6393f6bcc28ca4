"""Expert edits on the consensus graph: keep / remove / reorient / add.

Edits are an ordered, replayable log. Edge arguments are stated in their
FINAL orientation (a reorient of (u, v) requires the graph to hold (v, u)).
A remove targeting one side of an unresolved consensus 2-cycle deletes both
directions: removal encodes "no causal relationship between u and v", which
is pair-level evidence.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator

from .graph import CausalGraph

EDIT_KINDS = ("keep", "remove", "reorient", "add")


class EditError(ValueError):
    """Edit precondition violation; carries the offending edit."""

    def __init__(self, msg: str, kind: str, edge: tuple[str, str], index: int | None = None):
        self.kind = kind
        self.edge = edge
        self.index = index
        super().__init__(msg)


class FinalizeError(ValueError):
    """Graph cannot be certified a DAG; carries cycle witnesses."""

    def __init__(self, cycles: list[list[str]]):
        self.cycles = cycles
        listing = "; ".join(" -> ".join(c) for c in cycles)
        super().__init__(f"graph contains cycles: {listing}")


@dataclass(frozen=True)
class Edit:
    kind: str
    edge: tuple[str, str]
    note: str = ""

    def __post_init__(self):
        if self.kind not in EDIT_KINDS:
            raise EditError(f"unknown edit kind {self.kind!r}", self.kind, self.edge)
        if self.edge[0] == self.edge[1]:
            raise EditError(f"self-edge {self.edge}", self.kind, self.edge)

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "from": self.edge[0], "to": self.edge[1],
                "note": self.note}

    @staticmethod
    def from_json_dict(d: dict) -> "Edit":
        return Edit(d["kind"], (d["from"], d["to"]), d.get("note", ""))


@dataclass(frozen=True)
class EditScript:
    edits: tuple[Edit, ...]
    author: str = ""
    date: str = ""

    def __iter__(self) -> Iterator[Edit]:
        return iter(self.edits)

    def __len__(self) -> int:
        return len(self.edits)

    def to_jsonl(self) -> str:
        return "".join(json.dumps(e.to_json_dict()) + "\n" for e in self.edits)

    @staticmethod
    def from_jsonl(text: str, author: str = "", date: str = "") -> "EditScript":
        edits = [
            Edit.from_json_dict(json.loads(line))
            for line in text.splitlines()
            if line.strip()
        ]
        return EditScript(tuple(edits), author=author, date=date)


@dataclass(frozen=True)
class EditReport:
    added: int
    removed: int
    reoriented: int
    kept: int
    graph_hash: str
    acyclic: bool
    cycles: tuple[tuple[str, ...], ...] = field(default_factory=tuple)
    # Edge-level deltas; `removed` above counts edits, this counts edges
    # (a remove resolving a 2-cycle deletes two edges).
    edges_removed: int = 0
    edges_added: int = 0

    @property
    def total(self) -> int:
        return self.added + self.removed + self.reoriented + self.kept


def apply_edit(g: CausalGraph, e: Edit) -> CausalGraph:
    """One edit; returns a new graph. Raises EditError on a precondition failure."""
    u, v = e.edge
    for name in e.edge:
        if name not in g:
            raise EditError(f"{e.kind} references unknown variable {name!r}",
                            e.kind, e.edge)
    edges = set(g.directed_edges)
    if e.kind == "keep":
        if (u, v) not in edges:
            raise EditError(f"keep: edge {u}->{v} not present", e.kind, e.edge)
        return g
    if e.kind == "remove":
        if (u, v) not in edges:
            raise EditError(f"remove: edge {u}->{v} not present", e.kind, e.edge)
        edges.discard((u, v))
        edges.discard((v, u))  # 2-cycle removal is pair-level
    elif e.kind == "reorient":
        if (v, u) not in edges:
            raise EditError(
                f"reorient: reversed edge {v}->{u} not present (edits state the "
                f"final orientation)", e.kind, e.edge)
        edges.discard((v, u))
        edges.add((u, v))
    elif e.kind == "add":
        if (u, v) in edges:
            raise EditError(f"add: edge {u}->{v} already present", e.kind, e.edge)
        edges.add((u, v))
    return g.replace(directed_edges=edges)


def apply_script(g: CausalGraph, script: EditScript) -> tuple[CausalGraph, EditReport]:
    """Apply edits in order; abort on the first failing edit with its index."""
    counts = {k: 0 for k in EDIT_KINDS}
    cur = g
    for i, e in enumerate(script):
        try:
            cur = apply_edit(cur, e)
        except EditError as err:
            raise EditError(
                f"edit {i} failed: {err}", err.kind, err.edge, index=i
            ) from None
        counts[e.kind] += 1
    cycles = cur.find_cycles()
    report = EditReport(
        added=counts["add"],
        removed=counts["remove"],
        reoriented=counts["reorient"],
        kept=counts["keep"],
        graph_hash=cur.graph_hash(),
        acyclic=not cycles,
        cycles=tuple(tuple(c) for c in cycles),
        edges_removed=len(g.directed_edges - cur.directed_edges),
        edges_added=len(cur.directed_edges - g.directed_edges),
    )
    return cur, report


def finalize(g: CausalGraph) -> CausalGraph:
    """Certify the graph as a DAG (acyclic, no 2-cycles) or raise with witnesses.

    Never mutates: on error the input graph is unchanged.
    """
    cycles = g.find_cycles()
    if cycles:
        raise FinalizeError(cycles)
    return g.replace(flag="dag")
