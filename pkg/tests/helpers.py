"""Shared test utilities."""
from __future__ import annotations

from causalpipe.graph import CausalGraph
from causalpipe.review import Edit, EditScript


def oracle_expert_script(consensus: CausalGraph, truth: CausalGraph) -> EditScript:
    """The edit script an all-knowing expert would write: transforms the
    consensus graph into the ground-truth DAG of a synthetic world."""
    cons = set(consensus.directed_edges)
    want = set(truth.directed_edges)
    edits: list[Edit] = []
    handled: set[frozenset] = set()

    for u, v in sorted(cons, key=consensus._edge_key):
        pair = frozenset((u, v))
        if pair in handled:
            continue
        has_fwd = (u, v) in want
        has_rev = (v, u) in want
        rev_in_cons = (v, u) in cons
        if has_fwd and not rev_in_cons:
            continue  # already correct
        handled.add(pair)
        if has_fwd:
            # 2-cycle resolved toward (u, v)
            edits.append(Edit("reorient", (u, v), "oracle expert"))
        elif has_rev:
            edits.append(Edit("reorient", (v, u), "oracle expert"))
        else:
            edits.append(Edit("remove", (u, v), "oracle expert"))

    for u, v in sorted(want, key=truth._edge_key):
        if (u, v) not in cons and (v, u) not in cons:
            edits.append(Edit("add", (u, v), "oracle expert"))
    return EditScript(tuple(edits), author="oracle")
