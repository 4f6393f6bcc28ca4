"""Loaders for the shipped study fixtures (vote matrix, edit ledger,
reconstructed graph, derivation replay script)."""
from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from .graph import CausalGraph
from .review import EditScript, apply_script, finalize
from .voting import VoteMatrix, consensus


def _read(name: str) -> str:
    return resources.files("causalpipe.data").joinpath(name).read_text()


@lru_cache(maxsize=None)
def variable_order() -> tuple[str, ...]:
    return vote_matrix().names


@lru_cache(maxsize=None)
def vote_matrix() -> VoteMatrix:
    return VoteMatrix.from_csv(_read("table3.csv"), m=7)


@lru_cache(maxsize=None)
def consensus_graph() -> CausalGraph:
    return consensus(vote_matrix())


@lru_cache(maxsize=None)
def edit_script() -> EditScript:
    return EditScript.from_jsonl(_read("table4.jsonl"))


@lru_cache(maxsize=None)
def amendment_script() -> EditScript:
    return EditScript.from_jsonl(_read("table4_amendment.jsonl"))


def reviewed_graph():
    """Consensus graph after the edit ledger; (graph, report)."""
    return apply_script(consensus_graph(), edit_script())


@lru_cache(maxsize=None)
def fixture_graph() -> CausalGraph:
    """The reconstructed final DAG (ledger + documented amendment), binary kinds."""
    return CausalGraph.from_json(_read("fixture_graph.json"))


@lru_cache(maxsize=None)
def appendix_sets() -> dict[str, tuple[str, ...]]:
    raw = json.loads(_read("appendix_sets.json"))
    return {k: tuple(v) for k, v in raw.items()}


@lru_cache(maxsize=None)
def proof_script_dict() -> dict:
    return json.loads(_read("appendix_proof.json"))


def rebuild_fixture_graph() -> CausalGraph:
    """Reconstruct the fixture graph from the shipped tables (consistency check)."""
    g1, _ = reviewed_graph()
    g2, _ = apply_script(g1, amendment_script())
    return finalize(g2)
