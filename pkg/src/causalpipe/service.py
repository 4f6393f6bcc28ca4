"""HTTP API for the expert-review workflow.

State lives in a directory: ``graph.json`` (current graph), optional
``votes.csv`` + ``voters`` count, ``script.jsonl`` (append-only edit log),
optional ``data.csv`` + ``schema.json`` for estimation. Mutations are
serialized through a single writer lock; reads see consistent snapshots.
"""
from __future__ import annotations

import json
import threading
from pathlib import Path

from fastapi import FastAPI
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from .dataset import ingest
from .estimate import EstimateError, bootstrap, estimate_ipw, estimate_plugin
from .graph import CausalGraph, GraphError
from .identify import Hedge, backdoor_sets, identify_conditional
from .review import Edit, EditError, FinalizeError, apply_edit, finalize
from .voting import VoteMatrix


class QueryBody(BaseModel):
    treatment: list[str]
    outcome: list[str]
    given: list[str] = []


class EstimateBody(BaseModel):
    treatment: str
    treatment_value: float = 1
    outcome: str
    adjustment: list[str] | None = None
    given: list[str] = []
    bootstrap_k: int = 200
    seed: int = 0
    clip: float = 0.01


class ReviewState:
    def __init__(self, state_dir: str | Path):
        self.dir = Path(state_dir)
        self.lock = threading.Lock()
        self.graph = CausalGraph.from_json((self.dir / "graph.json").read_text())
        self.votes: VoteMatrix | None = None
        votes_path = self.dir / "votes.csv"
        if votes_path.exists():
            voters = 7
            voters_path = self.dir / "voters"
            if voters_path.exists():
                voters = int(voters_path.read_text().strip())
            self.votes = VoteMatrix.from_csv(votes_path.read_text(), m=voters)
        self.script_path = self.dir / "script.jsonl"
        if not self.script_path.exists():
            self.script_path.write_text("")

    def snapshot(self) -> dict:
        g = self.graph
        payload = {
            "graph": g.to_json_dict(),
            "hash": g.graph_hash(),
            "acyclic": g.is_acyclic(),
            "two_cycles": sorted(
                [list(e) for e in g.directed_edges
                 if (e[1], e[0]) in g.directed_edges and e[0] < e[1]]),
        }
        if self.votes is not None:
            payload["votes"] = {
                f"{u}->{v}": self.votes.count(u, v)
                for (u, v) in g.sorted_directed()
            }
            payload["threshold"] = self.votes.m // 2 + 1
        return payload

    def persist(self) -> None:
        (self.dir / "graph.json").write_text(self.graph.to_json())

    def append_edit(self, e: Edit) -> None:
        with self.script_path.open("a") as fh:
            fh.write(json.dumps(e.to_json_dict()) + "\n")


def create_app(state_dir: str | Path) -> FastAPI:
    state = ReviewState(state_dir)
    app = FastAPI(title="causalpipe review service")

    @app.get("/api/graph")
    def get_graph():
        with state.lock:
            return state.snapshot()

    @app.get("/api/votes")
    def get_votes():
        if state.votes is None:
            return JSONResponse({"error": "no vote matrix in state dir"},
                                status_code=404)
        vm = state.votes
        return {"names": list(vm.names), "m": vm.m,
                "threshold": vm.m // 2 + 1,
                "counts": [[int(c) for c in row] for row in vm.counts]}

    @app.post("/api/edits")
    def post_edit(body: dict):
        kind = body.get("kind", "")
        edge = (body.get("from", ""), body.get("to", ""))
        note = body.get("note", "")
        with state.lock:
            for name in edge:
                if name not in state.graph:
                    return JSONResponse(
                        {"error": {"reason": f"unknown variable {name!r}",
                                   "kind": kind, "edge": list(edge)}},
                        status_code=400)
            try:
                e = Edit(kind, edge, note)
                state.graph = apply_edit(state.graph, e)
            except EditError as exc:
                return JSONResponse(
                    {"error": {"reason": str(exc), "kind": kind,
                               "edge": list(edge)}},
                    status_code=409)
            state.persist()
            state.append_edit(e)
            return state.snapshot()

    @app.post("/api/finalize")
    def post_finalize():
        with state.lock:
            try:
                final = finalize(state.graph)
            except FinalizeError as exc:
                return JSONResponse(
                    {"error": {"reason": "graph contains cycles",
                               "cycles": [list(c) for c in exc.cycles]}},
                    status_code=409)
            state.graph = final
            state.persist()
            return state.snapshot()

    @app.get("/api/script", response_class=PlainTextResponse)
    def get_script():
        return state.script_path.read_text()

    @app.post("/api/identify")
    def post_identify(body: QueryBody):
        with state.lock:
            g = state.graph
        try:
            result = identify_conditional(g, body.treatment, body.outcome,
                                          body.given)
        except (GraphError, ValueError) as exc:
            return JSONResponse({"error": {"reason": str(exc)}}, status_code=400)
        if isinstance(result, Hedge):
            return {"identifiable": False, "hedge": result.to_json_dict()}
        return {"identifiable": True,
                "estimand": {"sexpr": result.to_sexpr(),
                             "text": result.to_text()}}

    @app.post("/api/estimate")
    def post_estimate(body: EstimateBody):
        data_path = state.dir / "data.csv"
        schema_path = state.dir / "schema.json"
        if not data_path.exists() or not schema_path.exists():
            return JSONResponse(
                {"error": {"reason": "no dataset in state dir"}}, status_code=400)
        with state.lock:
            g = state.graph
        try:
            d = ingest(data_path, schema_path)
            adj = body.adjustment
            if adj is None:
                if g.flag != "dag":
                    g = finalize(g)
                sets_ = backdoor_sets(g, body.treatment, body.outcome)
                if not sets_:
                    return JSONResponse(
                        {"error": {"reason": "no admissible adjustment set"}},
                        status_code=422)
                adj = list(sets_[0])
            zfull = tuple(a for a in adj if a not in body.given) + tuple(body.given)
            rep = bootstrap(
                lambda dd: estimate_plugin(dd, body.treatment,
                                           body.treatment_value, body.outcome,
                                           zfull),
                d, k=body.bootstrap_k, seed=body.seed)
            diag: dict = {}
            try:
                ipw = estimate_ipw(d, body.treatment, body.treatment_value,
                                   body.outcome, zfull, clip=body.clip,
                                   diagnostics=diag)
            except EstimateError as exc:
                ipw, diag = None, {"error": str(exc)}
        except (GraphError, FinalizeError, ValueError) as exc:
            return JSONResponse({"error": {"reason": str(exc)}}, status_code=400)
        return {"adjustment": list(zfull), "plugin": rep.to_json_dict(),
                "ipw": ipw, "ipw_diagnostics": diag}

    return app
