"""End-to-end orchestration: ingest -> cohort -> learner ensemble -> vote ->
consensus -> expert edits -> finalize -> implied-independence validation ->
identification -> estimation. Every stage writes its artifact into a run
directory; the manifest records a content hash per artifact, so identical
(inputs, config, seeds) produce identical manifests."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .dataset import CohortSpec, Dataset, apply_cohort, ingest, summarize
from .estimate import EstimateError, bootstrap, estimate_ipw, estimate_plugin
from .cit import ci_test, CiError
from .graph import CausalGraph
from .identify import Hedge, backdoor_sets, identify, identify_conditional
from .learners import run_ensemble
from .review import EditScript, apply_script, finalize
from .voting import consensus, tally


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r} failed: {cause}")


@dataclass(frozen=True)
class CausalQuery:
    treatment: str
    treatment_value: int
    outcome: str
    given: tuple[str, ...] = ()

    @staticmethod
    def from_json_dict(d: Mapping) -> "CausalQuery":
        return CausalQuery(
            treatment=d["treatment"],
            treatment_value=int(d.get("treatment_value", 1)),
            outcome=d["outcome"],
            given=tuple(d.get("given", ())),
        )


@dataclass(frozen=True)
class PipelineConfig:
    data_csv: str
    schema_json: str
    query: CausalQuery
    cohort: CohortSpec = CohortSpec()
    learners: tuple[str, ...] = ("pc", "hc", "tabu", "ges", "mmhc")
    learner_configs: Mapping[str, Mapping] = field(default_factory=dict)
    alpha: float = 0.01
    vote_threshold: int | None = None
    edit_script_path: str | None = None
    estimator: Mapping = field(default_factory=dict)
    seed: int = 0

    @staticmethod
    def from_json_dict(d: Mapping) -> "PipelineConfig":
        return PipelineConfig(
            data_csv=d["data_csv"],
            schema_json=d["schema_json"],
            query=CausalQuery.from_json_dict(d["query"]),
            cohort=CohortSpec.from_json_dict(d.get("cohort", {})),
            learners=tuple(d.get("learners", ("pc", "hc", "tabu", "ges", "mmhc"))),
            learner_configs=d.get("learner_configs", {}),
            alpha=float(d.get("alpha", 0.01)),
            vote_threshold=d.get("vote_threshold"),
            edit_script_path=d.get("edit_script_path"),
            estimator=d.get("estimator", {}),
            seed=int(d.get("seed", 0)),
        )

    @staticmethod
    def from_json_file(path: str | Path) -> "PipelineConfig":
        return PipelineConfig.from_json_dict(json.loads(Path(path).read_text()))


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


class _RunDir:
    def __init__(self, out_dir: str | Path):
        self.path = Path(out_dir)
        self.path.mkdir(parents=True, exist_ok=True)
        self.hashes: dict[str, str] = {}

    def write(self, name: str, text: str) -> None:
        (self.path / name).write_text(text)
        self.hashes[name] = _sha256(text)


def _stage(name: str):
    def wrap(fn):
        def run(*args, **kwargs):
            try:
                return fn(*args, **kwargs)
            except PipelineError:
                raise
            except Exception as exc:
                raise PipelineError(name, exc) from exc
        return run
    return wrap


def validate_independencies(g: CausalGraph, d: Dataset, alpha: float = 0.01,
                            max_conditioning: int = 3) -> list[dict]:
    """Test the graph's local-Markov implications against the data.

    A report, never a gate: each row carries the query and its p-value.
    Conditioning sets larger than ``max_conditioning`` are subsampled to
    their first ``max_conditioning`` members to keep the tests powered.
    """
    from .identify import implied_independencies

    rows: list[dict] = []
    for q in implied_independencies(g):
        v = next(iter(q.x_set))
        others = sorted(q.y_set)
        cond = sorted(q.z_set)[:max_conditioning]
        for other in others:
            try:
                res = ci_test(d, v, other, cond, alpha)
            except CiError as exc:
                rows.append({"x": v, "y": other, "given": cond,
                             "error": str(exc)})
                continue
            rows.append({
                "x": v, "y": other, "given": cond,
                "p_value": res.p_value,
                "consistent": bool(res.independent),
                "test": res.test_kind,
            })
    return rows


def run_pipeline(cfg: PipelineConfig, out_dir: str | Path) -> dict:
    """Execute all stages, writing artifacts + manifest.json to ``out_dir``.

    Returns the manifest dict. A Hedge halts before estimation: the witness
    is serialized and the manifest status says so.
    """
    run = _RunDir(out_dir)

    d = _stage("ingest")(ingest)(cfg.data_csv, cfg.schema_json)
    run.write("ingest.json", json.dumps(
        {"rows": d.n, "dropped": d.n_dropped, "columns": list(d.names)}, indent=2))

    @_stage("cohort")
    def _cohort():
        if cfg.cohort.filters or cfg.cohort.discretize:
            cohort_d, attrition = apply_cohort(d, cfg.cohort)
            run.write("attrition.json", json.dumps(
                {"initial": attrition.initial, "steps": list(attrition.steps)},
                indent=2))
        else:
            cohort_d = d
        if cfg.cohort.summaries:
            run.write("summary.json",
                      json.dumps(summarize(cohort_d, cfg.cohort), indent=2))
        return cohort_d
    data = _cohort()

    @_stage("learn")
    def _learn():
        outputs = run_ensemble(data, cfg.learners, alpha=cfg.alpha,
                               configs=cfg.learner_configs)
        for out in outputs:
            run.write(f"learner_{out.learner_id}.json", out.graph.to_json())
            run.write(f"learner_{out.learner_id}_diag.json",
                      json.dumps(_jsonable(out.diagnostics), indent=2, sort_keys=True))
        return outputs
    outputs = _learn()

    @_stage("vote")
    def _vote():
        vm = tally(outputs, data.schema)
        run.write("votes.csv", vm.to_csv())
        return vm
    vm = _vote()

    @_stage("consensus")
    def _consensus():
        cg = consensus(vm, threshold=cfg.vote_threshold)
        run.write("consensus.json", cg.to_json())
        return cg
    cons = _consensus()

    @_stage("review")
    def _review():
        if cfg.edit_script_path:
            script = EditScript.from_jsonl(Path(cfg.edit_script_path).read_text())
            edited, report = apply_script(cons, script)
            run.write("edit_report.json", json.dumps({
                "added": report.added, "removed": report.removed,
                "reoriented": report.reoriented, "kept": report.kept,
                "graph_hash": report.graph_hash, "acyclic": report.acyclic,
                "cycles": [list(c) for c in report.cycles],
            }, indent=2))
            return edited
        return cons
    edited = _review()

    final = _stage("finalize")(finalize)(edited)
    run.write("final_graph.json", final.to_json())
    run.write("final_graph.dot", final.to_dot())

    @_stage("validate")
    def _validate():
        rows = validate_independencies(final, data, alpha=cfg.alpha)
        run.write("independence_report.json", json.dumps(rows, indent=2))
    _validate()

    q = cfg.query

    @_stage("identify")
    def _identify():
        return identify_conditional(final, [q.treatment], [q.outcome],
                                    list(q.given))
    est = _identify()

    manifest = {
        "config": _jsonable(cfg),
        "artifacts": run.hashes,
        "status": "complete",
    }
    if isinstance(est, Hedge):
        run.write("hedge.json", json.dumps(est.to_json_dict(), indent=2))
        manifest["status"] = "halted:identification"
        manifest["artifacts"] = run.hashes
        run.write("manifest.json", json.dumps(manifest, indent=2, sort_keys=True))
        return manifest

    run.write("estimand.txt", est.to_sexpr() + "\n" + est.to_text() + "\n")

    @_stage("estimate")
    def _estimate():
        est_cfg = dict(cfg.estimator)
        k = int(est_cfg.get("bootstrap_k", 200))
        clip = float(est_cfg.get("clip", 0.01))
        adj = est_cfg.get("adjustment")
        if adj is None:
            sets_ = backdoor_sets(final, q.treatment, q.outcome)
            if not sets_:
                raise EstimateError(
                    "no backdoor-admissible adjustment set found; supply "
                    "estimator.adjustment explicitly")
            adj = list(sets_[0])
        adj = [a for a in adj if a not in q.given]
        zfull = tuple(adj) + tuple(q.given)
        plugin = bootstrap(
            lambda dd: estimate_plugin(dd, q.treatment, q.treatment_value,
                                       q.outcome, zfull),
            data, k=k, seed=cfg.seed)
        ipw_diag: dict = {}
        try:
            ipw_value = estimate_ipw(data, q.treatment, q.treatment_value,
                                     q.outcome, zfull, clip=clip,
                                     diagnostics=ipw_diag)
        except (EstimateError, ValueError) as exc:
            ipw_value, ipw_diag = None, {"error": str(exc)}
        return {
            "query": _jsonable(q),
            "adjustment": list(zfull),
            "plugin": plugin.to_json_dict(),
            "ipw": ipw_value,
            "ipw_diagnostics": ipw_diag,
        }
    report = _estimate()
    run.write("estimate.json", json.dumps(report, indent=2, sort_keys=True))

    manifest["artifacts"] = run.hashes
    run.write("manifest.json", json.dumps(manifest, indent=2, sort_keys=True))
    return manifest


def _jsonable(obj):
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer, np.floating)):
        return obj.item()
    if hasattr(obj, "__dataclass_fields__"):
        return {k: _jsonable(getattr(obj, k)) for k in obj.__dataclass_fields__}
    return str(obj)
