"""Command-line interface over the pipeline stages."""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .dataset import ingest
from .estimate import bootstrap, estimate_ipw, estimate_plugin
from .graph import CausalGraph
from .identify import Hedge, backdoor_sets, identify_conditional
from .learners import run_ensemble
from .pipeline import PipelineConfig, run_pipeline, validate_independencies
from .review import EditScript, FinalizeError, apply_script, finalize
from .scm import DiscreteScm, random_scm, sample
from .voting import VoteMatrix, consensus, tally


@click.group()
def main():
    """Observational-to-interventional causal pipeline."""


def _out_dir(out: str | None) -> Path:
    path = Path(out or "run")
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load_config(config: str) -> dict:
    return json.loads(Path(config).read_text())


@main.command()
@click.option("--config", required=True, help="JSON with data_csv, schema_json, learners, alpha")
@click.option("--out", default=None, help="output directory")
def learn(config, out):
    """Run the learner ensemble and write per-learner graphs."""
    cfg = _load_config(config)
    d = ingest(cfg["data_csv"], cfg["schema_json"])
    outputs = run_ensemble(d, tuple(cfg.get("learners", ("pc", "hc", "tabu", "ges", "mmhc"))),
                           alpha=float(cfg.get("alpha", 0.01)),
                           configs=cfg.get("learner_configs", {}))
    outp = _out_dir(out)
    for o in outputs:
        (outp / f"learner_{o.learner_id}.json").write_text(o.graph.to_json())
    click.echo(f"wrote {len(outputs)} learner graphs to {outp}")


@main.command()
@click.option("--config", required=True)
@click.option("--out", default=None)
def vote(config, out):
    """Tally learner graphs (paths in config.graphs) into a vote matrix CSV."""
    cfg = _load_config(config)
    graphs = [CausalGraph.from_json(Path(p).read_text()) for p in cfg["graphs"]]
    vm = tally(graphs, graphs[0].variables)
    outp = _out_dir(out)
    (outp / "votes.csv").write_text(vm.to_csv())
    click.echo(f"wrote vote matrix ({vm.m} voters) to {outp / 'votes.csv'}")


@main.command("consensus")
@click.option("--votes", required=True, help="vote matrix CSV")
@click.option("--voters", "-m", type=int, required=True)
@click.option("--threshold", type=int, default=None)
@click.option("--out", default=None)
def consensus_cmd(votes, voters, threshold, out):
    """Threshold a vote matrix into the consensus graph."""
    vm = VoteMatrix.from_csv(Path(votes).read_text(), m=voters)
    g = consensus(vm, threshold=threshold)
    outp = _out_dir(out)
    (outp / "consensus.json").write_text(g.to_json())
    click.echo(f"consensus: {len(g.directed_edges)} edges -> {outp / 'consensus.json'}")


@main.command()
@click.option("--graph", required=True, help="graph JSON")
@click.option("--script", required=True, help="edit script JSONL")
@click.option("--out", default=None)
def edit(graph, script, out):
    """Apply an expert edit script."""
    g = CausalGraph.from_json(Path(graph).read_text())
    s = EditScript.from_jsonl(Path(script).read_text())
    g2, report = apply_script(g, s)
    outp = _out_dir(out)
    (outp / "edited.json").write_text(g2.to_json())
    click.echo(json.dumps({
        "added": report.added, "removed": report.removed,
        "reoriented": report.reoriented, "kept": report.kept,
        "acyclic": report.acyclic, "graph_hash": report.graph_hash,
    }, indent=2))


@main.command("finalize")
@click.option("--graph", required=True)
@click.option("--out", default=None)
def finalize_cmd(graph, out):
    """Certify a graph as a DAG (fails listing cycles)."""
    g = CausalGraph.from_json(Path(graph).read_text())
    try:
        final = finalize(g)
    except FinalizeError as exc:
        click.echo(json.dumps({"cycles": [list(c) for c in exc.cycles]}, indent=2))
        sys.exit(1)
    outp = _out_dir(out)
    (outp / "final_graph.json").write_text(final.to_json())
    (outp / "final_graph.dot").write_text(final.to_dot())
    click.echo(f"finalized -> {outp / 'final_graph.json'}")


@main.command()
@click.option("--graph", required=True)
@click.option("--config", required=True, help="JSON with data_csv, schema_json, alpha")
@click.option("--out", default=None)
def validate(graph, config, out):
    """Test the graph's implied independencies against data (report only)."""
    cfg = _load_config(config)
    g = CausalGraph.from_json(Path(graph).read_text())
    d = ingest(cfg["data_csv"], cfg["schema_json"])
    rows = validate_independencies(g, d, alpha=float(cfg.get("alpha", 0.01)))
    outp = _out_dir(out)
    (outp / "independence_report.json").write_text(json.dumps(rows, indent=2))
    bad = sum(1 for r in rows if r.get("consistent") is False)
    click.echo(f"{len(rows)} implications tested, {bad} inconsistent "
               f"-> {outp / 'independence_report.json'}")


@main.command("identify")
@click.option("--graph", required=True)
@click.option("--treatment", "-x", multiple=True, required=True)
@click.option("--outcome", "-y", multiple=True, required=True)
@click.option("--given", "-z", multiple=True)
def identify_cmd(graph, treatment, outcome, given):
    """Identify P(outcome | do(treatment), given); prints the estimand or hedge."""
    g = CausalGraph.from_json(Path(graph).read_text())
    result = identify_conditional(g, treatment, outcome, given)
    if isinstance(result, Hedge):
        click.echo(json.dumps({"identifiable": False,
                               "hedge": result.to_json_dict()}, indent=2))
        sys.exit(2)
    click.echo(result.to_sexpr())
    click.echo(result.to_text())


@main.command()
@click.option("--graph", required=True)
@click.option("--config", required=True,
              help="JSON with data_csv, schema_json, query{treatment,outcome,...}, estimator")
@click.option("--seed", type=int, default=0)
@click.option("--out", default=None)
def estimate(graph, config, seed, out):
    """Estimate an identified query with plug-in + IPW and bootstrap CIs."""
    cfg = _load_config(config)
    g = CausalGraph.from_json(Path(graph).read_text())
    d = ingest(cfg["data_csv"], cfg["schema_json"])
    q = cfg["query"]
    x, y = q["treatment"], q["outcome"]
    x_val = q.get("treatment_value", 1)
    given = tuple(q.get("given", ()))
    est_cfg = cfg.get("estimator", {})
    adj = est_cfg.get("adjustment")
    if adj is None:
        sets_ = backdoor_sets(g, x, y)
        if not sets_:
            click.echo("no admissible adjustment set; supply estimator.adjustment")
            sys.exit(2)
        adj = list(sets_[0])
    zfull = tuple(a for a in adj if a not in given) + given
    rep = bootstrap(
        lambda dd: estimate_plugin(dd, x, x_val, y, zfull),
        d, k=int(est_cfg.get("bootstrap_k", 200)), seed=seed)
    diag: dict = {}
    ipw = estimate_ipw(d, x, x_val, y, zfull,
                       clip=float(est_cfg.get("clip", 0.01)), diagnostics=diag)
    payload = {"adjustment": list(zfull), "plugin": rep.to_json_dict(),
               "ipw": ipw, "ipw_diagnostics": diag}
    if out:
        (_out_dir(out) / "estimate.json").write_text(json.dumps(payload, indent=2))
    click.echo(json.dumps(payload, indent=2))


@main.command()
@click.option("--scm", "scm_path", default=None, help="SCM JSON (omit to generate)")
@click.option("--graph", default=None, help="graph JSON for a random SCM")
@click.option("--rows", "-n", type=int, default=10000)
@click.option("--seed", type=int, default=0)
@click.option("--intervene", default=None, help='JSON assignments, e.g. {"X": 1}')
@click.option("--out", default=None)
def simulate(scm_path, graph, rows, seed, intervene, out):
    """Sample a dataset from a ground-truth SCM (optionally interventional)."""
    from .dataset import save_csv, save_schema

    if scm_path:
        scm = DiscreteScm.from_json(Path(scm_path).read_text())
    elif graph:
        g = CausalGraph.from_json(Path(graph).read_text())
        scm = random_scm(g, seed=seed, family="discrete")
    else:
        raise click.UsageError("need --scm or --graph")
    interv = json.loads(intervene) if intervene else None
    d = sample(scm, rows, intervention=interv, seed=seed)
    outp = _out_dir(out)
    save_csv(d, outp / "data.csv")
    save_schema(d.schema, outp / "schema.json")
    (outp / "scm.json").write_text(scm.to_json())
    click.echo(f"wrote {d.n} rows to {outp / 'data.csv'}")


@main.command()
@click.option("--config", required=True, help="PipelineConfig JSON")
@click.option("--seed", type=int, default=None, help="override config seed")
@click.option("--out", default="run")
def run(config, seed, out):
    """Run the full pipeline; writes artifacts + manifest."""
    cfg = PipelineConfig.from_json_file(config)
    if seed is not None:
        cfg = PipelineConfig(**{**cfg.__dict__, "seed": seed})
    manifest = run_pipeline(cfg, out)
    click.echo(json.dumps({"status": manifest["status"],
                           "artifacts": sorted(manifest["artifacts"])}, indent=2))
    if manifest["status"] != "complete":
        sys.exit(3)


@main.command()
@click.option("--port", type=int, default=8000)
@click.option("--state-dir", required=True)
def serve(port, state_dir):
    """Serve the expert-review HTTP API."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(state_dir), host="127.0.0.1", port=port)


if __name__ == "__main__":
    main()
