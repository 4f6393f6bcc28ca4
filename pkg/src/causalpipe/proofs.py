"""Replayer for recorded do-calculus derivations.

A proof script is an ordered list of steps. Rule steps (rule1/rule2/rule3)
name the sets of the do-calculus premise and are checked as d-separations on
the appropriate mutilation of the target graph. Structural steps (cond-def,
sum-over, c-factorize, substitute) carry no independence claim; c-factorize
is validated against the graph's c-component partition, the others against
the schema.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .graph import CausalGraph
from .identify import check_rule

RULE_KINDS = {"rule1": 1, "rule2": 2, "rule3": 3}
STRUCTURAL_KINDS = ("cond-def", "sum-over", "c-factorize", "substitute")


class ProofError(ValueError):
    pass


@dataclass(frozen=True)
class ProofStep:
    step_id: str
    kind: str
    y: tuple[str, ...] = ()
    z: tuple[str, ...] = ()
    x: tuple[str, ...] = ()
    w: tuple[str, ...] = ()
    over: tuple[str, ...] = ()   # c-factorize / sum-over variable set
    note: str = ""

    def mutilation_spec(self) -> str:
        """Human-readable description of the graph the premise is checked on."""
        if self.kind == "rule1":
            return f"G[incoming cut: {','.join(self.x) or '-'}]"
        if self.kind == "rule2":
            return (f"G[incoming cut: {','.join(self.x) or '-'}; "
                    f"outgoing cut: {','.join(self.z)}]")
        if self.kind == "rule3":
            return (f"G[incoming cut: {','.join(self.x) or '-'} and Z(W) of "
                    f"{','.join(self.z)}]")
        return "G"


@dataclass(frozen=True)
class ProofScript:
    steps: tuple[ProofStep, ...]
    description: str = ""


@dataclass(frozen=True)
class StepResult:
    step_id: str
    kind: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class DerivationReport:
    results: tuple[StepResult, ...]
    graph_hash: str

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def rule_steps_checked(self) -> int:
        return sum(1 for r in self.results if r.kind in RULE_KINDS)

    def failures(self) -> list[StepResult]:
        return [r for r in self.results if not r.passed]

    def summary(self) -> str:
        lines = [
            f"{'PASS' if r.passed else 'FAIL'}  {r.step_id:<16} {r.kind:<12} {r.detail}"
            for r in self.results
        ]
        lines.append(
            f"{len(self.results) - len(self.failures())}/{len(self.results)} steps passed")
        return "\n".join(lines)


def _resolve(ref, sets: Mapping[str, tuple[str, ...]]) -> tuple[str, ...]:
    """A step set is a list of names or {"set": name, "minus": [names]}."""
    if ref is None:
        return ()
    if isinstance(ref, (list, tuple)):
        return tuple(ref)
    if isinstance(ref, Mapping):
        base = sets.get(ref["set"])
        if base is None:
            raise ProofError(f"unknown set constant {ref['set']!r}")
        minus = set(ref.get("minus", ()))
        unknown = minus - set(base)
        if unknown:
            raise ProofError(
                f"minus names {sorted(unknown)} not in set {ref['set']!r}")
        return tuple(v for v in base if v not in minus)
    raise ProofError(f"cannot resolve set reference {ref!r}")


def load_proof_script(raw: Mapping, sets: Mapping[str, tuple[str, ...]]) -> ProofScript:
    steps = []
    for s in raw["steps"]:
        kind = s["kind"]
        if kind not in RULE_KINDS and kind not in STRUCTURAL_KINDS:
            raise ProofError(f"step {s.get('id')!r} has unknown kind {kind!r}")
        steps.append(ProofStep(
            step_id=s.get("id", f"step{len(steps)}"),
            kind=kind,
            y=_resolve(s.get("y"), sets),
            z=_resolve(s.get("z"), sets),
            x=_resolve(s.get("x"), sets),
            w=_resolve(s.get("w"), sets),
            over=_resolve(s.get("over") or s.get("bound"), sets),
            note=s.get("note", ""),
        ))
    return ProofScript(tuple(steps), description=raw.get("description", ""))


def verify_step(g: CausalGraph, step: ProofStep) -> StepResult:
    if step.kind in RULE_KINDS:
        rule = RULE_KINDS[step.kind]
        try:
            ok = check_rule(g, rule, x=step.x, y=step.y, z=step.z, w=step.w)
        except ValueError as exc:
            raise ProofError(f"malformed step {step.step_id!r}: {exc}") from exc
        detail = (f"({','.join(step.y)} ind {','.join(step.z)} | "
                  f"{','.join(tuple(step.x) + tuple(step.w)) or '-'}) in "
                  f"{step.mutilation_spec()}")
        return StepResult(step.step_id, step.kind, ok, detail)
    if step.kind == "c-factorize":
        comps = {c[0]: c for c in g.c_components() if len(c) == 1}
        non_singleton = [v for v in step.over if v not in comps]
        ok = not non_singleton
        detail = ("factorization variables are singleton c-components"
                  if ok else f"not singleton c-components: {non_singleton}")
        return StepResult(step.step_id, step.kind, ok, detail)
    if step.kind == "sum-over":
        unknown = [v for v in step.over if v not in g]
        ok = not unknown
        detail = (f"sum over {len(step.over)} variables" if ok
                  else f"unknown variables: {unknown}")
        return StepResult(step.step_id, step.kind, ok, detail)
    # cond-def / substitute carry no graph claim
    return StepResult(step.step_id, step.kind, True, step.note or "structural")


def verify_derivation(g: CausalGraph, script: ProofScript) -> DerivationReport:
    """Check every step against the graph; failures are reported, not raised."""
    results = tuple(verify_step(g, step) for step in script.steps)
    return DerivationReport(results, graph_hash=g.graph_hash())
