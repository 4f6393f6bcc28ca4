/** Pure helpers over server snapshots.
 *
 * These never mutate or reconstruct graph state: every graph that reaches
 * the screen is a server snapshot; the helpers only read it (precondition
 * mirroring, cycle witnesses for badges, checklist ordering).
 */
import type { EditPayload, GraphJson, Snapshot } from "./api.js";

export const edgeKey = (from: string, to: string): string => `${from}->${to}`;

export function edgeSet(graph: GraphJson): Set<string> {
  return new Set(graph.directed_edges.map(([u, v]) => edgeKey(u, v)));
}

export function hasVariable(graph: GraphJson, name: string): boolean {
  return graph.variables.some((v) => v.name === name);
}

/** Mirror of the server-side edit preconditions: returns a human-readable
 * problem, or null when the draft should be accepted. A non-null result
 * predicts a 409 (barring concurrent external mutation). */
export function draftProblem(graph: GraphJson, edit: EditPayload): string | null {
  const { kind, from, to } = edit;
  if (from === to) {
    return "edge endpoints must differ";
  }
  for (const name of [from, to]) {
    if (!hasVariable(graph, name)) {
      return `unknown variable ${name}`;
    }
  }
  const edges = edgeSet(graph);
  if (kind === "remove" || kind === "keep") {
    if (!edges.has(edgeKey(from, to))) {
      return `edge ${from} -> ${to} is not present`;
    }
  } else if (kind === "reorient") {
    if (!edges.has(edgeKey(to, from))) {
      return `reversed edge ${to} -> ${from} is not present (edits state the final orientation)`;
    }
  } else if (kind === "add") {
    if (edges.has(edgeKey(from, to))) {
      return `edge ${from} -> ${to} is already present`;
    }
  } else {
    return `unknown edit kind ${kind as string}`;
  }
  if (kind !== "keep" && edit.note.trim() === "") {
    return "an evidence note is required for remove/reorient/add";
  }
  return null;
}

/** One directed cycle as a node path (first node repeated last), or null. */
export function findCycle(graph: GraphJson): string[] | null {
  const children = new Map<string, string[]>();
  for (const v of graph.variables) {
    children.set(v.name, []);
  }
  for (const [u, v] of graph.directed_edges) {
    children.get(u)?.push(v);
  }
  const state = new Map<string, "active" | "done">();
  const stack: string[] = [];

  const visit = (node: string): string[] | null => {
    state.set(node, "active");
    stack.push(node);
    for (const child of children.get(node) ?? []) {
      const s = state.get(child);
      if (s === "active") {
        const start = stack.indexOf(child);
        return [...stack.slice(start), child];
      }
      if (s === undefined) {
        const found = visit(child);
        if (found) {
          return found;
        }
      }
    }
    stack.pop();
    state.set(node, "done");
    return null;
  };

  for (const v of graph.variables) {
    if (!state.has(v.name)) {
      const found = visit(v.name);
      if (found) {
        return found;
      }
    }
  }
  return null;
}

export interface ChecklistRow {
  from: string;
  to: string;
  votes: number;
  conflict: boolean; // part of an unresolved 2-cycle
  reviewed: boolean;
}

/** Review checklist: every current edge, strongest vote support first
 * (review priority), conflicts flagged. */
export function checklist(snapshot: Snapshot, reviewed: Set<string>): ChecklistRow[] {
  const twoCycles = new Set(
    snapshot.two_cycles.flatMap(([a, b]) => [edgeKey(a, b), edgeKey(b, a)]),
  );
  const rows = snapshot.graph.directed_edges.map(([from, to]) => ({
    from,
    to,
    votes: snapshot.votes?.[edgeKey(from, to)] ?? 0,
    conflict: twoCycles.has(edgeKey(from, to)),
    reviewed: reviewed.has(edgeKey(from, to)),
  }));
  rows.sort((a, b) =>
    b.votes - a.votes
    || a.from.localeCompare(b.from)
    || a.to.localeCompare(b.to));
  return rows;
}
