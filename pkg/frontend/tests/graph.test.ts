import { describe, expect, it } from "vitest";

import type { GraphJson, Snapshot } from "../src/api.js";
import { checklist, draftProblem, edgeKey, findCycle } from "../src/graph.js";

const graph = (edges: [string, string][], names = ["a", "b", "c", "d"]): GraphJson => ({
  variables: names.map((n) => ({ name: n, kind: "binary" })),
  directed_edges: edges,
  bidirected_edges: [],
});

describe("draftProblem (server precondition mirror)", () => {
  const g = graph([["a", "b"], ["b", "c"]]);

  it("accepts a valid remove", () => {
    expect(draftProblem(g, { kind: "remove", from: "a", to: "b", note: "x" }))
      .toBeNull();
  });

  it("rejects removing an absent edge", () => {
    expect(draftProblem(g, { kind: "remove", from: "a", to: "c", note: "x" }))
      .toMatch(/not present/);
  });

  it("reorient states the final orientation", () => {
    expect(draftProblem(g, { kind: "reorient", from: "b", to: "a", note: "x" }))
      .toBeNull();
    expect(draftProblem(g, { kind: "reorient", from: "a", to: "b", note: "x" }))
      .toMatch(/reversed edge/);
  });

  it("rejects adding a present edge", () => {
    expect(draftProblem(g, { kind: "add", from: "a", to: "b", note: "x" }))
      .toMatch(/already present/);
    expect(draftProblem(g, { kind: "add", from: "c", to: "a", note: "x" }))
      .toBeNull();
  });

  it("requires an evidence note on mutations", () => {
    expect(draftProblem(g, { kind: "remove", from: "a", to: "b", note: "  " }))
      .toMatch(/note is required/);
    expect(draftProblem(g, { kind: "keep", from: "a", to: "b", note: "" }))
      .toBeNull();
  });

  it("rejects unknown variables and self-edges", () => {
    expect(draftProblem(g, { kind: "add", from: "a", to: "zzz", note: "x" }))
      .toMatch(/unknown variable/);
    expect(draftProblem(g, { kind: "add", from: "a", to: "a", note: "x" }))
      .toMatch(/differ/);
  });
});

describe("findCycle", () => {
  it("returns null on a DAG", () => {
    expect(findCycle(graph([["a", "b"], ["b", "c"]]))).toBeNull();
  });

  it("finds a 2-cycle", () => {
    const c = findCycle(graph([["a", "b"], ["b", "a"]]));
    expect(c).not.toBeNull();
    expect(c![0]).toBe(c![c!.length - 1]);
    expect(new Set(c)).toEqual(new Set(["a", "b"]));
  });

  it("finds a longer cycle as a closed path", () => {
    const c = findCycle(graph([["a", "b"], ["b", "c"], ["c", "d"], ["d", "b"]]));
    expect(c).not.toBeNull();
    expect(new Set(c)).toEqual(new Set(["b", "c", "d"]));
    for (let i = 0; i + 1 < c!.length; i++) {
      expect([["a", "b"], ["b", "c"], ["c", "d"], ["d", "b"]]).toContainEqual(
        [c![i], c![i + 1]]);
    }
  });
});

describe("checklist", () => {
  const snapshot: Snapshot = {
    graph: graph([["a", "b"], ["b", "c"], ["c", "b"], ["a", "d"]]),
    hash: "h",
    acyclic: false,
    two_cycles: [["b", "c"]],
    votes: {
      [edgeKey("a", "b")]: 6,
      [edgeKey("b", "c")]: 4,
      [edgeKey("c", "b")]: 4,
      [edgeKey("a", "d")]: 5,
    },
    threshold: 4,
  };

  it("orders by descending vote count", () => {
    const rows = checklist(snapshot, new Set());
    expect(rows.map((r) => r.votes)).toEqual([6, 5, 4, 4]);
    expect(rows[0]).toMatchObject({ from: "a", to: "b" });
  });

  it("flags unresolved 2-cycles as conflicts", () => {
    const rows = checklist(snapshot, new Set());
    const conflicts = rows.filter((r) => r.conflict);
    expect(conflicts.map((r) => edgeKey(r.from, r.to)).sort())
      .toEqual(["b->c", "c->b"]);
  });

  it("tracks reviewed state", () => {
    const rows = checklist(snapshot, new Set(["a->b"]));
    expect(rows.find((r) => r.from === "a" && r.to === "b")?.reviewed).toBe(true);
    expect(rows.find((r) => r.from === "a" && r.to === "d")?.reviewed).toBe(false);
  });
});
