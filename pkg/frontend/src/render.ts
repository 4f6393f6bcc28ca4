/** String-producing renderers (SVG / HTML) so the view layer stays testable
 * without a browser. */
import type { Snapshot } from "./api.js";
import { type ChecklistRow, edgeKey } from "./graph.js";

const esc = (s: string): string =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");

export interface RenderOptions {
  width?: number;
  height?: number;
  /** node names along a cycle witness to highlight */
  highlightPath?: string[];
}

interface Point {
  x: number;
  y: number;
}

function circleLayout(names: string[], w: number, h: number): Map<string, Point> {
  const cx = w / 2;
  const cy = h / 2;
  const r = Math.min(w, h) / 2 - 60;
  const pts = new Map<string, Point>();
  names.forEach((name, i) => {
    const angle = (2 * Math.PI * i) / names.length - Math.PI / 2;
    pts.set(name, { x: cx + r * Math.cos(angle), y: cy + r * Math.sin(angle) });
  });
  return pts;
}

/** The graph canvas: directed edges solid, unresolved 2-cycles as red
 * conflict pairs, vote counts as edge labels, optional highlighted cycle. */
export function renderGraphSvg(snapshot: Snapshot, opts: RenderOptions = {}): string {
  const w = opts.width ?? 900;
  const h = opts.height ?? 700;
  const names = snapshot.graph.variables.map((v) => v.name);
  const pos = circleLayout(names, w, h);
  const conflictEdges = new Set(
    snapshot.two_cycles.flatMap(([a, b]) => [edgeKey(a, b), edgeKey(b, a)]),
  );
  const highlight = new Set<string>();
  if (opts.highlightPath) {
    for (let i = 0; i + 1 < opts.highlightPath.length; i++) {
      highlight.add(edgeKey(opts.highlightPath[i], opts.highlightPath[i + 1]));
    }
  }

  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${w}" height="${h}" viewBox="0 0 ${w} ${h}">`,
    `<defs><marker id="arrow" markerWidth="8" markerHeight="8" refX="7" refY="3" orient="auto">` +
    `<path d="M0,0 L7,3 L0,6 z"/></marker></defs>`,
  ];

  for (const [u, v] of snapshot.graph.directed_edges) {
    const a = pos.get(u);
    const b = pos.get(v);
    if (!a || !b) {
      continue;
    }
    const key = edgeKey(u, v);
    const cls = highlight.has(key)
      ? "edge cycle-witness"
      : conflictEdges.has(key) ? "edge conflict" : "edge";
    const color = highlight.has(key) ? "#c2185b"
      : conflictEdges.has(key) ? "#d32f2f" : "#455a64";
    // shorten toward the target so the arrowhead clears the node circle
    const dx = b.x - a.x;
    const dy = b.y - a.y;
    const len = Math.hypot(dx, dy) || 1;
    const tx = b.x - (dx / len) * 18;
    const ty = b.y - (dy / len) * 18;
    parts.push(
      `<line class="${cls}" data-edge="${esc(key)}" x1="${a.x.toFixed(1)}" y1="${a.y.toFixed(1)}" ` +
      `x2="${tx.toFixed(1)}" y2="${ty.toFixed(1)}" stroke="${color}" ` +
      `stroke-width="${highlight.has(key) ? 3 : 1.5}" marker-end="url(#arrow)"/>`,
    );
    const votes = snapshot.votes?.[key];
    if (votes !== undefined) {
      const mx = (a.x + tx) / 2;
      const my = (a.y + ty) / 2;
      parts.push(
        `<text class="vote" x="${mx.toFixed(1)}" y="${my.toFixed(1)}" ` +
        `font-size="10" fill="#78909c">${votes}</text>`,
      );
    }
  }
  for (const [a, b] of snapshot.graph.bidirected_edges) {
    const p = pos.get(a);
    const q = pos.get(b);
    if (!p || !q) {
      continue;
    }
    parts.push(
      `<line class="edge bidirected" x1="${p.x.toFixed(1)}" y1="${p.y.toFixed(1)}" ` +
      `x2="${q.x.toFixed(1)}" y2="${q.y.toFixed(1)}" stroke="#8e24aa" ` +
      `stroke-dasharray="5,4" stroke-width="1.5"/>`,
    );
  }
  for (const name of names) {
    const p = pos.get(name)!;
    parts.push(
      `<circle cx="${p.x.toFixed(1)}" cy="${p.y.toFixed(1)}" r="14" ` +
      `fill="#eceff1" stroke="#546e7a"/>`,
      `<text x="${p.x.toFixed(1)}" y="${(p.y - 18).toFixed(1)}" ` +
      `text-anchor="middle" font-size="11">${esc(name)}</text>`,
    );
  }
  parts.push("</svg>");
  return parts.join("\n");
}

/** Acyclicity badge text for the header. */
export function renderStatusBadge(snapshot: Snapshot): string {
  const cls = snapshot.acyclic ? "badge ok" : "badge bad";
  const label = snapshot.acyclic
    ? (snapshot.graph.flag === "dag" ? "DAG (finalized)" : "acyclic")
    : `cyclic (${snapshot.two_cycles.length} unresolved pairs)`;
  return `<span class="${cls}">${esc(label)}</span>` +
    ` <code class="hash">${esc(snapshot.hash.slice(0, 12))}</code>`;
}

export function renderChecklist(rows: ChecklistRow[], threshold?: number): string {
  const items = rows.map((r) => {
    const marks = [
      r.reviewed ? "reviewed" : "unreviewed",
      r.conflict ? "conflict" : "",
      threshold !== undefined && r.votes >= threshold ? "majority" : "",
    ].filter(Boolean).join(" ");
    return `<li class="${marks}" data-edge="${esc(edgeKey(r.from, r.to))}">` +
      `${esc(r.from)} &rarr; ${esc(r.to)} <span class="votes">${r.votes}</span></li>`;
  });
  return `<ol class="checklist">${items.join("")}</ol>`;
}

export function renderCycleWitness(cycles: string[][]): string {
  if (cycles.length === 0) {
    return "";
  }
  const items = cycles.map(
    (c) => `<li class="cycle-path">${c.map(esc).join(" &rarr; ")}</li>`,
  );
  return `<div class="cycle-warning">finalize blocked by cycles:` +
    `<ul>${items.join("")}</ul></div>`;
}
