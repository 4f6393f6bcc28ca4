/** Browser entry: wires the session to the DOM. */
import { type EditKind, ReviewApi } from "./api.js";
import { findCycle } from "./graph.js";
import { ReviewSession } from "./session.js";
import {
  renderChecklist, renderCycleWitness, renderGraphSvg, renderStatusBadge,
} from "./render.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) {
    throw new Error(`missing element #${id}`);
  }
  return el as T;
};

async function boot(): Promise<void> {
  const base = (window as { CAUSALPIPE_API?: string }).CAUSALPIPE_API ?? "";
  const api = new ReviewApi(base);
  let session: ReviewSession;
  try {
    session = await ReviewSession.load(api);
  } catch (err) {
    $("status").innerHTML =
      `<span class="badge bad">server unreachable</span> ` +
      `<button id="retry">retry</button>`;
    $("retry").onclick = () => void boot();
    throw err;
  }

  const redraw = (highlightPath?: string[]): void => {
    const snap = session.current();
    $("status").innerHTML = renderStatusBadge(snap);
    $("canvas").innerHTML = renderGraphSvg(snap, { highlightPath });
    $("checklist").innerHTML = renderChecklist(
      session.checklistRows(), snap.threshold);
    $("cycles").innerHTML = renderCycleWitness(session.lastCycleWitness ?? []);
    ($("submit") as HTMLButtonElement).disabled = !session.canEdit();
  };

  $("submit").onclick = async () => {
    const edit = {
      kind: ($("kind") as HTMLSelectElement).value as EditKind,
      from: ($("from") as HTMLInputElement).value.trim(),
      to: ($("to") as HTMLInputElement).value.trim(),
      note: ($("note") as HTMLInputElement).value.trim(),
    };
    const problem = session.validateDraft(edit);
    if (problem) {
      $("message").textContent = problem;
      return;
    }
    try {
      await session.submitEdit(edit);
      $("message").textContent = `${edit.kind} ${edit.from} -> ${edit.to} applied`;
    } catch {
      $("message").textContent =
        session.lastRejection?.reason ?? "edit rejected";
      if (!session.canEdit()) {
        await session.refresh();
      }
    }
    redraw();
  };

  $("finalize").onclick = async () => {
    const snap = await session.finalize();
    if (snap === null) {
      const witness = session.lastCycleWitness?.[0]
        ?? findCycle(session.current().graph)
        ?? undefined;
      $("message").textContent = "finalize blocked: graph has cycles";
      redraw(witness ?? undefined);
      return;
    }
    $("message").textContent = "graph finalized as DAG";
    redraw();
  };

  $("export").onclick = async () => {
    const text = await session.exportScript();
    const blob = new Blob([text], { type: "application/jsonl" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = "edit_script.jsonl";
    a.click();
    URL.revokeObjectURL(a.href);
  };

  $("refresh").onclick = async () => {
    await session.refresh();
    $("message").textContent = "refreshed from server";
    redraw();
  };

  redraw();
}

void boot();
