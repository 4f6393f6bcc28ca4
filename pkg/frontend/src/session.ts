/** Client-side review session.
 *
 * Invariants: the displayed graph is always the last server snapshot; a new
 * edit is enabled only while the client's hash matches the server's (a
 * mismatch forces a refresh); mutations are never retried silently.
 */
import { ApiError, type EditPayload, type ReviewApi, type Snapshot } from "./api.js";
import { type ChecklistRow, checklist, draftProblem, edgeKey } from "./graph.js";

export interface EditRejection {
  status: number;
  reason: string;
  cycles?: string[][];
}

export class ReviewSession {
  private snapshot: Snapshot;
  private serverHash: string;
  private readonly reviewed = new Set<string>();
  /** Cycle witness from the last rejected finalize, for rendering. */
  lastCycleWitness: string[][] | null = null;
  lastRejection: EditRejection | null = null;

  private constructor(
    private readonly api: ReviewApi,
    snapshot: Snapshot,
  ) {
    this.snapshot = snapshot;
    this.serverHash = snapshot.hash;
  }

  static async load(api: ReviewApi): Promise<ReviewSession> {
    return new ReviewSession(api, await api.getGraph());
  }

  current(): Snapshot {
    return this.snapshot;
  }

  /** True while our state hash matches the last server response. */
  canEdit(): boolean {
    return this.snapshot.hash === this.serverHash;
  }

  checklistRows(): ChecklistRow[] {
    return checklist(this.snapshot, this.reviewed);
  }

  /** Local precondition check for a draft; null means submittable. */
  validateDraft(edit: EditPayload): string | null {
    if (!this.canEdit()) {
      return "session is stale; refresh before editing";
    }
    return draftProblem(this.snapshot.graph, edit);
  }

  async refresh(): Promise<Snapshot> {
    this.snapshot = await this.api.getGraph();
    this.serverHash = this.snapshot.hash;
    return this.snapshot;
  }

  /**
   * Submit one edit. On success the session adopts the server's new
   * snapshot and marks the edge reviewed. On rejection the server's
   * structured reason is surfaced (no silent retry); a conflicting-state
   * rejection marks the session stale.
   */
  async submitEdit(edit: EditPayload): Promise<Snapshot> {
    const local = this.validateDraft(edit);
    if (local !== null) {
      throw new Error(local);
    }
    try {
      const snap = await this.api.postEdit(edit);
      this.snapshot = snap;
      this.serverHash = snap.hash;
      this.reviewed.add(edgeKey(edit.from, edit.to));
      if (edit.kind === "reorient") {
        this.reviewed.add(edgeKey(edit.to, edit.from));
      }
      this.lastRejection = null;
      return snap;
    } catch (err) {
      if (err instanceof ApiError) {
        this.lastRejection = {
          status: err.status,
          reason: err.body?.error?.reason ?? err.message,
        };
        if (err.status === 409) {
          // concurrent external mutation is the only way an accepted draft
          // can 409: force the next edit through a refresh
          this.serverHash = `stale:${this.serverHash}`;
        }
      }
      throw err;
    }
  }

  /** Finalize on the server; a 409 carries the cycle witness for rendering. */
  async finalize(): Promise<Snapshot | null> {
    try {
      const snap = await this.api.postFinalize();
      this.snapshot = snap;
      this.serverHash = snap.hash;
      this.lastCycleWitness = null;
      return snap;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.lastCycleWitness = err.body?.error?.cycles ?? [];
        return null;
      }
      throw err;
    }
  }

  /** The server-held edit ledger, replayable offline to the same hash. */
  exportScript(): Promise<string> {
    return this.api.getScript();
  }
}
