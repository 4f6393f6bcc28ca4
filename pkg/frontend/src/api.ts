/** Typed client for the review service. The UI talks to nothing else. */

export interface VariableJson {
  name: string;
  kind: string;
  levels?: number;
}

export interface GraphJson {
  variables: VariableJson[];
  directed_edges: [string, string][];
  bidirected_edges: [string, string][];
  flag?: string;
}

/** Server snapshot: the single source of truth for displayed graph state. */
export interface Snapshot {
  graph: GraphJson;
  hash: string;
  acyclic: boolean;
  two_cycles: [string, string][];
  votes?: Record<string, number>;
  threshold?: number;
}

export type EditKind = "keep" | "remove" | "reorient" | "add";

export interface EditPayload {
  kind: EditKind;
  from: string;
  to: string;
  note: string;
}

export interface VotesJson {
  names: string[];
  m: number;
  threshold: number;
  counts: number[][];
}

export interface IdentifyResult {
  identifiable: boolean;
  estimand?: { sexpr: string; text: string };
  hedge?: unknown;
}

export interface ServerErrorBody {
  error: { reason: string; kind?: string; edge?: string[]; cycles?: string[][] };
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: ServerErrorBody | null,
  ) {
    super(body?.error?.reason ?? `server returned ${status}`);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ReviewApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path, init);
    if (!resp.ok) {
      let body: ServerErrorBody | null = null;
      try {
        body = (await resp.json()) as ServerErrorBody;
      } catch {
        body = null;
      }
      throw new ApiError(resp.status, body);
    }
    return (await resp.json()) as T;
  }

  getGraph(): Promise<Snapshot> {
    return this.request<Snapshot>("/api/graph");
  }

  getVotes(): Promise<VotesJson> {
    return this.request<VotesJson>("/api/votes");
  }

  postEdit(edit: EditPayload): Promise<Snapshot> {
    return this.request<Snapshot>("/api/edits", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(edit),
    });
  }

  postFinalize(): Promise<Snapshot> {
    return this.request<Snapshot>("/api/finalize", { method: "POST" });
  }

  async getScript(): Promise<string> {
    const resp = await this.fetchFn(this.baseUrl + "/api/script");
    if (!resp.ok) {
      throw new ApiError(resp.status, null);
    }
    return await resp.text();
  }

  identify(treatment: string[], outcome: string[], given: string[]): Promise<IdentifyResult> {
    return this.request<IdentifyResult>("/api/identify", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ treatment, outcome, given }),
    });
  }
}
