// Typed fetch client for the game service.  Every call resolves to parsed
// JSON or rejects with an ApiError carrying the service's `detail` text, so
// callers never look at raw responses.

export type Side = "t1" | "t2";

export interface SessionRequest {
  kind: "ehr" | "dehr" | "types";
  t1: string;
  t2: string;
  k: number;
  r?: number;
  m?: number;
  human?: "spoiler" | "duplicator";
  policy?: "master" | "cluster" | "minimax" | "random" | "mirror";
  designated?: [number, number][];
  preset?: "surrogate" | "paper";
  seed?: number;
  max_aug_colours?: number;
  node_product_guard?: number;
}

export interface PendingMove {
  type: "colouring" | "pebble";
  side: Side;
  node?: number;
  values?: number[];
}

export interface MonitorRow {
  round: number;
  violations: string[];
  conditions?: string[]; // only strategy engines report per-round conditions
}

export interface Transcript {
  kind: string;
  r: number;
  k: number;
  m: number;
  t1: string;
  t2: string;
  colours1: number[] | null;
  colours2: number[] | null;
  tail1: { prefix: number[]; period: number[] } | null;
  tail2: { prefix: number[]; period: number[] } | null;
  designated: number[][];
  pairs: number[][];
}

export interface Snapshot {
  id: string;
  kind: string;
  status: "awaiting-colouring" | "awaiting-move" | "finished";
  human: "spoiler" | "duplicator";
  policy: string;
  preset: "surrogate" | "paper";
  k: number;
  m: number;
  r: number;
  rounds_total: number;
  rounds_played: number;
  t1: string;
  t2: string;
  colours1: number[] | null;
  colours2: number[] | null;
  designated: number[][];
  pairs: number[][];
  pending: PendingMove | null;
  monitor: MonitorRow[];
  winner: string | null;
  problems: string[];
  transcript: Transcript;
}

export interface MoveRequest {
  type: "colouring" | "pebble";
  side?: Side;
  node?: number;
  values?: number[];
}

export interface HintCandidate {
  side: Side;
  node: number;
  close?: number[];
  threatens?: number[];
  case?: string;
  preserves_win?: boolean;
}

export interface HintPayload {
  candidates: HintCandidate[];
  anchors?: boolean[];
  reply_to?: PendingMove;
  note?: string;
}

export class ApiError extends Error {
  readonly status: number;
  readonly detail: string;

  constructor(status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
    this.status = status;
    this.detail = detail;
  }
}

function detailOf(status: number, body: unknown): string {
  if (body && typeof body === "object" && "detail" in body) {
    const d = (body as { detail: unknown }).detail;
    if (typeof d === "string") return d;
    if (Array.isArray(d)) {
      // request-validation errors arrive as a list of {loc, msg, ...}
      const parts = d.map((e) =>
        e && typeof e === "object" && "msg" in e
          ? `${Array.isArray((e as any).loc) ? (e as any).loc.join(".") + ": " : ""}${(e as any).msg}`
          : JSON.stringify(e),
      );
      return parts.join("; ");
    }
    return JSON.stringify(d);
  }
  return `HTTP ${status}`;
}

export class Client {
  readonly base: string;

  constructor(base: string) {
    this.base = base.replace(/\/$/, "");
  }

  private async request(path: string, init?: RequestInit): Promise<any> {
    const res = await fetch(this.base + path, init);
    let body: unknown = null;
    try {
      body = await res.json();
    } catch {
      body = null;
    }
    if (!res.ok) throw new ApiError(res.status, detailOf(res.status, body));
    return body;
  }

  createSession(cfg: SessionRequest): Promise<Snapshot> {
    return this.request("/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(cfg),
    });
  }

  getState(sid: string): Promise<Snapshot> {
    return this.request(`/sessions/${encodeURIComponent(sid)}`);
  }

  move(sid: string, move: MoveRequest): Promise<Snapshot> {
    return this.request(`/sessions/${encodeURIComponent(sid)}/moves`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(move),
    });
  }

  hint(sid: string): Promise<HintPayload> {
    return this.request(`/sessions/${encodeURIComponent(sid)}/hint`);
  }
}
