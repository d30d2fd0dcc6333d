// View-state machine.  Pure data plus pure transition functions: the DOM
// layer feeds events in and re-renders from the result, and the tests drive
// the same functions headlessly.  The verdict shown to the user is always
// the service's `winner` field passed through untouched — the client never
// computes its own.

import type { HintPayload, PendingMove, Side, Snapshot } from "./api.js";
import { parseTreeLiteral, scaleFor, type ScaleParams, type TreeShape } from "./layout.js";

export interface LogEntry {
  tone: "info" | "error" | "win";
  text: string;
}

export interface ViewState {
  snap: Snapshot | null;
  shapes: { t1: TreeShape; t2: TreeShape } | null;
  hints: HintPayload | null;
  showHints: boolean;
  selected: { side: Side; node: number } | null;
  draft: (number | null)[] | null; // colouring under construction
  draftSide: Side;
  busy: boolean;
  error: string | null;
  log: LogEntry[];
}

export function initialView(): ViewState {
  return {
    snap: null,
    shapes: null,
    hints: null,
    showHints: false,
    selected: null,
    draft: null,
    draftSide: "t1",
    busy: false,
    error: null,
    log: [],
  };
}

export function shapeOf(v: ViewState, side: Side): TreeShape | null {
  return v.shapes ? v.shapes[side] : null;
}

export function otherSide(side: Side): Side {
  return side === "t1" ? "t2" : "t1";
}

// The human acts when the game is live and either they lead (spoiler, no
// engine move pending) or an engine move awaits their reply (duplicator).
export function isHumanTurn(v: ViewState): boolean {
  const s = v.snap;
  if (!s || s.status === "finished") return false;
  return s.human === "duplicator" ? s.pending !== null : s.pending === null;
}

// Side the human must act on: duplicators answer on the side opposite the
// pending engine move; spoilers pick freely (draftSide holds the choice).
export function requiredSide(v: ViewState): Side | null {
  const s = v.snap;
  if (!s || s.status === "finished") return null;
  if (s.human === "duplicator") {
    return s.pending ? otherSide(s.pending.side) : null;
  }
  return null;
}

function appendLog(log: LogEntry[], entry: LogEntry): LogEntry[] {
  const out = [...log, entry];
  return out.length > 200 ? out.slice(out.length - 200) : out;
}

function transitionLines(prev: Snapshot | null, next: Snapshot): LogEntry[] {
  const lines: LogEntry[] = [];
  if (!prev) {
    lines.push({
      tone: "info",
      text: `session ${next.id}: ${next.kind}, k=${next.k}, ${next.human} vs ${next.policy}`,
    });
  }
  const from = prev ? prev.pairs.length : 0;
  for (let i = from; i < next.pairs.length; i += 1) {
    const [a, b] = next.pairs[i];
    lines.push({ tone: "info", text: `round ${i + 1}: pebbles on t1:${a} and t2:${b}` });
  }
  if (!prev || prev.colours1 === null) {
    if (next.colours1 !== null) lines.push({ tone: "info", text: "t1 coloured" });
  }
  if (!prev || prev.colours2 === null) {
    if (next.colours2 !== null) lines.push({ tone: "info", text: "t2 coloured" });
  }
  if (next.status === "finished" && (!prev || prev.status !== "finished")) {
    const probs = next.problems.length ? ` — ${next.problems.join("; ")}` : "";
    lines.push({ tone: "win", text: `finished: ${next.winner} wins${probs}` });
  }
  return lines;
}

function freshDraft(v: ViewState, snap: Snapshot, shapes: { t1: TreeShape; t2: TreeShape }) {
  if (snap.status !== "awaiting-colouring") return { draft: null, draftSide: v.draftSide };
  const humanActs =
    snap.human === "duplicator" ? snap.pending !== null : snap.pending === null;
  if (!humanActs) return { draft: null, draftSide: v.draftSide };
  const side =
    snap.human === "duplicator" && snap.pending ? otherSide(snap.pending.side) : v.draftSide;
  const size = shapes[side].size;
  const draft: (number | null)[] = new Array(size).fill(null);
  draft[0] = 0; // the root always keeps the root colour
  return { draft, draftSide: side };
}

export function withSnapshot(v: ViewState, snap: Snapshot): ViewState {
  const sameTrees =
    v.snap !== null && v.snap.t1 === snap.t1 && v.snap.t2 === snap.t2 && v.shapes !== null;
  const shapes = sameTrees
    ? v.shapes!
    : { t1: parseTreeLiteral(snap.t1), t2: parseTreeLiteral(snap.t2) };
  const { draft, draftSide } = freshDraft(v, snap, shapes);
  let log = v.log;
  for (const line of transitionLines(v.snap, snap)) log = appendLog(log, line);
  return {
    ...v,
    snap,
    shapes,
    hints: null, // flags are position-bound; refetch after every move
    selected: v.selected && v.selected.node < shapes[v.selected.side].size ? v.selected : null,
    draft,
    draftSide,
    busy: false,
    error: null,
    log,
  };
}

export function withBusy(v: ViewState): ViewState {
  return { ...v, busy: true, error: null };
}

export function withError(v: ViewState, message: string): ViewState {
  return {
    ...v,
    busy: false,
    error: message,
    log: appendLog(v.log, { tone: "error", text: message }),
  };
}

export function withHints(v: ViewState, hints: HintPayload): ViewState {
  return { ...v, hints, showHints: true, busy: false };
}

export function toggleHints(v: ViewState): ViewState {
  return { ...v, showHints: !v.showHints };
}

export function selectNode(v: ViewState, side: Side, node: number): ViewState {
  return { ...v, selected: { side, node } };
}

// --- colouring draft ---------------------------------------------------------

export function chooseDraftSide(v: ViewState, side: Side): ViewState {
  if (v.snap && v.snap.human === "duplicator") return v; // side is forced
  if (!v.shapes || v.snap?.status !== "awaiting-colouring") return { ...v, draftSide: side };
  const draft: (number | null)[] = new Array(v.shapes[side].size).fill(null);
  draft[0] = 0;
  return { ...v, draftSide: side, draft };
}

export function setDraftColour(v: ViewState, node: number, colour: number): ViewState {
  if (!v.draft || node <= 0 || node >= v.draft.length) return v;
  const draft = [...v.draft];
  draft[node] = colour;
  return { ...v, draft };
}

export function fillDraft(v: ViewState, colour: number): ViewState {
  if (!v.draft) return v;
  const draft = v.draft.map((_, i) => (i === 0 ? 0 : colour));
  return { ...v, draft };
}

export function copyPendingValues(v: ViewState): ViewState {
  const pending = v.snap?.pending;
  if (!v.draft || !pending || pending.type !== "colouring" || !pending.values) return v;
  if (pending.values.length !== v.draft.length) return v;
  return { ...v, draft: [...pending.values] };
}

// Local pre-validation: null means the draft may be submitted.
export function draftProblem(v: ViewState): string | null {
  if (!v.snap || !v.draft) return "no colouring round is open";
  const r = v.snap.r;
  for (let i = 0; i < v.draft.length; i += 1) {
    const c = v.draft[i];
    if (c === null) return `node ${i} has no colour yet`;
    if (i === 0 && c !== 0) return "the root must keep colour 0";
    if (i > 0 && (c < 1 || c > r)) return `node ${i}: colour must be in 1..${r}`;
  }
  return null;
}

// --- pebble pre-validation -----------------------------------------------------

export function pebbleProblem(v: ViewState, side: Side, node: number): string | null {
  const s = v.snap;
  if (!s) return "no session";
  if (v.busy) return "a move is already in flight";
  if (s.status === "finished") return "the game is over";
  if (s.status === "awaiting-colouring") return "a colouring round is open, not a pebble round";
  if (!isHumanTurn(v)) return "waiting for the engine";
  const want = requiredSide(v);
  if (want && side !== want) return `reply on ${want}`;
  const shape = shapeOf(v, side);
  if (!shape) return "no session";
  if (node < 0 || node >= shape.size) return `node ${node} is outside 0..${shape.size - 1}`;
  return null;
}

export function colouringProblem(v: ViewState): string | null {
  const s = v.snap;
  if (!s) return "no session";
  if (v.busy) return "a move is already in flight";
  if (s.status === "finished") return "the game is over";
  if (s.status !== "awaiting-colouring") return "no colouring round is open";
  if (!isHumanTurn(v)) return "waiting for the engine";
  return draftProblem(v);
}

// --- derived views -------------------------------------------------------------

// Scale parameters when the engine plays the threshold strategy; they let
// the overlay recompute the close/threat flags locally.
export function scaleOf(v: ViewState): ScaleParams | null {
  const s = v.snap;
  if (!s || s.policy !== "master") return null;
  return scaleFor(s.preset, s.k);
}

// The one verdict the UI ever shows: the service's word, verbatim.
export function uiVerdict(v: ViewState): string | null {
  return v.snap && v.snap.status === "finished" ? v.snap.winner : null;
}

export function transcriptJson(v: ViewState): string {
  if (!v.snap) return "";
  return JSON.stringify(v.snap.transcript, null, 2);
}

// Pending engine move the human still has to answer, if any.
export function pendingReply(v: ViewState): PendingMove | null {
  const s = v.snap;
  if (!s || s.human !== "duplicator") return null;
  return s.pending;
}
