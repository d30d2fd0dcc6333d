// HTML/SVG string rendering.  Every function is pure: ViewState in, markup
// out.  The DOM layer swaps innerHTML and delegates events by data
// attributes; the tests assert on the strings directly.

import type { HintCandidate, Side, Snapshot } from "./api.js";
import {
  depthMarker,
  layoutTree,
  type ScaleParams,
  type TreeShape,
} from "./layout.js";
import {
  isHumanTurn,
  pendingReply,
  requiredSide,
  scaleOf,
  shapeOf,
  transcriptJson,
  uiVerdict,
  type ViewState,
} from "./state.js";

export function escapeHtml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

const XS = 56;
const YS = 64;
const R = 15;
const MARGIN = 42;

function colourClass(c: number): string {
  return `pal-${c % 10}`;
}

function candidateMap(v: ViewState, side: Side): Map<number, HintCandidate> {
  const out = new Map<number, HintCandidate>();
  if (v.hints) {
    for (const c of v.hints.candidates) {
      if (c.side === side) out.set(c.node, c);
    }
  }
  return out;
}

function pebbleLabels(snap: Snapshot, side: Side): Map<number, string[]> {
  const a = side === "t1" ? 0 : 1;
  const out = new Map<number, string[]>();
  const push = (node: number, label: string) => {
    const list = out.get(node) ?? [];
    list.push(label);
    out.set(node, list);
  };
  snap.designated.forEach((pair, i) => push(pair[a], `d${i + 1}`));
  snap.pairs.forEach((pair, i) => push(pair[a], `${i + 1}`));
  return out;
}

function nodeTitle(
  v: ViewState,
  side: Side,
  node: number,
  colour: number | null,
  scale: ScaleParams | null,
  cand: HintCandidate | undefined,
): string {
  const shape = shapeOf(v, side)!;
  const bits = [`${side} node ${node}`, colour === null ? "uncoloured" : `colour c${colour}`];
  const d = shape.depths[node];
  bits.push(scale ? `depth ${d}, marker ${depthMarker(d, scale)}` : `depth ${d}`);
  if (cand) {
    if (cand.close !== undefined) bits.push(`close to pairs [${cand.close.join(",")}]`);
    if (cand.threatens !== undefined && cand.threatens.length) {
      bits.push(`threatens pairs [${cand.threatens.join(",")}]`);
    }
    if (cand.case) bits.push(`case ${cand.case}`);
    if (cand.preserves_win !== undefined) {
      bits.push(cand.preserves_win ? "preserves the win" : "loses");
    }
  }
  return bits.join(" · ");
}

export function renderPane(v: ViewState, side: Side): string {
  const snap = v.snap!;
  const shape = shapeOf(v, side)!;
  const pos = layoutTree(shape);
  const scale = scaleOf(v);
  const cands = candidateMap(v, side);
  const labels = pebbleLabels(snap, side);
  const baseColours: (number | null)[] =
    side === "t1"
      ? snap.colours1 ?? shape.colours.map((c) => c)
      : snap.colours2 ?? shape.colours.map((c) => c);
  const editing = v.draft !== null && v.draftSide === side;
  const shown: (number | null)[] = editing ? v.draft! : baseColours;
  const coloured = editing ? v.draft! : side === "t1" ? snap.colours1 : snap.colours2;

  const maxX = Math.max(...pos.map((p) => p.x));
  const maxY = Math.max(...pos.map((p) => p.y));
  const tailRows = shape.lasso ? 1.4 : 0;
  const width = maxX * XS + 2 * MARGIN;
  const height = (maxY + tailRows) * YS + 2 * MARGIN;
  const px = (x: number) => MARGIN + x * XS;
  const py = (y: number) => MARGIN + y * YS;

  const parts: string[] = [];
  parts.push(
    `<svg viewBox="0 0 ${width} ${height}" width="${width}" height="${height}" role="img">`,
  );
  for (let node = 1; node < shape.size; node += 1) {
    const p = shape.parents[node]!;
    parts.push(
      `<line class="edge" x1="${px(pos[p].x)}" y1="${py(pos[p].y)}" x2="${px(pos[node].x)}" y2="${py(pos[node].y)}"/>`,
    );
  }
  if (shape.lasso) {
    const a = shape.lasso.attach;
    const x = px(pos[a].x);
    const y = py(pos[a].y);
    parts.push(
      `<line class="edge lasso-edge" x1="${x}" y1="${y}" x2="${x}" y2="${y + 1.1 * YS}"/>`,
      `<text class="lasso-mark" x="${x}" y="${y + 1.35 * YS}" text-anchor="middle">∞</text>`,
      `<text class="lasso-period" x="${x + 14}" y="${y + 1.35 * YS}">[${shape.lasso.period.map((c) => `c${c}`).join(",")}]</text>`,
    );
  }
  for (let node = 0; node < shape.size; node += 1) {
    const cand = cands.get(node);
    const cls = ["node"];
    const colour = shown[node];
    cls.push(colour === null ? "unset" : colourClass(colour));
    if (v.selected && v.selected.side === side && v.selected.node === node) cls.push("selected");
    if (coloured === v.draft && v.draft && v.draft[node] === null && node > 0) cls.push("todo");
    if (v.showHints && cand) {
      if (cand.preserves_win !== undefined) {
        cls.push(cand.preserves_win ? "hint-win" : "hint-lose");
      }
      if (cand.close !== undefined && cand.close.length === 0) cls.push("hint-far");
      if (cand.threatens !== undefined && cand.threatens.length > 0) cls.push("hint-threat");
    }
    const x = px(pos[node].x);
    const y = py(pos[node].y);
    const title = escapeHtml(nodeTitle(v, side, node, colour, scale, v.showHints ? cand : undefined));
    parts.push(
      `<g class="${cls.join(" ")}" data-side="${side}" data-node="${node}">` +
        `<title>${title}</title>` +
        `<circle cx="${x}" cy="${y}" r="${R}"/>` +
        (colour !== null
          ? `<text class="colour-tag" x="${x}" y="${y + 4}" text-anchor="middle">c${colour}</text>`
          : `<text class="colour-tag" x="${x}" y="${y + 4}" text-anchor="middle">?</text>`) +
        `</g>`,
    );
    const tags = labels.get(node);
    if (tags) {
      parts.push(
        `<text class="pebble" x="${x + R + 3}" y="${y - R + 2}">${tags.join(",")}</text>`,
      );
    }
    if (v.showHints && cand?.case) {
      parts.push(
        `<text class="case-tag" x="${x}" y="${y + R + 14}" text-anchor="middle">${escapeHtml(cand.case)}</text>`,
      );
    }
  }
  parts.push("</svg>");
  return `<section class="pane" id="pane-${side}"><h2>${side}</h2><div class="scroll">${parts.join("")}</div></section>`;
}

// --- side panel pieces ------------------------------------------------------

export function renderStatus(v: ViewState): string {
  const s = v.snap!;
  const turn =
    s.status === "finished"
      ? "game over"
      : isHumanTurn(v)
        ? `your move (${s.status === "awaiting-colouring" ? "colouring" : "pebble"})`
        : "engine to move";
  const want = requiredSide(v);
  return (
    `<div class="status card">` +
    `<div><b>${escapeHtml(s.kind)}</b> · policy ${escapeHtml(s.policy)} · k=${s.k} · m=${s.m} · r=${s.r}</div>` +
    `<div>rounds ${s.rounds_played}/${s.rounds_total} · status <b>${escapeHtml(s.status)}</b></div>` +
    `<div class="turn">${escapeHtml(turn)}${want ? ` on <b>${want}</b>` : ""}</div>` +
    `</div>`
  );
}

export function renderPendingReply(v: ViewState): string {
  const pending = pendingReply(v);
  if (!pending) return "";
  const txt =
    pending.type === "pebble"
      ? `engine pebbled ${pending.side} node ${pending.node}`
      : `engine coloured ${pending.side}`;
  return `<div class="pending card">${escapeHtml(txt)} — reply on the other tree</div>`;
}

export function renderPalette(v: ViewState): string {
  if (!v.draft || !v.snap) return "";
  const r = v.snap.r;
  const swatches: string[] = [];
  for (let c = 1; c <= r; c += 1) {
    swatches.push(
      `<button class="swatch ${colourClass(c)}" data-colour="${c}">c${c}</button>`,
      `<button class="fill" data-fill="${c}">all c${c}</button>`,
    );
  }
  const pend = v.snap.pending;
  const copy =
    v.snap.human === "duplicator" && pend?.type === "colouring" && pend.values
      ? `<button id="copy-pending">copy engine values</button>`
      : "";
  const todo = v.draft.filter((c, i) => i > 0 && c === null).length;
  const note = todo
    ? `<span class="todo-note">${todo} node${todo === 1 ? "" : "s"} left</span>`
    : "";
  return (
    `<div class="palette card" id="palette">` +
    `<div>colour <b>${v.draftSide}</b>: pick a node, then a swatch</div>` +
    `<div class="swatches">${swatches.join("")}${copy}</div>` +
    `<div>${note}<button id="submit-colouring">submit colouring</button></div>` +
    `</div>`
  );
}

export function renderHintLegend(v: ViewState): string {
  if (!v.showHints || !v.hints) return "";
  const bits: string[] = [];
  if (v.hints.note) bits.push(`<div>${escapeHtml(v.hints.note)}</div>`);
  const anchors = v.hints.anchors;
  if (anchors) {
    const live = anchors.flatMap((a, i) => (a ? [i] : []));
    bits.push(
      `<div>live anchors: ${live.length ? `pairs ${live.join(", ")}` : "none"}</div>`,
    );
  }
  const anySpoiler = v.hints.candidates.some((c) => c.close !== undefined);
  const anyDup = v.hints.candidates.some((c) => c.preserves_win !== undefined);
  if (anySpoiler) {
    bits.push(
      `<div class="legend"><span class="chip hint-far">far</span>` +
        `<span class="chip hint-threat">threatens</span>` +
        `<span class="chip">case tag under node</span></div>`,
    );
  }
  if (anyDup) {
    bits.push(
      `<div class="legend"><span class="chip hint-win">preserves win</span>` +
        `<span class="chip hint-lose">loses</span></div>`,
    );
  }
  return `<div class="hints card">${bits.join("")}</div>`;
}

export function renderMonitor(v: ViewState): string {
  const rows = v.snap!.monitor;
  if (!rows.length) return "";
  const body = rows
    .map((row) => {
      const viol = row.violations.length
        ? `<span class="viol">${escapeHtml(row.violations.join("; "))}</span>`
        : "ok";
      const cond = row.conditions?.length ? escapeHtml(row.conditions.join("; ")) : "—";
      return `<tr><td>${row.round}</td><td>${viol}</td><td>${cond}</td></tr>`;
    })
    .join("");
  return (
    `<table class="monitor card"><thead><tr><th>round</th><th>violations</th><th>conditions</th></tr></thead>` +
    `<tbody>${body}</tbody></table>`
  );
}

export function renderBanner(v: ViewState): string {
  const verdict = uiVerdict(v);
  if (verdict === null) return "";
  const s = v.snap!;
  const problems = s.problems.length
    ? `<ul>${s.problems.map((p) => `<li>${escapeHtml(p)}</li>`).join("")}</ul>`
    : "";
  return (
    `<div class="banner ${verdict === "Duplicator" ? "dup" : "spo"}" id="verdict">` +
    `<b>${escapeHtml(verdict)}</b> wins${problems}</div>`
  );
}

export function renderError(v: ViewState): string {
  if (!v.error) return "";
  return `<div class="error card" id="error">${escapeHtml(v.error)}</div>`;
}

export function renderLog(v: ViewState): string {
  if (!v.log.length) return "";
  const items = v.log
    .slice(-12)
    .map((e) => `<li class="${e.tone}">${escapeHtml(e.text)}</li>`)
    .join("");
  return `<details class="card" open><summary>log</summary><ul class="log">${items}</ul></details>`;
}

export function renderTranscript(v: ViewState): string {
  const json = transcriptJson(v);
  if (!json) return "";
  const href = `data:application/json;charset=utf-8,${encodeURIComponent(json)}`;
  return (
    `<details class="card"><summary>transcript</summary>` +
    `<p><a id="download-transcript" href="${href}" download="game.json">download game.json</a>` +
    ` · replay offline: <code>ehrlab referee --transcript game.json</code></p>` +
    `<textarea id="transcript" readonly rows="8">${escapeHtml(json)}</textarea></details>`
  );
}

export function renderApp(v: ViewState): string {
  if (!v.snap) {
    return `<p class="placeholder">No session yet — configure one above and press start.</p>`;
  }
  const busy = v.busy ? `<div class="busy" id="busy">…waiting for the service</div>` : "";
  const hintBtn =
    v.snap.status !== "finished"
      ? `<button id="hint-btn">${v.showHints && v.hints ? "refresh hints" : "show hints"}</button>` +
        (v.hints ? `<button id="hint-toggle">${v.showHints ? "hide overlay" : "show overlay"}</button>` : "")
      : "";
  return (
    `<div class="board">${renderPane(v, "t1")}${renderPane(v, "t2")}</div>` +
    `<aside class="panel">` +
    renderBanner(v) +
    renderError(v) +
    busy +
    renderStatus(v) +
    renderPendingReply(v) +
    renderPalette(v) +
    `<div class="actions card">${hintBtn}</div>` +
    renderHintLegend(v) +
    renderMonitor(v) +
    renderLog(v) +
    renderTranscript(v) +
    `</aside>`
  );
}
