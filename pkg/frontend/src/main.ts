// DOM bootstrap: a thin event layer over the pure state/render modules.
// Importing this file without a DOM is harmless; wiring only happens when a
// document with the expected mount points exists.

import { ApiError, Client, type MoveRequest, type Side } from "./api.js";
import { parseTreeLiteral } from "./layout.js";
import {
  chooseDraftSide,
  colouringProblem,
  copyPendingValues,
  fillDraft,
  initialView,
  pebbleProblem,
  selectNode,
  setDraftColour,
  toggleHints,
  withBusy,
  withError,
  withHints,
  withSnapshot,
  type ViewState,
} from "./state.js";
import { renderApp } from "./render.js";

export function init(doc: Document): void {
  const app = doc.getElementById("app");
  const form = doc.getElementById("setup") as HTMLFormElement | null;
  if (!app || !form) return;

  const client = new Client(""); // same origin; the service mounts the UI itself
  let view: ViewState = initialView();

  const rerender = () => {
    app.innerHTML = renderApp(view);
  };
  const set = (next: ViewState) => {
    view = next;
    rerender();
  };

  async function run(action: () => Promise<ViewState>): Promise<void> {
    if (view.busy) return;
    set(withBusy(view));
    try {
      set(await action());
    } catch (err) {
      const msg = err instanceof ApiError ? err.detail : String(err);
      set(withError(view, msg));
    }
  }

  function fieldValue(name: string): string {
    const el = form!.elements.namedItem(name) as
      | HTMLInputElement
      | HTMLSelectElement
      | HTMLTextAreaElement
      | null;
    return el ? el.value.trim() : "";
  }

  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const t1 = fieldValue("t1");
    const t2 = fieldValue("t2");
    try {
      parseTreeLiteral(t1);
      parseTreeLiteral(t2);
    } catch (err) {
      set(withError(view, `tree literal: ${err instanceof Error ? err.message : err}`));
      return;
    }
    const designated: [number, number][] = [];
    const desig = fieldValue("designated");
    if (desig) {
      for (const part of desig.split(/[\s,]+/).filter(Boolean)) {
        const m = /^(\d+):(\d+)$/.exec(part);
        if (!m) {
          set(withError(view, `designated pairs look like "a:b a:b", got "${part}"`));
          return;
        }
        designated.push([parseInt(m[1], 10), parseInt(m[2], 10)]);
      }
    }
    const cfg = {
      kind: fieldValue("kind") as "ehr" | "dehr" | "types",
      t1,
      t2,
      k: parseInt(fieldValue("k") || "1", 10),
      m: parseInt(fieldValue("m") || "1", 10),
      human: fieldValue("human") as "spoiler" | "duplicator",
      policy: fieldValue("policy") as "master" | "cluster" | "minimax" | "random" | "mirror",
      preset: fieldValue("preset") as "surrogate" | "paper",
      seed: parseInt(fieldValue("seed") || "0", 10),
      designated,
      ...(fieldValue("r") ? { r: parseInt(fieldValue("r"), 10) } : {}),
    };
    void run(async () => withSnapshot(initialView(), await client.createSession(cfg)));
  });

  function submitPebble(side: Side, node: number): void {
    const problem = pebbleProblem(view, side, node);
    if (problem) {
      set(withError(view, problem));
      return;
    }
    const sid = view.snap!.id;
    void run(async () =>
      withSnapshot(view, await client.move(sid, { type: "pebble", side, node })),
    );
  }

  function submitColouring(): void {
    const problem = colouringProblem(view);
    if (problem) {
      set(withError(view, problem));
      return;
    }
    const sid = view.snap!.id;
    const move: MoveRequest = {
      type: "colouring",
      side: view.draftSide,
      values: view.draft!.map((c) => c!),
    };
    void run(async () => withSnapshot(view, await client.move(sid, move)));
  }

  function cycleDraftColour(node: number): void {
    if (!view.draft || !view.snap || node === 0) return;
    const r = view.snap.r;
    const cur = view.draft[node];
    const next = cur === null || cur >= r ? 1 : cur + 1;
    set(setDraftColour(selectNode(view, view.draftSide, node), node, next));
  }

  app.addEventListener("click", (ev) => {
    const target = ev.target as Element | null;
    if (!target) return;
    const nodeEl = target.closest(".node") as SVGGElement | null;
    if (nodeEl && app.contains(nodeEl)) {
      const side = nodeEl.getAttribute("data-side") as Side;
      const node = parseInt(nodeEl.getAttribute("data-node") ?? "-1", 10);
      if (view.draft !== null && view.snap?.status === "awaiting-colouring") {
        if (side === view.draftSide) {
          cycleDraftColour(node);
        } else if (view.snap.human !== "duplicator") {
          set(chooseDraftSide(selectNode(view, side, node), side));
        } else {
          set(selectNode(view, side, node));
        }
      } else if (view.snap && view.snap.status === "awaiting-move") {
        set(selectNode(view, side, node));
        submitPebble(side, node);
      } else {
        set(selectNode(view, side, node));
      }
      return;
    }
    const el = target.closest("button, a") as HTMLElement | null;
    if (!el) return;
    if (el.id === "submit-colouring") {
      submitColouring();
    } else if (el.id === "copy-pending") {
      set(copyPendingValues(view));
    } else if (el.id === "hint-btn") {
      const sid = view.snap?.id;
      if (sid) void run(async () => withHints(view, await client.hint(sid)));
    } else if (el.id === "hint-toggle") {
      set(toggleHints(view));
    } else if (el.dataset.colour) {
      const sel = view.selected;
      if (sel && sel.side === view.draftSide) {
        set(setDraftColour(view, sel.node, parseInt(el.dataset.colour, 10)));
      }
    } else if (el.dataset.fill) {
      set(fillDraft(view, parseInt(el.dataset.fill, 10)));
    }
  });

  rerender();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  init(document);
}
