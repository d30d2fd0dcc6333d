import { describe, expect, it } from "vitest";
import type { Snapshot } from "../src/api.js";
import {
  chooseDraftSide,
  colouringProblem,
  copyPendingValues,
  draftProblem,
  fillDraft,
  initialView,
  isHumanTurn,
  pebbleProblem,
  requiredSide,
  scaleOf,
  selectNode,
  setDraftColour,
  toggleHints,
  transcriptJson,
  uiVerdict,
  withBusy,
  withError,
  withHints,
  withSnapshot,
} from "../src/state.js";

const FORK = "c0(c1,c2(c1))";
const FORK_SWAPPED = "c0(c2(c1),c1)";

function makeSnap(over: Partial<Snapshot> = {}): Snapshot {
  const base: Snapshot = {
    id: "s1",
    kind: "dehr",
    status: "awaiting-move",
    human: "spoiler",
    policy: "minimax",
    preset: "surrogate",
    k: 2,
    m: 1,
    r: 2,
    rounds_total: 2,
    rounds_played: 0,
    t1: FORK,
    t2: FORK_SWAPPED,
    colours1: [0, 1, 2, 1],
    colours2: [0, 2, 1, 1],
    designated: [],
    pairs: [],
    pending: null,
    monitor: [],
    winner: null,
    problems: [],
    transcript: {
      kind: "dehr",
      r: 2,
      k: 2,
      m: 1,
      t1: FORK,
      t2: FORK_SWAPPED,
      colours1: [0, 1, 2, 1],
      colours2: [0, 2, 1, 1],
      tail1: null,
      tail2: null,
      designated: [],
      pairs: [],
    },
  };
  return { ...base, ...over };
}

describe("withSnapshot", () => {
  it("parses shapes, clears busy/error/hints, logs the session", () => {
    const v0 = withError(withBusy(initialView()), "old trouble");
    const v = withSnapshot(v0, makeSnap());
    expect(v.shapes!.t1.size).toBe(4);
    expect(v.shapes!.t2.colours).toEqual([0, 2, 1, 1]);
    expect(v.busy).toBe(false);
    expect(v.error).toBeNull();
    expect(v.hints).toBeNull();
    expect(v.log.some((e) => e.text.includes("session s1"))).toBe(true);
  });

  it("logs played rounds and the verdict", () => {
    const v1 = withSnapshot(initialView(), makeSnap());
    const v2 = withSnapshot(v1, makeSnap({ pairs: [[2, 1]], rounds_played: 1 }));
    expect(v2.log.at(-1)!.text).toBe("round 1: pebbles on t1:2 and t2:1");
    const v3 = withSnapshot(
      v2,
      makeSnap({
        pairs: [[2, 1]],
        status: "finished",
        winner: "Spoiler",
        problems: ["pair 1: colours differ (2 vs 1)"],
      }),
    );
    const last = v3.log.at(-1)!;
    expect(last.tone).toBe("win");
    expect(last.text).toContain("finished: Spoiler wins");
    expect(last.text).toContain("colours differ");
  });

  it("drops hints on every new snapshot", () => {
    let v = withSnapshot(initialView(), makeSnap());
    v = withHints(v, { candidates: [{ side: "t1", node: 0, close: [0], threatens: [] }] });
    expect(v.hints).not.toBeNull();
    expect(v.showHints).toBe(true);
    v = withSnapshot(v, makeSnap({ pairs: [[0, 0]] }));
    expect(v.hints).toBeNull();
  });
});

describe("turn logic", () => {
  it("spoiler leads whenever nothing is pending", () => {
    const v = withSnapshot(initialView(), makeSnap());
    expect(isHumanTurn(v)).toBe(true);
    expect(requiredSide(v)).toBeNull();
  });

  it("duplicator acts only on a pending engine move, on the other side", () => {
    const idle = withSnapshot(initialView(), makeSnap({ human: "duplicator" }));
    expect(isHumanTurn(idle)).toBe(false);
    const v = withSnapshot(
      initialView(),
      makeSnap({ human: "duplicator", pending: { type: "pebble", side: "t1", node: 2 } }),
    );
    expect(isHumanTurn(v)).toBe(true);
    expect(requiredSide(v)).toBe("t2");
  });

  it("nobody acts after the game finished", () => {
    const v = withSnapshot(
      initialView(),
      makeSnap({ status: "finished", winner: "Duplicator" }),
    );
    expect(isHumanTurn(v)).toBe(false);
  });
});

describe("pebbleProblem", () => {
  it("accepts a legal human pebble", () => {
    const v = withSnapshot(initialView(), makeSnap());
    expect(pebbleProblem(v, "t1", 3)).toBeNull();
  });

  it("flags out-of-range nodes, busy state and finished games", () => {
    const v = withSnapshot(initialView(), makeSnap());
    expect(pebbleProblem(v, "t1", 7)).toMatch(/outside 0\.\.3/);
    expect(pebbleProblem(withBusy(v), "t1", 1)).toMatch(/in flight/);
    const done = withSnapshot(initialView(), makeSnap({ status: "finished", winner: "Spoiler" }));
    expect(pebbleProblem(done, "t1", 1)).toMatch(/over/);
  });

  it("keeps pebbles out of colouring rounds", () => {
    const v = withSnapshot(initialView(), makeSnap({ status: "awaiting-colouring" }));
    expect(pebbleProblem(v, "t1", 1)).toMatch(/colouring round/);
  });

  it("forces the duplicator onto the reply side", () => {
    const v = withSnapshot(
      initialView(),
      makeSnap({ human: "duplicator", pending: { type: "pebble", side: "t1", node: 2 } }),
    );
    expect(pebbleProblem(v, "t1", 1)).toBe("reply on t2");
    expect(pebbleProblem(v, "t2", 1)).toBeNull();
  });
});

describe("colouring drafts", () => {
  const colouringSnap = makeSnap({
    kind: "types",
    status: "awaiting-colouring",
    colours1: null,
    colours2: null,
  });

  it("opens a draft with the root pinned to colour 0", () => {
    const v = withSnapshot(initialView(), colouringSnap);
    expect(v.draft).toEqual([0, null, null, null]);
    expect(draftProblem(v)).toMatch(/node 1 has no colour/);
    expect(colouringProblem(v)).toMatch(/node 1 has no colour/);
  });

  it("fills, edits, and validates colour ranges", () => {
    let v = withSnapshot(initialView(), colouringSnap);
    v = fillDraft(v, 1);
    expect(draftProblem(v)).toBeNull();
    expect(colouringProblem(v)).toBeNull();
    v = setDraftColour(v, 2, 2);
    expect(v.draft).toEqual([0, 1, 2, 1]);
    v = setDraftColour(v, 0, 2); // the root is immutable
    expect(v.draft![0]).toBe(0);
    v = fillDraft(v, 5);
    expect(draftProblem(v)).toMatch(/colour must be in 1\.\.2/);
  });

  it("switching sides restarts the draft at the new size (spoiler only)", () => {
    let v = withSnapshot(
      initialView(),
      makeSnap({
        kind: "types",
        status: "awaiting-colouring",
        t2: "c0(c1)",
        colours1: null,
        colours2: null,
        transcript: { ...colouringSnap.transcript, t2: "c0(c1)" },
      }),
    );
    v = fillDraft(v, 1);
    v = chooseDraftSide(v, "t2");
    expect(v.draftSide).toBe("t2");
    expect(v.draft).toEqual([0, null]);
  });

  it("duplicators reply on the forced side and may copy the engine's values", () => {
    const v = withSnapshot(
      initialView(),
      makeSnap({
        kind: "types",
        status: "awaiting-colouring",
        human: "duplicator",
        colours1: null,
        colours2: null,
        pending: { type: "colouring", side: "t1", values: [0, 1, 2, 1] },
      }),
    );
    expect(v.draftSide).toBe("t2");
    expect(chooseDraftSide(v, "t1").draftSide).toBe("t2");
    const copied = copyPendingValues(v);
    expect(copied.draft).toEqual([0, 1, 2, 1]);
    expect(draftProblem(copied)).toBeNull();
  });
});

describe("derived views", () => {
  it("passes the service verdict through untouched", () => {
    const live = withSnapshot(initialView(), makeSnap());
    expect(uiVerdict(live)).toBeNull();
    const done = withSnapshot(
      initialView(),
      makeSnap({ status: "finished", winner: "Duplicator" }),
    );
    expect(uiVerdict(done)).toBe("Duplicator");
  });

  it("knows the threshold scale only for master-policy sessions", () => {
    const master = withSnapshot(
      initialView(),
      makeSnap({ policy: "master", preset: "surrogate", k: 1 }),
    );
    expect(scaleOf(master)).toEqual({ k: 1, M: 3, D: 12, D0: 48 });
    const paper = withSnapshot(
      initialView(),
      makeSnap({ policy: "master", preset: "paper", k: 1 }),
    );
    expect(scaleOf(paper)).toEqual({ k: 1, M: 27, D: 108, D0: 2700 });
    expect(scaleOf(withSnapshot(initialView(), makeSnap()))).toBeNull();
  });

  it("serializes the transcript as valid JSON", () => {
    const v = withSnapshot(initialView(), makeSnap());
    const parsed = JSON.parse(transcriptJson(v));
    expect(parsed.kind).toBe("dehr");
    expect(parsed.t1).toBe(FORK);
  });

  it("toggles the overlay and records selections", () => {
    let v = withSnapshot(initialView(), makeSnap());
    v = withHints(v, { candidates: [] });
    expect(toggleHints(v).showHints).toBe(false);
    v = selectNode(v, "t2", 3);
    expect(v.selected).toEqual({ side: "t2", node: 3 });
  });
});
