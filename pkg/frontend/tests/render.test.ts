import { describe, expect, it } from "vitest";
import type { HintPayload, Snapshot } from "../src/api.js";
import {
  escapeHtml,
  renderApp,
  renderBanner,
  renderMonitor,
  renderPane,
  renderPendingReply,
} from "../src/render.js";
import { initialView, withHints, withSnapshot, type ViewState } from "../src/state.js";

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

function view(over: Partial<Snapshot> = {}): ViewState {
  return withSnapshot(initialView(), makeSnap(over));
}

describe("renderApp", () => {
  it("shows a placeholder before any session exists", () => {
    expect(renderApp(initialView())).toContain("No session yet");
  });

  it("renders both panes with addressable nodes and a status card", () => {
    const html = renderApp(view());
    expect(html).toContain('id="pane-t1"');
    expect(html).toContain('id="pane-t2"');
    expect(html).toContain('data-side="t1" data-node="3"');
    expect(html).toContain('data-side="t2" data-node="3"');
    expect(html).toContain("rounds 0/2");
    expect(html).toContain("your move");
    expect(html).not.toContain('id="verdict"');
  });

  it("marks pebbled pairs with round numbers on both panes", () => {
    const html = renderApp(view({ pairs: [[2, 1]], rounds_played: 1 }));
    expect(html.match(/class="pebble"/g)!.length).toBe(2);
    expect(html).toContain(">1</text>");
  });

  it("labels designated pairs separately", () => {
    const html = renderApp(view({ designated: [[3, 1]] }));
    expect(html).toContain(">d1</text>");
  });
});

describe("verdict banner", () => {
  it("prints the service's winner verbatim with its problem list", () => {
    const v = view({
      status: "finished",
      winner: "Spoiler",
      problems: ["pair 1: colours differ (2 vs 1)", "pairs 0,1: distances differ <t1>"],
    });
    const html = renderBanner(v);
    expect(html).toContain('id="verdict"');
    expect(html).toContain("<b>Spoiler</b> wins");
    expect(html).toContain("colours differ (2 vs 1)");
    expect(html).toContain("distances differ &lt;t1&gt;"); // escaped
    expect(html).toContain('class="banner spo"');
    const dup = renderBanner(view({ status: "finished", winner: "Duplicator" }));
    expect(dup).toContain('class="banner dup"');
    expect(renderBanner(view())).toBe("");
  });
});

describe("colouring palette", () => {
  const colouring = {
    kind: "types",
    status: "awaiting-colouring" as const,
    colours1: null,
    colours2: null,
  };

  it("offers one swatch per non-root colour and counts missing nodes", () => {
    const html = renderApp(view(colouring));
    expect(html).toContain('id="palette"');
    expect(html).toContain('data-colour="1"');
    expect(html).toContain('data-colour="2"');
    expect(html).not.toContain('data-colour="3"');
    expect(html).toContain("3 nodes left");
    expect(html).toContain('id="submit-colouring"');
    expect(html).toContain('class="node unset todo"'); // unfilled nodes are flagged
  });

  it("offers the copy button only to a replying duplicator", () => {
    const dup = view({
      ...colouring,
      human: "duplicator",
      pending: { type: "colouring", side: "t1", values: [0, 1, 2, 1] },
    });
    expect(renderApp(dup)).toContain('id="copy-pending"');
    expect(renderApp(view(colouring))).not.toContain('id="copy-pending"');
  });
});

describe("pending engine move", () => {
  it("tells a duplicator what to answer", () => {
    const v = view({
      human: "duplicator",
      pending: { type: "pebble", side: "t1", node: 2 },
    });
    expect(renderPendingReply(v)).toContain("engine pebbled t1 node 2");
    expect(renderPendingReply(view())).toBe("");
  });
});

describe("hint overlay", () => {
  it("classes far and threatening spoiler candidates and shows case tags", () => {
    const master = view({ policy: "master", k: 1, pairs: [[2, 2]], t2: FORK });
    const hints: HintPayload = {
      candidates: [
        { side: "t1", node: 0, close: [0], threatens: [], case: "CLOSE" },
        { side: "t1", node: 1, close: [], threatens: [], case: "NT2" },
        { side: "t1", node: 3, close: [], threatens: [1], case: "T2" },
      ],
      anchors: [false, true],
    };
    const html = renderPane(withHints(master, hints), "t1");
    const g = (node: number) => {
      const m = html.match(new RegExp(`<g class="([^"]*)" data-side="t1" data-node="${node}"`));
      return m ? m[1] : "";
    };
    expect(g(0)).not.toContain("hint-far");
    expect(g(1)).toContain("hint-far");
    expect(g(3)).toContain("hint-threat");
    expect(html).toContain(">CLOSE</text>");
    expect(html).toContain(">NT2</text>");
    const app = renderApp(withHints(master, hints));
    expect(app).toContain("live anchors: pairs 1");
  });

  it("classes duplicator replies by whether they preserve the win", () => {
    const v = view({
      human: "duplicator",
      pending: { type: "pebble", side: "t1", node: 2 },
    });
    const hints: HintPayload = {
      candidates: [
        { side: "t2", node: 1, preserves_win: true },
        { side: "t2", node: 2, preserves_win: false },
      ],
      reply_to: { type: "pebble", side: "t1", node: 2 },
    };
    const html = renderPane(withHints(v, hints), "t2");
    expect(html).toMatch(/class="[^"]*hint-win[^"]*" data-side="t2" data-node="1"/);
    expect(html).toMatch(/class="[^"]*hint-lose[^"]*" data-side="t2" data-node="2"/);
  });

  it("keeps the overlay off until hints arrive", () => {
    const html = renderPane(view({ policy: "master", k: 1 }), "t1");
    expect(html).not.toContain("hint-far");
    expect(html).not.toContain("case-tag");
  });
});

describe("lasso rendering", () => {
  it("draws the infinite tail as a dashed fold with its period", () => {
    const v = view({
      t1: "c0(c1@[c1,c2])",
      colours1: [0, 1],
      transcript: {
        ...makeSnap().transcript,
        t1: "c0(c1@[c1,c2])",
        colours1: [0, 1],
      },
    });
    const html = renderPane(v, "t1");
    expect(html).toContain("lasso-edge");
    expect(html).toContain("∞");
    expect(html).toContain("[c1,c2]");
  });
});

describe("monitor table", () => {
  it("lists per-round verification results", () => {
    const v = view({
      monitor: [
        { round: 1, violations: [] }, // pair checkers report no conditions
        { round: 2, violations: ["pair 2: colours differ (1 vs 2)"], conditions: ["NT1"] },
      ],
    });
    const html = renderMonitor(v);
    expect(html).toContain("<td>1</td><td>ok</td>");
    expect(html).toContain("colours differ (1 vs 2)");
    expect(html).toContain("NT1");
    expect(renderMonitor(view())).toBe("");
  });
});

describe("transcript block", () => {
  it("embeds the replayable JSON and the referee command line", () => {
    const html = renderApp(view());
    expect(html).toContain('id="transcript"');
    expect(html).toContain("ehrlab referee --transcript game.json");
    expect(html).toContain("download game.json");
  });
});

describe("escapeHtml", () => {
  it("neutralizes markup metacharacters", () => {
    expect(escapeHtml(`<a b="c">&'d'</a>`)).toBe(
      "&lt;a b=&quot;c&quot;&gt;&amp;&#39;d&#39;&lt;/a&gt;",
    );
  });
});
