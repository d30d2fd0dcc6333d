// End-to-end suite against the real Python service: the webui bundle is
// built and mounted, scripted games run through the same state reducers the
// browser uses, exported transcripts replay through the offline referee CLI
// (the verdict shown in the UI must be the referee's verdict, verbatim), and
// the client-side hint arithmetic is checked against the service's flags on
// a sweep of randomly played positions.
import { spawnSync } from "node:child_process";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { ApiError, Client, type Snapshot } from "../src/api.js";
import {
  closeList,
  hintPairs,
  parseTreeLiteral,
  SURROGATE_SCALES,
  threatList,
} from "../src/layout.js";
import {
  colouringProblem,
  fillDraft,
  initialView,
  isHumanTurn,
  otherSide,
  pebbleProblem,
  requiredSide,
  transcriptJson,
  uiVerdict,
  withError,
  withHints,
  withSnapshot,
  type ViewState,
} from "../src/state.js";
import { renderApp } from "../src/render.js";
import { mulberry32, refereeReplay, startService, type ServiceHandle } from "./service.js";

const DEEP24 = "c0" + "(c1".repeat(24) + ")".repeat(24);
const PATH80 = "c0" + "(c1".repeat(80) + ")".repeat(80);
const FORK = "c0(c1,c2(c1))";
const FORK_SWAPPED = "c0(c2(c1),c1)";

let svc: ServiceHandle;
let client: Client;

function refereeWinner(out: string): string | null {
  const m = /winner:\s*(Spoiler|Duplicator)/.exec(out);
  return m ? m[1] : null;
}

beforeAll(async () => {
  // build the bundle first so the service mounts it at /ui
  const root = join(dirname(fileURLToPath(import.meta.url)), "..");
  const build = spawnSync("npm", ["run", "build"], { cwd: root, encoding: "utf8" });
  if (build.status !== 0) {
    throw new Error(`webui build failed:\n${build.stdout}\n${build.stderr}`);
  }
  svc = await startService();
  client = new Client(svc.base);
});

afterAll(async () => {
  if (svc) await svc.stop();
});

describe("static mount", () => {
  it("serves the app shell and modules under /ui", async () => {
    const page = await fetch(`${svc.base}/ui/`);
    expect(page.status).toBe(200);
    const html = await page.text();
    expect(html).toContain('id="app"');
    expect(html).toContain('id="setup"');
    for (const name of ["main.js", "render.js", "state.js", "layout.js", "api.js", "styles.css"]) {
      const res = await fetch(`${svc.base}/ui/${name}`);
      expect(res.status, name).toBe(200);
    }
  });
});

describe("scripted game vs the master engine", () => {
  it("plays set round + pebble to a verdict that matches the offline referee", async () => {
    let v: ViewState = withSnapshot(
      initialView(),
      await client.createSession({
        kind: "ehr",
        t1: DEEP24,
        t2: DEEP24,
        k: 1,
        human: "spoiler",
        policy: "master",
        preset: "surrogate",
      }),
    );
    expect(v.snap!.status).toBe("awaiting-colouring");
    expect(v.draft).not.toBeNull();
    expect(v.draft!.length).toBe(25);

    // set round: colour every non-root node c1
    v = fillDraft(v, 1);
    expect(colouringProblem(v)).toBeNull();
    v = withSnapshot(
      v,
      await client.move(v.snap!.id, { type: "colouring", side: "t1", values: v.draft!.map((c) => c!) }),
    );
    expect(v.snap!.status).toBe("awaiting-move");
    expect(v.snap!.colours1).toEqual(v.snap!.colours2); // engine answered in kind
    expect(isHumanTurn(v)).toBe(true);

    // hint overlay on the fresh position: only the root pair exists, no live anchors
    v = withHints(v, await client.hint(v.snap!.id));
    expect(v.hints!.anchors).toEqual([false]);
    expect(v.hints!.candidates.length).toBe(50);
    const at = (node: number) => v.hints!.candidates.find((c) => c.side === "t1" && c.node === node)!;
    expect(at(0).close).toEqual([0]);
    expect(at(0).case).toBe("CLOSE");
    expect(at(12).close).toEqual([]);
    expect(at(12).case).toBe("NT2");

    // pebble mid-path; the engine must hold the position
    expect(pebbleProblem(v, "t1", 12)).toBeNull();
    v = withSnapshot(v, await client.move(v.snap!.id, { type: "pebble", side: "t1", node: 12 }));
    expect(v.snap!.status).toBe("finished");
    expect(v.snap!.pairs).toEqual([[12, 12]]);
    expect(v.snap!.monitor).toEqual([{ round: 1, violations: [], conditions: [] }]);

    // the verdict in the UI is the service's word, and it must agree with
    // the offline referee replaying the exported transcript
    expect(uiVerdict(v)).toBe("Duplicator");
    expect(renderApp(v)).toContain("<b>Duplicator</b> wins");
    const replay = refereeReplay(transcriptJson(v));
    expect(replay.exit).toBe(0);
    expect(refereeWinner(replay.out)).toBe(uiVerdict(v));

    // hints on a finished game are empty
    const after = await client.hint(v.snap!.id);
    expect(after).toEqual({ candidates: [] });
  });

  it("reports a Spoiler win identically to the referee when the human forces one", async () => {
    let v: ViewState = withSnapshot(
      initialView(),
      await client.createSession({
        kind: "dehr",
        t1: "c0(c1(c1))",
        t2: "c0(c1)",
        k: 1,
        human: "spoiler",
        policy: "minimax",
      }),
    );
    // the deep leaf has no matching reply at distance 2; the engine concedes
    v = withSnapshot(v, await client.move(v.snap!.id, { type: "pebble", side: "t1", node: 2 }));
    expect(v.snap!.status).toBe("finished");
    expect(uiVerdict(v)).toBe("Spoiler");
    expect(renderApp(v)).toContain("<b>Spoiler</b> wins");
    const replay = refereeReplay(transcriptJson(v));
    expect(replay.exit).toBe(1); // negative verdicts exit 1
    expect(refereeWinner(replay.out)).toBe(uiVerdict(v));
  });
});

describe("playing the duplicator", () => {
  it("answers a pending engine pebble guided by win-preserving hints", async () => {
    let v: ViewState = withSnapshot(
      initialView(),
      await client.createSession({
        kind: "dehr",
        t1: FORK,
        t2: FORK_SWAPPED,
        k: 1,
        human: "duplicator",
        policy: "minimax",
        seed: 5,
      }),
    );
    expect(v.snap!.pending).not.toBeNull();
    expect(v.snap!.pending!.type).toBe("pebble");
    expect(isHumanTurn(v)).toBe(true);
    const reply = requiredSide(v)!;
    expect(reply).toBe(otherSide(v.snap!.pending!.side));

    v = withHints(v, await client.hint(v.snap!.id));
    expect(v.hints!.reply_to).toEqual(v.snap!.pending);
    const good = v.hints!.candidates.filter((c) => c.preserves_win);
    expect(good.length).toBeGreaterThan(0); // the trees are isomorphic
    expect(good.every((c) => c.side === reply)).toBe(true);

    expect(pebbleProblem(v, otherSide(reply), good[0].node)).toBe(`reply on ${reply}`);
    v = withSnapshot(
      v,
      await client.move(v.snap!.id, { type: "pebble", side: reply, node: good[0].node }),
    );
    expect(v.snap!.status).toBe("finished");
    expect(uiVerdict(v)).toBe("Duplicator");
    const replay = refereeReplay(transcriptJson(v));
    expect(replay.exit).toBe(0);
    expect(refereeWinner(replay.out)).toBe(uiVerdict(v));
  });
});

describe("hint overlay parity", () => {
  it("recomputes the service's close/threat flags on 20 random master positions", async () => {
    const scale = SURROGATE_SCALES[2];
    const shapes = { t1: parseTreeLiteral(PATH80), t2: parseTreeLiteral(PATH80) };
    let checked = 0;
    let threatening = 0;
    for (let trial = 0; trial < 20; trial += 1) {
      const rnd = mulberry32(20260819 + trial);
      let v: ViewState = withSnapshot(
        initialView(),
        await client.createSession({
          kind: "ehr",
          t1: PATH80,
          t2: PATH80,
          k: 2,
          human: "spoiler",
          policy: "master",
          preset: "surrogate",
        }),
      );
      v = fillDraft(v, 1);
      v = withSnapshot(
        v,
        await client.move(v.snap!.id, {
          type: "colouring",
          side: "t1",
          values: v.draft!.map((c) => c!),
        }),
      );

      // one random pebble, then ask for hints on the resulting position
      const side = rnd() < 0.5 ? "t1" : "t2";
      const node = Math.floor(rnd() * 81);
      expect(pebbleProblem(v, side, node)).toBeNull();
      v = withSnapshot(v, await client.move(v.snap!.id, { type: "pebble", side, node }));
      expect(v.snap!.status).toBe("awaiting-move"); // k=2: one round left
      v = withHints(v, await client.hint(v.snap!.id));

      const hints = v.hints!;
      const snap: Snapshot = v.snap!;
      expect(hints.anchors).toBeDefined();
      expect(hints.anchors!.length).toBe(snap.pairs.length + 1);
      const pairs = hintPairs(snap.pairs);
      expect(hints.candidates.length).toBe(162);
      for (const cand of hints.candidates) {
        const a = cand.side === "t1" ? 0 : 1;
        const shape = shapes[cand.side];
        expect(cand.close, `${trial}:${cand.side}:${cand.node}`).toEqual(
          closeList(shape, cand.node, pairs, a, scale),
        );
        expect(cand.threatens, `${trial}:${cand.side}:${cand.node}`).toEqual(
          threatList(shape, cand.node, pairs, a, hints.anchors!, scale),
        );
        expect(cand.case).toBeTruthy();
        expect(cand.case).not.toMatch(/^error:/);
        checked += 1;
        if (cand.threatens!.length) threatening += 1;
      }
    }
    expect(checked).toBe(20 * 162);
    expect(threatening).toBeGreaterThan(0); // the sweep exercises live threats
  });
});

describe("error surfaces", () => {
  it("shows the service's rule text when a move is rejected", async () => {
    const snap = await client.createSession({
      kind: "dehr",
      t1: FORK,
      t2: FORK_SWAPPED,
      k: 1,
      human: "spoiler",
      policy: "minimax",
    });
    let v = withSnapshot(initialView(), snap);
    // local guard catches range errors before any request is made
    expect(pebbleProblem(v, "t1", 999)).toMatch(/outside 0\.\.3/);
    // the service's own rejection text lands in the error box verbatim
    let detail = "";
    try {
      await client.move(snap.id, { type: "colouring", side: "t1", values: [0, 1, 2, 1] });
    } catch (err) {
      expect(err).toBeInstanceOf(ApiError);
      expect((err as ApiError).status).toBe(400);
      detail = (err as ApiError).detail;
    }
    expect(detail).toContain("no colouring round");
    v = withError(v, detail);
    const html = renderApp(v);
    expect(html).toContain('id="error"');
    expect(html).toContain("no colouring round");
  });
});
