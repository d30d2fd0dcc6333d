// Test harness utilities: boot the Python game service on a free port, and
// replay exported transcripts through the offline referee CLI.
import { spawn, spawnSync, type ChildProcessWithoutNullStreams } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export interface ServiceHandle {
  base: string;
  stop: () => Promise<void>;
}

const BOOT = [
  "import sys, uvicorn",
  "from ehrlab.service import create_app",
  "uvicorn.run(create_app(), host='127.0.0.1', port=int(sys.argv[1]), log_level='warning')",
].join("\n");

async function tryPort(port: number): Promise<ServiceHandle | null> {
  const proc: ChildProcessWithoutNullStreams = spawn("python3", ["-c", BOOT, String(port)], {
    stdio: ["ignore", "pipe", "pipe"],
  });
  let stderr = "";
  proc.stderr.on("data", (d) => {
    stderr += String(d);
  });
  const base = `http://127.0.0.1:${port}`;
  const deadline = Date.now() + 60_000;
  for (;;) {
    if (proc.exitCode !== null) return null; // port taken or import error
    try {
      const res = await fetch(`${base}/sessions/warmup-probe`);
      if (res.status === 404) break;
    } catch {
      // not listening yet
    }
    if (Date.now() > deadline) {
      proc.kill("SIGKILL");
      throw new Error(`service did not come up on :${port}\n${stderr}`);
    }
    await new Promise((r) => setTimeout(r, 150));
  }
  return {
    base,
    stop: () =>
      new Promise<void>((resolve) => {
        proc.once("exit", () => resolve());
        proc.kill("SIGTERM");
        const hammer = setTimeout(() => proc.kill("SIGKILL"), 5_000);
        hammer.unref();
      }),
  };
}

export async function startService(): Promise<ServiceHandle> {
  for (let attempt = 0; attempt < 5; attempt += 1) {
    const port = 8300 + Math.floor(Math.random() * 3000);
    const handle = await tryPort(port);
    if (handle) return handle;
  }
  throw new Error("no free port for the game service");
}

export interface RefereeResult {
  exit: number;
  out: string;
}

export function refereeReplay(transcriptJson: string): RefereeResult {
  const dir = mkdtempSync(join(tmpdir(), "ehrlab-ui-"));
  const path = join(dir, "game.json");
  writeFileSync(path, transcriptJson);
  const code =
    "import sys\nfrom ehrlab.cli import main\nsys.exit(main(['referee', '--transcript', sys.argv[1]]))";
  const res = spawnSync("python3", ["-c", code, path], { encoding: "utf8" });
  return { exit: res.status ?? -1, out: (res.stdout ?? "") + (res.stderr ?? "") };
}

// deterministic PRNG for reproducible random-state sweeps
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}
