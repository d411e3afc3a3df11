// Builds a demo data directory and spawns a trampkit service for the API
// round-trip tests. The base URL is handed to tests via an env var.

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";

const REPO_ROOT = resolve(__dirname, "..", "..");

let proc: ChildProcess | null = null;
let workDir: string | null = null;

async function waitForService(url: string, timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    try {
      const res = await fetch(url);
      if (res.ok) return;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) throw new Error(`service at ${url} never came up`);
    await new Promise((r) => setTimeout(r, 250));
  }
}

export default async function setup(): Promise<() => Promise<void>> {
  workDir = mkdtempSync(join(tmpdir(), "trampkit-ui-"));
  execFileSync(
    "python3",
    [
      join(REPO_ROOT, "scripts", "make_demo_data.py"),
      "--out", workDir,
      "--codes", "FTF", "F0S", "S0F",
      "--in-bounces", "1",
      "--seed", "5",
    ],
    { stdio: "inherit" },
  );
  const port = 8900 + (process.pid % 500);
  proc = spawn(
    "python3",
    ["-m", "trampkit.cli", "serve", "--data-dir", join(workDir, "data"), "--port", String(port)],
    { stdio: "ignore" },
  );
  const base = `http://127.0.0.1:${port}`;
  await waitForService(`${base}/api/catalog`);
  process.env.TRAMPKIT_BASE = base;

  return async () => {
    proc?.kill("SIGTERM");
    if (workDir) rmSync(workDir, { recursive: true, force: true });
  };
}
