/** End-to-end against the live Python service: build the global-level
 * imprecise board, submit it, and read a zero-deviation fit back.
 *
 * Skipped unless DORKIT_E2E=1 (the service and its fixture data must be
 * importable from the repository checkout).
 */

import { spawn, ChildProcess } from "node:child_process";
import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { DorkitClient } from "../src/api.js";
import { Board, serializeBoard } from "../src/board.js";

const run = process.env.DORKIT_E2E === "1" ? describe : describe.skip;
const here = dirname(fileURLToPath(import.meta.url));
const repoRoot = join(here, "..", "..");
const PORT = 8471;

let service: ChildProcess | undefined;

async function waitForService(client: DorkitClient) {
  for (let i = 0; i < 100; i++) {
    try {
      await client.createProject(`probe-${i}`);
      return;
    } catch (err: unknown) {
      const status = (err as { status?: number }).status;
      if (status !== undefined && status !== 404) return; // service is up
      await new Promise((r) => setTimeout(r, 200));
    }
  }
  throw new Error("service did not come up");
}

run("live service round trip", () => {
  const client = new DorkitClient(`http://127.0.0.1:${PORT}`);

  beforeAll(async () => {
    const workdir = mkdtempSync(join(tmpdir(), "dorkit-e2e-"));
    service = spawn(
      "python3", ["-m", "dorkit.cli", "serve", "--port", String(PORT), "--root", workdir],
      { cwd: repoRoot, stdio: "ignore" },
    );
    await waitForService(client);
  }, 60_000);

  afterAll(() => {
    service?.kill();
  });

  it("submitting the global imprecise board returns a zero-deviation fit", async () => {
    await client.createProject("grins");
    const nodes: unknown[] = [{ code: "0", parent: null, direction: null }];
    for (const macro of ["g1", "g2", "g3"]) {
      nodes.push({ code: macro, parent: "0", direction: null });
      for (const i of [1, 2, 3]) {
        nodes.push({ code: `${macro}${i}`, parent: macro, direction: "increasing" });
      }
    }
    await client.putHierarchy("grins", nodes);
    const csv = readFileSync(join(repoRoot, "tests", "data", "grins_normalized.csv"), "utf-8");
    await client.putTable("grins", csv);
    await client.putModel("grins", "ws");

    // the published global-level board: worst to best with interval and
    // half-open card counts
    const board: Board = {
      node: "0",
      columns: [["Molise"], ["Liguria"], ["Marche"], ["Friuli-Venezia Giulia"], ["Veneto"]],
      gaps: [
        { kind: "range", lo: 40, hi: 50 },
        { kind: "atMost", hi: 5 },
        { kind: "range", lo: 1, hi: 6 },
        { kind: "atLeast", lo: 7 },
        { kind: "range", lo: 1, hi: 7 },
      ],
      scale: "ratio",
    };
    await client.putPreferences("grins", serializeBoard(board));
    const { run: runId } = await client.startAnalysis("grins", "fit", {});
    await client.awaitRun("grins", runId);
    const { result, stale } = await client.results<{ sigma_bar: number; k: number }>(
      "grins", runId);
    expect(stale).toBe(false);
    expect(result.sigma_bar).toBeLessThanOrEqual(1e-6);
    expect(result.k).toBeGreaterThan(0);
  }, 120_000);

  it("round-trips the stored board through the service verbatim", async () => {
    const stored = await client.getPreferences("grins", "0");
    expect(stored.levels).toEqual(
      [["Molise"], ["Liguria"], ["Marche"], ["Friuli-Venezia Giulia"], ["Veneto"]]);
    expect(stored.cards[0]).toEqual({ lo: 40, hi: 50 });
    expect(stored.cards[1]).toEqual({ hi: 5 });
  });
});
