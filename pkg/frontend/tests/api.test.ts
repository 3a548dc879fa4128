import { describe, expect, it, vi } from "vitest";

import { ApiError, DorkitClient } from "../src/api.js";

function fakeFetch(routes: Record<string, () => { status: number; body: unknown }>) {
  return vi.fn(async (url: RequestInfo | URL) => {
    const path = String(url);
    for (const [suffix, handler] of Object.entries(routes)) {
      if (path.endsWith(suffix)) {
        const { status, body } = handler();
        return new Response(JSON.stringify(body), { status });
      }
    }
    return new Response("{}", { status: 404 });
  }) as unknown as typeof fetch;
}

describe("client polling", () => {
  it("polls until the run completes", async () => {
    let calls = 0;
    const client = new DorkitClient("http://x", fakeFetch({
      "/analyses/r1": () => {
        calls += 1;
        return { status: 200, body: { run: "r1", status: calls < 3 ? "running" : "done" } };
      },
    }));
    const meta = await client.awaitRun("p", "r1", 1);
    expect(meta.status).toBe("done");
    expect(calls).toBe(3);
  });

  it("surfaces infeasible runs as a typed 422 error", async () => {
    const client = new DorkitClient("http://x", fakeFetch({
      "/analyses/r2": () => ({
        status: 422, body: { detail: "zero blank-card value at node g1" },
      }),
    }));
    await expect(client.awaitRun("p", "r2", 1)).rejects.toMatchObject({
      status: 422,
      message: expect.stringContaining("blank-card"),
    });
  });

  it("times out when a run never finishes", async () => {
    const client = new DorkitClient("http://x", fakeFetch({
      "/analyses/r3": () => ({ status: 200, body: { run: "r3", status: "running" } }),
    }));
    await expect(client.awaitRun("p", "r3", 1, 25)).rejects.toBeInstanceOf(ApiError);
  });

  it("passes preference JSON through unchanged", async () => {
    const seen: unknown[] = [];
    const impl = vi.fn(async (_url: RequestInfo | URL, init?: RequestInit) => {
      seen.push(JSON.parse(String(init?.body)));
      return new Response("{}", { status: 200 });
    }) as unknown as typeof fetch;
    const client = new DorkitClient("http://x", impl);
    const prefs = {
      node: "0",
      levels: [["a"], ["b"]] as [string, ...string[]][],
      cards: [{ exact: 3 }, { lo: 1, hi: 2 }],
      scale: "ratio" as const,
      intensity: "cardinal" as const,
    };
    await client.putPreferences("p", prefs);
    expect(seen[0]).toEqual(prefs);
  });
});
