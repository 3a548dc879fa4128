import { describe, expect, it } from "vitest";

import { closureOf, hasseDiagram } from "../src/hasse.js";

function mulberry32(seed: number) {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** A random reflexive-transitive relation: order alternatives by a random
 * score with ties, relate a -> b iff score(a) >= score(b). */
function randomPreorder(seed: number, n: number): number[][] {
  const rand = mulberry32(seed);
  const score = Array.from({ length: n }, () => Math.floor(rand() * (n / 2 + 1)));
  return Array.from({ length: n }, (_, i) =>
    Array.from({ length: n }, (_, j) => (score[i] >= score[j] ? 1 : 0)));
}

/** Drop randomly chosen comparabilities to make it a partial preorder while
 * keeping transitivity (removes the pair and everything it implied). */
function randomPartialPreorder(seed: number, n: number): number[][] {
  const rand = mulberry32(seed);
  const score = Array.from({ length: n }, () => rand());
  const group = Array.from({ length: n }, () => Math.floor(rand() * 3));
  // two incomparable chains: relate within a chain by score only
  return Array.from({ length: n }, (_, i) =>
    Array.from({ length: n }, (_, j) =>
      i === j || (group[i] === group[j] && score[i] >= score[j]) ? 1 : 0));
}

function oracleReduction(rel: number[][]): Set<string> {
  // cover pairs of the strict quotient order, computed straight from the
  // definition: a covers b iff a > b strictly and nothing fits in between
  const n = rel.length;
  const strict = (a: number, b: number) => rel[a][b] === 1 && rel[b][a] === 0;
  const out = new Set<string>();
  for (let a = 0; a < n; a++) {
    for (let b = 0; b < n; b++) {
      if (!strict(a, b)) continue;
      let covered = false;
      for (let c = 0; c < n && !covered; c++) {
        if (strict(a, c) && strict(c, b)) covered = true;
      }
      if (!covered) out.add(`${a}>${b}`);
    }
  }
  return out;
}

function edgesAsPairs(diagram: ReturnType<typeof hasseDiagram>,
                      names: string[]): Set<string> {
  const index = new Map(names.map((x, i) => [x, i]));
  const out = new Set<string>();
  for (const [a, b] of diagram.edges) {
    for (const x of diagram.classes[a]) {
      for (const y of diagram.classes[b]) {
        out.add(`${index.get(x)}>${index.get(y)}`);
      }
    }
  }
  return out;
}

describe("hasse reduction", () => {
  it("equals the brute-force cover relation on random preorders", () => {
    for (let seed = 1; seed <= 15; seed++) {
      for (const make of [randomPreorder, randomPartialPreorder]) {
        const n = 6;
        const rel = make(seed, n);
        const names = Array.from({ length: n }, (_, i) => `x${i}`);
        const diagram = hasseDiagram(names, rel);
        expect(edgesAsPairs(diagram, names)).toEqual(oracleReduction(rel));
      }
    }
  });

  it("closure of the diagram reproduces the relation exactly", () => {
    for (let seed = 1; seed <= 15; seed++) {
      const rel = randomPartialPreorder(seed, 7);
      const names = Array.from({ length: 7 }, (_, i) => `x${i}`);
      const diagram = hasseDiagram(names, rel);
      expect(closureOf(diagram, names)).toEqual(rel);
    }
  });

  it("a total order reduces to a chain", () => {
    const n = 5;
    const rel = Array.from({ length: n }, (_, i) =>
      Array.from({ length: n }, (_, j) => (i <= j ? 1 : 0)));
    const names = ["a", "b", "c", "d", "e"];
    const diagram = hasseDiagram(names, rel);
    expect(diagram.classes).toHaveLength(n);
    expect(diagram.edges).toHaveLength(n - 1);
  });

  it("mutually necessary alternatives collapse into one node", () => {
    const rel = [
      [1, 1, 1],
      [1, 1, 1],
      [0, 0, 1],
    ];
    const diagram = hasseDiagram(["a", "b", "c"], rel);
    expect(diagram.classes).toContainEqual(["a", "b"]);
    expect(diagram.edges).toHaveLength(1);
  });
});

describe("hasse on a served necessary matrix", () => {
  it("reduction closure reproduces the fixture relation", async () => {
    const { readFileSync } = await import("node:fs");
    const { join, dirname } = await import("node:path");
    const { fileURLToPath } = await import("node:url");
    const here = dirname(fileURLToPath(import.meta.url));
    const csv = readFileSync(
      join(here, "..", "..", "tests", "data", "ror_necessary_g3.csv"), "utf-8");
    const lines = csv.trim().split("\n");
    const names = lines[0].split(",").slice(1);
    const rel = lines.slice(1).map((line) => line.split(",").slice(1).map(Number));
    const diagram = hasseDiagram(names, rel);
    expect(closureOf(diagram, names)).toEqual(rel);
    expect(edgesAsPairs(diagram, names)).toEqual(oracleReduction(rel));
  });
});
