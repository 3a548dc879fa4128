import { describe, expect, it } from "vitest";

import { Board, boardErrors, moveCard, parseBoard, serializeBoard } from "../src/board.js";

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

function randomBoard(seed: number): Board {
  const rand = mulberry32(seed);
  const nColumns = 1 + Math.floor(rand() * 5);
  const columns: string[][] = [];
  let next = 0;
  for (let i = 0; i < nColumns; i++) {
    const size = 1 + Math.floor(rand() * 3);
    columns.push(Array.from({ length: size }, () => `alt${next++}`));
  }
  const gaps = columns.map(() => {
    const kind = Math.floor(rand() * 5);
    const lo = Math.floor(rand() * 10);
    const hi = lo + Math.floor(rand() * 10);
    switch (kind) {
      case 0: return { kind: "exact" as const, lo, hi: lo };
      case 1: return { kind: "range" as const, lo, hi };
      case 2: return { kind: "atLeast" as const, lo };
      case 3: return { kind: "atMost" as const, hi };
      default: return { kind: "unknown" as const };
    }
  });
  return { node: `n${seed}`, columns, gaps, scale: rand() < 0.5 ? "ratio" : "interval" };
}

describe("board serialization", () => {
  it("round-trips twenty generated structures exactly", () => {
    for (let seed = 1; seed <= 20; seed++) {
      const board = randomBoard(seed);
      const json = serializeBoard(board);
      const back = parseBoard(json);
      expect(back).toEqual(board);
      // and a second pass is byte-identical
      expect(JSON.stringify(serializeBoard(back))).toEqual(JSON.stringify(json));
    }
  });

  it("encodes each widget kind with the service card syntax", () => {
    const board = randomBoard(3);
    board.gaps = [
      { kind: "exact", lo: 5, hi: 5 },
      { kind: "range", lo: 1, hi: 7 },
      { kind: "atLeast", lo: 7 },
      { kind: "atMost", hi: 5 },
      { kind: "unknown" },
    ];
    board.columns = [["a"], ["b"], ["c"], ["d"], ["e"]];
    const json = serializeBoard(board);
    expect(json.cards).toEqual([
      { exact: 5 }, { lo: 1, hi: 7 }, { lo: 7 }, { hi: 5 }, {},
    ]);
  });

  it("rejects lo above hi without building a request", () => {
    const board = randomBoard(4);
    board.gaps[0] = { kind: "range", lo: 9, hi: 2 };
    expect(boardErrors(board).some((e) => e.includes("lower bound exceeds"))).toBe(true);
    expect(() => serializeBoard(board)).toThrow(/lower bound/);
  });

  it("rejects a card placed in two columns", () => {
    const board = randomBoard(5);
    board.columns[0] = [...board.columns[0], board.columns[1][0]];
    expect(boardErrors(board).some((e) => e.includes("more than one column"))).toBe(true);
  });

  it("flags an empty board so submit stays disabled", () => {
    expect(boardErrors({ node: "0", columns: [], gaps: [], scale: "ratio" }).length)
      .toBeGreaterThan(0);
  });
});

describe("card movement", () => {
  it("moves a card and drops emptied columns", () => {
    let board = randomBoard(6);
    board.columns = [["a", "b"], ["c"]];
    board.gaps = [{ kind: "exact", lo: 1, hi: 1 }, { kind: "exact", lo: 2, hi: 2 }];
    board = moveCard(board, "c", 0);
    expect(board.columns).toEqual([["a", "b", "c"]]);
    expect(board.gaps).toHaveLength(1);
  });

  it("creates a new top column when moved past the end", () => {
    let board = randomBoard(7);
    board.columns = [["a"], ["b"]];
    board.gaps = [{ kind: "exact", lo: 0, hi: 0 }, { kind: "exact", lo: 0, hi: 0 }];
    board = moveCard(board, "a", 2);
    expect(board.columns).toEqual([["b"], ["a"]]);
  });
});
