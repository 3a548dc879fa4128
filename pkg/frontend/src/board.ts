import { CardJson, PreferenceJson } from "./types.js";

/** One blank-card widget sitting between two consecutive card columns (the
 * zero-anchor column is implicit below the worst level). */
export type GapKind = "exact" | "range" | "atLeast" | "atMost" | "unknown";

export interface GapWidget {
  kind: GapKind;
  lo?: number;
  hi?: number;
}

export interface Board {
  node: string;
  /** card columns, worst first; each column holds alternative ids */
  columns: string[][];
  /** one widget per column: gaps[0] is the zero-anchor gap */
  gaps: GapWidget[];
  scale: "ratio" | "interval";
}

export function emptyBoard(node: string): Board {
  return { node, columns: [], gaps: [], scale: "ratio" };
}

export function boardErrors(board: Board): string[] {
  const errors: string[] = [];
  if (board.columns.length === 0) errors.push("board is empty");
  if (board.gaps.length !== board.columns.length)
    errors.push("every column needs its blank-card widget");
  const seen = new Set<string>();
  board.columns.forEach((col, i) => {
    if (col.length === 0) errors.push(`column ${i + 1} is empty`);
    for (const id of col) {
      if (seen.has(id)) errors.push(`${id} appears in more than one column`);
      seen.add(id);
    }
  });
  board.gaps.forEach((gap, i) => {
    const at = `gap ${i}`;
    const nonneg = (v: number | undefined) =>
      v === undefined || (Number.isInteger(v) && v >= 0);
    if (!nonneg(gap.lo) || !nonneg(gap.hi))
      errors.push(`${at}: counts must be non-negative integers`);
    if (gap.kind === "exact" && gap.lo === undefined) errors.push(`${at}: missing count`);
    if (gap.kind === "range") {
      if (gap.lo === undefined || gap.hi === undefined)
        errors.push(`${at}: range needs both bounds`);
      else if (gap.lo > gap.hi) errors.push(`${at}: lower bound exceeds upper bound`);
    }
    if (gap.kind === "atLeast" && gap.lo === undefined) errors.push(`${at}: missing lower bound`);
    if (gap.kind === "atMost" && gap.hi === undefined) errors.push(`${at}: missing upper bound`);
  });
  return errors;
}

function gapToCard(gap: GapWidget): CardJson {
  switch (gap.kind) {
    case "exact":
      return { exact: gap.lo! };
    case "range":
      return { lo: gap.lo!, hi: gap.hi! };
    case "atLeast":
      return { lo: gap.lo! };
    case "atMost":
      return { hi: gap.hi! };
    default:
      return {};
  }
}

function cardToGap(card: CardJson): GapWidget {
  if (card.exact !== undefined) return { kind: "exact", lo: card.exact, hi: card.exact };
  if (card.lo !== undefined && card.hi !== undefined)
    return { kind: "range", lo: card.lo, hi: card.hi };
  if (card.lo !== undefined) return { kind: "atLeast", lo: card.lo };
  if (card.hi !== undefined) return { kind: "atMost", hi: card.hi };
  return { kind: "unknown" };
}

/** Board state serializes to exactly the preference JSON the service takes. */
export function serializeBoard(board: Board): PreferenceJson {
  const errors = boardErrors(board);
  if (errors.length > 0) throw new Error(errors.join("; "));
  return PreferenceJson.parse({
    node: board.node,
    levels: board.columns.map((c) => [...c]),
    cards: board.gaps.map(gapToCard),
    scale: board.scale,
    intensity: "cardinal",
  });
}

export function parseBoard(json: unknown): Board {
  const prefs = PreferenceJson.parse(json);
  return {
    node: prefs.node,
    columns: prefs.levels.map((l) => [...l]),
    gaps: prefs.cards.map(cardToGap),
    scale: prefs.scale,
  };
}

/** Move a card between columns (drag-and-drop back end; also the keyboard
 * fallback handler). Returns a new board, never mutates. */
export function moveCard(board: Board, id: string, toColumn: number): Board {
  const columns = board.columns.map((c) => c.filter((x) => x !== id));
  while (columns.length <= toColumn) {
    columns.push([]);
  }
  columns[toColumn] = [...columns[toColumn], id];
  const gaps = [...board.gaps];
  while (gaps.length < columns.length) gaps.push({ kind: "exact", lo: 0, hi: 0 });
  const keep = columns.map((c, i) => ({ c, g: gaps[i] })).filter(({ c }) => c.length > 0);
  return {
    ...board,
    columns: keep.map(({ c }) => c),
    gaps: keep.map(({ g }) => g),
  };
}
