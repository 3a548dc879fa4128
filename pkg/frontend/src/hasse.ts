/** Hasse diagram support: the necessary relation is reflexive and transitive
 * but not antisymmetric, so equivalence classes of mutually-necessary
 * alternatives are collapsed first and the class DAG is transitively
 * reduced. */

export interface HasseDiagram {
  /** equivalence classes of mutually necessary alternatives */
  classes: string[][];
  /** cover edges between class indices: [above, below] */
  edges: [number, number][];
}

export function hasseDiagram(alternatives: string[], necessary: number[][]): HasseDiagram {
  const n = alternatives.length;
  const rel = (i: number, j: number) => necessary[i][j] !== 0;

  const classOf = new Array<number>(n).fill(-1);
  const classes: number[][] = [];
  for (let i = 0; i < n; i++) {
    if (classOf[i] >= 0) continue;
    const members = [i];
    classOf[i] = classes.length;
    for (let j = i + 1; j < n; j++) {
      if (classOf[j] < 0 && rel(i, j) && rel(j, i)) {
        classOf[j] = classes.length;
        members.push(j);
      }
    }
    classes.push(members);
  }
  const m = classes.length;
  const above = (a: number, b: number) => a !== b && rel(classes[a][0], classes[b][0]);
  const edges: [number, number][] = [];
  for (let a = 0; a < m; a++) {
    for (let b = 0; b < m; b++) {
      if (!above(a, b)) continue;
      let covered = false;
      for (let c = 0; c < m && !covered; c++) {
        if (c !== a && c !== b && above(a, c) && above(c, b)) covered = true;
      }
      if (!covered) edges.push([a, b]);
    }
  }
  return {
    classes: classes.map((members) => members.map((i) => alternatives[i])),
    edges,
  };
}

/** Re-expand a diagram to the full relation it encodes (closure of the cover
 * edges plus within-class equivalence); used to verify reductions. */
export function closureOf(diagram: HasseDiagram, alternatives: string[]): number[][] {
  const n = alternatives.length;
  const index = new Map(alternatives.map((a, i) => [a, i]));
  const m = diagram.classes.length;
  const reach: boolean[][] = Array.from({ length: m }, () => new Array(m).fill(false));
  for (let a = 0; a < m; a++) reach[a][a] = true;
  for (const [a, b] of diagram.edges) reach[a][b] = true;
  for (let k = 0; k < m; k++) {
    for (let a = 0; a < m; a++) {
      if (!reach[a][k]) continue;
      for (let b = 0; b < m; b++) {
        if (reach[k][b]) reach[a][b] = true;
      }
    }
  }
  const out: number[][] = Array.from({ length: n }, () => new Array(n).fill(0));
  for (let a = 0; a < m; a++) {
    for (let b = 0; b < m; b++) {
      if (!reach[a][b]) continue;
      for (const x of diagram.classes[a]) {
        for (const y of diagram.classes[b]) {
          out[index.get(x)!][index.get(y)!] = 1;
        }
      }
    }
  }
  return out;
}
