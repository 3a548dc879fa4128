import { hasseDiagram } from "./hasse.js";
import { RorResult, SmaaNodeReport } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, cls?: string, text?: string): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

function heatColor(v: number): string {
  // 0 -> white, 100 -> deep blue
  const t = Math.max(0, Math.min(1, v / 100));
  const ch = Math.round(255 - 175 * t);
  return `rgb(${ch - Math.round(40 * t)}, ${ch}, 255)`;
}

export function renderRaiHeatmap(report: SmaaNodeReport): HTMLElement {
  const wrap = el("div", "panel rai-heatmap");
  wrap.appendChild(el("h3", undefined, `Rank acceptability — node ${report.node}`));
  const table = el("table", "heatmap");
  const head = el("tr");
  head.appendChild(el("th"));
  report.alternatives.forEach((_, v) => head.appendChild(el("th", undefined, String(v + 1))));
  table.appendChild(head);
  report.alternatives.forEach((a, i) => {
    const row = el("tr");
    row.appendChild(el("th", undefined, a));
    report.rai[i].forEach((value) => {
      const cell = el("td", "cell", value > 0 ? value.toFixed(value >= 99.995 ? 0 : 1) : "");
      cell.style.background = heatColor(value);
      row.appendChild(cell);
    });
    table.appendChild(row);
  });
  wrap.appendChild(table);
  return wrap;
}

export interface WhatIfHook {
  (better: string, worse: string): void;
}

export function renderPwiMatrix(report: SmaaNodeReport, onDoubtful?: WhatIfHook): HTMLElement {
  const wrap = el("div", "panel pwi-matrix");
  wrap.appendChild(el("h3", undefined, `Pairwise winning — node ${report.node}`));
  const table = el("table", "matrix");
  const head = el("tr");
  head.appendChild(el("th"));
  report.alternatives.forEach((a) => head.appendChild(el("th", undefined, a.slice(0, 3))));
  table.appendChild(head);
  report.alternatives.forEach((a, i) => {
    const row = el("tr");
    row.appendChild(el("th", undefined, a));
    report.alternatives.forEach((b, j) => {
      const v = report.pwi[i][j];
      const cell = el("td", "cell", i === j ? "" : v.toFixed(1));
      const doubtful = i !== j && v > 20 && v < 80;
      if (doubtful) {
        cell.classList.add("doubtful");
        cell.title = `${a} beats ${b} only ${v.toFixed(1)}% of the time — click to pre-fill a what-if comparison`;
        if (onDoubtful) cell.addEventListener("click", () => onDoubtful(a, b));
      }
      row.appendChild(cell);
    });
    table.appendChild(row);
  });
  wrap.appendChild(table);
  return wrap;
}

export function renderExpectedRanking(report: SmaaNodeReport): HTMLElement {
  const wrap = el("div", "panel er-list");
  wrap.appendChild(el("h3", undefined, `Expected ranking — node ${report.node}`));
  const list = el("ol");
  report.expected_order.forEach((a) => {
    list.appendChild(el("li", undefined, `${a} (${report.expected_rank[a].toFixed(2)})`));
  });
  wrap.appendChild(list);
  return wrap;
}

export function renderHasse(result: RorResult): HTMLElement {
  const wrap = el("div", "panel hasse");
  wrap.appendChild(el("h3", undefined, `Necessary preference — node ${result.node}`));
  const diagram = hasseDiagram(result.alternatives, result.necessary);
  // longest-path layering of the class DAG
  const m = diagram.classes.length;
  const layer = new Array(m).fill(0);
  let changed = true;
  while (changed) {
    changed = false;
    for (const [aboveIdx, belowIdx] of diagram.edges) {
      if (layer[belowIdx] < layer[aboveIdx] + 1) {
        layer[belowIdx] = layer[aboveIdx] + 1;
        changed = true;
      }
    }
  }
  const depth = Math.max(...layer, 0) + 1;
  const byLayer: number[][] = Array.from({ length: depth }, () => []);
  layer.forEach((d, c) => byLayer[d].push(c));
  const width = Math.max(...byLayer.map((l) => l.length)) * 170 + 40;
  const height = depth * 90 + 40;
  const svgNs = "http://www.w3.org/2000/svg";
  const svg = document.createElementNS(svgNs, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "hasse-svg");
  const pos = new Map<number, [number, number]>();
  byLayer.forEach((classesAt, d) => {
    classesAt.forEach((c, i) => {
      pos.set(c, [40 + i * 170 + 60, 40 + d * 90]);
    });
  });
  for (const [a, b] of diagram.edges) {
    const [x1, y1] = pos.get(a)!;
    const [x2, y2] = pos.get(b)!;
    const line = document.createElementNS(svgNs, "line");
    line.setAttribute("x1", String(x1));
    line.setAttribute("y1", String(y1 + 12));
    line.setAttribute("x2", String(x2));
    line.setAttribute("y2", String(y2 - 12));
    line.setAttribute("stroke", "#666");
    svg.appendChild(line);
  }
  diagram.classes.forEach((members, c) => {
    const [x, y] = pos.get(c)!;
    const label = document.createElementNS(svgNs, "text");
    label.setAttribute("x", String(x));
    label.setAttribute("y", String(y));
    label.setAttribute("text-anchor", "middle");
    label.textContent = members.join(" ~ ");
    svg.appendChild(label);
  });
  wrap.appendChild(svg as unknown as HTMLElement);
  return wrap;
}

export function renderStaleBanner(): HTMLElement {
  return el("div", "banner stale",
            "Inputs changed since this run — results shown are stale. Re-run the analysis.");
}

export function renderFitPanel(result: Record<string, unknown>): HTMLElement {
  const wrap = el("div", "panel fit");
  wrap.appendChild(el("h3", undefined, "Fit"));
  const sigma = (result["sigma_bar"] ?? result["stage1_sigma_bar"]) as number;
  wrap.appendChild(el("p", undefined, `total deviation: ${sigma?.toFixed(6)}`));
  const k = result["k"];
  if (typeof k === "number") {
    wrap.appendChild(el("p", undefined, `blank-card value: ${k.toFixed(6)}`));
  } else if (k && typeof k === "object") {
    for (const [node, value] of Object.entries(k as Record<string, number>)) {
      wrap.appendChild(el("p", undefined, `blank-card value at ${node}: ${value.toFixed(6)}`));
    }
  }
  const caseLabel = result["case"] as string | undefined;
  if (caseLabel) wrap.appendChild(el("p", undefined, `outcome: ${caseLabel}`));
  return wrap;
}

export function renderInfeasiblePanel(message: string,
                                      onRelax: (eta: number) => void): HTMLElement {
  const wrap = el("div", "panel infeasible");
  wrap.appendChild(el("h3", undefined, "The model cannot represent these preferences"));
  wrap.appendChild(el("p", undefined, message));
  wrap.appendChild(el("p", undefined,
    "The blank-card value came out zero. Allow a larger total deviation and refit:"));
  const input = el("input") as HTMLInputElement;
  input.type = "number";
  input.step = "0.01";
  input.min = "0";
  input.value = "0.01";
  const button = el("button", undefined, "refit with wider budget");
  button.addEventListener("click", () => onRelax(Number(input.value)));
  wrap.appendChild(input);
  wrap.appendChild(button);
  return wrap;
}
