import { ApiError, DorkitClient } from "./api.js";
import { Board, boardErrors, moveCard, serializeBoard } from "./board.js";
import {
  renderExpectedRanking,
  renderFitPanel,
  renderHasse,
  renderInfeasiblePanel,
  renderPwiMatrix,
  renderRaiHeatmap,
  renderStaleBanner,
} from "./panels.js";
import { RorResult, SmaaNodeReport } from "./types.js";

interface AppState {
  project: string;
  nodes: string[];
  activeNode: string;
  board: Board;
  lastFitRun?: string;
  lastSmaaRun?: string;
  lastRorRun?: string;
}

export class App {
  private state: AppState;

  constructor(private client: DorkitClient, private root: HTMLElement,
              project: string, nodes: string[]) {
    this.state = {
      project,
      nodes,
      activeNode: nodes[0],
      board: { node: nodes[0], columns: [], gaps: [], scale: "ratio" },
    };
  }

  /** Keyboard fallback mirrors drag-and-drop: select a card, pick a column. */
  onMoveCard(id: string, toColumn: number) {
    this.state.board = moveCard(this.state.board, id, toColumn);
    this.renderBoard();
  }

  onGapChange(index: number, gap: Board["gaps"][number]) {
    const gaps = [...this.state.board.gaps];
    gaps[index] = gap;
    this.state.board = { ...this.state.board, gaps };
    this.renderBoard();
  }

  submitEnabled(): boolean {
    return boardErrors(this.state.board).length === 0;
  }

  async submitBoard() {
    const errors = boardErrors(this.state.board);
    if (errors.length > 0) {
      this.showInlineErrors(errors);
      return;
    }
    const prefs = serializeBoard(this.state.board);
    await this.client.putPreferences(this.state.project, prefs);
    await this.runFit({});
  }

  async runFit(options: Record<string, unknown>) {
    const { run } = await this.client.startAnalysis(this.state.project, "fit", options);
    try {
      await this.client.awaitRun(this.state.project, run);
      const { result } = await this.client.results<Record<string, unknown>>(
        this.state.project, run);
      this.state.lastFitRun = run;
      this.showPanel(renderFitPanel(result));
    } catch (err) {
      if (err instanceof ApiError && err.status === 422) {
        this.showPanel(renderInfeasiblePanel(err.message, (eta) => {
          void this.runFit({ ...options, eta });
        }));
        return;
      }
      throw err;
    }
  }

  async refreshResults() {
    const node = this.state.activeNode;
    const smaa = await this.client.startAnalysis(this.state.project, "smaa",
                                                 { node, samples: 20000, seed: 0 });
    const ror = await this.client.startAnalysis(this.state.project, "ror", { node });
    await this.client.awaitRun(this.state.project, smaa.run);
    await this.client.awaitRun(this.state.project, ror.run);
    const panels = document.createDocumentFragment();
    const smaaRes = await this.client.results<{ nodes: Record<string, SmaaNodeReport> }>(
      this.state.project, smaa.run);
    const rorRes = await this.client.results<RorResult>(this.state.project, ror.run);
    if (smaaRes.stale || rorRes.stale) panels.appendChild(renderStaleBanner());
    const report = smaaRes.result.nodes[node] ?? Object.values(smaaRes.result.nodes)[0];
    panels.appendChild(renderRaiHeatmap(report));
    panels.appendChild(renderPwiMatrix(report, (better, worse) => {
      this.prefillWhatIf(better, worse);
    }));
    panels.appendChild(renderExpectedRanking(report));
    panels.appendChild(renderHasse(rorRes.result));
    const container = this.resultsContainer();
    container.replaceChildren(panels);
  }

  /** Clicking a doubtful pairwise cell proposes the corresponding board
   * change: the two alternatives pulled into adjacent columns. */
  prefillWhatIf(better: string, worse: string) {
    let board = this.state.board;
    const col = board.columns.findIndex((c) => c.includes(worse));
    const target = col >= 0 ? col + 1 : board.columns.length;
    board = moveCard(board, better, target);
    this.state.board = board;
    this.renderBoard();
  }

  switchNode(node: string) {
    this.state.activeNode = node;
    void this.refreshResults();
  }

  private resultsContainer(): HTMLElement {
    let container = this.root.querySelector<HTMLElement>(".results");
    if (!container) {
      container = document.createElement("div");
      container.className = "results";
      this.root.appendChild(container);
    }
    return container;
  }

  private showPanel(panel: HTMLElement) {
    this.resultsContainer().prepend(panel);
  }

  private showInlineErrors(errors: string[]) {
    const box = document.createElement("div");
    box.className = "inline-errors";
    for (const e of errors) {
      const p = document.createElement("p");
      p.textContent = e;
      box.appendChild(p);
    }
    this.root.querySelector(".board")?.appendChild(box);
  }

  renderTabs() {
    let tabs = this.root.querySelector<HTMLElement>(".node-tabs");
    if (!tabs) {
      tabs = document.createElement("div");
      tabs.className = "node-tabs";
      this.root.prepend(tabs);
    }
    tabs.replaceChildren();
    for (const node of this.state.nodes) {
      const tab = document.createElement("button");
      tab.className = node === this.state.activeNode ? "tab active" : "tab";
      tab.textContent = node;
      tab.addEventListener("click", () => this.switchNode(node));
      tabs.appendChild(tab);
    }
  }

  renderBoard() {
    this.renderTabs();
    let el = this.root.querySelector<HTMLElement>(".board");
    if (!el) {
      el = document.createElement("div");
      el.className = "board";
      this.root.appendChild(el);
    }
    el.replaceChildren();
    const acceptDrop = (colEl: HTMLElement, index: number) => {
      colEl.addEventListener("dragover", (ev) => ev.preventDefault());
      colEl.addEventListener("drop", (ev) => {
        ev.preventDefault();
        const id = ev.dataTransfer?.getData("text/plain");
        if (id) this.onMoveCard(id, index);
      });
    };
    const anchor = document.createElement("div");
    anchor.className = "column zero";
    anchor.textContent = "zero level";
    el.appendChild(anchor);
    this.state.board.columns.forEach((column, i) => {
      const gap = document.createElement("div");
      gap.className = "gap-widget";
      gap.dataset.index = String(i);
      const g = this.state.board.gaps[i];
      gap.textContent =
        g.kind === "exact" ? `[${g.lo}]`
        : g.kind === "range" ? `[${g.lo}, ${g.hi}]`
        : g.kind === "atLeast" ? `[${g.lo}, ?]`
        : g.kind === "atMost" ? `[?, ${g.hi}]`
        : "[?, ?]";
      el!.appendChild(gap);
      const colEl = document.createElement("div");
      colEl.className = "column";
      colEl.dataset.index = String(i);
      acceptDrop(colEl, i);
      for (const id of column) {
        const card = document.createElement("div");
        card.className = "card";
        card.draggable = true;
        card.tabIndex = 0;
        card.textContent = id;
        card.addEventListener("dragstart", (ev) => {
          ev.dataTransfer?.setData("text/plain", id);
        });
        // keyboard fallback: arrows move the focused card between columns
        card.addEventListener("keydown", (ev) => {
          if (ev.key === "ArrowRight") this.onMoveCard(id, i + 1);
          if (ev.key === "ArrowLeft" && i > 0) this.onMoveCard(id, i - 1);
        });
        colEl.appendChild(card);
      }
      el!.appendChild(colEl);
    });
    const newColumn = document.createElement("div");
    newColumn.className = "column drop-new";
    newColumn.textContent = "drop to add a level";
    acceptDrop(newColumn, this.state.board.columns.length);
    el.appendChild(newColumn);
    const submit = document.createElement("button");
    submit.className = "submit";
    submit.textContent = "submit preferences and fit";
    submit.disabled = !this.submitEnabled();
    submit.addEventListener("click", () => void this.submitBoard());
    el.appendChild(submit);
  }
}
