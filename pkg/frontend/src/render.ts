/** Pure DOM rendering of a GameView: board grid, stones, policy heatmap,
 * principal variation ghosts, value bar, and status banner.  Probabilities
 * are displayed exactly as received (no renormalization). */

import type { GameView } from "./state";
import type { Outcome } from "./types";

const OUTCOME_TEXT: Record<Outcome, string> = {
  ongoing: "",
  black_win: "Black wins",
  white_win: "White wins",
  draw: "Draw",
};

function el(tag: string, className: string, parent: Element): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  parent.appendChild(node);
  return node;
}

export function render(view: GameView, root: HTMLElement): void {
  root.textContent = "";
  renderBanner(view, root);
  renderValueBar(view, root);
  renderBoard(view, root);
}

function renderBanner(view: GameView, root: HTMLElement): void {
  const banner = el("div", "banner", root);
  if (view.state && view.state.outcome !== "ongoing") {
    banner.textContent = OUTCOME_TEXT[view.state.outcome];
  }
  const error = el("div", "error", root);
  if (view.error) error.textContent = view.error;
}

function renderValueBar(view: GameView, root: HTMLElement): void {
  const bar = el("div", "value-bar", root);
  const value = view.analysis?.value;
  for (const key of ["win", "draw", "loss"] as const) {
    const seg = el("span", `segment ${key}`, bar);
    const frac = value ? value[key] : 0;
    seg.style.width = `${frac * 100}%`;
    seg.dataset.prob = String(frac);
  }
}

function renderBoard(view: GameView, root: HTMLElement): void {
  const size = view.state?.size ?? 15;
  const board = el("div", "board", root);
  board.dataset.size = String(size);
  board.style.gridTemplateColumns = `repeat(${size}, 1fr)`;

  const heat = new Map<string, number>();
  for (const p of view.analysis?.policy ?? []) {
    heat.set(`${p.row},${p.col}`, p.prob);
  }
  const ghosts = new Map<string, number>();
  view.analysis?.pv.forEach((cell, i) => {
    ghosts.set(`${cell.row},${cell.col}`, i + 1);
  });

  for (let row = 0; row < size; row++) {
    for (let col = 0; col < size; col++) {
      const cell = el("div", "cell", board);
      cell.dataset.row = String(row);
      cell.dataset.col = String(col);
      const stone = view.stoneAt(row, col);
      const key = `${row},${col}`;
      if (stone) {
        el("span", `stone ${stone}`, cell);
        continue;
      }
      const prob = heat.get(key);
      if (prob !== undefined) {
        const overlay = el("span", "heat", cell);
        overlay.style.opacity = String(prob);
        overlay.dataset.prob = String(prob);
      }
      const ghost = ghosts.get(key);
      if (ghost !== undefined) {
        el("span", "ghost", cell).textContent = String(ghost);
      }
    }
  }
}
