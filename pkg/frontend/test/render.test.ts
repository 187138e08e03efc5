import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { render } from "../src/render";
import { GameView } from "../src/state";
import type { AnalysisResponse, GameState } from "../src/types";

function makeView(
  state: Partial<GameState> = {},
  analysis: AnalysisResponse | null = null,
): GameView {
  const view = new GameView(new ApiClient());
  view.state = {
    size: 15,
    board: [],
    toMove: "black",
    moves: [],
    outcome: "ongoing",
    revision: 0,
    ...state,
  };
  view.analysis = analysis;
  return view;
}

function makeAnalysis(partial: Partial<AnalysisResponse>): AnalysisResponse {
  return {
    value: { win: 0.5, loss: 0.3, draw: 0.2 },
    policy: [],
    pv: [],
    bestMove: { row: 0, col: 0 },
    nodes: 1,
    playouts: 0,
    depth: 1,
    revision: 0,
    toMove: "black",
    ...partial,
  };
}

function draw(view: GameView): HTMLElement {
  const root = document.createElement("div");
  render(view, root);
  return root;
}

describe("render", () => {
  it("draws a full grid with stones from the mirror", () => {
    const root = draw(
      makeView({
        moves: [
          { row: 7, col: 7, color: "black" },
          { row: 0, col: 0, color: "white" },
        ],
      }),
    );
    expect(root.querySelectorAll(".cell")).toHaveLength(225);
    const center = root.querySelector('[data-row="7"][data-col="7"] .stone');
    expect(center?.classList.contains("black")).toBe(true);
    expect(root.querySelectorAll(".stone.white")).toHaveLength(1);
  });

  it("uniform policy renders uniform opacity", () => {
    const policy = [0, 1, 2, 3].map((col) => ({ row: 0, col, prob: 0.25 }));
    const root = draw(makeView({}, makeAnalysis({ policy })));
    const opacities = [...root.querySelectorAll<HTMLElement>(".heat")].map(
      (n) => n.style.opacity,
    );
    expect(opacities).toEqual(["0.25", "0.25", "0.25", "0.25"]);
  });

  it("heatmap cells equal the server top-k exactly, probabilities verbatim", () => {
    const policy = [
      { row: 3, col: 4, prob: 0.512345 },
      { row: 9, col: 1, prob: 0.2 },
    ];
    const root = draw(makeView({}, makeAnalysis({ policy })));
    const heat = [...root.querySelectorAll<HTMLElement>(".cell")]
      .filter((c) => c.querySelector(".heat"))
      .map((c) => ({
        row: Number(c.dataset.row),
        col: Number(c.dataset.col),
        prob: Number(c.querySelector<HTMLElement>(".heat")!.dataset.prob),
      }));
    expect(heat).toEqual(policy);
  });

  it("value (1, 0, 0) fills the bar with win", () => {
    const root = draw(
      makeView({}, makeAnalysis({ value: { win: 1, loss: 0, draw: 0 } })),
    );
    expect(root.querySelector<HTMLElement>(".segment.win")!.style.width).toBe("100%");
    expect(root.querySelector<HTMLElement>(".segment.loss")!.style.width).toBe("0%");
  });

  it("numbers principal variation ghosts in order", () => {
    const pv = [
      { row: 5, col: 5 },
      { row: 6, col: 6 },
      { row: 7, col: 7 },
    ];
    const root = draw(makeView({}, makeAnalysis({ pv })));
    const labels = [...root.querySelectorAll(".ghost")].map((n) => n.textContent);
    expect(labels).toEqual(["1", "2", "3"]);
    expect(
      root.querySelector('[data-row="6"][data-col="6"] .ghost')?.textContent,
    ).toBe("2");
  });

  it("shows the outcome banner and inline errors", () => {
    const view = makeView({ outcome: "white_win" });
    view.error = "cell occupied";
    const root = draw(view);
    expect(root.querySelector(".banner")?.textContent).toBe("White wins");
    expect(root.querySelector(".error")?.textContent).toBe("cell occupied");
  });
});
