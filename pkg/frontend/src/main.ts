/** Browser entry point: wires clicks and buttons to the GameView. */

import { ApiClient } from "./api";
import { render } from "./render";
import { GameView } from "./state";

export function mount(root: HTMLElement, baseUrl = ""): GameView {
  const view = new GameView(new ApiClient(baseUrl));

  const redraw = () => render(view, root);

  root.addEventListener("click", (ev) => {
    const cell = (ev.target as HTMLElement).closest<HTMLElement>(".cell");
    if (!cell) return;
    const row = Number(cell.dataset.row);
    const col = Number(cell.dataset.col);
    void view.playMove(row, col).then(redraw);
  });

  document.querySelector("#new-game")?.addEventListener("click", () => {
    void view
      .newGame()
      .then(() => view.refreshAnalysis())
      .then(redraw);
  });
  document.querySelector("#undo")?.addEventListener("click", () => {
    void view.undo().then(redraw);
  });

  void view
    .newGame()
    .then(() => view.refreshAnalysis())
    .then(redraw);
  return view;
}

if (typeof document !== "undefined" && document.querySelector("#app")) {
  mount(document.querySelector<HTMLElement>("#app")!);
}
