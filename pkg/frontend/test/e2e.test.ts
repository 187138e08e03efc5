import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { render } from "../src/render";
import { GameView } from "../src/state";
import { FakeServer } from "./fakeServer";

let server: FakeServer;
let view: GameView;
let root: HTMLElement;

function redraw(): void {
  render(view, root);
}

beforeEach(async () => {
  server = new FakeServer();
  view = new GameView(new ApiClient("", server.fetch));
  root = document.createElement("div");
  await view.newGame();
  await view.refreshAnalysis();
  redraw();
});

describe("scripted session", () => {
  it("plays a full game to the result banner", async () => {
    // the fake engine fills row 0; black walks row 7 to five in a row
    for (const col of [3, 4, 5, 6, 7]) {
      await view.playMove(7, col);
      redraw();
    }
    expect(view.state?.outcome).toBe("black_win");
    expect(root.querySelector(".banner")?.textContent).toBe("Black wins");
    // mirror matches the server: 5 black + 4 engine stones
    expect(view.state?.moves).toHaveLength(9);
    expect(root.querySelectorAll(".stone.black")).toHaveLength(5);
    expect(root.querySelectorAll(".stone.white")).toHaveLength(4);
    expect(root.querySelectorAll(".heat")).toHaveLength(0); // no stale overlay
  });

  it("renders overlays that match the server JSON exactly", async () => {
    await view.playMove(7, 7);
    redraw();
    const resp = await (
      await server.fetch("/game/g1/analysis?top_k=10")
    ).json();
    const heat = [...root.querySelectorAll<HTMLElement>(".cell")]
      .filter((c) => c.querySelector(".heat"))
      .map((c) => ({
        row: Number(c.dataset.row),
        col: Number(c.dataset.col),
        prob: Number(c.querySelector<HTMLElement>(".heat")!.dataset.prob),
      }));
    expect(heat).toEqual(resp.policy);
    const segments = ["win", "draw", "loss"].map((k) =>
      Number(root.querySelector<HTMLElement>(`.segment.${k}`)!.dataset.prob),
    );
    expect(segments).toEqual([resp.value.win, resp.value.draw, resp.value.loss]);
    const ghosts = [...root.querySelectorAll(".ghost")].length;
    expect(ghosts).toBe(resp.pv.length);
  });

  it("survives an illegal-move rejection without desync", async () => {
    await view.playMove(7, 7);
    server.forceConflict = true;
    await view.playMove(8, 8);
    redraw();
    expect(root.querySelector(".error")?.textContent).toBe("cell occupied");
    // board unchanged by the rejection
    expect(root.querySelectorAll(".stone")).toHaveLength(2);
    // play on: the mirror still tracks the authoritative server state
    await view.playMove(8, 8);
    redraw();
    const serverMoves = server.games.get("g1")!.moves;
    expect(view.state?.moves).toEqual(serverMoves);
    expect(root.querySelectorAll(".stone")).toHaveLength(serverMoves.length);
    expect(root.querySelector(".error")?.textContent).toBe("");
  });
});
