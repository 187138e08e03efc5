import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { GameView } from "../src/state";
import { FakeServer } from "./fakeServer";

let server: FakeServer;
let view: GameView;

beforeEach(async () => {
  server = new FakeServer();
  view = new GameView(new ApiClient("", server.fetch));
  await view.newGame();
});

describe("GameView", () => {
  it("mirrors the server state after a new game", () => {
    expect(view.gameId).toBe("g1");
    expect(view.state?.toMove).toBe("black");
    expect(view.state?.moves).toEqual([]);
    expect(view.gameOver).toBe(false);
  });

  it("reconciles the mirror from the move response", async () => {
    await view.playMove(7, 7);
    expect(view.state?.moves).toHaveLength(2); // human + engine reply
    expect(view.state?.moves[0]).toEqual({ row: 7, col: 7, color: "black" });
    expect(view.state?.toMove).toBe("black");
    expect(view.analysis?.revision).toBe(view.state?.revision);
  });

  it("sends no request for an occupied cell", async () => {
    await view.playMove(7, 7);
    const before = server.requestCount;
    await view.playMove(7, 7); // occupied by own stone
    await view.playMove(0, 0); // occupied by the engine's reply
    expect(server.requestCount).toBe(before);
  });

  it("sends no request while busy", async () => {
    view.busy = true;
    const before = server.requestCount;
    await view.playMove(7, 7);
    expect(server.requestCount).toBe(before);
    view.busy = false;
  });

  it("shows a 409 inline without touching the mirror", async () => {
    await view.playMove(7, 7);
    const mirror = JSON.stringify(view.state);
    server.forceConflict = true;
    await view.playMove(8, 8);
    expect(view.error).toBe("cell occupied");
    expect(JSON.stringify(view.state)).toBe(mirror);
    // next legal move still goes through and clears the error
    await view.playMove(8, 8);
    expect(view.error).toBeNull();
    expect(view.state?.moves).toHaveLength(4);
  });

  it("undo reverts the human move and the engine reply", async () => {
    await view.playMove(7, 7);
    await view.undo();
    expect(view.state?.moves).toEqual([]);
    expect(view.state?.toMove).toBe("black");
  });

  it("undo with no history sends no request", async () => {
    const before = server.requestCount;
    await view.undo();
    expect(server.requestCount).toBe(before);
  });

  it("drops analysis responses with a stale revision", async () => {
    await view.playMove(7, 7);
    const current = view.analysis;
    server.analysisRevisionOffset = -1;
    await view.refreshAnalysis();
    expect(view.analysis).toBe(current);
  });

  it("clears analysis once the game is over", async () => {
    for (const col of [3, 4, 5, 6, 7]) await view.playMove(7, col);
    expect(view.gameOver).toBe(true);
    expect(view.state?.outcome).toBe("black_win");
    expect(view.analysis).toBeNull();
  });
});
