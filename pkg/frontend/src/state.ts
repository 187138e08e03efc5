/** Client-side game state: a mirror of the server's view plus the latest
 * analysis.  The server is authoritative; every mutating response replaces
 * the mirror wholesale, and the busy flag keeps at most one request in
 * flight per view. */

import { ApiClient, ApiError } from "./api";
import type { AnalysisResponse, Color, GameState } from "./types";

export class GameView {
  gameId: string | null = null;
  state: GameState | null = null;
  analysis: AnalysisResponse | null = null;
  busy = false;
  error: string | null = null;

  constructor(private readonly api: ApiClient) {}

  /** Stone color at a cell, or null if empty; derived from the mirror. */
  stoneAt(row: number, col: number): Color | null {
    if (!this.state) return null;
    for (const m of this.state.moves) {
      if (m.row === row && m.col === col) return m.color;
    }
    return null;
  }

  get gameOver(): boolean {
    return this.state !== null && this.state.outcome !== "ongoing";
  }

  async newGame(size?: number): Promise<void> {
    if (this.busy) return;
    this.busy = true;
    try {
      const resp = await this.api.newGame(size);
      this.gameId = resp.id;
      this.state = resp;
      this.analysis = null;
      this.error = null;
    } finally {
      this.busy = false;
    }
  }

  /** Submit a human move; no request leaves for occupied cells, finished
   * games, or while another request is pending. */
  async playMove(row: number, col: number): Promise<void> {
    if (this.busy || !this.gameId || this.gameOver) return;
    if (this.stoneAt(row, col) !== null) return;
    this.busy = true;
    try {
      const resp = await this.api.move(this.gameId, row, col);
      this.state = resp;
      this.error = null;
    } catch (err) {
      if (err instanceof ApiError) {
        this.error = err.message; // shown inline; mirror left untouched
      } else {
        throw err;
      }
    } finally {
      this.busy = false;
    }
    await this.refreshAnalysis();
  }

  async undo(plies = 2): Promise<void> {
    if (this.busy || !this.gameId || !this.state?.moves.length) return;
    this.busy = true;
    try {
      const resp = await this.api.undo(this.gameId, plies);
      this.state = resp;
      this.error = null;
    } catch (err) {
      if (err instanceof ApiError) {
        this.error = err.message;
      } else {
        throw err;
      }
    } finally {
      this.busy = false;
    }
    await this.refreshAnalysis();
  }

  /** Fetch analysis for the current position; responses tagged with an older
   * revision than the mirror are dropped as stale. */
  async refreshAnalysis(budget?: number, topK?: number): Promise<void> {
    if (this.busy || !this.gameId || !this.state) return;
    if (this.gameOver) {
      this.analysis = null;
      return;
    }
    this.busy = true;
    try {
      const resp = await this.api.analysis(this.gameId, budget, topK);
      if (this.state && resp.revision === this.state.revision) {
        this.analysis = resp;
      }
    } catch (err) {
      if (!(err instanceof ApiError)) throw err;
      this.analysis = null; // e.g. game ended server-side
    } finally {
      this.busy = false;
    }
  }
}
