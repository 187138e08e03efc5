/** Thin typed client for the analysis service; fetch is injectable so tests
 * can substitute an in-memory server. */

import type {
  AnalysisResponse,
  MoveResponse,
  NewGameResponse,
  UndoResponse,
} from "./types";

export type FetchFn = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchFn = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchFn(this.baseUrl + path, init);
    const data = await resp.json();
    if (!resp.ok) {
      throw new ApiError(resp.status, data.error ?? `HTTP ${resp.status}`);
    }
    return data as T;
  }

  newGame(size?: number): Promise<NewGameResponse> {
    return this.request("POST", "/game", size === undefined ? {} : { size });
  }

  move(gameId: string, row: number, col: number): Promise<MoveResponse> {
    return this.request("POST", `/game/${gameId}/move`, { row, col });
  }

  analysis(
    gameId: string,
    budget?: number,
    topK?: number,
  ): Promise<AnalysisResponse> {
    const params = new URLSearchParams();
    if (budget !== undefined) params.set("budget", String(budget));
    if (topK !== undefined) params.set("top_k", String(topK));
    const query = params.size ? `?${params}` : "";
    return this.request("GET", `/game/${gameId}/analysis${query}`);
  }

  undo(gameId: string, plies = 2): Promise<UndoResponse> {
    return this.request("POST", `/game/${gameId}/undo`, { plies });
  }
}
