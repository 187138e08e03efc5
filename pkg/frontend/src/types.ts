/** Wire types mirroring the engine's JSON analysis service. */

export type Color = "black" | "white";
export type Outcome = "ongoing" | "black_win" | "white_win" | "draw";

export interface Cell {
  row: number;
  col: number;
}

export interface Move extends Cell {
  color: Color;
}

export interface ValueTriple {
  win: number;
  loss: number;
  draw: number;
}

export interface GameState {
  size: number;
  board: string[];
  toMove: Color;
  moves: Move[];
  outcome: Outcome;
  revision: number;
}

export interface NewGameResponse extends GameState {
  id: string;
}

export interface MoveResponse extends GameState {
  engineMove: Cell | null;
  value: ValueTriple | null;
}

export interface PolicyEntry extends Cell {
  prob: number;
}

export interface AnalysisResponse {
  value: ValueTriple;
  policy: PolicyEntry[];
  pv: Cell[];
  bestMove: Cell;
  nodes: number;
  playouts: number;
  depth: number;
  revision: number;
  toMove: Color;
}

export interface UndoResponse extends GameState {
  undone: number;
}
