"""Facade tying board, evaluator and both search backends together.

One Engine instance owns one game.  Protocol handlers, the analysis service
and the match harness all speak to this class instead of to the searches
directly, so coordinate conventions and evaluator bookkeeping live in exactly
one place.
"""

from __future__ import annotations

import dataclasses
import functools
from typing import Optional

from .alphabeta import AbSearch, TranspositionTable
from .board import BLACK, WHITE, Board, GameOutcome
from .config import EngineConfig
from .evaluator import Evaluator
from .formats import load_or_bake
from .heads import HeadWeights
from .mapping import Codebook, MappingWeights, NetConfig, bake_codebook
from .mcts import MctsSearch, SearchResult

DEFAULT_SEED = 42
TIME_SAFETY = 0.9  # fraction of the turn budget handed to the search


@functools.lru_cache(maxsize=2)
def default_bundle(kind: str = "test") -> tuple[MappingWeights, HeadWeights, Codebook]:
    """Seeded random net baked once per process; used when no weight file is
    configured.  The test-size net keeps the bake under a few seconds."""
    cfg = NetConfig.test() if kind == "test" else NetConfig.small()
    mapping = MappingWeights.random(cfg, seed=DEFAULT_SEED, scale=0.7)
    heads = HeadWeights.random(cfg, seed=DEFAULT_SEED + 1, scale=0.7)
    return mapping, heads, bake_codebook(mapping)


class Engine:
    def __init__(self, config: EngineConfig | None = None,
                 bundle: tuple[MappingWeights, HeadWeights, Codebook] | None = None):
        self.config = config or EngineConfig()
        if bundle is not None:
            self.mapping, self.heads, self.codebook = bundle
        elif self.config.weights is not None:
            self.mapping, self.heads, self.codebook = load_or_bake(
                self.config.weights, self.config.codebook_cache)
        else:
            self.mapping, self.heads, self.codebook = default_bundle()
        self.board: Board = Board(self.config.board_size, self.config.board_size)
        self.evaluator = Evaluator(self.board, self.codebook, self.heads)
        self.tt = TranspositionTable(self.config.ab.tt_buckets)
        self.time_left_ms: Optional[int] = self.config.match_time_ms

    # -- game state --------------------------------------------------------

    def new_game(self, size: Optional[int] = None) -> None:
        size = size or self.config.board_size
        self.board = Board(size, size)
        self.evaluator = Evaluator(self.board, self.codebook, self.heads)
        self.tt.clear()
        self.time_left_ms = self.config.match_time_ms

    def play(self, row: int, col: int) -> None:
        """Apply one move for the side to move; board errors propagate."""
        self.board.place_move(row, col)
        r, c, color = self.board.move_stack[-1]
        self.evaluator.push(self.board, r, c, color)

    def undo(self) -> tuple[int, int, int]:
        mv = self.board.undo_move()
        self.evaluator.pop()
        return mv

    def load_stones(self, own: list[tuple[int, int]], opp: list[tuple[int, int]],
                    size: Optional[int] = None) -> None:
        """Replace the position; the engine is to move after the call.

        Stone counts must be reachable by alternating play; the engine's
        color follows from them (equal counts: engine plays black).
        """
        self.new_game(size)
        engine_color = BLACK if len(own) == len(opp) else WHITE
        first, second = (own, opp) if engine_color == BLACK else (opp, own)
        if not 0 <= len(first) - len(second) <= 1:
            raise ValueError("stone counts not reachable by alternating play")
        for i in range(len(first) + len(second)):
            r, c = first[i // 2] if i % 2 == 0 else second[i // 2]
            self.play(r, c)

    # -- search ------------------------------------------------------------

    def _turn_budget(self) -> Optional[float]:
        if self.config.turn_time_ms is None:
            return None
        budget = self.config.turn_time_ms / 1000.0
        if self.time_left_ms is not None:
            budget = min(budget, self.time_left_ms / 1000.0 / 20.0 + 0.05)
        return max(budget * TIME_SAFETY - 0.05, 0.01)

    def search(self, budget: Optional[int] = None,
               time_budget: Optional[float] = None) -> SearchResult:
        """Run the configured backend without playing the move.

        `budget` is playouts for MCTS and maximum depth for alpha-beta;
        None uses the configured params."""
        if self.board.outcome is not GameOutcome.ONGOING:
            raise ValueError("game is over")
        if time_budget is None:
            time_budget = self._turn_budget()
        if self.config.backend == "mcts":
            params = self.config.mcts
            if budget is not None or time_budget is not None:
                params = dataclasses.replace(
                    params,
                    playouts=budget if budget is not None else params.playouts,
                    time_limit=time_budget if time_budget is not None else params.time_limit)
            return MctsSearch(self.board, self.evaluator, params).run()
        search = AbSearch(self.board, self.evaluator, self.config.ab, tt=self.tt)
        return search.search_root(max_depth=budget, time_budget=time_budget)

    def genmove(self, budget: Optional[int] = None,
                time_budget: Optional[float] = None) -> tuple[int, int]:
        """Search, play the chosen move and return it (center on an empty board)."""
        if not self.board.move_stack:
            center = (self.board.h // 2, self.board.w // 2)
            self.play(*center)
            return center
        result = self.search(budget, time_budget)
        self.play(*result.best_move)
        return result.best_move

    # -- analysis JSON -----------------------------------------------------

    def analysis(self, budget: Optional[int] = None, top_k: int = 10) -> dict:
        ev = self.evaluator.evaluate(self.board)
        result = self.search(budget, time_budget=None)
        flat = ev.policy.reshape(-1)
        order = flat.argsort()[::-1][:top_k]
        policy = [{"row": int(i) // self.board.w, "col": int(i) % self.board.w,
                   "prob": float(flat[i])}
                  for i in order if flat[i] > 0.0]
        win, loss, draw = result.value
        return {
            "value": {"win": win, "loss": loss, "draw": draw},
            "policy": policy,
            "pv": [{"row": r, "col": c} for r, c in result.pv],
            "bestMove": {"row": result.best_move[0], "col": result.best_move[1]},
            "nodes": result.nodes,
            "playouts": result.playouts,
            "depth": result.depth,
        }

    def state(self) -> dict:
        b = self.board
        return {
            "size": b.h,
            "board": b.to_text().splitlines()[:-1],
            "toMove": "black" if b.side_to_move == BLACK else "white",
            "moves": [{"row": r, "col": c, "color": "black" if color == BLACK else "white"}
                      for r, c, color in b.move_stack],
            "outcome": b.outcome.value,
        }
