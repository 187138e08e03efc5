"""Self-play match harness: paired color-swapped openings, ELO from score,
Wilson confidence interval, simple text game records.

A crash inside either engine is scored as a loss for the crashing side; the
harness itself keeps running.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Optional

from .board import Board, GameOutcome
from .engine import Engine

Opening = list[tuple[int, int]]


class EngineCrash(Exception):
    def __init__(self, side: str, original: Exception):
        super().__init__(f"engine {side} crashed: {original!r}")
        self.side = side
        self.original = original


def load_openings(path: Optional[str | Path] = None) -> list[Opening]:
    """Opening book: one opening per line, `row,col` pairs; `#` comments."""
    if path is None:
        text = resources.files("linegom").joinpath("data/openings.txt").read_text()
    else:
        text = Path(path).read_text()
    book = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        moves = []
        for token in line.split():
            r_s, c_s = token.split(",")
            moves.append((int(r_s), int(c_s)))
        probe = Board()
        for mv in moves:  # raises on duplicates / out of bounds
            probe.place_move(*mv)
        book.append(moves)
    return book


def elo_difference(score: float) -> float:
    """Score in (0, 1) -> ELO advantage of the scoring side."""
    if not 0.0 < score < 1.0:
        raise ValueError("score must be strictly between 0 and 1")
    return -400.0 * math.log10(1.0 / score - 1.0)


def wilson_interval(successes: float, n: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval; fractional successes accepted (draws count 0.5)."""
    if n == 0:
        return (0.0, 1.0)
    phat = successes / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass
class GameRecord:
    opening: Opening
    a_is_black: bool
    moves: list[tuple[int, int]]
    result: float          # score for engine A: 1 win, 0.5 draw, 0 loss
    termination: str       # "five", "draw", "adjudicated", "crash:a", "crash:b"

    def to_text(self) -> str:
        head = f"[A={'black' if self.a_is_black else 'white'}] [result {self.result}] " \
               f"[{self.termination}]"
        body = " ".join(f"{r},{c}" for r, c in self.moves)
        return f"{head} {body}"


@dataclass
class MatchReport:
    games: list[GameRecord] = field(default_factory=list)

    @property
    def score(self) -> float:
        return sum(g.result for g in self.games)

    @property
    def n(self) -> int:
        return len(self.games)

    def summary(self) -> dict:
        n = self.n
        frac = self.score / n if n else 0.5
        lo, hi = wilson_interval(self.score, n)
        clamp = min(max(frac, 1e-3), 1 - 1e-3)
        elo_lo = elo_difference(min(max(lo, 1e-3), 1 - 1e-3))
        elo_hi = elo_difference(min(max(hi, 1e-3), 1 - 1e-3))
        return {"games": n, "score": self.score, "score_frac": frac,
                "elo": elo_difference(clamp), "elo_ci": (elo_lo, elo_hi),
                "score_ci": (lo, hi)}


def _play_game(black: Engine, white: Engine, opening: Opening,
               budget: Optional[int], move_cap: int) -> tuple[float, str, list]:
    """Returns (score for black, termination, moves)."""
    black.new_game()
    white.new_game()
    moves: list[tuple[int, int]] = []
    for mv in opening:
        black.play(*mv)
        white.play(*mv)
        moves.append(mv)
    while True:
        board = black.board
        if board.outcome is not GameOutcome.ONGOING:
            if board.outcome is GameOutcome.DRAW:
                return 0.5, "draw", moves
            won_by_black = board.outcome is GameOutcome.BLACK_WIN
            return (1.0 if won_by_black else 0.0), "five", moves
        if len(moves) >= move_cap:
            return 0.5, "adjudicated", moves
        mover, side = (black, "black") if board.side_to_move == 1 else (white, "white")
        try:
            result = mover.search(budget=budget)
            mv = result.best_move
        except Exception as exc:  # any engine failure forfeits the game
            raise EngineCrash(side, exc) from exc
        black.play(*mv)
        white.play(*mv)
        moves.append(mv)


def selfplay_match(make_a: Callable[[], Engine], make_b: Callable[[], Engine],
                   book: list[Opening], games: int, budget: Optional[int] = None,
                   move_cap: int = 225) -> MatchReport:
    """Paired games: each opening is played twice with colors swapped."""
    if games % 2:
        raise ValueError("game count must be even (paired color-swapped openings)")
    if not book:
        raise ValueError("opening book is empty")
    engine_a, engine_b = make_a(), make_b()
    report = MatchReport()
    for pair in range(games // 2):
        opening = book[pair % len(book)]
        for a_is_black in (True, False):
            black, white = (engine_a, engine_b) if a_is_black else (engine_b, engine_a)
            try:
                black_score, term, moves = _play_game(black, white, opening,
                                                      budget, move_cap)
                result = black_score if a_is_black else 1.0 - black_score
            except EngineCrash as crash:
                crashed_a = (crash.side == "black") == a_is_black
                result = 0.0 if crashed_a else 1.0
                term = f"crash:{'a' if crashed_a else 'b'}"
                moves = []
            report.games.append(GameRecord(opening, a_is_black, moves, result, term))
    return report
