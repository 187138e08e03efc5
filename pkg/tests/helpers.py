"""Shared test utilities: a rule-based oracle evaluator, a plain negamax
oracle, and deterministic position generators."""

from __future__ import annotations

import numpy as np

from linegom.alphabeta import MATE, AbSearch, five_points
from linegom.board import Board, GameOutcome
from linegom.heads import Evaluation


class ThreatEvaluator:
    """Deterministic rule-based evaluator standing in for a trained net.

    Value reacts to immediate five threats; policy is seeded noise with a
    bonus on threat cells.  Pure function of the position (board hash), so
    searches that use it are exactly reproducible.
    """

    def __init__(self, policy_boost: bool = True):
        self.evals = 0
        self.policy_boost = policy_boost

    def push(self, board, row, col, color):
        pass

    def pop(self):
        pass

    def refresh(self, board):
        pass

    def evaluate(self, board: Board) -> Evaluation:
        self.evals += 1
        stm = board.side_to_move
        mine = five_points(board, stm)
        theirs = five_points(board, 3 - stm)
        if mine:
            u = 0.95
        elif len(theirs) >= 2:
            u = -0.95
        elif theirs:
            u = -0.4
        else:
            u = ((board.hash % 997) / 997.0 - 0.5) * 0.2
        draw = 0.05
        win = (1 - draw + u) / 2
        loss = (1 - draw - u) / 2
        rng = np.random.Generator(np.random.PCG64(board.hash & 0xFFFFFFFF))
        noise = rng.standard_normal(board.h * board.w)
        if self.policy_boost:
            noise[mine] += 6.0
            noise[theirs] += 4.0
        raw = np.where(board.cells == 0, noise, -np.inf)
        e = np.exp(raw - raw.max())
        policy = (e / e.sum()).reshape(board.h, board.w)
        return Evaluation(win, loss, draw, policy)


def negamax(search: AbSearch, depth: int, alpha: int = -MATE, beta: int = MATE,
            ply: int = 0) -> int:
    """Plain alpha-beta negamax sharing the leaf VCF and evaluator with the
    given AbSearch; oracle for PVS score equality."""
    board = search.board
    if board.outcome is not GameOutcome.ONGOING:
        return 0 if board.outcome is GameOutcome.DRAW else -(MATE - ply)
    if five_points(board, board.side_to_move):
        return MATE - (ply + 1)
    if depth <= 0:
        return search.vcf_search(alpha, beta, ply)
    ev = search._static()
    best = -MATE
    for mv in search.order_moves(ev.policy, None):
        search._make(mv)
        try:
            score = -negamax(search, depth - 1, -beta, -alpha, ply + 1)
        finally:
            search._unmake()
        best = max(best, score)
        alpha = max(alpha, score)
        if alpha >= beta:
            break
    return best


def random_position(rng: np.random.Generator, size: int = 15,
                    plies: tuple[int, int] = (8, 24)) -> Board:
    """Random ongoing midgame position from legal near-stone play."""
    while True:
        b = Board(size, size)
        target = int(rng.integers(plies[0], plies[1] + 1))
        for _ in range(target):
            moves = b.legal_moves(near_only=True)
            b.place_move(*moves[int(rng.integers(len(moves)))])
            if b.outcome is not GameOutcome.ONGOING:
                break
        if b.outcome is GameOutcome.ONGOING:
            return b


def load_suite(path) -> list[Board]:
    """Positions from a text file, separated by lines of dashes."""
    blocks = [blk.strip() for blk in open(path).read().split("---") if blk.strip()]
    return [Board.from_text(blk) for blk in blocks]


def mate_in_one_board() -> Board:
    """Black to move with a single five-completing cell at (7, 6)."""
    b = Board()
    for mv in [(7, 7), (0, 0), (7, 8), (0, 1), (7, 9), (0, 2), (7, 10), (7, 11)]:
        b.place_move(*mv)
    return b
