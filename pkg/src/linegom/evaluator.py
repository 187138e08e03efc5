"""Glue between board, incremental accumulator and the heads.

An Evaluator owns one FeatureAccumulator and follows a board's move stack
through push/pop; evaluate() reads the side-to-move perspective's F' and runs
the heads (quantized by default).
"""

from __future__ import annotations

import numpy as np

from .accumulator import FeatureAccumulator
from .board import Board
from .heads import Evaluation, HeadWeights, evaluate_heads
from .mapping import Codebook


class Evaluator:
    def __init__(self, board: Board, codebook: Codebook, heads: HeadWeights,
                 quantized: bool = True):
        if codebook.cfg != heads.cfg:
            raise ValueError("codebook / head config mismatch")
        self.heads = heads
        self.quantized = quantized
        self.acc = FeatureAccumulator(board, codebook, heads.tensors["dw_w"])
        self.evals = 0

    def push(self, board: Board, row: int, col: int, color: int) -> None:
        """Call right after board.place_move."""
        self.acc.apply_move(board, row, col, color)

    def pop(self) -> None:
        """Call right after board.undo_move."""
        self.acc.undo_move()

    def refresh(self, board: Board) -> None:
        self.acc.refresh(board)

    def evaluate(self, board: Board) -> Evaluation:
        """Value and policy from the side to move's perspective."""
        self.evals += 1
        pi = 0 if board.side_to_move == 1 else 1
        fprime = self.acc.fprime[pi, : self.acc.hw].reshape(board.h, board.w, -1)
        legal = (board.cells == 0).reshape(board.h, board.w)
        return evaluate_heads(fprime, self.heads, legal, self.quantized)
