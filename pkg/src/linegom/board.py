"""Game state, rules and Zobrist hashing for freestyle Gomoku on an H x W board.

Freestyle rule: five *or more* consecutive stones in a row win (overlines count).
Zobrist keys are drawn from a PCG64 generator with a fixed seed so that hashes
are reproducible across runs and processes.
"""

from __future__ import annotations

import enum
from typing import Iterable, Optional

import numpy as np

EMPTY, BLACK, WHITE = 0, 1, 2

DIRECTIONS = ((0, 1), (1, 0), (1, 1), (1, -1))

ZOBRIST_SEED = 0x5EED_601D


class GameOutcome(enum.Enum):
    ONGOING = "ongoing"
    BLACK_WIN = "black_win"
    WHITE_WIN = "white_win"
    DRAW = "draw"


class BoardError(Exception):
    pass


class OutOfBoundsError(BoardError):
    pass


class OccupiedCellError(BoardError):
    pass


class GameOverError(BoardError):
    pass


class EmptyHistoryError(BoardError):
    pass


_zobrist_cache: dict[tuple[int, int], tuple[np.ndarray, int]] = {}


def _zobrist_keys(h: int, w: int) -> tuple[np.ndarray, int]:
    """Per-(cell, color) keys plus the side-to-move key for an h x w board."""
    cached = _zobrist_cache.get((h, w))
    if cached is None:
        rng = np.random.Generator(np.random.PCG64(ZOBRIST_SEED + 1_000_003 * h + w))
        keys = rng.integers(0, 2**64, size=(h * w, 3), dtype=np.uint64)
        keys[:, EMPTY] = 0
        side_key = int(rng.integers(0, 2**64, dtype=np.uint64))
        cached = (keys, side_key)
        _zobrist_cache[(h, w)] = cached
    return cached


class Board:
    """Mutable Gomoku position with a move stack and an incremental hash."""

    def __init__(self, h: int = 15, w: int = 15):
        if not (5 <= h <= 32 and 5 <= w <= 32):
            raise ValueError(f"board size {h}x{w} outside supported range [5, 32]")
        self.h = h
        self.w = w
        self.cells = np.zeros(h * w, dtype=np.int8)
        self.side_to_move = BLACK
        self.move_stack: list[tuple[int, int, int]] = []
        self._keys, self._side_key = _zobrist_keys(h, w)
        self.hash = 0
        self._outcome = GameOutcome.ONGOING

    # -- basic accessors ---------------------------------------------------

    def in_bounds(self, row: int, col: int) -> bool:
        return 0 <= row < self.h and 0 <= col < self.w

    def cell(self, row: int, col: int) -> int:
        return int(self.cells[row * self.w + col])

    @property
    def outcome(self) -> GameOutcome:
        return self._outcome

    def clone(self) -> "Board":
        b = Board.__new__(Board)
        b.h, b.w = self.h, self.w
        b.cells = self.cells.copy()
        b.side_to_move = self.side_to_move
        b.move_stack = list(self.move_stack)
        b._keys, b._side_key = self._keys, self._side_key
        b.hash = self.hash
        b._outcome = self._outcome
        return b

    # -- mutation ----------------------------------------------------------

    def place_move(self, row: int, col: int) -> None:
        if self._outcome is not GameOutcome.ONGOING:
            raise GameOverError(f"game already ended: {self._outcome.value}")
        if not self.in_bounds(row, col):
            raise OutOfBoundsError(f"({row},{col}) outside {self.h}x{self.w} board")
        idx = row * self.w + col
        if self.cells[idx] != EMPTY:
            raise OccupiedCellError(f"cell ({row},{col}) is occupied")
        color = self.side_to_move
        self.cells[idx] = color
        self.hash ^= int(self._keys[idx, color]) ^ self._side_key
        self.side_to_move = BLACK + WHITE - color
        self.move_stack.append((row, col, color))
        self._outcome = self.check_win(row, col)

    def undo_move(self) -> tuple[int, int, int]:
        if not self.move_stack:
            raise EmptyHistoryError("no moves to undo")
        row, col, color = self.move_stack.pop()
        idx = row * self.w + col
        self.cells[idx] = EMPTY
        self.hash ^= int(self._keys[idx, color]) ^ self._side_key
        self.side_to_move = color
        self._outcome = GameOutcome.ONGOING
        return row, col, color

    def make_null(self) -> None:
        """Pass the turn (search-only device; stones untouched)."""
        self.side_to_move = BLACK + WHITE - self.side_to_move
        self.hash ^= self._side_key

    def undo_null(self) -> None:
        self.make_null()

    # -- rules -------------------------------------------------------------

    def check_win(self, row: int, col: int) -> GameOutcome:
        """Outcome after the stone at (row, col) was the most recent move.

        Scans only the four lines through the last move; freestyle rule,
        so any run of >= 5 wins.
        """
        color = self.cell(row, col)
        if color != EMPTY:
            for dr, dc in DIRECTIONS:
                run = 1
                for sign in (1, -1):
                    r, c = row + sign * dr, col + sign * dc
                    while self.in_bounds(r, c) and self.cell(r, c) == color:
                        run += 1
                        r += sign * dr
                        c += sign * dc
                if run >= 5:
                    return GameOutcome.BLACK_WIN if color == BLACK else GameOutcome.WHITE_WIN
        if len(self.move_stack) == self.h * self.w:
            return GameOutcome.DRAW
        return GameOutcome.ONGOING

    def compute_hash(self) -> int:
        """From-scratch hash; reference for the incremental one."""
        key = 0
        for idx in np.nonzero(self.cells)[0]:
            key ^= int(self._keys[idx, self.cells[idx]])
        if self.side_to_move == WHITE:
            key ^= self._side_key
        return key

    def legal_moves(self, near_only: bool = False) -> list[tuple[int, int]]:
        """Empty cells, optionally restricted to Chebyshev distance <= 2 of a stone.

        The filtered generator falls back to the full set on an empty board.
        """
        empties = np.nonzero(self.cells == EMPTY)[0]
        if near_only and self.move_stack:
            occ = (self.cells != EMPTY).reshape(self.h, self.w)
            near = np.zeros((self.h, self.w), dtype=bool)
            for dr in range(-2, 3):
                r0, r1 = max(0, -dr), min(self.h, self.h - dr)
                for dc in range(-2, 3):
                    c0, c1 = max(0, -dc), min(self.w, self.w - dc)
                    near[r0:r1, c0:c1] |= occ[r0 + dr:r1 + dr, c0 + dc:c1 + dc]
            empties = empties[near.ravel()[empties]]
        return [(int(i) // self.w, int(i) % self.w) for i in empties]

    # -- text format -------------------------------------------------------

    def to_text(self) -> str:
        sym = {EMPTY: ".", BLACK: "x", WHITE: "o"}
        rows = ["".join(sym[self.cell(r, c)] for c in range(self.w)) for r in range(self.h)]
        rows.append("black" if self.side_to_move == BLACK else "white")
        return "\n".join(rows)

    @classmethod
    def from_text(cls, text: str) -> "Board":
        """Parse the test position format: `.`/`x`/`o` rows plus a side line.

        The move stack is synthesized (stones pushed in row-major order,
        black first within each pair) so undo past the load point is not
        meaningful; hashes and rules are exact.
        """
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        side_line = lines[-1].lower()
        grid = lines[:-1]
        b = cls(len(grid), len(grid[0]))
        rev = {".": EMPTY, "x": BLACK, "o": WHITE}
        blacks, whites = [], []
        for r, line in enumerate(grid):
            for c, ch in enumerate(line):
                color = rev[ch]
                if color == BLACK:
                    blacks.append((r, c))
                elif color == WHITE:
                    whites.append((r, c))
        if not (0 <= len(blacks) - len(whites) <= 1):
            raise ValueError("stone counts not reachable by alternating play")
        for i in range(len(blacks) + len(whites)):
            r, c = blacks[i // 2] if i % 2 == 0 else whites[i // 2]
            b.place_move(r, c)
        want_side = BLACK if side_line.startswith("b") else WHITE
        if b.side_to_move != want_side:
            raise ValueError("side to move inconsistent with stone counts")
        return b


def opponent(color: int) -> int:
    return BLACK + WHITE - color
