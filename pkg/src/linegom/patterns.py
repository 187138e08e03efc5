"""Directional line-pattern extraction and canonical pattern indexing.

Every cell of the board owns four line windows (horizontal, vertical, and the
two diagonals) spanning offsets -5..+5 along the direction, truncated at the
borders.  A window with L on-board cells on the negative side and R on the
positive side therefore holds L+1+R cells, each Empty / self / opponent, giving

    N = sum_{L=0..5} sum_{R=0..5} 3^(L+1+R) = 397488

distinct patterns per direction group.  Patterns are indexed as

    id = BASE[L][R] + sum_k cells[k] * 3^k

with (L, R) blocks laid out lexicographically starting at (0, 0) and base-3
digits little-endian from the negative end of the window.  Cell digits are
perspective-relative: 0 empty, 1 own stone, 2 opponent stone.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .board import BLACK, DIRECTIONS, Board

MAX_EXT = 5  # window reach on each side of the center cell

# Horizontal/vertical share one mapping, the two diagonals the other.
GROUP_HV, GROUP_DI = 0, 1
DIR_GROUP = (GROUP_HV, GROUP_HV, GROUP_DI, GROUP_DI)


def _base_table() -> np.ndarray:
    base = np.zeros((MAX_EXT + 1, MAX_EXT + 1), dtype=np.int64)
    acc = 0
    for left in range(MAX_EXT + 1):
        for right in range(MAX_EXT + 1):
            base[left, right] = acc
            acc += 3 ** (left + 1 + right)
    return base


BASE = _base_table()
NUM_PATTERNS = int(BASE[MAX_EXT, MAX_EXT] + 3 ** (2 * MAX_EXT + 1))  # 397488
POW3 = 3 ** np.arange(2 * MAX_EXT + 1, dtype=np.int64)


@dataclass(frozen=True)
class LinePattern:
    """Border-truncated window: `cells[left]` is the center cell."""

    left: int
    right: int
    cells: tuple[int, ...]

    def __post_init__(self):
        if not (0 <= self.left <= MAX_EXT and 0 <= self.right <= MAX_EXT):
            raise ValueError("window extents out of range")
        if len(self.cells) != self.left + 1 + self.right:
            raise ValueError("cell count inconsistent with extents")


def pattern_index(p: LinePattern) -> int:
    digits = np.asarray(p.cells, dtype=np.int64)
    return int(BASE[p.left, p.right] + digits @ POW3[: digits.size])


def pattern_decode(pid: int) -> LinePattern:
    """Inverse of pattern_index."""
    if not (0 <= pid < NUM_PATTERNS):
        raise ValueError(f"pattern id {pid} out of range")
    left = right = 0
    for l in range(MAX_EXT + 1):
        for r in range(MAX_EXT + 1):
            if BASE[l, r] <= pid < BASE[l, r] + 3 ** (l + 1 + r):
                left, right = l, r
    rem = pid - int(BASE[left, right])
    cells = []
    for _ in range(left + 1 + right):
        cells.append(rem % 3)
        rem //= 3
    return LinePattern(left, right, tuple(cells))


def extract_pattern(board: Board, row: int, col: int, direction: int,
                    perspective: int = BLACK) -> LinePattern:
    """Line window through (row, col); stones remapped to self=1 / opponent=2."""
    dr, dc = DIRECTIONS[direction]
    cells = []
    left = right = 0
    for k in range(-MAX_EXT, MAX_EXT + 1):
        r, c = row + k * dr, col + k * dc
        if not board.in_bounds(r, c):
            continue
        v = board.cell(r, c)
        if v != 0:
            v = 1 if v == perspective else 2
        cells.append(v)
        if k < 0:
            left += 1
        elif k > 0:
            right += 1
    return LinePattern(left, right, tuple(cells))


def affected_cells(row: int, col: int, h: int = 15, w: int = 15) -> list[tuple[tuple[int, int], int]]:
    """All (cell, direction) pairs whose window contains (row, col).

    At most 4 x 11 pairs; the move cell itself appears once per direction.
    """
    out = []
    for d, (dr, dc) in enumerate(DIRECTIONS):
        for k in range(-MAX_EXT, MAX_EXT + 1):
            r, c = row + k * dr, col + k * dc
            if 0 <= r < h and 0 <= c < w:
                out.append(((r, c), d))
    return out


class PatternGeometry:
    """Precomputed gather tables for vectorized pattern indexing on one board size.

    For each direction d and flat cell index i:
      win_cells[d, i, t]  flat index of window slot t (0 when off-board),
      win_pow[d, i, t]    3^position within the truncated window (0 off-board),
      base[d, i]          BASE[L][R] for that cell's window shape.
    Off-board slots gather cell 0 but contribute nothing since their power is 0.
    """

    def __init__(self, h: int, w: int):
        self.h, self.w = h, w
        hw = h * w
        self.win_cells = np.zeros((4, hw, 11), dtype=np.int64)
        self.win_pow = np.zeros((4, hw, 11), dtype=np.int64)
        self.base = np.zeros((4, hw), dtype=np.int64)
        for d, (dr, dc) in enumerate(DIRECTIONS):
            for r in range(h):
                for c in range(w):
                    i = r * w + c
                    pos = 0
                    left = 0
                    for t, k in enumerate(range(-MAX_EXT, MAX_EXT + 1)):
                        rr, cc = r + k * dr, c + k * dc
                        if 0 <= rr < h and 0 <= cc < w:
                            self.win_cells[d, i, t] = rr * w + cc
                            self.win_pow[d, i, t] = 3 ** pos
                            pos += 1
                            if k < 0:
                                left += 1
                    right = pos - 1 - left
                    self.base[d, i] = BASE[left, right]

        # Per move cell: the affected (cell, dir) entry arrays, used by the
        # incremental evaluator.  aff_cells/aff_dirs run over <= 44 entries;
        # uniq_cells lists each touched cell once (the move cell collapses
        # its four entries).
        self.aff_cells: list[np.ndarray] = []
        self.aff_dirs: list[np.ndarray] = []
        self.uniq_cells: list[np.ndarray] = []
        self.entry_to_uniq: list[np.ndarray] = []
        for r in range(h):
            for c in range(w):
                pairs = affected_cells(r, c, h, w)
                cells = np.array([rr * w + cc for (rr, cc), _ in pairs], dtype=np.int64)
                dirs = np.array([d for _, d in pairs], dtype=np.int64)
                uniq, inv = np.unique(cells, return_inverse=True)
                self.aff_cells.append(cells)
                self.aff_dirs.append(dirs)
                self.uniq_cells.append(uniq)
                self.entry_to_uniq.append(inv)

        # 3x3 neighborhood (for the depth-wise convolution footprint); slot
        # order row-major over (dy, dx) in {-1,0,1}^2, off-board slots point
        # at the trash row `hw`.
        self.neigh = np.full((hw, 9), hw, dtype=np.int64)
        for r in range(h):
            for c in range(w):
                for o, (dy, dx) in enumerate([(y, x) for y in (-1, 0, 1) for x in (-1, 0, 1)]):
                    rr, cc = r + dy, c + dx
                    if 0 <= rr < h and 0 <= cc < w:
                        self.neigh[r * w + c, o] = rr * w + cc

    def index_all(self, digits: np.ndarray) -> np.ndarray:
        """Pattern ids for every (direction, cell): digits is the flat board
        remapped to the evaluating perspective."""
        gathered = digits[self.win_cells]  # (4, hw, 11)
        return self.base + np.einsum("dit,dit->di", gathered, self.win_pow)

    def index_entries(self, digits: np.ndarray, cells: np.ndarray, dirs: np.ndarray) -> np.ndarray:
        """Pattern ids for selected (cell, dir) entries."""
        gathered = digits[self.win_cells[dirs, cells]]  # (n, 11)
        return self.base[dirs, cells] + np.einsum("nt,nt->n", gathered, self.win_pow[dirs, cells])


@lru_cache(maxsize=8)
def geometry(h: int, w: int) -> PatternGeometry:
    return PatternGeometry(h, w)


def perspective_digits(cells: np.ndarray, perspective: int) -> np.ndarray:
    """Remap stone colors to self=1 / opponent=2 for the given perspective."""
    if perspective == BLACK:
        return cells.astype(np.int64)
    out = cells.astype(np.int64)
    stones = out != 0
    out[stones] = 3 - out[stones]
    return out
