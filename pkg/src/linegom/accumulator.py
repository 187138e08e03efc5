"""Incrementally maintained quantized feature maps with exact integer undo.

Per perspective (black / white "self" view) the accumulator tracks:

  dir_feat  int16[4][HW][C]   codebook feature of each cell's window per direction
  dir_sum   int16[HW][C]      sum over the 4 directions (pre-ReLU, |.| <= 2048)
  fprime    int32[HW+1][C]    processed map F': channels [0, C/2) are the
                              depth-wise 3x3 convolution of ReLU(dir_sum)
                              (weight scale 64), channels [C/2, C) are
                              ReLU(dir_sum) * 64.  Row HW is a scratch row
                              that absorbs writes for off-board neighbors.

Both F' halves share the fixed-point scale 32 * 64 = 2048.  A stone change
touches at most 4 x 11 windows per perspective; deltas are journaled so undo
replays them in exact integer arithmetic (no drift possible).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .board import BLACK, WHITE, Board
from .mapping import Codebook
from .patterns import DIR_GROUP, PatternGeometry, geometry, perspective_digits

CONV_WEIGHT_SCALE = 64
CONV_WEIGHT_CLAMP = 2.0
FPRIME_SCALE = 32 * CONV_WEIGHT_SCALE  # 2048

PERSPECTIVES = (BLACK, WHITE)


class ConfigMismatchError(ValueError):
    pass


class EmptyJournalError(IndexError):
    pass


def quantize_conv_weights(w: np.ndarray) -> np.ndarray:
    """Depth-wise 3x3 kernel (C/2, 3, 3) float -> int16 with scale 64, |w| <= 2."""
    scaled = np.clip(np.asarray(w, dtype=np.float64), -CONV_WEIGHT_CLAMP, CONV_WEIGHT_CLAMP)
    scaled = scaled * CONV_WEIGHT_SCALE
    return np.copysign(np.floor(np.abs(scaled) + 0.5), scaled).astype(np.int16)


@dataclass
class DeltaRecord:
    move: tuple[int, int, int]  # row, col, color
    cells: np.ndarray           # affected (cell, dir) entries, shared by perspectives
    dirs: np.ndarray
    old_feat: list[np.ndarray]  # per perspective, (n, C) int16
    new_feat: list[np.ndarray]


class FeatureAccumulator:
    """Dual-perspective accumulator over a Codebook for one board size."""

    def __init__(self, board: Board, codebook: Codebook,
                 conv_weights: np.ndarray):
        c = codebook.cfg.c
        if conv_weights.shape != (c // 2, 3, 3):
            raise ConfigMismatchError(
                f"conv kernel shape {conv_weights.shape} != {(c // 2, 3, 3)}")
        self.cfg = codebook.cfg
        self.codebook = codebook
        self.h, self.w = board.h, board.w
        self.hw = board.h * board.w
        self.geom: PatternGeometry = geometry(board.h, board.w)
        self.conv_q = quantize_conv_weights(conv_weights)          # (C/2, 3, 3) int16
        # Scatter form of the convolution: the contribution of F at cell x to
        # F' at x + (dy, dx) uses kernel tap (-dy, -dx), so the 9 slots are
        # reversed relative to the neighbor table's (dy, dx) order.
        self._conv_scatter = self.conv_q.reshape(c // 2, 9)[:, ::-1].T.astype(np.int32)  # (9, C/2)
        self.journal: list[DeltaRecord] = []
        self.dir_feat = np.zeros((2, 4, self.hw, c), dtype=np.int16)
        self.dir_sum = np.zeros((2, self.hw, c), dtype=np.int16)
        self.fprime = np.zeros((2, self.hw + 1, c), dtype=np.int32)
        self.refresh(board)

    # -- full rebuild ------------------------------------------------------

    def refresh(self, board: Board) -> None:
        """From-scratch rebuild; also the ground-truth path the incremental
        updates are tested against."""
        if (board.h, board.w) != (self.h, self.w):
            raise ConfigMismatchError("board size mismatch")
        c = self.cfg.c
        half = c // 2
        for pi, persp in enumerate(PERSPECTIVES):
            digits = perspective_digits(board.cells, persp)
            ids = self.geom.index_all(digits)  # (4, HW)
            for d in range(4):
                self.dir_feat[pi, d] = self.codebook.fetch(DIR_GROUP[d], ids[d])
            self.dir_sum[pi] = self.dir_feat[pi].sum(axis=0, dtype=np.int16)
            relu = np.maximum(self.dir_sum[pi].astype(np.int32), 0)
            fp = self.fprime[pi]
            fp[:] = 0
            # depth-wise conv: scatter each cell's contribution to its 3x3 halo
            contrib = relu[:, None, :half] * self._conv_scatter[None, :, :]  # (HW, 9, C/2)
            np.add.at(fp[:, :half], self.geom.neigh.ravel(),
                      contrib.reshape(-1, half))
            fp[:self.hw, half:] = relu[:, half:] * CONV_WEIGHT_SCALE
            fp[self.hw] = 0
        self.journal.clear()

    # -- incremental updates ----------------------------------------------

    def apply_move(self, board: Board, row: int, col: int, color: int) -> DeltaRecord:
        """Update after the stone (row, col, color) was placed on `board`.

        The board must already contain the stone.  <= 44 codebook lookups per
        perspective.
        """
        mi = row * self.w + col
        cells = self.geom.aff_cells[mi]
        dirs = self.geom.aff_dirs[mi]
        old_feat, new_feat = [], []
        for pi, persp in enumerate(PERSPECTIVES):
            digits = perspective_digits(board.cells, persp)
            ids = self.geom.index_entries(digits, cells, dirs)
            new = np.empty((len(cells), self.cfg.c), dtype=np.int16)
            hv = dirs < 2
            new[hv] = self.codebook.fetch(0, ids[hv])
            new[~hv] = self.codebook.fetch(1, ids[~hv])
            old = self.dir_feat[pi, dirs, cells].copy()
            old_feat.append(old)
            new_feat.append(new)
            self._apply_entry_deltas(pi, mi, cells, dirs, new)
        rec = DeltaRecord((row, col, color), cells, dirs, old_feat, new_feat)
        self.journal.append(rec)
        return rec

    def undo_move(self) -> None:
        if not self.journal:
            raise EmptyJournalError("accumulator journal is empty")
        rec = self.journal.pop()
        for pi in range(2):
            self._apply_entry_deltas(pi, None, rec.cells, rec.dirs, rec.old_feat[pi])

    def _apply_entry_deltas(self, pi: int, mi, cells: np.ndarray, dirs: np.ndarray,
                            new: np.ndarray) -> None:
        """Write per-(cell,dir) features and propagate F deltas into fprime."""
        half = self.cfg.c // 2
        uniq = np.unique(cells)
        old_relu = np.maximum(self.dir_sum[pi, uniq].astype(np.int32), 0)
        delta = new.astype(np.int16) - self.dir_feat[pi, dirs, cells]
        self.dir_feat[pi, dirs, cells] = new
        np.add.at(self.dir_sum[pi], cells, delta)
        new_relu = np.maximum(self.dir_sum[pi, uniq].astype(np.int32), 0)
        df = new_relu - old_relu  # (nu, C) int32
        fp = self.fprime[pi]
        contrib = df[:, None, :half] * self._conv_scatter[None, :, :]
        np.add.at(fp[:, :half], self.geom.neigh[uniq].ravel(), contrib.reshape(-1, half))
        np.add.at(fp[:, half:], uniq, df[:, half:] * CONV_WEIGHT_SCALE)
        fp[self.hw] = 0

    # -- reads -------------------------------------------------------------

    def read_feature_map(self, perspective: int) -> np.ndarray:
        """Snapshot of F' for the given perspective, shape (H, W, C) int32,
        fixed-point scale 2048."""
        pi = PERSPECTIVES.index(perspective)
        return self.fprime[pi, :self.hw].reshape(self.h, self.w, self.cfg.c).copy()

    @property
    def journal_depth(self) -> int:
        return len(self.journal)
