"""All-float dense evaluation path, independent of codebook and accumulator.

Used as the oracle for quantization error bounds and for parity checks with
the trainer's graph.  The heads' float flavor accepts a float F' array scaled
by 2048, so this module only has to produce the dense float feature maps.
"""

from __future__ import annotations

import numpy as np

from .accumulator import FPRIME_SCALE
from .board import Board
from .heads import Evaluation, HeadWeights, evaluate_heads
from .mapping import GROUP_NAMES, MappingWeights, mapping_forward_batch, pattern_onehot
from .patterns import DIR_GROUP, geometry, perspective_digits


def dense_feature_map(board: Board, weights: MappingWeights, perspective: int) -> np.ndarray:
    """Float F (post-ReLU aggregation of the four directional features),
    shape (H, W, C)."""
    geom = geometry(board.h, board.w)
    digits = perspective_digits(board.cells, perspective)
    hw = board.h * board.w
    total = np.zeros((hw, weights.cfg.c), dtype=np.float64)
    for d in range(4):
        tensors = weights.groups[GROUP_NAMES[DIR_GROUP[d]]]
        # batch cells sharing a window shape (same base <=> same (L, R))
        shapes: dict[int, list[int]] = {}
        for i in range(hw):
            shapes.setdefault(int(geom.base[d, i]), []).append(i)
        for cells_idx in shapes.values():
            idx = np.array(cells_idx)
            pows = geom.win_pow[d, idx[0]]
            keep = pows > 0
            strips = digits[geom.win_cells[d][idx][:, keep]]
            left = int(keep[:5].sum())
            out = mapping_forward_batch(pattern_onehot(strips), tensors)
            total[idx] += out[:, left, :]
    return np.maximum(total, 0.0).reshape(board.h, board.w, -1)


def dense_processed_map(board: Board, weights: MappingWeights, heads: HeadWeights,
                        perspective: int) -> np.ndarray:
    """Float F': depth-wise 3x3 convolution on the first half of the
    channels, identity on the rest."""
    f = dense_feature_map(board, weights, perspective)
    h, w, c = f.shape
    half = c // 2
    kernel = heads.tensors["dw_w"].astype(np.float64)  # (C/2, 3, 3)
    fp = f.copy()
    conv = np.zeros((h, w, half))
    padded = np.pad(f[:, :, :half], ((1, 1), (1, 1), (0, 0)))
    for m in range(3):
        for n in range(3):
            conv += padded[m:m + h, n:n + w] * kernel[:, m, n]
    fp[:, :, :half] = conv
    return fp


def reference_evaluate(board: Board, weights: MappingWeights, heads: HeadWeights) -> Evaluation:
    """Float end-to-end evaluation for the side to move."""
    fp = dense_processed_map(board, weights, heads, board.side_to_move)
    legal = (board.cells == 0).reshape(board.h, board.w)
    return evaluate_heads(fp * FPRIME_SCALE, heads, legal, quantized=False)
