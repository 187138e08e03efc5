"""Differentiable twin of the engine's evaluation pipeline.

The inference side bakes the mapping network into a pattern codebook and runs
integer arithmetic; training needs gradients, so this module re-expresses the
same computation as dense convolutions over the whole board:

  * each 3-tap line convolution becomes a 3x3 Conv2d whose kernel is zero off
    the direction's axis; zero padding reproduces border truncation because
    cells beyond the edge contribute empty one-hot planes,
  * the four directional feature maps are summed and rectified into F,
  * the first half of the channels passes a depth-wise 3x3 convolution (F'),
  * the float flavors of the policy and value heads run unchanged.

`TrainNet.from_weights` / `to_weights` convert to and from the numpy weight
containers, so a trained net exports straight into the engine's weight file.
"""

from __future__ import annotations

import numpy as np
import torch
import torch.nn.functional as F
from torch import nn

from ..board import DIRECTIONS, Board
from ..heads import HEAD_TENSOR_NAMES, POLICY_MID, HeadWeights, head_tensor_shapes
from ..mapping import (GROUP_NAMES, MAPPING_TENSOR_NAMES, MappingWeights,
                       NetConfig, mapping_tensor_shapes)
from ..patterns import DIR_GROUP, perspective_digits


def _dir_kernel(w3: torch.Tensor, dr: int, dc: int) -> torch.Tensor:
    """Place 3 line taps (O, I, 3) into a masked 3x3 kernel (O, I, 3, 3).

    Tap s reads board offset (s - 1) * (dr, dc); Conv2d cross-correlates, so
    the tap lands at kernel index (1 + (s - 1) * dr, 1 + (s - 1) * dc).
    """
    k = w3.new_zeros(*w3.shape[:2], 3, 3)
    for s in range(3):
        k[:, :, 1 + (s - 1) * dr, 1 + (s - 1) * dc] = w3[:, :, s]
    return k


class MappingGroup(nn.Module):
    """One direction group's mapping stack, shared by its two directions."""

    def __init__(self, cfg: NetConfig):
        super().__init__()
        for name, shape in mapping_tensor_shapes(cfg).items():
            self.register_parameter(name, nn.Parameter(torch.zeros(shape)))

    def forward(self, x: torch.Tensor, dr: int, dc: int) -> torch.Tensor:
        def dconv(h, w3, b):
            return F.conv2d(h, _dir_kernel(w3, dr, dc), b, padding=1)

        def pw(h, w, b):
            return F.conv2d(h, w[:, :, None, None], b)

        h = F.relu(dconv(x, self.dc1_w, self.dc1_b))
        h = h + F.relu(pw(F.relu(dconv(h, self.dc2_w, self.dc2_b)), self.pw1_w, self.pw1_b))
        h = h + F.relu(pw(F.relu(dconv(h, self.dc3_w, self.dc3_b)), self.pw2_w, self.pw2_b))
        h = F.relu(dconv(h, self.dc4_w, self.dc4_b))
        h = F.relu(pw(h, self.pw3_w, self.pw3_b))
        h = F.relu(dconv(h, self.dc5_w, self.dc5_b))
        return pw(h, self.out_w, self.out_b)


def star_block(x: torch.Tensor, p: nn.Module, prefix: str) -> torch.Tensor:
    """Degree-4 multiplicative block on (B, D) vectors."""
    a = F.relu(F.linear(x, getattr(p, f"{prefix}_a_w"), getattr(p, f"{prefix}_a_b")))
    b = F.linear(x, getattr(p, f"{prefix}_b_w"), getattr(p, f"{prefix}_b_b"))
    c = a * b
    d = c[..., 0::2] * c[..., 1::2]
    return F.relu(F.linear(d, getattr(p, f"{prefix}_o_w"), getattr(p, f"{prefix}_o_b")))


def _chunk_bounds(n: int) -> list[tuple[int, int]]:
    edges = [(i * n) // 3 for i in range(4)]
    return [(edges[i], edges[i + 1]) for i in range(3)]


class TrainNet(nn.Module):
    """Full float evaluation graph: planes -> (policy log-probs, value logits)."""

    def __init__(self, cfg: NetConfig):
        super().__init__()
        self.cfg = cfg
        self.groups = nn.ModuleDict({g: MappingGroup(cfg) for g in GROUP_NAMES})
        for name, shape in head_tensor_shapes(cfg).items():
            self.register_parameter(name, nn.Parameter(torch.zeros(shape)))

    def feature_map(self, planes: torch.Tensor) -> torch.Tensor:
        """planes (B, 2, H, W) -> F' (B, C, H, W)."""
        total = 0.0
        for d, (dr, dc) in enumerate(DIRECTIONS):
            total = total + self.groups[GROUP_NAMES[DIR_GROUP[d]]](planes, dr, dc)
        f = F.relu(total)
        half = self.cfg.c // 2
        conv = F.conv2d(f[:, :half], self.dw_w[:, None], padding=1, groups=half)
        return torch.cat([conv, f[:, half:]], dim=1)

    def forward(self, planes: torch.Tensor, legal: torch.Tensor):
        """legal (B, H, W) bool.  Returns policy log-probs (B, H, W) with -inf
        on illegal cells and value logits (B, 3)."""
        fp = self.feature_map(planes)
        g = fp.mean(dim=(2, 3))
        return self.policy_head(fp, g, legal), self.value_head(fp, g)

    def policy_head(self, fp: torch.Tensor, g: torch.Tensor, legal: torch.Tensor) -> torch.Tensor:
        cfg = self.cfg
        hidden = F.relu(F.linear(g, self.p1_w, self.p1_b))
        dyn = F.linear(hidden, self.p2_w, self.p2_b)
        w_dyn = dyn[:, : POLICY_MID * cfg.p].reshape(-1, POLICY_MID, cfg.p)
        b_dyn = dyn[:, POLICY_MID * cfg.p:]
        feat = torch.einsum("bop,bphw->bohw", w_dyn, fp[:, : cfg.p])
        act = F.relu(feat + b_dyn[:, :, None, None])
        raw = torch.einsum("bohw,o->bhw", act, self.pfix_w) + self.pfix_b[0]
        raw = raw.masked_fill(~legal, float("-inf"))
        return F.log_softmax(raw.flatten(1), dim=1).reshape(raw.shape)

    def value_head(self, fp: torch.Tensor, g: torch.Tensor) -> torch.Tensor:
        b, _, h, w = fp.shape
        groups = []
        for r0, r1 in _chunk_bounds(h):
            for c0, c1 in _chunk_bounds(w):
                mean = fp[:, :, r0:r1, c0:c1].mean(dim=(2, 3))
                groups.append(star_block(mean, self, "sb1"))
        gr = torch.stack(groups, dim=1).reshape(b, 3, 3, -1)
        parts = [g]
        for i in (0, 1):
            for j in (0, 1):
                quad = (gr[:, i, j] + gr[:, i, j + 1] + gr[:, i + 1, j] + gr[:, i + 1, j + 1]) / 4
                parts.append(star_block(quad, self, "sb2"))
        x = torch.cat(parts, dim=1)
        x = F.relu(F.linear(x, self.mlp1_w, self.mlp1_b))
        x = F.relu(F.linear(x, self.mlp2_w, self.mlp2_b))
        return F.linear(x, self.mlp3_w, self.mlp3_b)

    @classmethod
    def from_weights(cls, mapping: MappingWeights, heads: HeadWeights) -> "TrainNet":
        net = cls(mapping.cfg)
        with torch.no_grad():
            for gname in GROUP_NAMES:
                group = net.groups[gname]
                for name in MAPPING_TENSOR_NAMES:
                    getattr(group, name).copy_(torch.from_numpy(mapping.groups[gname][name]))
            for name in HEAD_TENSOR_NAMES:
                getattr(net, name).copy_(torch.from_numpy(heads.tensors[name]))
        return net

    def to_weights(self) -> tuple[MappingWeights, HeadWeights]:
        groups = {
            gname: {name: getattr(self.groups[gname], name).detach().numpy()
                    .astype(np.float32).copy() for name in MAPPING_TENSOR_NAMES}
            for gname in GROUP_NAMES
        }
        tensors = {name: getattr(self, name).detach().numpy().astype(np.float32).copy()
                   for name in HEAD_TENSOR_NAMES}
        return MappingWeights(self.cfg, groups), HeadWeights(self.cfg, tensors)

    @classmethod
    def seeded(cls, cfg: NetConfig, seed: int = 0, scale: float = 1.0) -> "TrainNet":
        return cls.from_weights(MappingWeights.random(cfg, seed, scale),
                                HeadWeights.random(cfg, seed + 1, scale))


def board_planes(board: Board) -> np.ndarray:
    """(2, H, W) float32 self/opponent planes for the side to move."""
    digits = perspective_digits(board.cells, board.side_to_move)
    grid = digits.reshape(board.h, board.w)
    return np.stack([grid == 1, grid == 2]).astype(np.float32)
