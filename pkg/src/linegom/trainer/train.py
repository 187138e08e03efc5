"""Training loop, losses, and a synthetic toy dataset.

The loss is cross-entropy on the policy distribution plus cross-entropy on
the (win, loss, draw) triple plus an explicit L2 penalty on all weights.  The
toy dataset exists to smoke-test the optimization path end to end: targets
are simple deterministic functions of the board (a uniquely-marked cell for
the policy, a stone-count class for the value), so a short run must shrink
the loss substantially.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np
import torch
import torch.nn.functional as F

from ..board import Board
from ..mapping import NetConfig
from .model import TrainNet, board_planes

L2_WEIGHT = 1e-4

DATASET_MAGIC = b"MIXD"
DATASET_VERSION = 1


@dataclass
class Sample:
    planes: np.ndarray       # (2, H, W) float32
    legal: np.ndarray        # (H, W) bool
    policy: np.ndarray       # (H, W) float32, sums to 1 over legal cells
    value: np.ndarray        # (3,) float32, sums to 1


@dataclass
class Batch:
    planes: torch.Tensor
    legal: torch.Tensor
    policy: torch.Tensor
    value: torch.Tensor

    @classmethod
    def collate(cls, samples: list[Sample]) -> "Batch":
        return cls(
            torch.from_numpy(np.stack([s.planes for s in samples])),
            torch.from_numpy(np.stack([s.legal for s in samples])),
            torch.from_numpy(np.stack([s.policy for s in samples])),
            torch.from_numpy(np.stack([s.value for s in samples])),
        )


def save_dataset(path: Path, samples: list[Sample]) -> None:
    """Binary dataset: header (magic, version u32, count u32, size u32), then
    per sample the self/opponent planes as uint8 digits (S*S bytes, 0 empty /
    1 self / 2 opponent), the policy target as float32[S*S] and the value
    target as float32[3], all little-endian."""
    size = samples[0].planes.shape[1]
    with open(path, "wb") as f:
        f.write(DATASET_MAGIC)
        f.write(struct.pack("<III", DATASET_VERSION, len(samples), size))
        for s in samples:
            digits = (s.planes[0] + 2 * s.planes[1]).astype(np.uint8)
            f.write(digits.tobytes())
            f.write(s.policy.astype("<f4").tobytes())
            f.write(s.value.astype("<f4").tobytes())


def load_dataset(path: Path) -> list[Sample]:
    with open(path, "rb") as f:
        if f.read(4) != DATASET_MAGIC:
            raise ValueError("not a dataset file")
        version, count, size = struct.unpack("<III", f.read(12))
        if version != DATASET_VERSION:
            raise ValueError(f"unsupported dataset version {version}")
        samples = []
        for _ in range(count):
            digits = np.frombuffer(f.read(size * size), dtype=np.uint8)
            digits = digits.reshape(size, size)
            planes = np.stack([digits == 1, digits == 2]).astype(np.float32)
            policy = np.frombuffer(f.read(4 * size * size), dtype="<f4")
            policy = policy.reshape(size, size).copy()
            value = np.frombuffer(f.read(12), dtype="<f4").copy()
            samples.append(Sample(planes, digits == 0, policy, value))
    return samples


def distill_batch(batch: Batch, teacher: Callable, mix: float = 0.75) -> Batch:
    """Blend hard targets with a teacher's soft predictions (teacher-heavy by
    default); equivalent to a mixed cross-entropy loss."""
    with torch.no_grad():
        logp, logits = teacher(batch.planes, batch.legal)
        tpolicy = logp.exp().masked_fill(~batch.legal, 0.0)
        tvalue = torch.softmax(logits, dim=1)
    return Batch(batch.planes, batch.legal,
                 mix * tpolicy + (1 - mix) * batch.policy,
                 mix * tvalue + (1 - mix) * batch.value)


def loss_terms(net: TrainNet, batch: Batch) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """(policy CE, value CE, L2) for one batch."""
    logp, logits = net(batch.planes, batch.legal)
    logp = logp.masked_fill(~batch.legal, 0.0)  # targets are 0 there anyway
    policy_ce = -(batch.policy * logp).flatten(1).sum(dim=1).mean()
    value_ce = -(batch.value * F.log_softmax(logits, dim=1)).sum(dim=1).mean()
    l2 = sum((p * p).sum() for p in net.parameters())
    return policy_ce, value_ce, L2_WEIGHT * l2


def total_loss(net: TrainNet, batch: Batch) -> torch.Tensor:
    return sum(loss_terms(net, batch))


def make_optimizer(net: TrainNet, lr: float = 1e-3) -> torch.optim.Adam:
    return torch.optim.Adam(net.parameters(), lr=lr,
                            betas=(0.9, 0.999), eps=1e-8)


def toy_board(rng: np.random.Generator, size: int = 11) -> tuple[Board, tuple[int, int]]:
    """Board whose only isolated own stone marks the policy target cell.

    A few 2x2 quads (two stones each color, never isolated) are scattered,
    then one isolated black "marker" stone and a white stone in the corner to
    restore black to move.  Policy target: the cell right of the marker.
    """
    board = Board(size, size)
    for _ in range(int(rng.integers(1, 4))):
        for _ in range(20):
            r = int(rng.integers(2, size - 2))
            c = int(rng.integers(2, size - 2))
            margin = [(r + dr, c + dc) for dr in range(-1, 3) for dc in range(-1, 3)]
            if all(board.cell(*rc) == 0 for rc in margin):
                # separated quads cap same-color runs at two: no accidental win
                for rc in [(r, c), (r, c + 1), (r + 1, c), (r + 1, c + 1)]:
                    board.place_move(*rc)
                break
    for _ in range(200):
        r = int(rng.integers(2, size - 1))
        c = int(rng.integers(2, size - 2))
        window = [(r + dr, c + dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1, 2)]
        if all(board.cell(*rc) == 0 for rc in window):
            break
    board.place_move(r, c)      # black marker
    board.place_move(0, 0)      # white filler, black to move again
    return board, (r, c)


def toy_sample(rng: np.random.Generator, size: int = 11) -> Sample:
    """Position with deterministic targets the net can learn exactly.

    Policy target: the cell directly right of the isolated marker stone.
    Value target: total stone count mod 3.
    """
    board, marker = toy_board(rng, size)
    planes = board_planes(board)
    legal = (board.cells == 0).reshape(size, size)
    policy = np.zeros((size, size), dtype=np.float32)
    policy[marker[0], marker[1] + 1] = 1.0
    value = np.zeros(3, dtype=np.float32)
    value[int(planes.sum()) % 3] = 1.0
    return Sample(planes, legal, policy, value)


def toy_dataset(count: int = 10_000, size: int = 11, seed: int = 0) -> list[Sample]:
    rng = np.random.default_rng(seed)
    return [toy_sample(rng, size) for _ in range(count)]


def train(net: TrainNet, data: list[Sample], steps: int, batch_size: int = 128,
          lr: float = 1e-3, seed: int = 0, log_every: int = 0,
          teacher: Optional[Callable] = None, distill_mix: float = 0.75) -> list[float]:
    """Run Adam for `steps` minibatch steps; returns the per-step losses.

    With a `teacher` callable (same signature as TrainNet.forward), targets
    are blended teacher-heavy per `distill_mix`."""
    opt = make_optimizer(net, lr)
    rng = np.random.default_rng(seed)
    losses = []
    net.train()
    for step in range(steps):
        idx = rng.integers(0, len(data), size=batch_size)
        batch = Batch.collate([data[i] for i in idx])
        if teacher is not None:
            batch = distill_batch(batch, teacher, distill_mix)
        opt.zero_grad()
        loss = total_loss(net, batch)
        loss.backward()
        opt.step()
        losses.append(float(loss.detach()))
        if log_every and (step + 1) % log_every == 0:
            print(f"step {step + 1}/{steps} loss {losses[-1]:.4f}")
    net.eval()
    return losses


def toy_run(cfg: NetConfig | None = None, samples: int = 10_000, steps: int = 2000,
            seed: int = 0, log_every: int = 0) -> tuple[TrainNet, list[float]]:
    """Train a fresh net on the toy task; returns (net, losses)."""
    cfg = cfg or NetConfig.test()
    net = TrainNet.seeded(cfg, seed=seed, scale=0.7)
    data = toy_dataset(samples, seed=seed + 1)
    losses = train(net, data, steps, seed=seed + 2, log_every=log_every)
    return net, losses
