"""Policy and value heads over the processed feature map F'.

Policy: global average of F' feeds a two-layer generator that emits weights
and bias for a dynamic point-wise convolution (16 output channels over the
first P feature channels), followed by a fixed 16->1 point-wise convolution
and a softmax over legal cells.

Value: F' is chunked into a 3x3 grid, chunk means pass a star block, the
resulting 3x3 value-group features are 2x2-averaged, each average passes a
second star block, and the concatenation with the global mean goes through a
three-layer MLP onto (win, loss, draw) logits.

Every forward exists in a float reference flavor and a quantized flavor:
int16 matmul for the dynamic convolution, int8 weights with int32
accumulation for all linear layers (activation scales chosen per tensor at
call time).  The two flavors stay within 0.02 per output probability.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .accumulator import FPRIME_SCALE
from .mapping import NetConfig

POLICY_MID = 16  # dynamic conv output channels, fixed for all configs

DYN_WEIGHT_SCALE = 256   # int16 scale for the generated dynamic conv weights
DYN_FEATURE_SHIFT = 4    # F' int32 (scale 2048) -> int16 (scale 128)


@dataclass
class Evaluation:
    """Value triple and policy for the side to move."""

    win: float
    loss: float
    draw: float
    policy: np.ndarray  # (H, W), zero on occupied cells, sums to 1

    @property
    def value(self) -> tuple[float, float, float]:
        return (self.win, self.loss, self.draw)

    @property
    def utility(self) -> float:
        return self.win - self.loss


# Head tensor names in serialization order.
HEAD_TENSOR_NAMES = (
    "dw_w",
    "p1_w", "p1_b", "p2_w", "p2_b", "pfix_w", "pfix_b",
    "sb1_a_w", "sb1_a_b", "sb1_b_w", "sb1_b_b", "sb1_o_w", "sb1_o_b",
    "sb2_a_w", "sb2_a_b", "sb2_b_w", "sb2_b_b", "sb2_o_w", "sb2_o_b",
    "mlp1_w", "mlp1_b", "mlp2_w", "mlp2_b", "mlp3_w", "mlp3_b",
)


def head_tensor_shapes(cfg: NetConfig) -> dict[str, tuple[int, ...]]:
    c, p, v = cfg.c, cfg.p, cfg.v
    gen_out = POLICY_MID * p + POLICY_MID
    return {
        "dw_w": (c // 2, 3, 3),
        "p1_w": (c, c), "p1_b": (c,),
        "p2_w": (gen_out, c), "p2_b": (gen_out,),
        "pfix_w": (POLICY_MID,), "pfix_b": (1,),
        "sb1_a_w": (2 * v, c), "sb1_a_b": (2 * v,),
        "sb1_b_w": (2 * v, c), "sb1_b_b": (2 * v,),
        "sb1_o_w": (v, v), "sb1_o_b": (v,),
        "sb2_a_w": (2 * v, v), "sb2_a_b": (2 * v,),
        "sb2_b_w": (2 * v, v), "sb2_b_b": (2 * v,),
        "sb2_o_w": (v, v), "sb2_o_b": (v,),
        "mlp1_w": (v, c + 4 * v), "mlp1_b": (v,),
        "mlp2_w": (v, v), "mlp2_b": (v,),
        "mlp3_w": (3, v), "mlp3_b": (3,),
    }


@dataclass
class HeadWeights:
    cfg: NetConfig
    tensors: dict[str, np.ndarray]

    @classmethod
    def random(cls, cfg: NetConfig, seed: int = 0, scale: float = 1.0) -> "HeadWeights":
        rng = np.random.Generator(np.random.PCG64(seed))
        tensors = {}
        for name, shape in head_tensor_shapes(cfg).items():
            if name.endswith("_b"):
                tensors[name] = np.zeros(shape, dtype=np.float32)
            else:
                fan_in = int(np.prod(shape[1:])) if len(shape) > 1 else shape[0]
                bound = scale * np.sqrt(6.0 / fan_in)
                tensors[name] = rng.uniform(-bound, bound, size=shape).astype(np.float32)
        return cls(cfg, tensors)


def _relu(x):
    return np.maximum(x, 0.0)


def _softmax(x: np.ndarray) -> np.ndarray:
    e = np.exp(x - np.max(x))
    return e / e.sum()


def _linear(x: np.ndarray, w: np.ndarray, b: np.ndarray, quantized: bool) -> np.ndarray:
    """Dense layer; quantized flavor uses int8 weights/activations with int32
    accumulation and symmetric per-tensor scales."""
    if not quantized:
        return x @ w.T + b
    wmax = float(np.abs(w).max())
    xmax = float(np.abs(x).max())
    if wmax == 0.0 or xmax == 0.0:
        return np.zeros(w.shape[0]) + b
    sw = 127.0 / wmax
    sx = 127.0 / xmax
    wq = np.clip(np.rint(w * sw), -127, 127).astype(np.int8)
    xq = np.clip(np.rint(x * sx), -127, 127).astype(np.int8)
    acc = xq.astype(np.int32) @ wq.astype(np.int32).T
    return acc / (sw * sx) + b


def global_mean(fprime: np.ndarray) -> np.ndarray:
    """Per-channel mean of F' over the board, dequantized; fprime is
    (H, W, C) int32 at scale 2048."""
    return fprime.reshape(-1, fprime.shape[-1]).mean(axis=0) / FPRIME_SCALE


def star_block(x: np.ndarray, w: HeadWeights, prefix: str, quantized: bool = False) -> np.ndarray:
    """Degree-4 multiplicative block: expand to 2D, elementwise multiply,
    adjacent-pair products halve back to D, project."""
    t = w.tensors
    a = _relu(_linear(x, t[f"{prefix}_a_w"], t[f"{prefix}_a_b"], quantized))
    b = _linear(x, t[f"{prefix}_b_w"], t[f"{prefix}_b_b"], quantized)
    c = a * b
    d = c[0::2] * c[1::2]
    return _relu(_linear(d, t[f"{prefix}_o_w"], t[f"{prefix}_o_b"], quantized))


def policy_forward(fprime: np.ndarray, g: np.ndarray, w: HeadWeights,
                   legal_mask: np.ndarray, quantized: bool = False) -> np.ndarray:
    """Raw policy -> softmax over legal cells; occupied cells get exactly 0."""
    cfg = w.cfg
    t = w.tensors
    hidden = _relu(_linear(g, t["p1_w"], t["p1_b"], quantized))
    dyn = _linear(hidden, t["p2_w"], t["p2_b"], quantized)
    w_dyn = dyn[: POLICY_MID * cfg.p].reshape(POLICY_MID, cfg.p)
    b_dyn = dyn[POLICY_MID * cfg.p:]

    h, wd, c = fprime.shape
    cells = fprime.reshape(-1, c)[:, : cfg.p]
    if quantized:
        wq = np.clip(np.rint(w_dyn * DYN_WEIGHT_SCALE), -32767, 32767).astype(np.int16)
        fq = np.clip(cells >> DYN_FEATURE_SHIFT, -32768, 32767).astype(np.int16)
        acc = fq.astype(np.int32) @ wq.astype(np.int32).T
        feat = acc / (DYN_WEIGHT_SCALE * (FPRIME_SCALE >> DYN_FEATURE_SHIFT))
    else:
        feat = (cells / FPRIME_SCALE) @ w_dyn.T
    act = _relu(feat + b_dyn)                       # (HW, 16)
    raw = act @ t["pfix_w"] + t["pfix_b"][0]        # (HW,)

    mask = legal_mask.reshape(-1)
    policy = np.zeros(h * wd)
    policy[mask] = _softmax(raw[mask])
    return policy.reshape(h, wd)


def _chunk_bounds(n: int) -> list[tuple[int, int]]:
    edges = [(i * n) // 3 for i in range(4)]
    return [(edges[i], edges[i + 1]) for i in range(3)]


def value_forward(fprime: np.ndarray, g: np.ndarray, w: HeadWeights,
                  quantized: bool = False) -> tuple[float, float, float]:
    t = w.tensors
    h, wd, _ = fprime.shape
    ff = fprime.astype(np.float64) / FPRIME_SCALE

    groups = np.empty((3, 3, w.cfg.v))
    for i, (r0, r1) in enumerate(_chunk_bounds(h)):
        for j, (c0, c1) in enumerate(_chunk_bounds(wd)):
            mean = ff[r0:r1, c0:c1].reshape(-1, ff.shape[-1]).mean(axis=0)
            groups[i, j] = star_block(mean, w, "sb1", quantized)

    parts = [g]
    for i in (0, 1):
        for j in (0, 1):
            gp = (groups[i, j] + groups[i, j + 1] + groups[i + 1, j] + groups[i + 1, j + 1]) / 4
            parts.append(star_block(gp, w, "sb2", quantized))
    x = np.concatenate(parts)
    x = _relu(_linear(x, t["mlp1_w"], t["mlp1_b"], quantized))
    x = _relu(_linear(x, t["mlp2_w"], t["mlp2_b"], quantized))
    logits = _linear(x, t["mlp3_w"], t["mlp3_b"], quantized)
    probs = _softmax(logits)
    return float(probs[0]), float(probs[1]), float(probs[2])


def evaluate_heads(fprime: np.ndarray, w: HeadWeights, legal_mask: np.ndarray,
                   quantized: bool = True) -> Evaluation:
    g = global_mean(fprime)
    policy = policy_forward(fprime, g, w, legal_mask, quantized)
    win, loss, draw = value_forward(fprime, g, w, quantized)
    return Evaluation(win, loss, draw, policy)
