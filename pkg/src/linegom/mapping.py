"""Float reference of the directional mapping network and its codebook bake.

The mapping network turns a one-hot line pattern (2 planes x window length)
into a C-channel feature at the window center.  Each direction group (HV, DI)
has its own weights.  Architecture (receptive field exactly 11):

    h = ReLU(DirConv1(x))                     # 2 -> M
    h = h + ReLU(PW1(ReLU(DirConv2(h))))      # skip pair 1
    h = h + ReLU(PW2(ReLU(DirConv3(h))))      # skip pair 2
    h = ReLU(DirConv4(h))
    h = ReLU(PW3(h))
    h = ReLU(DirConv5(h))
    out = PWout(h)                            # M -> C, no activation

DirConv layers are 1-D convolutions with 3 in-line taps and zero padding; on
the full board they correspond to 3x3 kernels that are non-zero only along
the direction, so running a pattern as an isolated strip is exact.

Baking enumerates all patterns, records the center feature, clamps it to
[-16, 16] and quantizes with scale 32 into int16.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .patterns import BASE, MAX_EXT, NUM_PATTERNS, GROUP_HV, GROUP_DI

FEATURE_CLAMP = 16.0
FEATURE_SCALE = 32
FEATURE_QMAX = int(FEATURE_CLAMP * FEATURE_SCALE)  # 512

GROUP_NAMES = ("hv", "di")

# Tensor names in serialization order, per group.
MAPPING_TENSOR_NAMES = (
    "dc1_w", "dc1_b",
    "dc2_w", "dc2_b", "pw1_w", "pw1_b",
    "dc3_w", "dc3_b", "pw2_w", "pw2_b",
    "dc4_w", "dc4_b",
    "pw3_w", "pw3_b",
    "dc5_w", "dc5_b",
    "out_w", "out_b",
)


class NonFiniteWeightError(ValueError):
    pass


@dataclass(frozen=True)
class NetConfig:
    """Channel sizes: mapping M, feature C, policy P, value V."""

    m: int = 64
    c: int = 32
    p: int = 16
    v: int = 32

    def __post_init__(self):
        if self.c % 2:
            raise ValueError("feature channels must be even (half are convolved)")

    @classmethod
    def small(cls) -> "NetConfig":
        return cls(64, 32, 16, 32)

    @classmethod
    def medium(cls) -> "NetConfig":
        return cls(128, 64, 32, 64)

    @classmethod
    def large(cls) -> "NetConfig":
        return cls(256, 128, 64, 128)

    @classmethod
    def test(cls) -> "NetConfig":
        """Reduced size for exhaustive tests."""
        return cls(16, 8, 4, 8)


def mapping_tensor_shapes(cfg: NetConfig) -> dict[str, tuple[int, ...]]:
    m, c = cfg.m, cfg.c
    shapes: dict[str, tuple[int, ...]] = {"dc1_w": (m, 2, 3), "dc1_b": (m,)}
    for name in ("dc2", "dc3", "dc4", "dc5"):
        shapes[f"{name}_w"] = (m, m, 3)
        shapes[f"{name}_b"] = (m,)
    for name in ("pw1", "pw2", "pw3"):
        shapes[f"{name}_w"] = (m, m)
        shapes[f"{name}_b"] = (m,)
    shapes["out_w"] = (c, m)
    shapes["out_b"] = (c,)
    return shapes


@dataclass
class MappingWeights:
    cfg: NetConfig
    groups: dict[str, dict[str, np.ndarray]]

    @classmethod
    def random(cls, cfg: NetConfig, seed: int = 0, scale: float = 1.0) -> "MappingWeights":
        """Seeded He-uniform init; placeholder until trained weights are loaded."""
        rng = np.random.Generator(np.random.PCG64(seed))
        shapes = mapping_tensor_shapes(cfg)
        groups = {}
        for gname in GROUP_NAMES:
            tensors = {}
            for name in MAPPING_TENSOR_NAMES:
                shape = shapes[name]
                if name.endswith("_b"):
                    tensors[name] = np.zeros(shape, dtype=np.float32)
                else:
                    fan_in = int(np.prod(shape[1:]))
                    bound = scale * np.sqrt(6.0 / fan_in)
                    tensors[name] = rng.uniform(-bound, bound, size=shape).astype(np.float32)
            groups[gname] = tensors
        return cls(cfg, groups)

    def check_finite(self) -> None:
        for gname, tensors in self.groups.items():
            for name, t in tensors.items():
                if not np.isfinite(t).all():
                    raise NonFiniteWeightError(f"{gname}.{name} contains NaN/Inf")


def _dirconv(x: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    """1-D conv with 3 taps and zero padding: x (B, T, Cin), w (Cout, Cin, 3).

    Shifted slices are flattened to 2-D so BLAS sees one large GEMM per tap
    instead of B tiny ones.
    """
    bsz, t, cin = x.shape
    xp = np.pad(x, ((0, 0), (1, 1), (0, 0)))
    # contiguous operands: BLAS is an order of magnitude slower on views here
    taps = [np.ascontiguousarray(w[:, :, s].T) for s in range(3)]
    y = np.ascontiguousarray(xp[:, 0:t]).reshape(-1, cin) @ taps[0]
    y += np.ascontiguousarray(xp[:, 1:t + 1]).reshape(-1, cin) @ taps[1]
    y += np.ascontiguousarray(xp[:, 2:t + 2]).reshape(-1, cin) @ taps[2]
    y += b
    return y.reshape(bsz, t, -1)


def _pw(x: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    bsz, t, cin = x.shape
    wt = np.ascontiguousarray(w.T)
    return (x.reshape(-1, cin) @ wt + b).reshape(bsz, t, -1)


def _relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def mapping_forward_batch(onehot: np.ndarray, tensors: dict[str, np.ndarray]) -> np.ndarray:
    """Forward a batch of one-hot strips (B, T, 2) -> features (B, T, C)."""
    t = tensors
    h = _relu(_dirconv(onehot, t["dc1_w"], t["dc1_b"]))
    h = h + _relu(_pw(_relu(_dirconv(h, t["dc2_w"], t["dc2_b"])), t["pw1_w"], t["pw1_b"]))
    h = h + _relu(_pw(_relu(_dirconv(h, t["dc3_w"], t["dc3_b"])), t["pw2_w"], t["pw2_b"]))
    h = _relu(_dirconv(h, t["dc4_w"], t["dc4_b"]))
    h = _relu(_pw(h, t["pw3_w"], t["pw3_b"]))
    h = _relu(_dirconv(h, t["dc5_w"], t["dc5_b"]))
    return _pw(h, t["out_w"], t["out_b"])


def pattern_onehot(cells: np.ndarray) -> np.ndarray:
    """(B, T) base-3 digits -> (B, T, 2) float planes (self, opponent)."""
    return np.stack([cells == 1, cells == 2], axis=-1).astype(np.float32)


def mapping_forward(pattern, group: int, weights: MappingWeights) -> np.ndarray:
    """Center feature of a single LinePattern; float[C]."""
    cells = np.asarray(pattern.cells, dtype=np.int64)[None, :]
    tensors = weights.groups[GROUP_NAMES[group]]
    out = mapping_forward_batch(pattern_onehot(cells), tensors)
    return out[0, pattern.left].astype(np.float32)


def quantize_feature(x: np.ndarray) -> np.ndarray:
    """clamp to [-16, 16], scale by 32, round half away from zero -> int16."""
    scaled = np.clip(np.asarray(x, dtype=np.float64), -FEATURE_CLAMP, FEATURE_CLAMP) * FEATURE_SCALE
    return np.copysign(np.floor(np.abs(scaled) + 0.5), scaled).astype(np.int16)


@dataclass
class Codebook:
    """Pattern-indexed int16 feature tables, one per direction group."""

    cfg: NetConfig
    hv: np.ndarray  # (N, C) int16
    di: np.ndarray
    lookups: int = field(default=0, compare=False)

    def table(self, group: int) -> np.ndarray:
        return self.hv if group == GROUP_HV else self.di

    def fetch(self, group: int, ids: np.ndarray) -> np.ndarray:
        self.lookups += int(np.size(ids))
        return self.table(group)[ids]

    def reset_counter(self) -> None:
        self.lookups = 0


def bake_codebook(weights: MappingWeights, cfg: NetConfig | None = None,
                  batch: int = 32768) -> Codebook:
    """Enumerate all patterns through the mapping network; deterministic."""
    cfg = cfg or weights.cfg
    weights.check_finite()
    tables = []
    for gname in GROUP_NAMES:
        tensors = weights.groups[gname]
        table = np.zeros((NUM_PATTERNS, cfg.c), dtype=np.int16)
        for left in range(MAX_EXT + 1):
            for right in range(MAX_EXT + 1):
                length = left + 1 + right
                count = 3 ** length
                base = int(BASE[left, right])
                pows = 3 ** np.arange(length, dtype=np.int64)
                for start in range(0, count, batch):
                    idx = np.arange(start, min(start + batch, count), dtype=np.int64)
                    digits = (idx[:, None] // pows) % 3
                    out = mapping_forward_batch(pattern_onehot(digits), tensors)
                    table[base + idx] = quantize_feature(out[:, left, :])
        tables.append(table)
    return Codebook(cfg, tables[0], tables[1])
