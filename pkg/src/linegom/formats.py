"""Binary weight (`MIXW`) and codebook cache (`MIXC`) files.

MIXW layout (little-endian):
    magic  4s   = b"MIXW"
    version u32 = 1
    config  4 x u32 = M, C, P, V
    tensors, each:  name_len u16, name utf-8, ndim u8, dims u32 x ndim,
                    float32 data
Tensor order: mapping tensors for group "hv", then "di" (see
MAPPING_TENSOR_NAMES), then the head tensors (HEAD_TENSOR_NAMES).

MIXC layout:
    magic 4s = b"MIXC", version u32 = 1, config 4 x u32,
    weight-file digest u64, hv table int16[N][C], di table int16[N][C]
The cache is regenerated whenever the digest of the weight file changes.
"""

from __future__ import annotations

import hashlib
import struct
from pathlib import Path
from typing import Optional

import numpy as np

from .accumulator import ConfigMismatchError
from .heads import HEAD_TENSOR_NAMES, HeadWeights, head_tensor_shapes
from .mapping import (GROUP_NAMES, MAPPING_TENSOR_NAMES, Codebook, MappingWeights,
                      NetConfig, bake_codebook, mapping_tensor_shapes)
from .patterns import NUM_PATTERNS

WEIGHT_MAGIC = b"MIXW"
CACHE_MAGIC = b"MIXC"
FORMAT_VERSION = 1


def _tensor_order(cfg: NetConfig):
    """(qualified name, shape) pairs in serialization order."""
    out = []
    mshapes = mapping_tensor_shapes(cfg)
    for g in GROUP_NAMES:
        for name in MAPPING_TENSOR_NAMES:
            out.append((f"{g}.{name}", mshapes[name]))
    hshapes = head_tensor_shapes(cfg)
    for name in HEAD_TENSOR_NAMES:
        out.append((f"heads.{name}", hshapes[name]))
    return out


def write_weights(path: str | Path, mapping: MappingWeights, heads: HeadWeights) -> None:
    if mapping.cfg != heads.cfg:
        raise ConfigMismatchError("mapping / head config mismatch")
    cfg = mapping.cfg
    chunks = [WEIGHT_MAGIC, struct.pack("<5I", FORMAT_VERSION, cfg.m, cfg.c, cfg.p, cfg.v)]
    for qname, shape in _tensor_order(cfg):
        scope, name = qname.split(".")
        arr = heads.tensors[name] if scope == "heads" else mapping.groups[scope][name]
        if tuple(arr.shape) != shape:
            raise ConfigMismatchError(f"{qname} has shape {arr.shape}, expected {shape}")
        enc = qname.encode()
        chunks.append(struct.pack("<H", len(enc)))
        chunks.append(enc)
        chunks.append(struct.pack("<B", arr.ndim))
        chunks.append(struct.pack(f"<{arr.ndim}I", *arr.shape))
        chunks.append(np.ascontiguousarray(arr, dtype="<f4").tobytes())
    Path(path).write_bytes(b"".join(chunks))


def load_weights(path: str | Path) -> tuple[MappingWeights, HeadWeights]:
    data = Path(path).read_bytes()
    if data[:4] != WEIGHT_MAGIC:
        raise ConfigMismatchError("not a MIXW weight file")
    version, m, c, p, v = struct.unpack_from("<5I", data, 4)
    if version != FORMAT_VERSION:
        raise ConfigMismatchError(f"unsupported weight version {version}")
    cfg = NetConfig(m, c, p, v)
    off = 24
    groups = {g: {} for g in GROUP_NAMES}
    head_tensors = {}
    for qname, shape in _tensor_order(cfg):
        (name_len,) = struct.unpack_from("<H", data, off)
        off += 2
        got = data[off:off + name_len].decode()
        off += name_len
        if got != qname:
            raise ConfigMismatchError(f"expected tensor {qname}, found {got}")
        (ndim,) = struct.unpack_from("<B", data, off)
        off += 1
        dims = struct.unpack_from(f"<{ndim}I", data, off)
        off += 4 * ndim
        if dims != shape:
            raise ConfigMismatchError(f"{qname}: shape {dims} != {shape}")
        count = int(np.prod(dims))
        arr = np.frombuffer(data, dtype="<f4", count=count, offset=off).reshape(dims).copy()
        off += 4 * count
        scope, name = qname.split(".")
        if scope == "heads":
            head_tensors[name] = arr
        else:
            groups[scope][name] = arr
    return MappingWeights(cfg, groups), HeadWeights(cfg, head_tensors)


def weight_digest(path: str | Path) -> int:
    h = hashlib.blake2b(Path(path).read_bytes(), digest_size=8)
    return int.from_bytes(h.digest(), "little")


def write_codebook_cache(path: str | Path, codebook: Codebook, digest: int) -> None:
    cfg = codebook.cfg
    with open(path, "wb") as f:
        f.write(CACHE_MAGIC)
        f.write(struct.pack("<5I", FORMAT_VERSION, cfg.m, cfg.c, cfg.p, cfg.v))
        f.write(struct.pack("<Q", digest))
        f.write(np.ascontiguousarray(codebook.hv, dtype="<i2").tobytes())
        f.write(np.ascontiguousarray(codebook.di, dtype="<i2").tobytes())


def load_codebook_cache(path: str | Path, cfg: NetConfig,
                        expected_digest: int) -> Optional[Codebook]:
    """None when the cache is missing, malformed, or stale."""
    try:
        data = Path(path).read_bytes()
    except OSError:
        return None
    if data[:4] != CACHE_MAGIC:
        return None
    version, m, c, p, v = struct.unpack_from("<5I", data, 4)
    (digest,) = struct.unpack_from("<Q", data, 24)
    if version != FORMAT_VERSION or (m, c, p, v) != (cfg.m, cfg.c, cfg.p, cfg.v):
        return None
    if digest != expected_digest:
        return None
    table_bytes = NUM_PATTERNS * cfg.c * 2
    if len(data) != 32 + 2 * table_bytes:
        return None
    hv = np.frombuffer(data, dtype="<i2", count=NUM_PATTERNS * cfg.c,
                       offset=32).reshape(NUM_PATTERNS, cfg.c).copy()
    di = np.frombuffer(data, dtype="<i2", count=NUM_PATTERNS * cfg.c,
                       offset=32 + table_bytes).reshape(NUM_PATTERNS, cfg.c).copy()
    return Codebook(cfg, hv, di)


def load_or_bake(weight_path: str | Path,
                 cache_path: Optional[str | Path] = None) -> tuple[MappingWeights, HeadWeights, Codebook]:
    """Load weights, reuse the codebook cache when fresh, else bake and cache."""
    mapping, heads = load_weights(weight_path)
    digest = weight_digest(weight_path)
    if cache_path is not None:
        cached = load_codebook_cache(cache_path, mapping.cfg, digest)
        if cached is not None:
            return mapping, heads, cached
    codebook = bake_codebook(mapping)
    if cache_path is not None:
        write_codebook_cache(cache_path, codebook, digest)
    return mapping, heads, codebook
