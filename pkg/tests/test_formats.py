import numpy as np
import pytest

from linegom.accumulator import ConfigMismatchError
from linegom.formats import (load_codebook_cache, load_or_bake, load_weights,
                             weight_digest, write_codebook_cache,
                             write_weights)
from linegom.heads import HeadWeights
from linegom.mapping import GROUP_NAMES, MappingWeights, NetConfig


@pytest.fixture
def weight_file(tmp_path, bundle):
    path = tmp_path / "net.mixw"
    write_weights(path, bundle[0], bundle[1])
    return path


def test_round_trip(weight_file, bundle):
    mapping, heads = load_weights(weight_file)
    assert mapping.cfg == bundle[0].cfg
    for g in GROUP_NAMES:
        for name, t in bundle[0].groups[g].items():
            assert np.array_equal(mapping.groups[g][name], t)
    for name, t in bundle[1].tensors.items():
        assert np.array_equal(heads.tensors[name], t)


def test_export_twice_byte_identical(tmp_path, bundle):
    a, b = tmp_path / "a.mixw", tmp_path / "b.mixw"
    write_weights(a, bundle[0], bundle[1])
    write_weights(b, bundle[0], bundle[1])
    assert a.read_bytes() == b.read_bytes()


def test_corrupt_magic_rejected(weight_file):
    data = bytearray(weight_file.read_bytes())
    data[:4] = b"XXXX"
    weight_file.write_bytes(bytes(data))
    with pytest.raises(ConfigMismatchError):
        load_weights(weight_file)


def test_config_mismatch_on_write():
    cfg_a, cfg_b = NetConfig.test(), NetConfig.small()
    with pytest.raises(ConfigMismatchError):
        write_weights("/dev/null", MappingWeights.random(cfg_a),
                      HeadWeights.random(cfg_b))


def test_cache_round_trip(tmp_path, weight_file, codebook):
    cache = tmp_path / "net.mixc"
    digest = weight_digest(weight_file)
    write_codebook_cache(cache, codebook, digest)
    back = load_codebook_cache(cache, codebook.cfg, digest)
    assert back is not None
    assert np.array_equal(back.hv, codebook.hv)
    assert np.array_equal(back.di, codebook.di)


def test_cache_stale_digest_ignored(tmp_path, weight_file, codebook):
    cache = tmp_path / "net.mixc"
    write_codebook_cache(cache, codebook, weight_digest(weight_file))
    assert load_codebook_cache(cache, codebook.cfg, 12345) is None


def test_cache_wrong_config_ignored(tmp_path, weight_file, codebook):
    cache = tmp_path / "net.mixc"
    digest = weight_digest(weight_file)
    write_codebook_cache(cache, codebook, digest)
    assert load_codebook_cache(cache, NetConfig.small(), digest) is None


def test_cache_truncated_ignored(tmp_path, weight_file, codebook):
    cache = tmp_path / "net.mixc"
    digest = weight_digest(weight_file)
    write_codebook_cache(cache, codebook, digest)
    cache.write_bytes(cache.read_bytes()[:-10])
    assert load_codebook_cache(cache, codebook.cfg, digest) is None


def test_load_or_bake_uses_cache(tmp_path, weight_file, codebook):
    cache = tmp_path / "net.mixc"
    write_codebook_cache(cache, codebook, weight_digest(weight_file))
    import time
    t0 = time.monotonic()
    _, _, cb = load_or_bake(weight_file, cache)
    assert time.monotonic() - t0 < 2.0  # cache hit, no bake
    assert np.array_equal(cb.hv, codebook.hv)
