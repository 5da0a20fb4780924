"""Tests for the binary containers and the spectrogram cache."""

from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
import pytest

from src.errors import DataIoError, ParseError
from src.models.spectrogram import MultiSpectrogram, StftConfig
from src.state.container import (
    SPECTROGRAM_MAGIC,
    decode_spectrogram,
    decode_weights,
    encode_spectrogram,
    encode_weights,
    write_bytes,
)
from src.state.manager import CacheManager


@pytest.fixture
def spectrogram(rng: np.random.Generator) -> MultiSpectrogram:
    values = rng.random((3, 129, 17)).astype(np.float32)
    return MultiSpectrogram(channels=("vx", "vy", "p"), values=values)


def test_spectrogram_container_layout(spectrogram: MultiSpectrogram) -> None:
    """16-byte header, three u32 dims, float32 payload, then the channel names."""
    data = encode_spectrogram(spectrogram)
    assert data[:12] == SPECTROGRAM_MAGIC
    assert int.from_bytes(data[12:16], "little") == 1
    assert [int.from_bytes(data[16 + 4 * i : 20 + 4 * i], "little") for i in range(3)] == [3, 129, 17]

    decoded = decode_spectrogram(data)
    assert decoded.channels == spectrogram.channels
    assert decoded.values.tobytes() == spectrogram.values.tobytes()


def test_truncated_container(spectrogram: MultiSpectrogram) -> None:
    with pytest.raises(ParseError):
        decode_spectrogram(encode_spectrogram(spectrogram)[:-3])


def test_bad_magic(spectrogram: MultiSpectrogram) -> None:
    with pytest.raises(ParseError):
        decode_spectrogram(b"X" * 12 + encode_spectrogram(spectrogram)[12:])


def test_weights_keep_names_order_and_bits(rng: np.random.Generator) -> None:
    tensors = {
        "conv1.weight": rng.normal(size=(4, 2, 3, 3)).astype(np.float32),
        "fc2.bias": rng.normal(size=2).astype(np.float32),
    }
    description, decoded = decode_weights(encode_weights({"spec": {"kind": "cnn"}}, tensors))

    assert description == {"spec": {"kind": "cnn"}}
    assert list(decoded) == list(tensors)
    for name, value in tensors.items():
        assert decoded[name].tobytes() == value.tobytes()


def test_cache_round_trip(tmp_path: Path, spectrogram: MultiSpectrogram) -> None:
    recording = tmp_path / "r.csv"
    recording.write_text("t,x,y,p\n0,0,0,0\n", encoding="utf-8")
    cache = CacheManager(tmp_path / "cache")
    cfg = StftConfig()
    key = cache.key(recording, spectrogram.channels, cfg)

    assert cache.get(key) is None
    cache.set(key, spectrogram)
    assert cache.exists(key)
    hit = cache.get(key, cfg.column_duration_s)
    assert hit is not None
    assert hit.values.tobytes() == spectrogram.values.tobytes()
    assert (cache.hits, cache.misses) == (1, 1)

    cache.delete(key)
    assert not cache.exists(key)


def test_cache_key_depends_on_channels_and_stft(tmp_path: Path) -> None:
    recording = tmp_path / "r.csv"
    recording.write_text("t,x,y,p\n0,0,0,0\n", encoding="utf-8")
    cache = CacheManager(tmp_path / "cache")
    base = cache.key(recording, ("vx", "vy"), StftConfig())

    assert base == cache.key(recording, ("vx", "vy"), StftConfig())
    assert base != cache.key(recording, ("vy", "vx"), StftConfig())
    assert base != cache.key(recording, ("vx", "vy"), StftConfig(log_scale=True))


def test_cache_dir_from_environment(tmp_path: Path) -> None:
    """GRAPHOCOG_CACHE (set by the autouse fixture) is the default location."""
    assert CacheManager().cache_dir == tmp_path / "cache"


def test_clear(tmp_path: Path, spectrogram: MultiSpectrogram) -> None:
    cache = CacheManager(tmp_path / "cache")
    cache.set("ab" * 32, spectrogram)
    cache.set("cd" * 32, spectrogram)
    assert cache.clear() == 2
    assert not cache.exists("ab" * 32)


def test_concurrent_writers_of_one_key(tmp_path: Path, spectrogram: MultiSpectrogram) -> None:
    """Threads storing the same entry never share a temp file."""
    cache = CacheManager(tmp_path / "cache")
    key = "ef" * 32
    with ThreadPoolExecutor(max_workers=8) as pool:
        list(pool.map(lambda _: cache.set(key, spectrogram), range(32)))

    hit = cache.get(key)
    assert hit is not None
    assert hit.values.tobytes() == spectrogram.values.tobytes()
    assert list((tmp_path / "cache").rglob("*.tmp")) == []


def test_write_bytes_leaves_no_temp_file_on_failure(tmp_path: Path) -> None:
    target = tmp_path / "blocked"
    target.mkdir()
    with pytest.raises(DataIoError):
        write_bytes(target, b"payload")
    assert list(tmp_path.glob("*.tmp")) == []
