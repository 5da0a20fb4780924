"""Binary containers for spectrogram cache files and network weights.

Layout (all integers little-endian u32, all floats little-endian f32):

    header   12-byte magic + u32 version
    spectrogram:  C, F, L | C*F*L floats | n_names | (len, utf-8 bytes) * n_names
    weights:      len, description JSON | n_tensors | directory | tensor payloads
                  directory entry = (len, name utf-8) ndim dims...
"""

import io
import os
import struct
import tempfile
from pathlib import Path
from typing import Any, BinaryIO

import numpy as np
import orjson

from src.errors import DataIoError, ParseError
from src.models.spectrogram import MultiSpectrogram

SPECTROGRAM_MAGIC = b"GRAPHOCOGSPC"
WEIGHTS_MAGIC = b"GRAPHOCOGWTS"
FORMAT_VERSION = 1

_U32 = struct.Struct("<I")
_F32 = np.dtype("<f4")


def _write_u32(buf: BinaryIO, value: int) -> None:
    buf.write(_U32.pack(value))


def _write_str(buf: BinaryIO, text: str) -> None:
    raw = text.encode("utf-8")
    _write_u32(buf, len(raw))
    buf.write(raw)


def _write_header(buf: BinaryIO, magic: bytes) -> None:
    buf.write(magic)
    _write_u32(buf, FORMAT_VERSION)


class _Reader:
    """Cursor over a byte buffer with bounds checks."""

    def __init__(self, data: bytes, source: str):
        self.data = data
        self.offset = 0
        self.source = source

    def take(self, n: int) -> bytes:
        end = self.offset + n
        if end > len(self.data):
            raise ParseError(f"{self.source}: truncated container")
        chunk = self.data[self.offset : end]
        self.offset = end
        return chunk

    def u32(self) -> int:
        return int(_U32.unpack(self.take(4))[0])

    def text(self) -> str:
        return self.take(self.u32()).decode("utf-8")

    def floats(self, count: int) -> np.ndarray:
        return np.frombuffer(self.take(4 * count), dtype=_F32).astype(np.float32)

    def header(self, magic: bytes) -> None:
        if self.take(len(magic)) != magic:
            raise ParseError(f"{self.source}: bad magic")
        version = self.u32()
        if version != FORMAT_VERSION:
            raise ParseError(f"{self.source}: unsupported version {version}")


def encode_spectrogram(ms: MultiSpectrogram) -> bytes:
    """Serialise a multi-spectrogram (float32, row-major)."""
    buf = io.BytesIO()
    _write_header(buf, SPECTROGRAM_MAGIC)
    for dim in ms.shape:
        _write_u32(buf, dim)
    buf.write(np.ascontiguousarray(ms.values, dtype=_F32).tobytes(order="C"))
    _write_u32(buf, len(ms.channels))
    for name in ms.channels:
        _write_str(buf, name)
    return buf.getvalue()


def decode_spectrogram(
    data: bytes, column_duration_s: float = 0.512, source: str = "<bytes>"
) -> MultiSpectrogram:
    """Inverse of ``encode_spectrogram``."""
    reader = _Reader(data, source)
    reader.header(SPECTROGRAM_MAGIC)
    c, f, n = reader.u32(), reader.u32(), reader.u32()
    values = reader.floats(c * f * n).reshape(c, f, n)
    names = tuple(reader.text() for _ in range(reader.u32()))
    return MultiSpectrogram(channels=names, values=values, column_duration_s=column_duration_s)


def encode_weights(description: dict[str, Any], tensors: dict[str, np.ndarray]) -> bytes:
    """Serialise named float32 tensors plus a JSON network description."""
    buf = io.BytesIO()
    _write_header(buf, WEIGHTS_MAGIC)
    _write_str(buf, orjson.dumps(description, option=orjson.OPT_SORT_KEYS).decode("utf-8"))
    names = list(tensors)
    _write_u32(buf, len(names))
    for name in names:
        _write_str(buf, name)
        shape = tensors[name].shape
        _write_u32(buf, len(shape))
        for dim in shape:
            _write_u32(buf, int(dim))
    for name in names:
        buf.write(np.ascontiguousarray(tensors[name], dtype=_F32).tobytes(order="C"))
    return buf.getvalue()


def decode_weights(data: bytes, source: str = "<bytes>") -> tuple[dict[str, Any], dict[str, np.ndarray]]:
    """Inverse of ``encode_weights``; tensor order is preserved."""
    reader = _Reader(data, source)
    reader.header(WEIGHTS_MAGIC)
    description = orjson.loads(reader.text())
    directory = []
    for _ in range(reader.u32()):
        name = reader.text()
        shape = tuple(reader.u32() for _ in range(reader.u32()))
        directory.append((name, shape))
    tensors = {}
    for name, shape in directory:
        tensors[name] = reader.floats(int(np.prod(shape, dtype=np.int64))).reshape(shape)
    return description, tensors


def write_bytes(path: Path, data: bytes) -> None:
    """Write atomically through a uniquely named temp file in the target directory."""
    tmp_name: str | None = None
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with tempfile.NamedTemporaryFile(
            dir=path.parent, prefix=f".{path.name}.", suffix=".tmp", delete=False
        ) as handle:
            tmp_name = handle.name
            handle.write(data)
        os.replace(tmp_name, path)
    except OSError as exc:
        if tmp_name is not None:
            Path(tmp_name).unlink(missing_ok=True)
        raise DataIoError(f"cannot write {path}: {exc}") from exc


def read_bytes(path: Path) -> bytes:
    try:
        return path.read_bytes()
    except OSError as exc:
        raise DataIoError(f"cannot read {path}: {exc}") from exc
