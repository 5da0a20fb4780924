"""On-disk cache of multi-channel spectrograms."""

import hashlib
from pathlib import Path

import orjson

from src.config import get_settings
from src.models.spectrogram import MultiSpectrogram, StftConfig
from src.state.container import decode_spectrogram, encode_spectrogram, read_bytes, write_bytes
from src.utils.logging import get_logger

logger = get_logger(__name__)


class CacheManager:
    """Spectrogram cache keyed by recording file identity, channels and STFT settings."""

    suffix = ".spec"

    def __init__(self, cache_dir: Path | None = None) -> None:
        self.cache_dir = Path(cache_dir or get_settings().cache_dir)
        self.hits = 0
        self.misses = 0

    def key(self, recording_path: Path, channels: tuple[str, ...], cfg: StftConfig) -> str:
        """Stable key; changes when the recording file changes."""
        path = Path(recording_path).resolve()
        stat = path.stat()
        payload = {
            "path": str(path),
            "size": stat.st_size,
            "mtime_ns": stat.st_mtime_ns,
            "channels": list(channels),
            "stft": cfg.model_dump(mode="json"),
        }
        return hashlib.sha256(orjson.dumps(payload, option=orjson.OPT_SORT_KEYS)).hexdigest()

    def _path(self, key: str) -> Path:
        return self.cache_dir / key[:2] / f"{key}{self.suffix}"

    def exists(self, key: str) -> bool:
        """Check if a key exists."""
        return self._path(key).is_file()

    def get(self, key: str, column_duration_s: float = 0.512) -> MultiSpectrogram | None:
        """Get a cached spectrogram, or None."""
        path = self._path(key)
        if not path.is_file():
            self.misses += 1
            return None
        self.hits += 1
        return decode_spectrogram(read_bytes(path), column_duration_s, source=str(path))

    def set(self, key: str, ms: MultiSpectrogram) -> None:
        """Store a spectrogram."""
        write_bytes(self._path(key), encode_spectrogram(ms))
        logger.debug("cache_set", key=key[:12], shape=ms.describe())

    def delete(self, key: str) -> None:
        """Delete a cached entry."""
        self._path(key).unlink(missing_ok=True)
        logger.debug("cache_deleted", key=key[:12])

    def clear(self) -> int:
        """Remove every cached spectrogram; returns the count removed."""
        removed = 0
        if self.cache_dir.is_dir():
            for path in self.cache_dir.glob(f"*/*{self.suffix}"):
                path.unlink(missing_ok=True)
                removed += 1
        logger.info("cache_cleared", removed=removed, cache_dir=str(self.cache_dir))
        return removed
