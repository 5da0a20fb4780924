"""Delete every cached spectrogram (useful after changing STFT code)."""

from src.config import get_settings
from src.state.manager import CacheManager


def reset_cache() -> None:
    """Clear the spectrogram cache directory."""
    cache_dir = get_settings().cache_dir
    print(f"\n⚠️  WARNING: This will delete ALL cached spectrograms under {cache_dir}!")
    response = input("Are you sure? (yes/no): ")

    if response.lower() != "yes":
        print("Cancelled.")
        return

    removed = CacheManager(cache_dir).clear()
    print(f"✓ Removed {removed} cached spectrogram(s)\n")


if __name__ == "__main__":
    reset_cache()
