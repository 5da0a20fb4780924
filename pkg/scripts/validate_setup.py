"""Validate that the environment can run the pipeline."""

import importlib.util
import sys
import tempfile
from pathlib import Path

REQUIRED_PACKAGES = [
    "numpy",
    "scipy",
    "pandas",
    "pydantic",
    "pydantic_settings",
    "structlog",
    "pythonjsonlogger",
    "orjson",
    "click",
]


def check_python_version() -> bool:
    """Check if Python version is 3.11+."""
    print("\nChecking Python version...")

    version = sys.version_info
    if version < (3, 11):
        print(f"  ❌ Python {version.major}.{version.minor} detected")
        print("  → Python 3.11+ required")
        return False

    print(f"  ✓ Python {version.major}.{version.minor} detected")
    return True


def check_packages() -> bool:
    """Check that runtime dependencies are importable."""
    print("\nChecking packages...")

    missing = [name for name in REQUIRED_PACKAGES if importlib.util.find_spec(name) is None]
    if missing:
        print(f"  ❌ Missing packages: {', '.join(missing)}")
        print("  → Run: pip install -e '.[dev]'")
        return False

    print("  ✓ All packages importable")
    return True


def check_directories() -> bool:
    """Check that the cache and report directories are writable."""
    from src.config import get_settings

    print("\nChecking directories...")

    settings = get_settings()
    ok = True
    for label, directory in (("cache", settings.cache_dir), ("reports", settings.output_dir)):
        try:
            directory.mkdir(parents=True, exist_ok=True)
            with tempfile.NamedTemporaryFile(dir=directory):
                pass
            print(f"  ✓ {label}: {directory}")
        except OSError as e:
            print(f"  ❌ {label} directory {directory} not writable: {e}")
            ok = False
    return ok


def check_pipeline() -> bool:
    """Run one recording through channels, STFT and a forward pass."""
    import numpy as np

    from src.dsp.stft import build_multispectrogram
    from src.micronet import build_network
    from src.models.network import CnnConfig, NetworkSpec
    from src.models.telemetry import Group, Recording, Task
    from src.telemetry.channels import derive_channels

    print("\nChecking pipeline...")

    t = np.arange(8250) / 250.0
    recording = Recording(
        subject_id="CHECK",
        group=Group.CTL,
        task=Task.SPIRAL_RIGHT,
        t=t,
        x=np.cos(t),
        y=np.sin(t),
        p=np.full(t.size, 0.5),
    )
    ms = build_multispectrogram(derive_channels(recording), ["speed", "vx", "vy", "p"])
    if ms.shape != (4, 129, 65):
        print(f"  ❌ unexpected spectrogram shape {ms.shape}")
        return False
    network = build_network(NetworkSpec(cnn=CnnConfig()))
    probabilities = network.predict_proba([ms.values[None]])
    print(f"  ✓ 4×129×65 spectrogram, {network.n_parameters} parameters, p = {probabilities[0, 1]:.3f}")
    return True


def main() -> None:
    """Run all validation checks."""
    print("\n" + "=" * 60)
    print("  graphocog - Setup Validation")
    print("=" * 60)

    if not (Path.cwd() / "src").is_dir():
        print("\n  ℹ️  Run from the repository root so that 'src' is importable")

    checks = [
        ("Python Version", check_python_version),
        ("Packages", check_packages),
        ("Directories", check_directories),
        ("Pipeline", check_pipeline),
    ]

    results = []
    for name, check in checks:
        try:
            results.append((name, check()))
        except Exception as e:
            print(f"  ❌ Error during {name} check: {e}")
            results.append((name, False))

    print("\n" + "=" * 60)
    print("  Validation Summary")
    print("=" * 60)

    all_passed = True
    for name, passed in results:
        status = "✓" if passed else "❌"
        print(f"  {status} {name}")
        all_passed = all_passed and passed

    print()
    sys.exit(0 if all_passed else 1)


if __name__ == "__main__":
    main()
