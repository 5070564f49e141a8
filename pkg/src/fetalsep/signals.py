"""Single-channel signal container and CSV round-trip.

CSV layout: a ``t,amplitude`` header followed by one sample per row. The
sampling rate travels in a JSON sidecar next to the CSV (``foo.csv`` ->
``foo.json`` with ``{"fs": 200, "label": "..."}``) or is supplied by the
caller.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import BadConfigError, IoError


@dataclass(frozen=True)
class Signal:
    """Uniformly sampled waveform with its sampling rate in Hz."""

    samples: np.ndarray
    fs: int
    label: str = ""

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        object.__setattr__(self, "samples", samples)
        if self.fs <= 0:
            raise BadConfigError(f"fs must be positive, got {self.fs}")
        if samples.ndim != 1:
            raise BadConfigError(f"samples must be 1-D, got shape {samples.shape}")
        if samples.size and not np.all(np.isfinite(samples)):
            raise BadConfigError("samples contain NaN or Inf")

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def duration_s(self) -> float:
        return len(self) / self.fs

    def with_samples(self, samples: np.ndarray, fs: int | None = None) -> "Signal":
        return Signal(samples, self.fs if fs is None else fs, self.label)


def write_signal_csv(sig: Signal, path: str | Path) -> None:
    """Write ``t,amplitude`` rows plus a JSON sidecar with fs and label."""
    path = Path(path)
    try:
        t = np.arange(len(sig)) / sig.fs
        with path.open("w") as fh:
            fh.write("t,amplitude\n")
            for ti, ai in zip(t, sig.samples):
                fh.write(f"{ti:.9g},{float(ai)!r}\n")
        sidecar = path.with_suffix(".json")
        sidecar.write_text(json.dumps({"fs": sig.fs, "label": sig.label}))
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def read_signal_csv(path: str | Path, fs: int | None = None) -> Signal:
    """Read a signal CSV; fs comes from the sidecar unless given explicitly."""
    path = Path(path)
    label = ""
    if fs is None:
        sidecar = path.with_suffix(".json")
        try:
            manifest = json.loads(sidecar.read_text())
        except OSError as exc:
            raise IoError(
                f"no sampling rate: pass fs or provide sidecar {sidecar}"
            ) from exc
        fs = int(manifest["fs"])
        label = manifest.get("label", "")
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    samples = data[:, 1] if data.size else np.array([])
    return Signal(samples, fs, label)
