"""Deterministic conditioning chain for abdominal and fetal ECG traces.

Order of operations for a raw recording: trim noisy ends, band-limit at the
native rate (doubling as anti-aliasing), resample to the working rate,
polynomial smoothing, then rectangular windowing with per-window z-scoring.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from .errors import (
    BadConfigError,
    InvalidBandError,
    ShapeMismatchError,
    TooShortError,
)
from .signals import Signal

ZSCORE_STD_FLOOR = 1e-12


@dataclass(frozen=True)
class PreprocessConfig:
    """Parameters of the conditioning chain."""

    target_fs: int = 200
    band_lo: float = 1.0
    band_hi: float = 100.0
    savgol_window: int = 9
    savgol_order: int = 3
    truncate_s: float = 10.0
    window_len: int = 200
    stride: int = 100

    def __post_init__(self):
        if not 0 < self.band_lo < self.band_hi <= self.target_fs / 2:
            raise BadConfigError(
                f"need 0 < band_lo < band_hi <= target_fs/2, got "
                f"({self.band_lo}, {self.band_hi}) at {self.target_fs} Hz"
            )
        if self.savgol_order >= self.savgol_window or self.savgol_window % 2 == 0:
            raise BadConfigError("savgol_window must be odd and > savgol_order")
        if self.window_len < 2 or self.stride < 1:
            raise BadConfigError("window_len >= 2 and stride >= 1 required")


@dataclass(frozen=True)
class WindowSet:
    """Fixed-length windows cut from one signal, plus stitching metadata.

    Rows of ``windows`` are z-scored unless the corresponding entry of
    ``constant`` is set (dead segment: the row is all zeros).
    """

    windows: np.ndarray  # (n, window_len)
    window_len: int
    stride: int
    origin_fs: int
    offsets: np.ndarray  # start index of each window in the source signal
    constant: np.ndarray  # bool per window

    @property
    def n_windows(self) -> int:
        return int(self.windows.shape[0])


def truncate_ends(s: Signal, seconds: float) -> Signal:
    """Drop ``seconds`` from both ends (edge artifacts live there)."""
    cut = int(round(seconds * s.fs))
    if len(s) <= 2 * cut or cut < 0:
        raise TooShortError(
            f"signal of {len(s)} samples cannot lose 2x{cut} samples"
        )
    if cut == 0:
        return s
    return s.with_samples(s.samples[cut:-cut])


def resample(s: Signal, target_fs: int) -> Signal:
    """Linear-interpolation resampling onto a uniform grid at ``target_fs``.

    Caller is responsible for band-limiting below ``target_fs/2`` first when
    downsampling.
    """
    if target_fs <= 0:
        raise BadConfigError(f"target_fs must be positive, got {target_fs}")
    if target_fs == s.fs:
        return s
    n_out = int(round(len(s) * target_fs / s.fs))
    t_in = np.arange(len(s)) / s.fs
    t_out = np.arange(n_out) / target_fs
    out = np.interp(t_out, t_in, s.samples)
    return s.with_samples(out, fs=target_fs)


def bandpass(s: Signal, lo: float, hi: float) -> Signal:
    """Zero-phase 4th-order Butterworth band-pass between ``lo`` and ``hi`` Hz.

    When ``hi`` sits exactly at Nyquist only the high-pass section is applied;
    a band edge at Nyquist is numerically degenerate.
    """
    nyq = s.fs / 2
    if not 0 < lo < hi <= nyq:
        raise InvalidBandError(f"need 0 < lo < hi <= {nyq}, got ({lo}, {hi})")
    if hi >= nyq:
        sos = sps.butter(4, lo, btype="highpass", fs=s.fs, output="sos")
    else:
        sos = sps.butter(4, [lo, hi], btype="bandpass", fs=s.fs, output="sos")
    return s.with_samples(sps.sosfiltfilt(sos, s.samples))


def savgol(s: Signal, window: int, order: int) -> Signal:
    """Savitzky-Golay smoothing.

    Interior samples take the center value of a sliding least-squares
    polynomial fit; edge samples are evaluated from the fit over the first or
    last full window, which keeps polynomials of degree <= order exact
    everywhere (mirrored padding would not).
    """
    if window % 2 == 0 or order >= window:
        raise BadConfigError(f"window must be odd and > order, got ({window}, {order})")
    if len(s) < window:
        raise BadConfigError(f"signal of {len(s)} samples shorter than window {window}")
    return s.with_samples(sps.savgol_filter(s.samples, window, order, mode="interp"))


def zscore(w: np.ndarray) -> tuple[np.ndarray, bool]:
    """Center and scale by population std; constant windows become zeros.

    Returns the normalized window and a flag marking the degenerate case.
    """
    w = np.asarray(w, dtype=np.float64)
    if w.size < 2:
        raise BadConfigError("zscore needs at least 2 samples")
    std = w.std()
    if std < ZSCORE_STD_FLOOR:
        return np.zeros_like(w), True
    return (w - w.mean()) / std, False


def slide(s: Signal, window_len: int = 200, stride: int = 100) -> WindowSet:
    """Cut a rectangular sliding window, z-scoring every row."""
    if window_len < 2 or stride < 1:
        raise BadConfigError("window_len >= 2 and stride >= 1 required")
    if len(s) < window_len:
        raise TooShortError(f"signal of {len(s)} samples < window {window_len}")
    n = (len(s) - window_len) // stride + 1
    offsets = np.arange(n) * stride
    windows = np.empty((n, window_len))
    constant = np.zeros(n, dtype=bool)
    for i, off in enumerate(offsets):
        windows[i], constant[i] = zscore(s.samples[off : off + window_len])
    return WindowSet(windows, window_len, stride, s.fs, offsets, constant)


def stitch(ws: WindowSet, processed: np.ndarray) -> Signal:
    """Reassemble per-window outputs into one trace.

    Overlapping samples are averaged; samples never covered by a window
    stay zero. Output length runs to the end of the last window.
    """
    processed = np.asarray(processed, dtype=np.float64)
    if processed.shape != ws.windows.shape:
        raise ShapeMismatchError(
            f"processed {processed.shape} vs windows {ws.windows.shape}"
        )
    out_len = int(ws.offsets[-1]) + ws.window_len
    acc = np.zeros(out_len)
    cover = np.zeros(out_len)
    for row, off in zip(processed, ws.offsets):
        acc[off : off + ws.window_len] += row
        cover[off : off + ws.window_len] += 1.0
    covered = cover > 0
    acc[covered] /= cover[covered]
    return Signal(acc, ws.origin_fs)


def preprocess(s: Signal, cfg: PreprocessConfig = PreprocessConfig()) -> Signal:
    """Full conditioning chain: truncate, band-pass, resample, smooth."""
    out = truncate_ends(s, cfg.truncate_s) if cfg.truncate_s > 0 else s
    out = bandpass(out, cfg.band_lo, min(cfg.band_hi, out.fs / 2))
    out = resample(out, cfg.target_fs)
    out = savgol(out, cfg.savgol_window, cfg.savgol_order)
    return out
