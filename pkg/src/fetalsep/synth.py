"""Synthetic maternal/fetal ECG mixtures with known beat positions.

Beats are sums of five Gaussian bumps (P, Q, R, S, T) laid out on a phase
ramp that spans each RR interval, the classic dynamical-model
parameterization. Mixtures add an attenuated fetal trace to the maternal
trace plus calibrated noise, giving paired ground truth for training and
evaluation at desk scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import BadConfigError, DegenerateSignalError, ZeroNoiseError
from .signals import Signal

FETAL_HR_GRID = (115, 125, 135, 145, 155, 160)
MATERNAL_HR_GRID = (65, 77, 89, 100)

RR_MIN_S = 0.2
RR_MAX_S = 3.0

# P, Q, R, S, T phase centers (rad), amplitudes, Gaussian widths (rad)
_BASE_THETA = (-math.pi / 3, -math.pi / 12, 0.0, math.pi / 12, math.pi / 2)
_BASE_AMP = (1.2, -5.0, 30.0, -7.5, 0.75)
_BASE_WIDTH = (0.25, 0.1, 0.1, 0.1, 0.4)


@dataclass(frozen=True)
class BeatModel:
    """Gaussian-sum beat morphology over one phase cycle (-pi, pi]."""

    components: tuple[tuple[float, float, float], ...]  # (theta, amp, width)

    def __post_init__(self):
        thetas = [c[0] for c in self.components]
        if any(b <= 0 for _, _, b in self.components):
            raise BadConfigError("Gaussian widths must be positive")
        if any(t2 <= t1 for t1, t2 in zip(thetas, thetas[1:])):
            raise BadConfigError("component phases must be strictly increasing")
        if thetas[0] <= -math.pi or thetas[-1] > math.pi:
            raise BadConfigError("component phases must lie in (-pi, pi]")

    def waveform(self, theta: np.ndarray) -> np.ndarray:
        """Evaluate the beat shape at the given phases."""
        theta = np.asarray(theta, dtype=np.float64)
        out = np.zeros_like(theta)
        for t_i, a_i, b_i in self.components:
            out += a_i * np.exp(-((theta - t_i) ** 2) / (2 * b_i**2))
        return out

    @classmethod
    def _scaled(cls, widths: tuple[float, ...]) -> "BeatModel":
        raw = cls(tuple(zip(_BASE_THETA, _BASE_AMP, widths)))
        peak = raw.waveform(np.linspace(-math.pi, math.pi, 20001)).max()
        comps = tuple((t, a / peak, b) for t, a, b in raw.components)
        return cls(comps)

    @classmethod
    def maternal(cls) -> "BeatModel":
        """Adult morphology, R peak scaled to 1 unit."""
        return cls._scaled(_BASE_WIDTH)

    @classmethod
    def fetal(cls) -> "BeatModel":
        """Narrower waves (0.6x widths) for the faster fetal morphology."""
        return cls._scaled(tuple(0.6 * b for b in _BASE_WIDTH))


@dataclass(frozen=True)
class RrSeries:
    """Beat-to-beat durations in seconds."""

    intervals: np.ndarray

    def __post_init__(self):
        intervals = np.asarray(self.intervals, dtype=np.float64)
        object.__setattr__(self, "intervals", intervals)
        if intervals.size == 0:
            raise BadConfigError("need at least one interval")
        if np.any(intervals <= RR_MIN_S) or np.any(intervals >= RR_MAX_S):
            raise BadConfigError(
                f"intervals must lie in ({RR_MIN_S}, {RR_MAX_S}) s"
            )


@dataclass(frozen=True)
class MixtureConfig:
    """One abdominal mixture: heart rates, amplitudes, noise, duration."""

    maternal_hr: float = 77.0
    fetal_hr: float = 135.0
    hrv_std: float = 0.02
    fetal_amp_ratio: float = 0.25
    noise_snr_db: float = math.inf
    noise_kind: str = "emg"
    fs: int = 200
    duration_s: float = 60.0
    seed: int = 0

    def __post_init__(self):
        if not 40 <= self.maternal_hr <= 130:
            raise BadConfigError(f"maternal_hr {self.maternal_hr} outside 40-130 bpm")
        if not 90 <= self.fetal_hr <= 200:
            raise BadConfigError(f"fetal_hr {self.fetal_hr} outside 90-200 bpm")
        if not 0 < self.fetal_amp_ratio < 1:
            raise BadConfigError("fetal_amp_ratio must be in (0, 1)")
        if self.fs <= 0 or self.duration_s <= 0:
            raise BadConfigError("fs and duration_s must be positive")


def gen_rr(mean_hr: float, hrv_std: float, n_beats: int, seed) -> RrSeries:
    """Gaussian-jittered RR intervals around 60/mean_hr, clamped to bounds."""
    if mean_hr <= 0 or n_beats < 1:
        raise BadConfigError("mean_hr > 0 and n_beats >= 1 required")
    rng = np.random.default_rng(seed)
    base = 60.0 / mean_hr
    intervals = base + rng.normal(0.0, hrv_std, size=n_beats) if hrv_std > 0 else np.full(n_beats, base)
    eps = 1e-6
    intervals = np.clip(intervals, RR_MIN_S + eps, RR_MAX_S - eps)
    return RrSeries(intervals)


def gen_ecg(bm: BeatModel, rr: RrSeries, fs: int) -> tuple[Signal, np.ndarray]:
    """Render an ECG trace from a beat model and an RR series.

    Each beat rides a linear phase ramp from -pi to pi across its RR
    interval; R-peak indices are the samples where the ramp crosses the R
    phase.
    """
    starts = np.concatenate([[0.0], np.cumsum(rr.intervals)])
    n = int(round(fs * starts[-1]))
    t = np.arange(n) / fs
    beat = np.clip(np.searchsorted(starts, t, side="right") - 1, 0, len(rr.intervals) - 1)
    theta = -math.pi + 2 * math.pi * (t - starts[beat]) / rr.intervals[beat]
    samples = bm.waveform(theta)

    # R = largest-amplitude component; peaks sit where the ramp reaches its phase
    theta_r = max(bm.components, key=lambda c: c[1])[0]
    frac = (theta_r + math.pi) / (2 * math.pi)
    crossing = starts[:-1] + frac * rr.intervals
    r_peaks = np.ceil(crossing * fs - 1e-9).astype(np.int64)
    r_peaks = r_peaks[r_peaks < n]
    return Signal(samples, fs, "synthetic-ecg"), r_peaks


def snr_db(signal_ref: Signal, noise: Signal) -> float:
    """Power ratio in dB between a reference signal and a noise trace."""
    s = signal_ref.samples
    n = noise.samples
    if s.size != n.size:
        raise BadConfigError(f"length mismatch: {s.size} vs {n.size}")
    p_noise = float(np.sum(n**2))
    if p_noise == 0.0:
        raise ZeroNoiseError("noise has zero power")
    return 10.0 * math.log10(float(np.sum(s**2)) / p_noise)


def make_noise(kind: str, n: int, fs: int, rng: np.random.Generator) -> np.ndarray:
    """Unit-scale noise template of the requested kind."""
    t = np.arange(n) / fs
    if kind == "emg":
        return rng.standard_normal(n)
    if kind == "baseline":
        return np.sin(2 * math.pi * 0.3 * t + rng.uniform(0, 2 * math.pi))
    if kind == "powerline":
        return np.sin(2 * math.pi * 50.0 * t)
    raise BadConfigError(f"unknown noise kind {kind!r}")


def add_noise(s: Signal, kind: str, snr_target_db: float, seed) -> Signal:
    """Add noise scaled so the signal-to-noise ratio hits ``snr_target_db``."""
    if math.isinf(snr_target_db) and snr_target_db > 0:
        return s
    p_signal = float(np.sum(s.samples**2))
    if p_signal == 0.0:
        raise DegenerateSignalError("signal has zero power; SNR undefined")
    rng = np.random.default_rng(seed)
    noise = make_noise(kind, len(s), s.fs, rng)
    p_noise_raw = float(np.sum(noise**2))
    if p_noise_raw == 0.0:
        raise ZeroNoiseError(f"{kind} noise template has zero power at this length")
    target_p_noise = p_signal / 10 ** (snr_target_db / 10)
    noise *= math.sqrt(target_p_noise / p_noise_raw)
    return s.with_samples(s.samples + noise)


def mix_abdominal(
    cfg: MixtureConfig,
) -> tuple[Signal, Signal, Signal, np.ndarray, np.ndarray]:
    """Build one abdominal mixture with its ground-truth components.

    Returns (abdominal, fetal_truth, maternal_truth, fetal_r_peaks,
    maternal_r_peaks); all signals share fs and length, and every output is
    a pure function of the config (including its seed).
    """
    seeds = np.random.SeedSequence(cfg.seed).spawn(3)
    n = int(round(cfg.duration_s * cfg.fs))

    def render(bm: BeatModel, hr: float, seed_seq) -> tuple[Signal, np.ndarray]:
        n_beats = int(math.ceil(cfg.duration_s * hr / 60.0)) + 4
        rr = gen_rr(hr, cfg.hrv_std, n_beats, seed_seq)
        sig, peaks = gen_ecg(bm, rr, cfg.fs)
        if len(sig) < n:
            raise BadConfigError("generated trace shorter than requested duration")
        return sig.with_samples(sig.samples[:n]), peaks[peaks < n]

    maternal, m_peaks = render(BeatModel.maternal(), cfg.maternal_hr, seeds[0])
    fetal, f_peaks = render(BeatModel.fetal(), cfg.fetal_hr, seeds[1])
    clean = maternal.samples + cfg.fetal_amp_ratio * fetal.samples
    abdominal = add_noise(
        Signal(clean, cfg.fs, "abdominal"), cfg.noise_kind, cfg.noise_snr_db, seeds[2]
    )
    maternal = Signal(maternal.samples, cfg.fs, "maternal-truth")
    fetal = Signal(fetal.samples, cfg.fs, "fetal-truth")
    return abdominal, fetal, maternal, f_peaks, m_peaks


def grid_configs(base: MixtureConfig = MixtureConfig()) -> dict[str, MixtureConfig]:
    """The 24 mixtures spanning the maternal x fetal heart-rate grid.

    Cell seeds are derived as base.seed + cell index so cells stay
    independent yet reproducible.
    """
    cells: dict[str, MixtureConfig] = {}
    idx = 0
    for mhr in MATERNAL_HR_GRID:
        for fhr in FETAL_HR_GRID:
            name = f"m{mhr}_f{fhr}"
            cells[name] = replace(
                base, maternal_hr=mhr, fetal_hr=fhr, seed=base.seed + idx
            )
            idx += 1
    return cells
