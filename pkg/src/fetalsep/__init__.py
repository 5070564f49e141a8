"""Fetal ECG separation toolkit.

Synthetic abdominal mixtures, signal conditioning, an attention CycleGAN
trained with hand-derived gradients, QRS detection and beat scoring, and
the signal-fidelity/agreement metric suite.
"""

from .signals import Signal, read_signal_csv, write_signal_csv
from .preprocessing import (
    PreprocessConfig,
    WindowSet,
    bandpass,
    preprocess,
    resample,
    savgol,
    slide,
    stitch,
    truncate_ends,
    zscore,
)
from .synth import (
    BeatModel,
    MixtureConfig,
    RrSeries,
    add_noise,
    gen_ecg,
    gen_rr,
    grid_configs,
    mix_abdominal,
    snr_db,
)

__version__ = "0.1.0"

__all__ = [
    "Signal",
    "read_signal_csv",
    "write_signal_csv",
    "PreprocessConfig",
    "WindowSet",
    "bandpass",
    "preprocess",
    "resample",
    "savgol",
    "slide",
    "stitch",
    "truncate_ends",
    "zscore",
    "BeatModel",
    "MixtureConfig",
    "RrSeries",
    "add_noise",
    "gen_ecg",
    "gen_rr",
    "grid_configs",
    "mix_abdominal",
    "snr_db",
]
