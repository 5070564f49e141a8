"""R-peak detection and beat-matched scoring.

The detector is the classic Pan-Tompkins chain (band-pass, derivative,
squaring, moving-window integration, adaptive dual thresholds with
search-back and T-wave rejection), run zero-phase so fiducials stay aligned
with the raw trace. Scoring matches detections to reference peaks one-to-one
within a tolerance window.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from .errors import BadConfigError, FsMismatchError, TooShortError
from .signals import Signal

REFRACTORY_S = 0.2
TWAVE_WINDOW_S = 0.36
INTEGRATION_S = 0.15
REFINE_S = 0.05
SEARCHBACK_FACTOR = 1.66


@dataclass(frozen=True)
class PeakList:
    """Strictly increasing R-peak sample indices at a given rate."""

    indices: np.ndarray
    fs: int

    def __post_init__(self):
        indices = np.asarray(self.indices, dtype=np.int64)
        object.__setattr__(self, "indices", indices)
        if indices.size and np.any(np.diff(indices) < int(REFRACTORY_S * self.fs)):
            raise BadConfigError("peaks violate the refractory spacing")

    def __len__(self) -> int:
        return int(self.indices.size)


@dataclass(frozen=True)
class MatchResult:
    """Outcome of one-to-one beat matching."""

    tp: int
    fp: int
    fn: int
    matched_pairs: tuple[tuple[int, int], ...]  # (detected, reference)


def _bandpass_5_15(x: np.ndarray, fs: int) -> np.ndarray:
    sos = sps.butter(2, [5.0, 15.0], btype="bandpass", fs=fs, output="sos")
    return sps.sosfiltfilt(sos, x)


def _derivative(x: np.ndarray) -> np.ndarray:
    # symmetric 5-point slope estimate
    kernel = np.array([1.0, 2.0, 0.0, -2.0, -1.0]) / 8.0
    return np.convolve(x, kernel, mode="same")


def _integrate(x: np.ndarray, fs: int) -> np.ndarray:
    w = int(round(INTEGRATION_S * fs))
    w += 1 - w % 2  # odd, so 'same' convolution stays centered
    return np.convolve(x, np.ones(w) / w, mode="same")


def pan_tompkins(s: Signal) -> PeakList:
    """Detect R peaks; indices refer to samples of the input signal."""
    fs = s.fs
    if fs < 100:
        raise BadConfigError(f"detector needs fs >= 100 Hz, got {fs}")
    if len(s) < 2 * fs:
        raise TooShortError("need at least 2 s of signal")
    x = s.samples
    filtered = _bandpass_5_15(x, fs)
    deriv = _derivative(filtered)
    mwi = _integrate(deriv**2, fs)

    refractory = int(round(REFRACTORY_S * fs))
    candidates, _ = sps.find_peaks(mwi, distance=refractory)
    if candidates.size == 0:
        return PeakList(np.array([], dtype=np.int64), fs)

    head = mwi[: 2 * fs]
    spki = 0.25 * float(head.max())
    npki = 0.5 * float(head.mean())

    accepted: list[int] = []
    rr_intervals: list[int] = []
    pending: list[int] = []  # sub-threshold candidates since the last beat

    def threshold1() -> float:
        return npki + 0.25 * (spki - npki)

    def slope_near(idx: int) -> float:
        lo = max(0, idx - int(0.075 * fs))
        hi = min(len(deriv), idx + int(0.075 * fs) + 1)
        return float(np.max(np.abs(deriv[lo:hi])))

    def record_beat(idx: int) -> None:
        if accepted:
            rr_intervals.append(idx - accepted[-1])
            del rr_intervals[:-8]
        accepted.append(idx)
        pending.clear()

    for idx in candidates:
        peak = float(mwi[idx])
        if peak >= threshold1():
            # a large peak shortly after a beat may be its T wave
            if (
                accepted
                and idx - accepted[-1] < int(TWAVE_WINDOW_S * fs)
                and slope_near(idx) < 0.5 * slope_near(accepted[-1])
            ):
                npki = 0.125 * peak + 0.875 * npki
                continue
            spki = 0.125 * peak + 0.875 * spki
            record_beat(int(idx))
        else:
            npki = 0.125 * peak + 0.875 * npki
            pending.append(int(idx))
            # search back with the lower threshold after a long gap
            if accepted and len(rr_intervals) >= 2:
                rr_avg = float(np.mean(rr_intervals))
                if idx - accepted[-1] > SEARCHBACK_FACTOR * rr_avg:
                    viable = [
                        j
                        for j in pending
                        if mwi[j] >= 0.5 * threshold1()
                        and j - accepted[-1] >= refractory
                    ]
                    if viable:
                        best = max(viable, key=lambda j: mwi[j])
                        spki = 0.25 * float(mwi[best]) + 0.75 * spki
                        record_beat(best)

    if not accepted:
        return PeakList(np.array([], dtype=np.int64), fs)

    # snap each fiducial to the raw-signal maximum nearby
    refine = int(round(REFINE_S * fs))
    refined: list[int] = []
    for idx in accepted:
        lo = max(0, idx - refine)
        hi = min(len(x), idx + refine + 1)
        snapped = lo + int(np.argmax(x[lo:hi]))
        if refined and snapped - refined[-1] < refractory:
            continue
        refined.append(snapped)
    return PeakList(np.asarray(refined, dtype=np.int64), fs)


def match_beats(detected: PeakList, reference: PeakList, tol: int = 6) -> MatchResult:
    """One-to-one matching of detections to references within ``tol`` samples.

    Candidate pairs are taken greedily in order of increasing distance, so
    each reference grabs its nearest unmatched detection first.
    """
    if detected.fs != reference.fs:
        raise FsMismatchError(f"fs mismatch: {detected.fs} vs {reference.fs}")
    det = detected.indices
    ref = reference.indices
    pairs = [
        (abs(int(d) - int(r)), ri, di)
        for ri, r in enumerate(ref)
        for di, d in enumerate(det)
        if abs(int(d) - int(r)) <= tol
    ]
    pairs.sort()
    det_used = np.zeros(det.size, dtype=bool)
    ref_used = np.zeros(ref.size, dtype=bool)
    matched: list[tuple[int, int]] = []
    for _, ri, di in pairs:
        if det_used[di] or ref_used[ri]:
            continue
        det_used[di] = ref_used[ri] = True
        matched.append((int(det[di]), int(ref[ri])))
    tp = len(matched)
    return MatchResult(tp, det.size - tp, ref.size - tp, tuple(matched))


def prf(m: MatchResult) -> tuple[float, float, float]:
    """Sensitivity, positive predictive value, and F1; 0/0 counts as 0."""
    se = m.tp / (m.tp + m.fn) if m.tp + m.fn else 0.0
    ppv = m.tp / (m.tp + m.fp) if m.tp + m.fp else 0.0
    f1 = 2 * ppv * se / (ppv + se) if ppv + se else 0.0
    return se, ppv, f1
