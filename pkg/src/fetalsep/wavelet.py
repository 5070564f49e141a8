"""Biorthogonal 9/7 wavelet analysis/synthesis via the lifting scheme.

Critically sampled at every length (odd levels keep the extra sample in the
approximation), symmetric boundary extension, and normalized so the
coefficients equal a direct convolve-and-downsample with the published 9/7
analysis taps under whole-sample symmetric extension.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TooShortError

# lifting factorization constants of the 9/7 filter pair
_ALPHA = -1.586134342059924
_BETA = -0.052980118572961
_GAMMA = 0.882911075530934
_DELTA = 0.443506852043971
_K = 1.230174104914001


@dataclass(frozen=True)
class SubbandSet:
    """Wavelet coefficients: detail levels 1..L (finest first) plus approximation."""

    details: tuple[np.ndarray, ...]
    approx: np.ndarray
    input_len: int

    @property
    def levels(self) -> int:
        return len(self.details)

    def subbands(self) -> list[np.ndarray]:
        """All L+1 coefficient arrays, details first, approximation last."""
        return [*self.details, self.approx]

    @property
    def coeff_count(self) -> int:
        return sum(b.size for b in self.subbands())


def _predict(d: np.ndarray, s: np.ndarray, coeff: float) -> None:
    # d[i] += coeff * (s[i] + s[i+1]); missing right neighbor mirrors
    nd = d.size
    if s.size > nd:
        d += coeff * (s[:nd] + s[1 : nd + 1])
    else:
        d[:-1] += coeff * (s[:-1] + s[1:])
        d[-1] += 2 * coeff * s[-1]


def _update(s: np.ndarray, d: np.ndarray, coeff: float) -> None:
    # s[i] += coeff * (d[i-1] + d[i]); missing neighbors mirror
    ns = s.size
    s[0] += 2 * coeff * d[0]
    if ns - 1 > d.size - 1:  # odd split: s has a trailing sample
        s[1:-1] += coeff * (d[:-1] + d[1:])
        s[-1] += 2 * coeff * d[-1]
    else:
        s[1:] += coeff * (d[:-1] + d[1:])


def _analyze_level(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    s = x[0::2].astype(np.float64, copy=True)
    d = x[1::2].astype(np.float64, copy=True)
    _predict(d, s, _ALPHA)
    _update(s, d, _BETA)
    _predict(d, s, _GAMMA)
    _update(s, d, _DELTA)
    return s / _K, d * _K


def _synthesize_level(s: np.ndarray, d: np.ndarray) -> np.ndarray:
    s = s * _K
    d = d / _K
    _update(s, d, -_DELTA)
    _predict(d, s, -_GAMMA)
    _update(s, d, -_BETA)
    _predict(d, s, -_ALPHA)
    x = np.empty(s.size + d.size)
    x[0::2] = s
    x[1::2] = d
    return x


def dwt_cdf97(x: np.ndarray, levels: int = 5) -> SubbandSet:
    """Multi-level 9/7 analysis of a 1-D signal."""
    x = np.asarray(x, dtype=np.float64)
    if x.size < 2**levels:
        raise TooShortError(f"need at least 2^{levels} samples, got {x.size}")
    details = []
    approx = x
    for _ in range(levels):
        approx, d = _analyze_level(approx)
        details.append(d)
    return SubbandSet(tuple(details), approx, x.size)


def idwt_cdf97(sb: SubbandSet) -> np.ndarray:
    """Inverse of :func:`dwt_cdf97`; reconstructs the input exactly."""
    x = sb.approx
    for d in reversed(sb.details):
        x = _synthesize_level(x, d)
    return x
