"""Signal-fidelity and agreement statistics.

R-squared goodness of fit, two-way random-effects intraclass correlation,
wavelet energy-weighted diagnostic distortion (WEDD) with its quality
categories, Bland-Altman bias/limits, the paired t-test, and Kendall's
tau-b with tie correction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import (
    AllTiedError,
    ConstantReferenceError,
    DegenerateVarianceError,
    ShapeMismatchError,
    ZeroEnergyError,
)
from .wavelet import dwt_cdf97

WEDD_CATEGORIES = ("excellent", "very good", "good", "not bad", "bad")


@dataclass(frozen=True)
class WeddResult:
    """Distortion in percent, its per-subband terms, and the quality label."""

    wedd: float
    wprd: tuple[float, ...]  # percent per subband, finest detail first
    weights: tuple[float, ...]
    category: str


@dataclass(frozen=True)
class AgreementReport:
    """Fidelity and agreement summary between a reference and a prediction."""

    r2: float
    icc: float
    bias: float
    loa_lo: float
    loa_hi: float
    t_stat: float
    p_value: float


def _pair(y, y_hat) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(y, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    if y.shape != y_hat.shape or y.ndim != 1:
        raise ShapeMismatchError(f"need equal 1-D vectors, got {y.shape} vs {y_hat.shape}")
    return y, y_hat


def r_squared(y, y_hat) -> float:
    """1 - SS_res/SS_tot; 1 means a perfect fit, <= 0 no better than the mean."""
    y, y_hat = _pair(y, y_hat)
    if y.size < 2:
        raise ShapeMismatchError("need at least 2 samples")
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        raise ConstantReferenceError("reference is constant; R^2 undefined")
    ss_res = float(np.sum((y - y_hat) ** 2))
    return 1.0 - ss_res / ss_tot


def icc(y, y_hat) -> float:
    """ICC(2,1): two-way random effects, absolute agreement, single measurement."""
    y, y_hat = _pair(y, y_hat)
    n = y.size
    if n < 3:
        raise ShapeMismatchError("need at least 3 paired samples")
    ratings = np.stack([y, y_hat], axis=1)  # n subjects x k=2 raters
    k = 2
    grand = ratings.mean()
    row_means = ratings.mean(axis=1)
    col_means = ratings.mean(axis=0)
    msr = k * np.sum((row_means - grand) ** 2) / (n - 1)
    msc = n * np.sum((col_means - grand) ** 2) / (k - 1)
    sse = np.sum((ratings - row_means[:, None] - col_means[None, :] + grand) ** 2)
    mse = sse / ((n - 1) * (k - 1))
    denom = msr + (k - 1) * mse + (k / n) * (msc - mse)
    if abs(denom) < 1e-300:
        raise DegenerateVarianceError("all variance components vanish")
    return float((msr - mse) / denom)


def wedd(y, y_hat, levels: int = 5) -> WeddResult:
    """Energy-weighted subband distortion between reference and prediction.

    Both signals are mean-subtracted, decomposed into ``levels`` detail
    subbands plus the approximation, and compared subband-wise by relative
    RMS difference. Weights are the reference's subband-energy fractions, so
    a zero prediction scores exactly 100%.
    """
    y, y_hat = _pair(y, y_hat)
    ref = dwt_cdf97(y - y.mean(), levels).subbands()
    pred = dwt_cdf97(y_hat - y_hat.mean(), levels).subbands()
    energies = np.array([float(np.sum(b**2)) for b in ref])
    total = energies.sum()
    if total == 0.0:
        raise ZeroEnergyError("reference has no subband energy")
    weights = energies / total
    wprd = np.zeros(len(ref))
    for i, (rb, pb) in enumerate(zip(ref, pred)):
        if energies[i] == 0.0:
            continue  # zero-weight subband, skipped
        wprd[i] = math.sqrt(float(np.sum((rb - pb) ** 2)) / energies[i])
    value = float(np.dot(weights, wprd)) * 100.0
    return WeddResult(value, tuple(wprd * 100.0), tuple(weights), classify_wedd(value))


def classify_wedd(value: float) -> str:
    """Quality label for a WEDD percentage (lower-inclusive bins)."""
    if value < 0:
        raise ValueError("WEDD is non-negative")
    if value < 4.6:
        return "excellent"
    if value < 7.0:
        return "very good"
    if value < 11.2:
        return "good"
    if value <= 13.6:
        return "not bad"
    return "bad"


def bland_altman(y, y_hat) -> tuple[float, float, float, np.ndarray, np.ndarray]:
    """Bias and 1.96-SD limits of agreement, with per-point (mean, diff) pairs."""
    y, y_hat = _pair(y, y_hat)
    if y.size < 2:
        raise ShapeMismatchError("need at least 2 samples")
    diffs = y_hat - y
    means = (y_hat + y) / 2.0
    bias = float(diffs.mean())
    sd = float(diffs.std(ddof=1))
    return bias, bias - 1.96 * sd, bias + 1.96 * sd, means, diffs


def paired_t_test(y, y_hat) -> tuple[float, float]:
    """Paired two-sided t-test on y_hat - y.

    Returns (t, p); p comes from the regularized incomplete beta form of the
    Student-t CDF. Zero-variance differences: all-zero -> (0, 1), a constant
    nonzero shift -> (+/-inf, 0).
    """
    y, y_hat = _pair(y, y_hat)
    n = y.size
    if n < 2:
        raise ShapeMismatchError("need at least 2 samples")
    d = y_hat - y
    mean = float(d.mean())
    sd = float(d.std(ddof=1))
    if sd == 0.0:
        return (0.0, 1.0) if mean == 0.0 else (math.copysign(math.inf, mean), 0.0)
    t = mean / (sd / math.sqrt(n))
    dof = n - 1
    p = float(special.betainc(dof / 2.0, 0.5, dof / (dof + t * t)))
    return t, p


def kendall_tau_b(a, b) -> tuple[float, float]:
    """Kendall's tau-b with tie correction; p by normal approximation.

    Pair counting is O(n^2), fine at desk scale.
    """
    a, b = _pair(a, b)
    n = a.size
    if n < 2:
        raise ShapeMismatchError("need at least 2 samples")
    sa = np.sign(a[:, None] - a[None, :])
    sb = np.sign(b[:, None] - b[None, :])
    iu = np.triu_indices(n, k=1)
    prod = sa[iu] * sb[iu]
    concordant = int(np.sum(prod > 0))
    discordant = int(np.sum(prod < 0))

    def tie_sizes(x):
        _, counts = np.unique(x, return_counts=True)
        return counts[counts > 1].astype(np.float64)

    ta, tb = tie_sizes(a), tie_sizes(b)
    n0 = n * (n - 1) / 2.0
    n1 = float(np.sum(ta * (ta - 1) / 2.0))
    n2 = float(np.sum(tb * (tb - 1) / 2.0))
    denom = math.sqrt((n0 - n1) * (n0 - n2))
    if denom == 0.0:
        raise AllTiedError("tau-b undefined when either input is all ties")
    tau = (concordant - discordant) / denom

    # tie-corrected variance of C - D for the normal approximation
    v0 = n * (n - 1) * (2 * n + 5)
    vt = float(np.sum(ta * (ta - 1) * (2 * ta + 5)))
    vu = float(np.sum(tb * (tb - 1) * (2 * tb + 5)))
    v1 = float(np.sum(ta * (ta - 1)) * np.sum(tb * (tb - 1))) / (2.0 * n * (n - 1))
    v2 = 0.0
    if n > 2:
        v2 = (
            float(np.sum(ta * (ta - 1) * (ta - 2)) * np.sum(tb * (tb - 1) * (tb - 2)))
            / (9.0 * n * (n - 1) * (n - 2))
        )
    var = (v0 - vt - vu) / 18.0 + v1 + v2
    if var <= 0:
        return tau, 1.0
    z = (concordant - discordant) / math.sqrt(var)
    p = float(special.erfc(abs(z) / math.sqrt(2.0)))
    return tau, p


def agreement_report(y, y_hat) -> AgreementReport:
    """Bundle R^2, ICC, Bland-Altman, and the paired t-test for one record."""
    r2 = r_squared(y, y_hat)
    icc_val = icc(y, y_hat)
    bias, lo, hi, _, _ = bland_altman(y, y_hat)
    t, p = paired_t_test(y, y_hat)
    return AgreementReport(r2, icc_val, bias, lo, hi, t, p)
