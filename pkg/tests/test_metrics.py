import math

import numpy as np
import pytest
from scipy import integrate

from fetalsep.errors import (
    AllTiedError,
    ConstantReferenceError,
    ShapeMismatchError,
    ZeroEnergyError,
)
from fetalsep.metrics import (
    bland_altman,
    classify_wedd,
    icc,
    kendall_tau_b,
    paired_t_test,
    r_squared,
    wedd,
)
from fetalsep.wavelet import dwt_cdf97


def icc_anova_oracle(y, y_hat):
    """ICC(2,1) from the two-way ANOVA table, written out sum by sum."""
    ratings = [[float(a), float(b)] for a, b in zip(y, y_hat)]
    n, k = len(ratings), 2
    grand = sum(sum(r) for r in ratings) / (n * k)
    row_means = [sum(r) / k for r in ratings]
    col_means = [sum(r[j] for r in ratings) / n for j in range(k)]
    ss_rows = k * sum((m - grand) ** 2 for m in row_means)
    ss_cols = n * sum((m - grand) ** 2 for m in col_means)
    ss_err = sum(
        (ratings[i][j] - row_means[i] - col_means[j] + grand) ** 2
        for i in range(n)
        for j in range(k)
    )
    msr = ss_rows / (n - 1)
    msc = ss_cols / (k - 1)
    mse = ss_err / ((n - 1) * (k - 1))
    return (msr - mse) / (msr + (k - 1) * mse + k * (msc - mse) / n)


def t_pvalue_quadrature(t, dof):
    """Two-sided p by numerical integration of the Student-t density."""

    def density(x):
        c = math.gamma((dof + 1) / 2) / (math.sqrt(dof * math.pi) * math.gamma(dof / 2))
        return c * (1 + x * x / dof) ** (-(dof + 1) / 2)

    tail, _ = integrate.quad(density, abs(t), np.inf)
    return 2 * tail


class TestRSquared:
    def test_perfect_fit(self):
        y = np.array([1.0, 2.0, 5.0])
        assert r_squared(y, y) == pytest.approx(1.0)

    def test_mean_prediction_scores_zero(self):
        y = np.array([1.0, 2.0, 3.0, 4.0])
        assert r_squared(y, np.full(4, y.mean())) == pytest.approx(0.0)

    def test_hand_example(self):
        y = np.array([1.0, 2.0, 3.0, 4.0])
        y_hat = np.array([1.1, 1.9, 3.2, 3.8])
        assert r_squared(y, y_hat) == pytest.approx(1 - 0.10 / 5.0)

    def test_constant_reference_rejected(self):
        with pytest.raises(ConstantReferenceError):
            r_squared(np.ones(5), np.arange(5.0))


class TestIcc:
    def test_identity_is_one(self):
        y = np.array([1.0, 2.0, 4.0, 7.0])
        assert icc(y, y) == pytest.approx(1.0)

    def test_sign_flip_is_negative(self):
        y = np.array([-2.0, -1.0, 1.0, 2.0])  # zero mean
        value = icc(y, -y)
        assert value < 0
        assert value == pytest.approx(icc_anova_oracle(y, -y), abs=1e-9)

    def test_hand_example_matches_anova(self):
        y = np.array([9.0, 6.0, 8.0, 7.0])
        y_hat = np.array([2.0, 1.0, 4.0, 1.0])
        assert icc(y, y_hat) == pytest.approx(icc_anova_oracle(y, y_hat), abs=1e-9)

    def test_random_instances_match_anova(self):
        rng = np.random.default_rng(10)
        for _ in range(25):
            n = rng.integers(3, 30)
            y = rng.normal(size=n)
            y_hat = y + rng.normal(scale=rng.uniform(0.01, 2.0), size=n)
            assert icc(y, y_hat) == pytest.approx(icc_anova_oracle(y, y_hat), abs=1e-9)


class TestWedd:
    def test_identity_is_zero(self):
        y = np.random.default_rng(0).normal(size=512)
        res = wedd(y, y)
        assert res.wedd == pytest.approx(0.0, abs=1e-9)
        assert res.category == "excellent"

    def test_zero_prediction_is_100_percent(self):
        y = np.random.default_rng(1).normal(size=512)
        res = wedd(y, np.zeros(512))
        assert res.wedd == pytest.approx(100.0, abs=1e-9)
        assert sum(res.weights) == pytest.approx(1.0, abs=1e-9)

    def test_weights_sum_to_one_and_self_consistent(self):
        rng = np.random.default_rng(2)
        y = rng.normal(size=512)
        y_hat = y + 0.3 * rng.normal(size=512)
        res = wedd(y, y_hat)
        assert sum(res.weights) == pytest.approx(1.0, abs=1e-9)
        assert res.wedd == pytest.approx(
            sum(w * p for w, p in zip(res.weights, res.wprd)), abs=1e-9
        )

    def test_matches_recomputation_from_subbands(self):
        rng = np.random.default_rng(3)
        y = rng.normal(size=512)
        y_hat = y + 0.5 * rng.normal(size=512)
        res = wedd(y, y_hat)
        ref = dwt_cdf97(y - y.mean(), 5).subbands()
        pred = dwt_cdf97(y_hat - y_hat.mean(), 5).subbands()
        total = sum(float(np.sum(b**2)) for b in ref)
        expected = 0.0
        for rb, pb in zip(ref, pred):
            e = float(np.sum(rb**2))
            expected += (e / total) * math.sqrt(float(np.sum((rb - pb) ** 2)) / e)
        assert res.wedd == pytest.approx(expected * 100.0, abs=1e-9)

    def test_zero_energy_reference_rejected(self):
        with pytest.raises(ZeroEnergyError):
            wedd(np.ones(64), np.ones(64))  # constant: zero after mean removal


class TestClassifyWedd:
    @pytest.mark.parametrize(
        "value,category",
        [
            (0.0, "excellent"),
            (4.59, "excellent"),
            (4.6, "very good"),
            (5.7, "very good"),
            (7.0, "good"),
            (11.2, "not bad"),
            (13.6, "not bad"),
            (13.61, "bad"),
        ],
    )
    def test_bins(self, value, category):
        assert classify_wedd(value) == category


class TestBlandAltman:
    def test_identity(self):
        y = np.array([1.0, 2.0, 3.0])
        bias, lo, hi, _, _ = bland_altman(y, y)
        assert (bias, lo, hi) == (0.0, 0.0, 0.0)

    def test_constant_shift(self):
        y = np.array([1.0, 2.0, 3.0])
        bias, lo, hi, _, _ = bland_altman(y, y + 0.5)
        assert bias == pytest.approx(0.5)
        assert lo == pytest.approx(0.5) and hi == pytest.approx(0.5)

    def test_matches_direct_formulas(self):
        rng = np.random.default_rng(4)
        y = rng.normal(size=100)
        y_hat = y + rng.normal(size=100)
        bias, lo, hi, means, diffs = bland_altman(y, y_hat)
        d = y_hat - y
        assert bias == pytest.approx(d.mean(), abs=1e-12)
        assert lo == pytest.approx(d.mean() - 1.96 * d.std(ddof=1), abs=1e-12)
        assert hi == pytest.approx(d.mean() + 1.96 * d.std(ddof=1), abs=1e-12)
        np.testing.assert_allclose(means, (y + y_hat) / 2)
        np.testing.assert_allclose(diffs, d)
        assert lo <= bias <= hi


class TestPairedT:
    def test_identical_inputs(self):
        y = np.array([1.0, 2.0, 3.0])
        assert paired_t_test(y, y) == (0.0, 1.0)

    def test_constant_shift_is_infinite_t(self):
        y = np.array([1.0, 2.0, 3.0])
        t, p = paired_t_test(y, y + 1.0)
        assert math.isinf(t) and t > 0 and p == 0.0

    def test_two_point_hand_example(self):
        t, _ = paired_t_test(np.zeros(2), np.array([1.0, 3.0]))
        assert t == pytest.approx(2.0)

    def test_p_matches_quadrature(self):
        t, p = paired_t_test(np.zeros(2), np.array([1.0, 3.0]))
        assert p == pytest.approx(t_pvalue_quadrature(2.0, 1), abs=1e-6)

    def test_random_instances_match_quadrature(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            n = int(rng.integers(2, 40))
            y = rng.normal(size=n)
            y_hat = y + rng.normal(scale=0.5, size=n) + rng.normal() * 0.1
            t, p = paired_t_test(y, y_hat)
            assert p == pytest.approx(t_pvalue_quadrature(t, n - 1), abs=1e-6)


def tau_b_bruteforce(a, b):
    """Pair-counting definition evaluated by explicit double loop."""
    n = len(a)
    concordant = discordant = 0
    for i in range(n):
        for j in range(i + 1, n):
            prod = (a[i] - a[j]) * (b[i] - b[j])
            if prod > 0:
                concordant += 1
            elif prod < 0:
                discordant += 1
    n0 = n * (n - 1) / 2

    def tie_term(x):
        from collections import Counter

        return sum(c * (c - 1) / 2 for c in Counter(x).values())

    denom = math.sqrt((n0 - tie_term(list(a))) * (n0 - tie_term(list(b))))
    return (concordant - discordant) / denom


class TestKendall:
    def test_monotone_agreement(self):
        a = np.arange(10.0)
        tau, _ = kendall_tau_b(a, a * 3 + 1)
        assert tau == pytest.approx(1.0)

    def test_reversal(self):
        a = np.arange(10.0)
        tau, _ = kendall_tau_b(a, -a)
        assert tau == pytest.approx(-1.0)

    def test_ties_match_bruteforce(self):
        a = np.array([1.0, 2.0, 2.0, 3.0, 3.0, 3.0, 4.0])
        b = np.array([2.0, 1.0, 3.0, 3.0, 5.0, 4.0, 4.0])
        tau, _ = kendall_tau_b(a, b)
        assert tau == pytest.approx(tau_b_bruteforce(a, b), abs=1e-12)

    def test_random_instances_match_bruteforce(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            n = int(rng.integers(2, 25))
            a = rng.integers(0, 6, size=n).astype(float)
            b = a + rng.integers(-2, 3, size=n)
            if len(set(a)) == 1 or len(set(b)) == 1:
                continue
            tau, _ = kendall_tau_b(a, b)
            assert tau == pytest.approx(tau_b_bruteforce(a, b), abs=1e-12)

    def test_all_tied_rejected(self):
        with pytest.raises(AllTiedError):
            kendall_tau_b(np.ones(5), np.arange(5.0))

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            kendall_tau_b(np.ones(5), np.ones(4))
