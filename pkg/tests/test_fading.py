import math

import numpy as np
import pytest

from d2d_underlay.fading import (
    FadingModel,
    GainRealization,
    cdf_max_of_mins,
    cdf_min_of_n,
    pdf_gain,
    pdf_max_of_mins,
    pdf_min_of_n,
    sample_realization,
)
from d2d_underlay.numerics import QuadratureSpec, integrate_tail, make_rng

UNIT = FadingModel()


class TestPdfGain:
    def test_origin(self):
        assert pdf_gain(UNIT, 0.0) == 1.0

    def test_unit_point(self):
        assert pdf_gain(UNIT, 1.0) == pytest.approx(math.exp(-1.0), rel=1e-15)

    def test_doubled_mean(self):
        assert pdf_gain(FadingModel(2.0), 2.0) == pytest.approx(0.5 * math.exp(-1.0), rel=1e-15)

    def test_vectorized(self):
        x = np.linspace(0.0, 5.0, 7)
        assert np.allclose(pdf_gain(UNIT, x), np.exp(-x))

    def test_negative_gain_rejected(self):
        with pytest.raises(ValueError):
            pdf_gain(UNIT, -0.1)

    def test_invalid_model(self):
        with pytest.raises(ValueError):
            FadingModel(0.0)


class TestMinOfN:
    def test_degenerates_to_single_gain(self):
        x = np.linspace(0.0, 4.0, 9)
        assert np.array_equal(pdf_min_of_n(UNIT, 1, x), pdf_gain(UNIT, x))

    def test_density_at_origin(self):
        assert pdf_min_of_n(UNIT, 20, 0.0) == 20.0

    def test_sampled_minimum_mean(self):
        # brute force: the min of 20 unit exponentials has mean 1/20
        rng = make_rng(1001)
        mins = rng.standard_exponential((1_000_000, 20), method="inv").min(axis=1)
        assert abs(mins.mean() - 1.0 / 20.0) < 0.01 / 20.0

    def test_kolmogorov_smirnov_against_closed_form(self):
        rng = make_rng(77)
        mins = np.sort(rng.standard_exponential((100_000, 12), method="inv").min(axis=1))
        theory = cdf_min_of_n(UNIT, 12, mins)
        empirical_hi = np.arange(1, mins.size + 1) / mins.size
        empirical_lo = np.arange(0, mins.size) / mins.size
        ks = max(np.abs(empirical_hi - theory).max(), np.abs(theory - empirical_lo).max())
        assert ks < 0.01

    def test_count_validation(self):
        with pytest.raises(ValueError):
            pdf_min_of_n(UNIT, 0, 1.0)


class TestMaxOfMins:
    def test_degenerates_to_single_gain(self):
        x = np.linspace(0.0, 4.0, 9)
        assert np.allclose(pdf_max_of_mins(UNIT, 1, x), pdf_gain(UNIT, x), rtol=1e-14)

    @pytest.mark.parametrize("n", [2, 5, 20])
    def test_density_normalization(self, n):
        total = integrate_tail(
            lambda x: pdf_max_of_mins(UNIT, n, x), 0.0,
            QuadratureSpec(rel_tol=1e-12, abs_tol=1e-14, max_subdivisions=1000),
        )
        assert abs(total - 1.0) < 1e-9

    def test_cdf_at_origin_and_limits(self):
        assert cdf_max_of_mins(UNIT, 20, 0.0) == 0.0
        assert cdf_max_of_mins(UNIT, 20, 50.0) == pytest.approx(1.0, abs=1e-12)

    def test_cdf_monotone(self):
        x = np.linspace(0.0, 3.0, 400)
        values = cdf_max_of_mins(UNIT, 20, x)
        assert np.all(np.diff(values) >= 0.0)

    def test_cdf_known_point(self):
        # closed form (1 - exp(-20 x))^20 at x = 0.379807, 40-digit evaluation
        assert cdf_max_of_mins(UNIT, 20, 0.379807) == pytest.approx(
            0.99000007217201761, rel=1e-12
        )

    def test_cdf_degenerate_case_is_exponential(self):
        mu = 0.7
        assert cdf_max_of_mins(UNIT, 1, mu) == pytest.approx(-math.expm1(-mu), rel=1e-14)

    @pytest.mark.parametrize("n", [3, 20])
    def test_cdf_derivative_matches_pdf(self, n):
        # centered finite differences, step 1e-6, on [0.01, 2]; points where
        # the cdf has saturated so close to 1 that slope*2h sinks below its
        # ulp cannot be resolved by any finite difference in float64 and are
        # excluded (for n=20 that is roughly x > 1.2)
        x = np.linspace(0.01, 2.0, 80)
        h = 1e-6
        cdf = cdf_max_of_mins(UNIT, n, x)
        analytic = pdf_max_of_mins(UNIT, n, x)
        resolvable = analytic * 2 * h > 1e5 * np.spacing(cdf)
        assert np.count_nonzero(resolvable) >= (len(x) if n == 3 else int(0.4 * len(x)))
        numeric = (cdf_max_of_mins(UNIT, n, x + h) - cdf_max_of_mins(UNIT, n, x - h)) / (2 * h)
        rel = np.abs(numeric - analytic)[resolvable] / analytic[resolvable]
        assert rel.max() < 1e-4

    def test_empirical_distribution_of_selected_gain(self):
        # column mins then row max of iid matrices, against the closed form
        rng = make_rng(3030)
        gains = rng.standard_exponential((20_000, 20, 20), method="inv")
        umax = np.sort(gains.min(axis=1).max(axis=1))
        theory = cdf_max_of_mins(UNIT, 20, umax)
        empirical = np.arange(1, umax.size + 1) / umax.size
        assert np.abs(empirical - theory).max() < 0.015


class TestSampleRealization:
    def test_deterministic(self):
        a = sample_realization(UNIT, 5, 10.0, make_rng(9))
        b = sample_realization(UNIT, 5, 10.0, make_rng(9))
        assert np.array_equal(a.gains, b.gains)
        assert a.announcer_snr == b.announcer_snr

    def test_shape_and_domain(self):
        real = sample_realization(UNIT, 7, 3.0, make_rng(4))
        assert real.gains.shape == (7, 7)
        assert np.all(real.gains >= 0.0)
        assert real.announcer_snr >= 0.0

    def test_announcer_snr_moment(self):
        rng = make_rng(606)
        mean_snr = 42.0
        draws = np.array([
            sample_realization(UNIT, 1, mean_snr, rng).announcer_snr
            for _ in range(100_000)
        ])
        assert abs(draws.mean() - mean_snr) < 0.01 * mean_snr

    def test_selected_gain_truncation_probability(self):
        # P{u_max < 0.379807} should match the closed-form cdf value
        rng = make_rng(511)
        hits = 0
        trials = 20_000
        for _ in range(trials):
            real = sample_realization(UNIT, 20, 1.0, rng)
            if real.gains.min(axis=0).max() < 0.379807:
                hits += 1
        p = cdf_max_of_mins(UNIT, 20, 0.379807)
        se = math.sqrt(p * (1 - p) / trials)
        assert abs(hits / trials - p) < 3.0 * se

    def test_validation(self):
        with pytest.raises(ValueError):
            sample_realization(UNIT, 0, 1.0, make_rng(1))
        with pytest.raises(ValueError):
            GainRealization(gains=np.ones((2, 2)), announcer_snr=-1.0)
        with pytest.raises(ValueError):
            GainRealization(gains=-np.ones((2, 2)), announcer_snr=1.0)
