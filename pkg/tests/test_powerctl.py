import math

import numpy as np
import pytest

from d2d_underlay.fading import FadingModel, cdf_max_of_mins, pdf_min_of_n
from d2d_underlay.linkmodel import snr_threshold
from d2d_underlay.numerics import QuadratureSpec, exp_integral_e1, integrate_tail, make_rng
from d2d_underlay.powerctl import (
    LinkBudget,
    PowerMode,
    PowerPolicy,
    cutoff,
    expected_power,
    instantaneous_power,
    inversion_constant,
    power_report,
)

UNIT = FadingModel()

# Reference desk scenario in SI units: noise -97 dBm, base link 200 m,
# announcer link 20 m at 20 dBm, path loss exponent 4, 180 kHz.
BUDGET = LinkBudget(
    noise_w=10.0 ** (-12.7),
    base_distance_m=200.0,
    announcer_distance_m=20.0,
    path_loss_exponent=4.0,
    announcer_power_w=0.1,
    bandwidth_hz=180e3,
)

# Frozen 40-digit evaluations of the closed forms at that scenario with a
# 100-byte announcement (rate 8/9 bits/s/Hz, threshold 2**(8/9) - 1).
GAMMA_A_100B = 0.85174942457458086
K_UNDERLAY_100B = 0.018325840184350086
K_ORTHOGONAL_100B = 0.0098965010822456428
MU_SINGLE = 0.010050335853501441            # -ln(0.99)
MU_MULTI_MONITOR_20 = 0.00050251679267507206
MU_MULTI_CHANNEL_20 = 0.079073687670422693  # -(1/20) ln(1 - 0.01**(1/20))
E1_AT_NEG_LN_099 = 4.0329587017084637
TAIL_INTEGRAL_20 = 6.0830390352053625       # int f_max-of-mins(x)/x over [mu, inf), n=20


def _policy(mode, k=1.0, mu=MU_SINGLE, outage=0.01, n=1):
    return PowerPolicy(k_watts=k, cutoff=mu, target_outage=outage, n=n, mode=mode)


class TestLinkBudget:
    def test_path_gain(self):
        assert BUDGET.base_path_gain == pytest.approx(200.0**-4, rel=1e-15)

    def test_announcer_mean_snr(self):
        # 0.1 W over 20 m at alpha 4 above -97 dBm noise
        assert BUDGET.announcer_mean_snr == pytest.approx(3132420.2101704518, rel=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            LinkBudget(noise_w=0.0, base_distance_m=1, announcer_distance_m=1,
                       path_loss_exponent=4, announcer_power_w=1, bandwidth_hz=1)
        with pytest.raises(ValueError):
            LinkBudget(noise_w=1e-13, base_distance_m=1, announcer_distance_m=1,
                       path_loss_exponent=1.5, announcer_power_w=1, bandwidth_hz=1)


class TestInversionConstant:
    def test_underlay_desk_value(self):
        k = inversion_constant(BUDGET, 5.0, GAMMA_A_100B, underlay=True)
        assert k == pytest.approx(K_UNDERLAY_100B, rel=1e-12)

    def test_orthogonal_desk_value(self):
        k = inversion_constant(BUDGET, 5.0, GAMMA_A_100B, underlay=False)
        assert k == pytest.approx(K_ORTHOGONAL_100B, rel=1e-12)

    def test_underlay_orthogonal_ratio(self):
        k_u = inversion_constant(BUDGET, 5.0, GAMMA_A_100B, underlay=True)
        k_o = inversion_constant(BUDGET, 5.0, GAMMA_A_100B, underlay=False)
        assert k_u / k_o == pytest.approx(1.0 + GAMMA_A_100B, rel=1e-14)

    def test_zero_threshold_collapses_to_orthogonal(self):
        assert inversion_constant(BUDGET, 5.0, 0.0, underlay=True) == \
            inversion_constant(BUDGET, 5.0, 0.0, underlay=False)


class TestInstantaneousPower:
    def test_boundary_gain_transmits_at_peak(self):
        policy = _policy(PowerMode.SINGLE, k=2.0, mu=0.5)
        assert instantaneous_power(policy, 0.5) == 4.0

    def test_inversion(self):
        policy = _policy(PowerMode.SINGLE, k=2.0, mu=0.5)
        assert instantaneous_power(policy, 1.0) == 2.0

    def test_truncation(self):
        policy = _policy(PowerMode.SINGLE, k=2.0, mu=0.5)
        assert instantaneous_power(policy, 0.25) is None

    def test_negative_gain_rejected(self):
        with pytest.raises(ValueError):
            instantaneous_power(_policy(PowerMode.SINGLE), -1.0)


class TestCutoff:
    def test_single(self):
        assert cutoff(UNIT, PowerMode.SINGLE, 1, 0.01) == pytest.approx(
            MU_SINGLE, rel=1e-14
        )

    def test_multi_monitor(self):
        assert cutoff(UNIT, PowerMode.MULTI_MONITOR, 20, 0.01) == pytest.approx(
            MU_MULTI_MONITOR_20, rel=1e-14
        )

    def test_multi_channel(self):
        assert cutoff(UNIT, PowerMode.MULTI_CHANNEL, 20, 0.01) == pytest.approx(
            MU_MULTI_CHANNEL_20, rel=1e-14
        )

    def test_multi_channel_inverts_the_selected_gain_cdf(self):
        for n in (1, 5, 20):
            for p in (0.001, 0.01, 0.2):
                mu = cutoff(UNIT, PowerMode.MULTI_CHANNEL, n, p)
                assert cdf_max_of_mins(UNIT, n, mu) == pytest.approx(p, rel=1e-10)

    def test_orthogonal_shares_the_worst_channel_cutoff(self):
        assert cutoff(UNIT, PowerMode.ORTHOGONAL, 20, 0.01) == \
            cutoff(UNIT, PowerMode.MULTI_CHANNEL, 20, 0.01)

    def test_degenerate_single_monitor(self):
        assert cutoff(UNIT, PowerMode.MULTI_CHANNEL, 1, 0.01) == pytest.approx(
            MU_SINGLE, rel=1e-14
        )

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.1])
    def test_outage_domain(self, p):
        with pytest.raises(ValueError):
            cutoff(UNIT, PowerMode.SINGLE, 1, p)


class TestExpectedPower:
    def test_single_closed_form(self):
        policy = _policy(PowerMode.SINGLE, k=K_UNDERLAY_100B, mu=MU_SINGLE)
        assert expected_power(policy, UNIT) == pytest.approx(
            E1_AT_NEG_LN_099 * K_UNDERLAY_100B, rel=1e-12
        )

    def test_multi_monitor_closed_form(self):
        policy = _policy(PowerMode.MULTI_MONITOR, k=1.0, mu=MU_MULTI_MONITOR_20, n=20)
        # same E1 argument as the single case, scaled by n
        assert expected_power(policy, UNIT) == pytest.approx(
            20.0 * E1_AT_NEG_LN_099, rel=1e-12
        )

    def test_multi_channel_degenerates_to_single(self):
        single = _policy(PowerMode.SINGLE, k=2.0, mu=MU_SINGLE)
        multi = _policy(PowerMode.MULTI_CHANNEL, k=2.0, mu=MU_SINGLE, n=1)
        assert expected_power(multi, UNIT) == pytest.approx(
            expected_power(single, UNIT), rel=1e-6
        )

    def test_multi_channel_frozen_integral(self):
        policy = _policy(PowerMode.MULTI_CHANNEL, k=1.0, mu=MU_MULTI_CHANNEL_20, n=20)
        assert expected_power(policy, UNIT) == pytest.approx(TAIL_INTEGRAL_20, rel=1e-9)

    def test_underlay_orthogonal_power_ratio_is_exact(self):
        mu = MU_MULTI_CHANNEL_20
        k_u = inversion_constant(BUDGET, 5.0, GAMMA_A_100B, underlay=True)
        k_o = inversion_constant(BUDGET, 5.0, GAMMA_A_100B, underlay=False)
        p_u = expected_power(_policy(PowerMode.MULTI_CHANNEL, k=k_u, mu=mu, n=20), UNIT)
        p_o = expected_power(_policy(PowerMode.ORTHOGONAL, k=k_o, mu=mu, n=20), UNIT)
        assert p_u / p_o == pytest.approx(1.0 + GAMMA_A_100B, rel=1e-12)

    def test_closed_form_matches_quadrature_for_worst_monitor(self):
        n = 20
        mu = cutoff(UNIT, PowerMode.MULTI_MONITOR, n, 0.01)
        closed = expected_power(_policy(PowerMode.MULTI_MONITOR, mu=mu, n=n), UNIT)
        quad = integrate_tail(
            lambda x: pdf_min_of_n(UNIT, n, x) / x, mu,
            QuadratureSpec(rel_tol=1e-10, abs_tol=1e-14, max_subdivisions=1000),
        )
        assert closed == pytest.approx(quad, rel=1e-6)

    def test_monotone_in_announcer_threshold(self):
        powers = []
        for rate_a in np.linspace(0.1, 8.0, 12):
            threshold = snr_threshold(rate_a)
            k = inversion_constant(BUDGET, 5.0, threshold, underlay=True)
            powers.append(expected_power(
                _policy(PowerMode.MULTI_CHANNEL, k=k, mu=MU_MULTI_CHANNEL_20, n=20), UNIT
            ))
        assert np.all(np.diff(powers) > 0.0)

    def test_monotone_in_downlink_rate(self):
        powers = []
        for rate_b in np.linspace(1.0, 8.0, 8):
            k = inversion_constant(BUDGET, rate_b, GAMMA_A_100B, underlay=True)
            powers.append(expected_power(_policy(PowerMode.SINGLE, k=k), UNIT))
        assert np.all(np.diff(powers) > 0.0)

    def test_monotone_in_monitor_count(self):
        powers = []
        for n in (1, 2, 5, 10, 20):
            mu = cutoff(UNIT, PowerMode.MULTI_MONITOR, n, 0.01)
            powers.append(expected_power(_policy(PowerMode.MULTI_MONITOR, mu=mu, n=n), UNIT))
        assert np.all(np.diff(powers) > 0.0)


class TestTruncationProbability:
    @pytest.mark.parametrize("mode,shape", [
        (PowerMode.SINGLE, (200_000, 1, 1)),
        (PowerMode.MULTI_MONITOR, (200_000, 20, 1)),
        (PowerMode.MULTI_CHANNEL, (50_000, 20, 20)),
    ])
    def test_no_transmission_rate_matches_target(self, mode, shape):
        n = shape[1]
        mu = cutoff(UNIT, mode, n, 0.01)
        rng = make_rng(2718)
        gains = rng.standard_exponential(shape, method="inv")
        eff = gains.min(axis=1).max(axis=1)
        rate = np.count_nonzero(eff < mu) / shape[0]
        se = math.sqrt(0.01 * 0.99 / shape[0])
        assert abs(rate - 0.01) < 3.0 * se


class TestChannelSelectionOptimality:
    def test_selected_channel_minimizes_inversion_power(self):
        # on sampled matrices the max of per-channel minima never yields a
        # higher inversion power than any other channel's worst monitor
        rng = make_rng(99)
        k = 2.0
        for _ in range(200):
            gains = rng.standard_exponential((20, 20), method="inv")
            per_channel_worst = gains.min(axis=0)
            selected = per_channel_worst.max()
            assert np.all(k / selected <= k / per_channel_worst)


class TestPowerReport:
    def test_report_carries_policy_and_value(self):
        policy = _policy(PowerMode.SINGLE, k=2.0)
        report = power_report(policy, UNIT, scenario_key="probe")
        assert report.k_watts == 2.0
        assert report.mode is PowerMode.SINGLE
        assert report.scenario_key == "probe"
        assert report.expected_power_w == pytest.approx(2.0 * E1_AT_NEG_LN_099, rel=1e-12)

    def test_policy_validation(self):
        with pytest.raises(ValueError):
            PowerPolicy(k_watts=0.0, cutoff=0.1, target_outage=0.01, n=1,
                        mode=PowerMode.SINGLE)
        with pytest.raises(ValueError):
            PowerPolicy(k_watts=1.0, cutoff=0.1, target_outage=1.5, n=1,
                        mode=PowerMode.SINGLE)
