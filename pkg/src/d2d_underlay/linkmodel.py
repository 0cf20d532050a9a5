"""Rate/SNR conversions and two-user multiple-access decodability.

Rates are spectral efficiencies (bits/s/Hz) throughout; multiply by the
bandwidth only when a bits-per-second number is reported. That keeps the
rate <-> SNR pair ``capacity`` / ``snr_threshold`` an exact inverse and
makes the decodability rules unit-free.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

# Channel inversion parks the realized SNR exactly on the decodability
# boundary, where a strict float <= flips on last-ulp rounding of K/g*g.
# This much relative slack absorbs that without admitting any physically
# meaningful violation (boundary cases are decodable by convention).
RATE_SLACK = 1e-12


def _scalar_like(template, value):
    if np.ndim(template) == 0 and np.ndim(value) == 0:
        return value.item() if hasattr(value, "item") else value
    return value


_LN2 = math.log(2.0)


def _log2_1p(arr):
    # log1p below 1/2 dodges the 1+x rounding floor at tiny SNR; plain
    # log2 above keeps integer cases like log2(1+3) exact
    return np.where(arr < 0.5, np.log1p(arr) / _LN2, np.log2(1.0 + arr))


def capacity(snr):
    """Spectral efficiency log2(1 + snr) supported at a given SNR."""
    arr = np.asarray(snr, dtype=float)
    if np.any(arr < 0.0):
        raise ValueError("snr must be nonnegative")
    return _scalar_like(snr, _log2_1p(arr))


def snr_threshold(rate):
    """Minimum SNR sustaining a spectral efficiency: 2**rate - 1."""
    arr = np.asarray(rate, dtype=float)
    if np.any(arr < 0.0):
        raise ValueError("rate must be nonnegative")
    # expm1 below 1/2 for the same cancellation reason as in capacity
    value = np.where(arr < 0.5, np.expm1(arr * _LN2), np.exp2(arr) - 1.0)
    return _scalar_like(rate, value)


def rate_supported(rate, snr):
    """Whether ``rate`` <= log2(1 + snr), with boundary slack."""
    cap = _log2_1p(np.asarray(snr, dtype=float))
    ok = np.asarray(rate, dtype=float) <= cap + RATE_SLACK * np.maximum(1.0, cap)
    return _scalar_like(rate if np.ndim(rate) else snr, ok)


class MacDecodability(NamedTuple):
    """Decodability flags for the announcement + downlink access channel.

    joint: both signals jointly decodable (all three region inequalities);
    downlink_alone: downlink decodable treating the announcement as noise;
    announcer_alone: announcement decodable once the downlink is removed.
    """

    joint: object
    downlink_alone: object
    announcer_alone: object


def mac_region_check(
    announcer_rate, downlink_rate, announcer_snr, downlink_snr
) -> MacDecodability:
    """Evaluate the two-user access-channel inequalities at one monitor.

    Joint decoding needs each rate under its own capacity and the rate sum
    under the sum-SNR capacity. The single-signal flags cover the two
    successive-cancellation orders. Accepts scalars or broadcastable
    arrays; flags match the broadcast shape.
    """
    ra = np.asarray(announcer_rate, dtype=float)
    rb = np.asarray(downlink_rate, dtype=float)
    ga = np.asarray(announcer_snr, dtype=float)
    gb = np.asarray(downlink_snr, dtype=float)
    for name, val in (("announcer_rate", ra), ("downlink_rate", rb),
                      ("announcer_snr", ga), ("downlink_snr", gb)):
        if np.any(val < 0.0):
            raise ValueError(f"{name} must be nonnegative")

    announcer_alone = rate_supported(ra, ga)
    joint = announcer_alone & rate_supported(rb, gb) & rate_supported(ra + rb, ga + gb)
    downlink_alone = rate_supported(rb, gb / (1.0 + ga))

    scalar = all(np.ndim(v) == 0 for v in (announcer_rate, downlink_rate,
                                           announcer_snr, downlink_snr))
    if scalar:
        return MacDecodability(bool(joint), bool(downlink_alone), bool(announcer_alone))
    return MacDecodability(joint, downlink_alone, announcer_alone)


def zero_outage_downlink_snr(downlink_snr, announcer_threshold_snr):
    """Largest downlink SNR margin decodable whatever the announcer link does.

    Backing the downlink rate off to log2(1 + downlink_snr/(1 + threshold))
    makes it decodable for every announcer SNR: below the threshold the
    announcement is weak enough to absorb as noise, at or above it both
    signals decode jointly.
    """
    gb = np.asarray(downlink_snr, dtype=float)
    thr = np.asarray(announcer_threshold_snr, dtype=float)
    if np.any(gb < 0.0) or np.any(thr < 0.0):
        raise ValueError("SNRs must be nonnegative")
    return _scalar_like(downlink_snr if np.ndim(downlink_snr) else announcer_threshold_snr,
                        gb / (1.0 + thr))


def downlink_always_decodable(downlink_snr, announcer_threshold_snr, announcer_snr):
    """Check the zero-outage rate at one realized announcer SNR.

    The downlink rate is pinned to the zero-outage margin; the applicable
    decoding order switches at the announcer threshold. This returns True
    for every announcer SNR by construction, which is exactly what the
    Monte Carlo layer re-verifies trial by trial.
    """
    rate_b = capacity(zero_outage_downlink_snr(downlink_snr, announcer_threshold_snr))
    rate_a = capacity(announcer_threshold_snr)
    flags = mac_region_check(rate_a, rate_b, announcer_snr, downlink_snr)
    below = np.asarray(announcer_snr, dtype=float) < np.asarray(
        announcer_threshold_snr, dtype=float
    )
    result = np.where(below, flags.downlink_alone, flags.joint)
    if np.ndim(result) == 0:
        return bool(result)
    return result


def announcer_decodable(announcer_snr, announcer_threshold_snr):
    """Announcement decodability under the zero-outage downlink policy.

    Reduces to a plain threshold comparison; the boundary counts as
    decodable. Only valid when the downlink rate follows
    ``zero_outage_downlink_snr``.
    """
    ga = np.asarray(announcer_snr, dtype=float)
    thr = np.asarray(announcer_threshold_snr, dtype=float)
    if np.any(ga < 0.0) or np.any(thr < 0.0):
        raise ValueError("SNRs must be nonnegative")
    ok = ga >= thr
    if np.ndim(ok) == 0:
        return bool(ok)
    return ok
