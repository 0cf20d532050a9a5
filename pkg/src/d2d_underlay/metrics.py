"""Sum rate per used resource, energy per bit, and the payload-rate map.

The announcement rate is set by how many payload bits must fit into the
announcement window: rate = 8 * payload / (bandwidth * duration) in
bits/s/Hz. The underlay scheme delivers downlink plus announcement on one
resource; the orthogonal baseline spends two, so its sum rate per used
resource is halved.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .fading import FadingModel
from .powerctl import LinkBudget

DECODE_MODE_FIXED = "fixed"
DECODE_MODE_COMPUTED = "computed"


class Scheme(enum.Enum):
    UNDERLAY = "underlay"
    ORTHOGONAL = "orthogonal"


@dataclass(frozen=True)
class AnnouncerConfig:
    """Announcement duration, payload, and how its decode probability is set.

    ``fixed`` pins the decode probability to the configured value (the
    scenario default); ``computed`` derives it from the link budget via the
    exponential SNR tail. The two disagree for realistic budgets, where the
    computed value is essentially 1; both are kept for consistency checks.
    """

    duration_s: float
    payload_bytes: int
    decode_mode: str = DECODE_MODE_FIXED
    decode_probability: float = 0.99

    def __post_init__(self):
        if not self.duration_s > 0.0:
            raise ValueError("duration_s must be positive")
        if not self.payload_bytes > 0:
            raise ValueError("payload_bytes must be positive")
        if self.decode_mode not in (DECODE_MODE_FIXED, DECODE_MODE_COMPUTED):
            raise ValueError(f"unknown decode_mode {self.decode_mode!r}")
        if not 0.0 < self.decode_probability <= 1.0:
            raise ValueError("decode_probability must lie in (0, 1]")


@dataclass(frozen=True)
class MetricsReport:
    """Analytic per-scenario metrics for one scheme."""

    sum_rate_bps: float
    energy_per_bit_j: float
    outage_probability: float
    announcer_decode_probability: float
    expected_power_w: float
    scenario_key: str | None = None


def payload_to_rate(cfg: AnnouncerConfig, bandwidth_hz: float) -> float:
    """Announcement spectral efficiency carrying the payload in one window."""
    if not bandwidth_hz > 0.0:
        raise ValueError("bandwidth_hz must be positive")
    return 8.0 * cfg.payload_bytes / (bandwidth_hz * cfg.duration_s)


def rate_to_payload(rate: float, bandwidth_hz: float, duration_s: float) -> float:
    """Inverse of payload_to_rate, in bytes (exact round trip)."""
    return rate * bandwidth_hz * duration_s / 8.0


def announcer_mean_snr_for_target(
    announcer_threshold_snr: float, decode_probability: float
) -> float:
    """Mean announcer SNR making the exponential tail hit a decode target.

    Solves exp(-threshold/mean) = p for the mean. A zero threshold decodes
    regardless of the mean; unit mean is returned so sampling stays
    well defined.
    """
    if not 0.0 < decode_probability < 1.0:
        raise ValueError("decode_probability must lie in (0, 1)")
    if announcer_threshold_snr < 0.0:
        raise ValueError("announcer_threshold_snr must be nonnegative")
    if announcer_threshold_snr == 0.0:
        return 1.0
    return -announcer_threshold_snr / math.log(decode_probability)


def announcer_decode_probability(
    cfg: AnnouncerConfig,
    budget: LinkBudget,
    model: FadingModel,
    announcer_threshold_snr: float,
) -> float:
    """Probability the announcement's SNR clears its decode threshold."""
    if announcer_threshold_snr < 0.0:
        raise ValueError("announcer_threshold_snr must be nonnegative")
    if cfg.decode_mode == DECODE_MODE_FIXED:
        return cfg.decode_probability
    mean_snr = model.mean_gain * budget.announcer_mean_snr
    return math.exp(-announcer_threshold_snr / mean_snr)


def sum_rate(
    downlink_rate: float,
    announcer_rate: float,
    bandwidth_hz: float,
    downlink_success: float,
    announcer_success: float,
    scheme: Scheme,
) -> float:
    """Expected delivered bits/s per allocated resource.

    Underlay: bandwidth * (downlink_rate * P{transmit} + announcer_rate *
    P{decode}) on a single resource. Orthogonal: the same numerator spread
    over the two resources it consumes.
    """
    for name, p in (("downlink_success", downlink_success),
                    ("announcer_success", announcer_success)):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1]")
    s = bandwidth_hz * (downlink_rate * downlink_success + announcer_rate * announcer_success)
    if scheme is Scheme.ORTHOGONAL:
        s /= 2.0
    return s


def energy_per_bit(expected_power_w: float, sum_rate_bps: float) -> float:
    """Joules per delivered bit: mean transmit power over the sum rate.

    The sum rate is deterministic (success probabilities, not draws), so
    the expectation acts on the power alone.
    """
    if not sum_rate_bps > 0.0:
        raise ValueError("sum_rate_bps must be positive")
    return expected_power_w / sum_rate_bps
