"""Truncated channel-inversion power control and its expected powers.

The downlink holds a fixed rate by inverting the effective fading gain,
transmitting only when the gain clears a cutoff chosen to hit a target
truncation probability. Four variants share the machinery: a single
monitor, the worst of several monitors on one channel, the best channel
judged by its worst monitor, and the orthogonal baseline (same worst
channel statistics, no underlay SNR margin in the inversion constant).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .fading import FadingModel, pdf_max_of_mins
from .numerics import QuadratureSpec, exp_integral_e1, integrate_tail


class PowerMode(enum.Enum):
    SINGLE = "underlay-single"
    MULTI_MONITOR = "underlay-multi-monitor"
    MULTI_CHANNEL = "underlay-multi-channel"
    ORTHOGONAL = "orthogonal"


@dataclass(frozen=True)
class LinkBudget:
    """Physical-layer constants, all in SI units (watts, meters, hertz).

    dBm enters only at the configuration boundary; keeping watts here
    means the inversion constant never mixes unit systems.
    """

    noise_w: float
    base_distance_m: float
    announcer_distance_m: float
    path_loss_exponent: float
    announcer_power_w: float
    bandwidth_hz: float

    def __post_init__(self):
        for name in ("noise_w", "base_distance_m", "announcer_distance_m",
                     "announcer_power_w", "bandwidth_hz"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")
        if not self.path_loss_exponent >= 2.0:
            raise ValueError("path_loss_exponent must be at least 2")

    @property
    def base_path_gain(self) -> float:
        """Distance loss of the base-station link: d_base**-alpha."""
        return self.base_distance_m ** -self.path_loss_exponent

    @property
    def announcer_path_gain(self) -> float:
        return self.announcer_distance_m ** -self.path_loss_exponent

    @property
    def announcer_mean_snr(self) -> float:
        """Mean announcer SNR at unit fading gain: P * d**-alpha / noise."""
        return self.announcer_power_w * self.announcer_path_gain / self.noise_w


@dataclass(frozen=True)
class PowerPolicy:
    """A fully resolved inversion policy: constant, cutoff, and context."""

    k_watts: float
    cutoff: float
    target_outage: float
    n: int
    mode: PowerMode

    def __post_init__(self):
        if not self.k_watts > 0.0:
            raise ValueError("k_watts must be positive")
        if not self.cutoff > 0.0:
            raise ValueError("cutoff must be positive")
        if not 0.0 < self.target_outage < 1.0:
            raise ValueError("target_outage must lie in (0, 1)")
        if self.n < 1:
            raise ValueError("n must be at least 1")


@dataclass(frozen=True)
class PowerReport:
    """Analytic summary of one policy: constant, cutoff, expected power."""

    mode: PowerMode
    n: int
    k_watts: float
    cutoff: float
    target_outage: float
    expected_power_w: float
    scenario_key: str | None = None


def inversion_constant(
    budget: LinkBudget,
    downlink_rate: float,
    announcer_threshold_snr: float,
    underlay: bool,
) -> float:
    """Numerator K of the per-realization power K/gain.

    K = noise * (2**rate - 1) / path_gain, times (1 + threshold) when the
    downlink must additionally carry the underlay announcement's SNR
    margin. With a zero threshold the two variants coincide.
    """
    if downlink_rate < 0.0:
        raise ValueError("downlink_rate must be nonnegative")
    if announcer_threshold_snr < 0.0:
        raise ValueError("announcer_threshold_snr must be nonnegative")
    k = budget.noise_w * (2.0 ** downlink_rate - 1.0) / budget.base_path_gain
    if underlay:
        k *= 1.0 + announcer_threshold_snr
    return k


def instantaneous_power(policy: PowerPolicy, effective_gain: float) -> float | None:
    """Transmit power for one gain draw, or None below the cutoff.

    The boundary gain transmits: truncation is defined by the cutoff's
    cumulative probability, and the boundary carries zero probability mass.
    """
    if effective_gain < 0.0:
        raise ValueError("effective_gain must be nonnegative")
    if effective_gain < policy.cutoff:
        return None
    return policy.k_watts / effective_gain


def cutoff(model: FadingModel, mode: PowerMode, n: int, target_outage: float) -> float:
    """Gain cutoff whose truncation probability equals ``target_outage``.

    Inverts the relevant gain distribution: the plain exponential for one
    monitor, the min-of-n exponential for several monitors on one channel,
    and the max-of-mins law for the best-channel variants (the orthogonal
    baseline is compared on the same worst-channel statistics).
    """
    if not 0.0 < target_outage < 1.0:
        raise ValueError("target_outage must lie in (0, 1)")
    if n < 1:
        raise ValueError("n must be at least 1")
    g = model.mean_gain
    if mode is PowerMode.SINGLE:
        return -g * math.log1p(-target_outage)
    if mode is PowerMode.MULTI_MONITOR:
        return -(g / n) * math.log1p(-target_outage)
    return -(g / n) * math.log1p(-target_outage ** (1.0 / n))


def expected_power(
    policy: PowerPolicy, model: FadingModel, spec: QuadratureSpec | None = None
) -> float:
    """Mean transmit power of a truncated inversion policy.

    Single monitor: E1(cutoff/mean) * K. Worst of n monitors: the minimum
    is exponential with mean/n, giving E1(n*cutoff/mean) * n * K. The
    best-channel variants have no elementary form and integrate
    K * f(x)/x over [cutoff, inf) by adaptive quadrature.
    """
    g = model.mean_gain
    if policy.mode is PowerMode.SINGLE:
        return exp_integral_e1(policy.cutoff / g) * policy.k_watts
    if policy.mode is PowerMode.MULTI_MONITOR:
        return exp_integral_e1(policy.n * policy.cutoff / g) * policy.n * policy.k_watts
    integrand = lambda x: pdf_max_of_mins(model, policy.n, x) / x
    return policy.k_watts * integrate_tail(integrand, policy.cutoff, spec)


def power_report(
    policy: PowerPolicy,
    model: FadingModel,
    spec: QuadratureSpec | None = None,
    scenario_key: str | None = None,
) -> PowerReport:
    return PowerReport(
        mode=policy.mode,
        n=policy.n,
        k_watts=policy.k_watts,
        cutoff=policy.cutoff,
        target_outage=policy.target_outage,
        expected_power_w=expected_power(policy, model, spec),
        scenario_key=scenario_key,
    )
