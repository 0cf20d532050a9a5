"""Rayleigh block-fading gains and their worst-monitor order statistics.

Squared Rayleigh envelopes are exponential, so every distribution here is
a transform of the exponential law: the minimum over ``n`` monitors of one
channel stays exponential with mean divided by n, and the best channel is
the maximum of those per-channel minima.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import sample_exponential


@dataclass(frozen=True)
class FadingModel:
    """Exponential power-gain fading with the given mean gain."""

    mean_gain: float = 1.0

    def __post_init__(self):
        if not self.mean_gain > 0.0:
            raise ValueError(f"mean_gain must be positive, got {self.mean_gain!r}")


@dataclass(frozen=True)
class GainRealization:
    """One fading draw: monitors-by-channels gain matrix plus the announcer SNR."""

    gains: np.ndarray
    announcer_snr: float

    def __post_init__(self):
        if self.gains.ndim != 2:
            raise ValueError("gains must be a monitors x channels matrix")
        if np.any(self.gains < 0.0):
            raise ValueError("channel gains must be nonnegative")
        if self.announcer_snr < 0.0:
            raise ValueError("announcer_snr must be nonnegative")


def _checked_gain(x):
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0):
        raise ValueError("gain argument must be nonnegative")
    return arr


def _checked_count(n: int) -> int:
    if n < 1:
        raise ValueError(f"count must be at least 1, got {n!r}")
    return int(n)


def _scalar_like(x, value):
    return float(value) if np.ndim(x) == 0 else value


def pdf_gain(model: FadingModel, x):
    """Density of a single channel gain: exp(-x/mean)/mean."""
    arr = _checked_gain(x)
    g = model.mean_gain
    return _scalar_like(x, np.exp(-arr / g) / g)


def pdf_min_of_n(model: FadingModel, n: int, x):
    """Density of the worst of n gains; exponential with mean/n."""
    arr = _checked_gain(x)
    n = _checked_count(n)
    g = model.mean_gain
    return _scalar_like(x, (n / g) * np.exp(-n * arr / g))


def cdf_min_of_n(model: FadingModel, n: int, x):
    """Distribution of the worst of n gains: 1 - exp(-n*x/mean)."""
    arr = _checked_gain(x)
    n = _checked_count(n)
    return _scalar_like(x, -np.expm1(-n * arr / model.mean_gain))


def pdf_max_of_mins(model: FadingModel, n: int, x):
    """Density of the best per-channel worst-monitor gain.

    With n channels and n monitors the selected gain is the maximum of n
    iid per-channel minima, each exponential with mean/n, giving
    n * f_min(x) * F_min(x)**(n-1).
    """
    arr = _checked_gain(x)
    n = _checked_count(n)
    g = model.mean_gain
    f1 = (n / g) * np.exp(-n * arr / g)
    big_f1 = -np.expm1(-n * arr / g)
    return _scalar_like(x, n * f1 * big_f1 ** (n - 1))


def cdf_max_of_mins(model: FadingModel, n: int, x):
    """Distribution of the best per-channel worst-monitor gain: F_min(x)**n."""
    arr = _checked_gain(x)
    n = _checked_count(n)
    return _scalar_like(x, (-np.expm1(-n * arr / model.mean_gain)) ** n)


def sample_realization(
    model: FadingModel, n: int, announcer_mean_snr: float, rng: np.random.Generator
) -> GainRealization:
    """Draw one n x n gain matrix and one announcer SNR.

    Consumes exactly n*n + 1 draws in row-major matrix order followed by
    the announcer draw, matching the Monte Carlo kernels' trial layout.
    """
    n = _checked_count(n)
    gains = sample_exponential(model.mean_gain, rng, size=(n, n))
    snr = float(sample_exponential(announcer_mean_snr, rng))
    return GainRealization(gains=gains, announcer_snr=snr)
