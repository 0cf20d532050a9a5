"""Seeded Monte Carlo verification of the analytical results.

Each trial draws a monitors-by-channels gain matrix plus one announcer
SNR, applies the truncated-inversion policy to the best-channel
worst-monitor gain, and then re-derives decodability from the raw access
channel inequalities instead of trusting the policy's algebra. Failures
are counted, never thrown: a nonzero count is the caller's invariant
violation.

Trials are partitioned into fixed 32768-trial batches; batch ``i`` owns
the generator spawned from the root seed with spawn key ``(i,)``. Results
are written into disjoint slices and all aggregation happens on the
assembled arrays, so serial and threaded executions, and the compiled and
pure-python kernels, produce bit-identical reports.
"""

from __future__ import annotations

import functools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .fading import FadingModel
from .linkmodel import mac_region_check, rate_supported, snr_threshold
from .metrics import (
    DECODE_MODE_FIXED,
    MetricsReport,
    Scheme,
    announcer_decode_probability,
    announcer_mean_snr_for_target,
    payload_to_rate,
)
from .numerics import make_rng
from .powerctl import (
    LinkBudget,
    PowerMode,
    PowerPolicy,
    PowerReport,
    cutoff,
    expected_power,
    inversion_constant,
)
from .scenario import ScenarioConfig

BATCH_TRIALS = 1 << 15

_FORCE_FALLBACK = os.environ.get("D2D_UNDERLAY_PURE_PYTHON", "") not in ("", "0")
try:
    if _FORCE_FALLBACK:
        raise ImportError("pure-python kernel forced via D2D_UNDERLAY_PURE_PYTHON")
    from . import _mc_kernel as _backend

    KERNEL_BACKEND = "compiled"
except ImportError:
    from . import _mc_fallback as _backend

    KERNEL_BACKEND = "python"


def kernel_backend() -> str:
    """Which sampling kernel was selected at import: 'compiled' or 'python'."""
    return KERNEL_BACKEND


class ScenarioMismatchError(ValueError):
    """Analytic and empirical reports describe different scenarios."""


@dataclass(frozen=True)
class TrialBatch:
    """One Monte Carlo run: seed, size, scenario, and the sweep point."""

    seed: int
    trial_count: int
    scenario: ScenarioConfig
    payload_bytes: int | None = None

    def __post_init__(self):
        if self.trial_count < 1:
            raise ValueError("trial_count must be at least 1")

    def resolve_payload(self) -> int:
        if self.payload_bytes is not None:
            return self.payload_bytes
        sweep = self.scenario.payload_sweep_bytes
        if len(sweep) == 1:
            return sweep[0]
        raise ValueError(
            "payload_bytes is required when the scenario sweeps multiple payloads"
        )


@dataclass(frozen=True)
class PointParameters:
    """Scenario quantities resolved at one payload point."""

    payload_bytes: int
    announcer_rate: float
    announcer_threshold_snr: float
    downlink_rate: float
    cutoff_gain: float
    k_underlay_w: float
    k_orthogonal_w: float
    announcer_mean_snr: float
    n: int
    model: FadingModel
    budget: LinkBudget


@dataclass(frozen=True)
class EmpiricalReport:
    """Empirical aggregates of one run, with their analytic counterparts."""

    scheme: Scheme
    scenario_key: str
    seed: int
    trial_count: int
    payload_bytes: int
    empirical_outage: float
    outage_se: float
    mean_power_w: float
    power_se_w: float
    downlink_decode_failures: int
    announcer_decode_rate: float
    announcer_rate_se: float
    announcer_threshold_mismatches: int
    analytic_outage: float
    analytic_power_w: float
    analytic_announcer_decode_probability: float

    def analytic_deltas(self) -> dict[str, float]:
        return {
            "outage": self.empirical_outage - self.analytic_outage,
            "mean_power_w": self.mean_power_w - self.analytic_power_w,
            "announcer_decode_rate": (
                self.announcer_decode_rate - self.analytic_announcer_decode_probability
            ),
        }


@dataclass(frozen=True)
class QuantityCheck:
    name: str
    analytic: float
    empirical: float
    std_error: float
    z_score: float
    passed: bool


@dataclass(frozen=True)
class ComparisonReport:
    scenario_key: str
    checks: tuple[QuantityCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


@dataclass(frozen=True)
class PowerEstimate:
    """Empirical mean power and truncation rate for an arbitrary policy."""

    mean_power_w: float
    power_se_w: float
    empirical_outage: float
    outage_se: float
    trial_count: int


def scenario_key(scheme: Scheme, payload_bytes: int, scenario: ScenarioConfig) -> str:
    """Identifier tying analytic and empirical reports to one sweep point."""
    return f"{scheme.value}:payload={payload_bytes}B:cfg={scenario.config_hash()[:12]}"


def _batch_plan(trial_count: int):
    offset = 0
    index = 0
    while offset < trial_count:
        count = min(BATCH_TRIALS, trial_count - offset)
        yield index, offset, count
        offset += count
        index += 1


def _default_workers() -> int:
    if KERNEL_BACKEND != "compiled":
        return 1
    return min(8, os.cpu_count() or 1)


def _sample(seed, trial_count, n_monitors, n_channels, mean_gain, workers):
    eff = np.empty(trial_count)
    announcer = np.empty(trial_count)

    def fill(plan):
        index, offset, count = plan
        rng = make_rng(seed, stream=index)
        e, a = _backend.effective_gain_batch(rng, count, n_monitors, n_channels, mean_gain)
        eff[offset:offset + count] = e
        announcer[offset:offset + count] = a

    plans = list(_batch_plan(trial_count))
    if workers <= 1 or len(plans) == 1:
        for plan in plans:
            fill(plan)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, plans))
    return eff, announcer


@functools.lru_cache(maxsize=8)
def _sample_cached(seed, trial_count, n_monitors, n_channels, mean_gain):
    eff, announcer = _sample(
        seed, trial_count, n_monitors, n_channels, mean_gain, _default_workers()
    )
    eff.flags.writeable = False
    announcer.flags.writeable = False
    return eff, announcer


def sample_effective_gains(
    seed: int,
    trial_count: int,
    n_monitors: int,
    n_channels: int,
    mean_gain: float = 1.0,
    workers: int | None = None,
    cache: bool = True,
):
    """Effective gains and unit-mean announcer draws for every trial.

    The effective gain is the best channel's worst-monitor gain. The same
    (seed, shape) pair always yields the same arrays, whatever the kernel
    or worker count; cached results are returned read-only since the
    underlay and orthogonal runs of a sweep share them.
    """
    if n_monitors < 1 or n_channels < 1:
        raise ValueError("monitor and channel counts must be at least 1")
    if trial_count < 1:
        raise ValueError("trial_count must be at least 1")
    if cache and workers is None:
        return _sample_cached(
            int(seed), int(trial_count), int(n_monitors), int(n_channels), float(mean_gain)
        )
    return _sample(
        seed, trial_count, n_monitors, n_channels, mean_gain,
        workers if workers is not None else _default_workers(),
    )


def clear_sample_cache():
    _sample_cached.cache_clear()


def resolve_point(scenario: ScenarioConfig, payload_bytes: int) -> PointParameters:
    """Derive the per-payload constants every evaluation needs."""
    model = scenario.fading_model()
    budget = scenario.link_budget()
    acfg = scenario.announcer_config(payload_bytes)
    rate_a = payload_to_rate(acfg, scenario.bandwidth_hz)
    threshold = snr_threshold(rate_a)
    mu = cutoff(model, PowerMode.MULTI_CHANNEL, scenario.monitor_count,
                scenario.target_outage)
    if acfg.decode_mode == DECODE_MODE_FIXED:
        mean_snr = announcer_mean_snr_for_target(threshold, acfg.decode_probability)
    else:
        mean_snr = model.mean_gain * budget.announcer_mean_snr
    return PointParameters(
        payload_bytes=payload_bytes,
        announcer_rate=rate_a,
        announcer_threshold_snr=threshold,
        downlink_rate=scenario.downlink_rate_bps_hz,
        cutoff_gain=mu,
        k_underlay_w=inversion_constant(budget, scenario.downlink_rate_bps_hz,
                                        threshold, underlay=True),
        k_orthogonal_w=inversion_constant(budget, scenario.downlink_rate_bps_hz,
                                          threshold, underlay=False),
        announcer_mean_snr=mean_snr,
        n=scenario.monitor_count,
        model=model,
        budget=budget,
    )


def _proportion_se(p_hat: float, trials: int) -> float:
    return math.sqrt(p_hat * (1.0 - p_hat) / trials)


def _run(batch: TrialBatch, scheme: Scheme) -> EmpiricalReport:
    scenario = batch.scenario
    payload = batch.resolve_payload()
    point = resolve_point(scenario, payload)
    trials = batch.trial_count

    eff, announcer_unit = sample_effective_gains(
        batch.seed, trials, point.n, point.n, point.model.mean_gain
    )
    announcer_snr = point.announcer_mean_snr * announcer_unit
    transmit = eff >= point.cutoff_gain

    k = point.k_underlay_w if scheme is Scheme.UNDERLAY else point.k_orthogonal_w
    power = np.zeros(trials)
    power[transmit] = k / eff[transmit]

    # Realized downlink SNR at the selected channel's worst monitor, from
    # the actually transmitted power (zero while truncated).
    snr_scale = point.budget.base_path_gain / point.budget.noise_w
    downlink_snr = power * eff * snr_scale

    if scheme is Scheme.UNDERLAY:
        flags = mac_region_check(point.announcer_rate, point.downlink_rate,
                                 announcer_snr, downlink_snr)
        below = announcer_snr < point.announcer_threshold_snr
        downlink_ok = np.where(below, flags.downlink_alone, flags.joint)
        # While the downlink is silent the announcement still goes out and
        # is received on a clean channel.
        announcer_ok = np.where(
            transmit,
            flags.joint | (flags.downlink_alone & flags.announcer_alone),
            flags.announcer_alone,
        )
    else:
        downlink_ok = rate_supported(point.downlink_rate, downlink_snr)
        announcer_ok = rate_supported(point.announcer_rate, announcer_snr)

    failures = int(np.count_nonzero(transmit & ~downlink_ok))
    mismatches = int(np.count_nonzero(
        announcer_ok != (announcer_snr >= point.announcer_threshold_snr)
    ))

    transmit_count = int(np.count_nonzero(transmit))
    empirical_outage = (trials - transmit_count) / trials
    decode_rate = int(np.count_nonzero(announcer_ok)) / trials

    mode = PowerMode.MULTI_CHANNEL if scheme is Scheme.UNDERLAY else PowerMode.ORTHOGONAL
    policy = PowerPolicy(k_watts=k, cutoff=point.cutoff_gain,
                         target_outage=scenario.target_outage, n=point.n, mode=mode)
    analytic_power = expected_power(policy, point.model)
    analytic_decode = announcer_decode_probability(
        scenario.announcer_config(payload), point.budget, point.model,
        point.announcer_threshold_snr,
    )

    return EmpiricalReport(
        scheme=scheme,
        scenario_key=scenario_key(scheme, payload, scenario),
        seed=batch.seed,
        trial_count=trials,
        payload_bytes=payload,
        empirical_outage=empirical_outage,
        outage_se=_proportion_se(empirical_outage, trials),
        mean_power_w=float(power.mean()),
        power_se_w=float(power.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0,
        downlink_decode_failures=failures,
        announcer_decode_rate=decode_rate,
        announcer_rate_se=_proportion_se(decode_rate, trials),
        announcer_threshold_mismatches=mismatches,
        analytic_outage=scenario.target_outage,
        analytic_power_w=analytic_power,
        analytic_announcer_decode_probability=analytic_decode,
    )


def run_underlay(batch: TrialBatch) -> EmpiricalReport:
    """Simulate the underlay scheme at one sweep point.

    Per trial: find the best channel by its worst monitor, truncate below
    the cutoff, invert the gain otherwise, and check the access-channel
    inequalities at the worst monitor against the realized announcer SNR
    (noise-tolerant decoding below the announcer threshold, joint decoding
    at or above it). Decode failures and announcer-threshold mismatches
    are counted exactly.
    """
    return _run(batch, Scheme.UNDERLAY)


def run_orthogonal(batch: TrialBatch) -> EmpiricalReport:
    """Simulate the orthogonal baseline on the same fading draws.

    The downlink inverts the same effective gain with the smaller
    inversion constant and is checked as a single-user link; the
    announcement is checked on its dedicated resource. Sharing the draws
    with ``run_underlay`` makes the power ratio exact trial by trial.
    """
    return _run(batch, Scheme.ORTHOGONAL)


def estimate_power(
    seed: int,
    trial_count: int,
    model: FadingModel,
    policy: PowerPolicy,
    workers: int | None = None,
) -> PowerEstimate:
    """Empirical mean power of any policy mode, for closed-form checks.

    Uses the matrix shape implied by the mode: 1x1 for a single monitor,
    n x 1 for the worst of n monitors on one channel, and n x n for the
    best-channel variants.
    """
    if policy.mode is PowerMode.SINGLE:
        shape = (1, 1)
    elif policy.mode is PowerMode.MULTI_MONITOR:
        shape = (policy.n, 1)
    else:
        shape = (policy.n, policy.n)
    eff, _ = sample_effective_gains(seed, trial_count, shape[0], shape[1],
                                    model.mean_gain, workers=workers)
    transmit = eff >= policy.cutoff
    power = np.zeros(trial_count)
    power[transmit] = policy.k_watts / eff[transmit]
    outage = (trial_count - int(np.count_nonzero(transmit))) / trial_count
    return PowerEstimate(
        mean_power_w=float(power.mean()),
        power_se_w=float(power.std(ddof=1) / math.sqrt(trial_count)) if trial_count > 1 else 0.0,
        empirical_outage=outage,
        outage_se=_proportion_se(outage, trial_count),
        trial_count=trial_count,
    )


def _quantity_check(name, analytic, empirical, se, multiplier) -> QuantityCheck:
    delta = empirical - analytic
    if se > 0.0:
        z = abs(delta) / se
        passed = z <= multiplier
    else:
        z = 0.0 if delta == 0.0 else math.inf
        passed = delta == 0.0
    return QuantityCheck(name, analytic, empirical, se, z, passed)


def compare(
    analytic: PowerReport | MetricsReport,
    empirical: EmpiricalReport,
    tolerance_multiplier: float = 3.0,
) -> ComparisonReport:
    """Flag quantities whose analytic-empirical gap exceeds its z budget.

    Statistical quantities pass when |delta| <= multiplier * standard
    error; the decode-failure count is compared as exact zero.
    """
    key = getattr(analytic, "scenario_key", None)
    if key is not None and key != empirical.scenario_key:
        raise ScenarioMismatchError(
            f"analytic report is for {key!r}, empirical for {empirical.scenario_key!r}"
        )
    if isinstance(analytic, MetricsReport):
        outage = analytic.outage_probability
        decode = analytic.announcer_decode_probability
    elif isinstance(analytic, PowerReport):
        outage = analytic.target_outage
        decode = None
    else:
        raise TypeError(f"unsupported analytic report type {type(analytic)!r}")

    checks = [
        _quantity_check("outage", outage, empirical.empirical_outage,
                        empirical.outage_se, tolerance_multiplier),
        _quantity_check("mean_power_w", analytic.expected_power_w,
                        empirical.mean_power_w, empirical.power_se_w,
                        tolerance_multiplier),
    ]
    if decode is not None:
        checks.append(_quantity_check(
            "announcer_decode_rate", decode, empirical.announcer_decode_rate,
            empirical.announcer_rate_se, tolerance_multiplier,
        ))
    checks.append(_quantity_check(
        "downlink_decode_failures", 0.0, float(empirical.downlink_decode_failures),
        0.0, tolerance_multiplier,
    ))
    return ComparisonReport(empirical.scenario_key, tuple(checks))
