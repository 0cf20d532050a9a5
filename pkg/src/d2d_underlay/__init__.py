"""Underlay device-discovery announcements inside downlink transmissions.

Evaluates the downlink power cost and energy efficiency of underlaying
fixed-rate discovery announcements in ongoing downlink transmissions,
against an orthogonal-resource baseline: analytically (exponential
integral, order statistics, tail quadrature) and by seeded Monte Carlo
simulation that re-derives every decodability claim from the raw
multiple-access inequalities.
"""

from .fading import FadingModel, GainRealization
from .linkmodel import (
    MacDecodability,
    announcer_decodable,
    capacity,
    downlink_always_decodable,
    mac_region_check,
    snr_threshold,
    zero_outage_downlink_snr,
)
from .metrics import AnnouncerConfig, MetricsReport, Scheme
from .montecarlo import (
    EmpiricalReport,
    TrialBatch,
    compare,
    kernel_backend,
    run_orthogonal,
    run_underlay,
)
from .numerics import ConvergenceError, QuadratureSpec, exp_integral_e1, integrate_tail
from .powerctl import LinkBudget, PowerMode, PowerPolicy, PowerReport
from .scenario import ConfigError, ScenarioConfig, load_config

__version__ = "0.1.0"

__all__ = [
    "AnnouncerConfig",
    "ConfigError",
    "ConvergenceError",
    "EmpiricalReport",
    "FadingModel",
    "GainRealization",
    "LinkBudget",
    "MacDecodability",
    "MetricsReport",
    "PowerMode",
    "PowerPolicy",
    "PowerReport",
    "QuadratureSpec",
    "ScenarioConfig",
    "Scheme",
    "TrialBatch",
    "announcer_decodable",
    "capacity",
    "compare",
    "downlink_always_decodable",
    "exp_integral_e1",
    "integrate_tail",
    "kernel_backend",
    "load_config",
    "mac_region_check",
    "run_orthogonal",
    "run_underlay",
    "snr_threshold",
    "zero_outage_downlink_snr",
    "__version__",
]
