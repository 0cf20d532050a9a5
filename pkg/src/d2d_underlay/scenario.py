"""Scenario configuration: defaults, validation, and the flat config format.

Config files are flat ``key = value`` text with ``#`` comments; units are
spelled out in the key names (``noise_dbm``, ``bandwidth_hz``) and dBm is
converted to watts here, at the configuration boundary, so everything
downstream computes in SI units. An empty file yields the default desk
scenario. Unknown keys are errors, not warnings.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .fading import FadingModel
from .metrics import DECODE_MODE_COMPUTED, DECODE_MODE_FIXED, AnnouncerConfig
from .powerctl import LinkBudget

SCHEME_NAMES = ("underlay", "orthogonal")


class ConfigError(ValueError):
    """Malformed or invalid scenario configuration."""


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watt_to_dbm(watt: float) -> float:
    if not watt > 0.0:
        raise ValueError("power must be positive to express in dBm")
    return 10.0 * math.log10(watt) + 30.0


def _require(condition: bool, message: str):
    if not condition:
        raise ConfigError(message)


@dataclass(frozen=True)
class ScenarioConfig:
    """Full evaluation scenario; defaults are the reference desk scenario."""

    bandwidth_hz: float = 180e3
    announce_duration_s: float = 5e-3
    base_distance_m: float = 200.0
    announcer_distance_m: float = 20.0
    announcer_power_dbm: float = 20.0
    noise_dbm: float = -97.0
    path_loss_exponent: float = 4.0
    monitor_count: int = 20
    downlink_rate_bps_hz: float = 5.0
    downlink_success_probability: float = 0.99
    announcer_decode_mode: str = DECODE_MODE_FIXED
    announcer_decode_probability: float = 0.99
    payload_sweep_bytes: tuple[int, ...] = tuple(range(100, 1101, 100))
    seed: int = 42
    trial_count: int = 1_000_000
    schemes: tuple[str, ...] = SCHEME_NAMES
    monte_carlo: bool = True

    def __post_init__(self):
        for name in ("bandwidth_hz", "announce_duration_s", "base_distance_m",
                     "announcer_distance_m"):
            _require(getattr(self, name) > 0.0, f"{name} must be positive")
        _require(self.path_loss_exponent >= 2.0,
                 "path_loss_exponent must be at least 2")
        _require(self.monitor_count >= 1, "monitor_count must be at least 1")
        _require(self.downlink_rate_bps_hz > 0.0,
                 "downlink_rate_bps_hz must be positive")
        _require(0.0 < self.downlink_success_probability < 1.0,
                 "downlink_success_probability must lie in (0, 1)")
        _require(self.announcer_decode_mode in (DECODE_MODE_FIXED, DECODE_MODE_COMPUTED),
                 "announcer_decode_mode must be 'fixed' or 'computed'")
        _require(0.0 < self.announcer_decode_probability < 1.0,
                 "announcer_decode_probability must lie in (0, 1)")
        _require(len(self.payload_sweep_bytes) > 0, "payload_bytes must be nonempty")
        _require(all(p > 0 for p in self.payload_sweep_bytes),
                 "payload_bytes entries must be positive")
        _require(list(self.payload_sweep_bytes) == sorted(self.payload_sweep_bytes),
                 "payload_bytes must be sorted ascending")
        _require(0 <= self.seed < 2**64, "seed must fit in 64 bits")
        _require(self.trial_count >= 1, "trials must be at least 1")
        _require(len(self.schemes) > 0, "schemes must be nonempty")
        for s in self.schemes:
            _require(s in SCHEME_NAMES, f"unknown scheme {s!r}")

    @property
    def target_outage(self) -> float:
        return 1.0 - self.downlink_success_probability

    def link_budget(self) -> LinkBudget:
        return LinkBudget(
            noise_w=dbm_to_watt(self.noise_dbm),
            base_distance_m=self.base_distance_m,
            announcer_distance_m=self.announcer_distance_m,
            path_loss_exponent=self.path_loss_exponent,
            announcer_power_w=dbm_to_watt(self.announcer_power_dbm),
            bandwidth_hz=self.bandwidth_hz,
        )

    def fading_model(self) -> FadingModel:
        return FadingModel(mean_gain=1.0)

    def announcer_config(self, payload_bytes: int) -> AnnouncerConfig:
        return AnnouncerConfig(
            duration_s=self.announce_duration_s,
            payload_bytes=payload_bytes,
            decode_mode=self.announcer_decode_mode,
            decode_probability=self.announcer_decode_probability,
        )

    def canonical_text(self) -> str:
        """Stable key = value rendering, the input to the config hash."""
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = ",".join(str(v) for v in value)
            lines.append(f"{f.name} = {value}")
        return "\n".join(lines) + "\n"

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()


def _parse_int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"expected an integer, got {text!r}") from None


def _parse_float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"expected a number, got {text!r}") from None


def _parse_int_list(text: str) -> tuple[int, ...]:
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise ValueError("expected a comma-separated list")
    return tuple(_parse_int(t) for t in items)


def _parse_str_list(text: str) -> tuple[str, ...]:
    items = tuple(t.strip() for t in text.split(",") if t.strip())
    if not items:
        raise ValueError("expected a comma-separated list")
    return items


def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "yes", "1"):
        return True
    if lowered in ("false", "no", "0"):
        return False
    raise ValueError(f"expected true/false, got {text!r}")


# file key -> (ScenarioConfig field, parser)
_CONFIG_KEYS = {
    "bandwidth_hz": ("bandwidth_hz", _parse_float),
    "announce_duration_s": ("announce_duration_s", _parse_float),
    "base_distance_m": ("base_distance_m", _parse_float),
    "announcer_distance_m": ("announcer_distance_m", _parse_float),
    "announcer_power_dbm": ("announcer_power_dbm", _parse_float),
    "noise_dbm": ("noise_dbm", _parse_float),
    "path_loss_exponent": ("path_loss_exponent", _parse_float),
    "monitor_count": ("monitor_count", _parse_int),
    "downlink_rate_bps_hz": ("downlink_rate_bps_hz", _parse_float),
    "downlink_success_probability": ("downlink_success_probability", _parse_float),
    "announcer_decode_mode": ("announcer_decode_mode", str),
    "announcer_decode_probability": ("announcer_decode_probability", _parse_float),
    "payload_bytes": ("payload_sweep_bytes", _parse_int_list),
    "seed": ("seed", _parse_int),
    "trials": ("trial_count", _parse_int),
    "schemes": ("schemes", _parse_str_list),
    "monte_carlo": ("monte_carlo", _parse_bool),
}


def load_config(path: str | Path) -> ScenarioConfig:
    """Parse and validate a flat ``key = value`` scenario file.

    Every key is optional (an empty file is the default scenario); unknown
    or duplicate keys and malformed values fail with the offending line.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    overrides = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not sep or not key:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        field_name, parser = _CONFIG_KEYS[key]
        if field_name in overrides:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        try:
            overrides[field_name] = parser(value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: {key}: {exc}") from exc
    try:
        return ScenarioConfig(**overrides)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def with_overrides(cfg: ScenarioConfig, **changes) -> ScenarioConfig:
    """Replace fields, re-running validation; None values are ignored."""
    actual = {k: v for k, v in changes.items() if v is not None}
    return replace(cfg, **actual) if actual else cfg
