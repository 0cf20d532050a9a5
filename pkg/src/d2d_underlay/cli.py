"""Payload sweeps, CSV reports, and the command-line entry point.

``d2d-underlay --config scenario.cfg --out sweep.csv`` evaluates every
payload point analytically and (unless disabled) by Monte Carlo, writing
one CSV row per payload and scheme. A plot script rendering the power and
energy-efficiency charts can be emitted alongside; the tool itself never
renders anything.

Exit codes: 0 success, 2 config-error, 3 invariant-violation (any
downlink decode failure), 4 convergence-error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .metrics import (
    MetricsReport,
    Scheme,
    announcer_decode_probability,
    energy_per_bit,
    sum_rate,
)
from .montecarlo import (
    TrialBatch,
    kernel_backend,
    resolve_point,
    run_orthogonal,
    run_underlay,
    scenario_key,
)
from .numerics import ConvergenceError, QuadratureSpec
from .powerctl import PowerMode, PowerPolicy, expected_power
from .scenario import ConfigError, ScenarioConfig, load_config, watt_to_dbm, with_overrides

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_INVARIANT_VIOLATION = 3
EXIT_CONVERGENCE_ERROR = 4

CSV_COLUMNS = (
    "payload_bytes",
    "scheme",
    "announcer_rate_bps_hz",
    "announcer_snr_threshold",
    "cutoff_gain",
    "k_watts",
    "analytic_power_w",
    "analytic_power_dbm",
    "mc_power_w",
    "mc_power_se_w",
    "analytic_outage",
    "mc_outage",
    "announcer_decode_probability",
    "sum_rate_bps",
    "energy_per_bit_j",
    "decode_failures",
)

_SCHEME_ORDER = (Scheme.UNDERLAY, Scheme.ORTHOGONAL)


class InvariantViolation(RuntimeError):
    """A hard model guarantee failed (nonzero downlink decode failures)."""


def analytic_metrics(
    cfg: ScenarioConfig,
    payload_bytes: int,
    scheme: Scheme,
    spec: QuadratureSpec | None = None,
) -> MetricsReport:
    """Closed-form / quadrature metrics for one payload point and scheme."""
    point = resolve_point(cfg, payload_bytes)
    k = point.k_underlay_w if scheme is Scheme.UNDERLAY else point.k_orthogonal_w
    mode = PowerMode.MULTI_CHANNEL if scheme is Scheme.UNDERLAY else PowerMode.ORTHOGONAL
    policy = PowerPolicy(k_watts=k, cutoff=point.cutoff_gain,
                         target_outage=cfg.target_outage, n=point.n, mode=mode)
    power = expected_power(policy, point.model, spec)
    decode = announcer_decode_probability(
        cfg.announcer_config(payload_bytes), point.budget, point.model,
        point.announcer_threshold_snr,
    )
    s = sum_rate(point.downlink_rate, point.announcer_rate, cfg.bandwidth_hz,
                 cfg.downlink_success_probability, decode, scheme)
    return MetricsReport(
        sum_rate_bps=s,
        energy_per_bit_j=energy_per_bit(power, s),
        outage_probability=cfg.target_outage,
        announcer_decode_probability=decode,
        expected_power_w=power,
        scenario_key=scenario_key(scheme, payload_bytes, cfg),
    )


def run_sweep(cfg: ScenarioConfig, spec: QuadratureSpec | None = None) -> list[dict]:
    """Evaluate the payload sweep; one row dict per payload and scheme.

    Rows are ordered by payload, then underlay before orthogonal. A
    nonzero decode-failure count aborts the sweep: it falsifies the
    zero-outage guarantee the whole scheme rests on.
    """
    runners = {Scheme.UNDERLAY: run_underlay, Scheme.ORTHOGONAL: run_orthogonal}
    selected = [s for s in _SCHEME_ORDER if s.value in cfg.schemes]
    rows = []
    for payload in cfg.payload_sweep_bytes:
        point = resolve_point(cfg, payload)
        for scheme in selected:
            analytic = analytic_metrics(cfg, payload, scheme, spec)
            k = point.k_underlay_w if scheme is Scheme.UNDERLAY else point.k_orthogonal_w
            row = {
                "payload_bytes": payload,
                "scheme": scheme.value,
                "announcer_rate_bps_hz": point.announcer_rate,
                "announcer_snr_threshold": point.announcer_threshold_snr,
                "cutoff_gain": point.cutoff_gain,
                "k_watts": k,
                "analytic_power_w": analytic.expected_power_w,
                "analytic_power_dbm": watt_to_dbm(analytic.expected_power_w),
                "mc_power_w": None,
                "mc_power_se_w": None,
                "analytic_outage": cfg.target_outage,
                "mc_outage": None,
                "announcer_decode_probability": analytic.announcer_decode_probability,
                "sum_rate_bps": analytic.sum_rate_bps,
                "energy_per_bit_j": analytic.energy_per_bit_j,
                "decode_failures": None,
            }
            if cfg.monte_carlo:
                batch = TrialBatch(seed=cfg.seed, trial_count=cfg.trial_count,
                                   scenario=cfg, payload_bytes=payload)
                report = runners[scheme](batch)
                if report.downlink_decode_failures:
                    raise InvariantViolation(
                        f"{report.downlink_decode_failures} downlink decode failures "
                        f"({scheme.value}, payload {payload} B, seed {cfg.seed})"
                    )
                row.update(
                    mc_power_w=report.mean_power_w,
                    mc_power_se_w=report.power_se_w,
                    mc_outage=report.empirical_outage,
                    decode_failures=report.downlink_decode_failures,
                )
            rows.append(row)
    return rows


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def write_csv(rows: list[dict], cfg: ScenarioConfig, path: str | Path):
    """Write sweep rows with a reproducibility header.

    The header comments carry the config hash, seed, and trial count, so
    any row can be regenerated from the CSV alone; identical config and
    seed produce a byte-identical file.
    """
    path = Path(path)
    with path.open("w", newline="") as handle:
        handle.write("# d2d-underlay payload sweep\n")
        handle.write(f"# config_hash = {cfg.config_hash()}\n")
        handle.write(f"# seed = {cfg.seed}\n")
        handle.write(f"# trials = {cfg.trial_count if cfg.monte_carlo else 0}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([_format_cell(row[c]) for c in CSV_COLUMNS])


_PLOT_TEMPLATE = '''#!/usr/bin/env python3
"""Render the power and energy-efficiency charts from a sweep CSV.

Usage: python {script_name} [sweep.csv]
Requires matplotlib. Writes power_vs_payload.png and
energy_per_bit_vs_payload.png next to the CSV.
"""
import csv
import math
import sys
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

csv_path = Path(sys.argv[1] if len(sys.argv) > 1 else {csv_path!r})
with csv_path.open() as handle:
    reader = csv.DictReader(line for line in handle if not line.startswith("#"))
    rows = list(reader)

schemes = sorted({{row["scheme"] for row in rows}})
styles = {{"underlay": "o-", "orthogonal": "s--"}}

def series(scheme, column):
    pts = [(int(r["payload_bytes"]), float(r[column]))
           for r in rows if r["scheme"] == scheme and r[column] != ""]
    return [p for p, _ in pts], [v for _, v in pts]

fig, ax = plt.subplots(figsize=(7, 4.5))
for scheme in schemes:
    x, y = series(scheme, "analytic_power_dbm")
    ax.plot(x, y, styles.get(scheme, "-"), label=f"{{scheme}} (analytic)")
    xm, ym = series(scheme, "mc_power_w")
    if xm:
        ax.plot(xm, [10 * math.log10(v) + 30 for v in ym], "x",
                label=f"{{scheme}} (simulated)")
ax.set_xlabel("announcement payload [bytes]")
ax.set_ylabel("mean downlink power [dBm]")
ax.grid(True, alpha=0.4)
ax.legend()
fig.tight_layout()
fig.savefig(csv_path.parent / "power_vs_payload.png", dpi=150)

fig, ax = plt.subplots(figsize=(7, 4.5))
for scheme in schemes:
    x, y = series(scheme, "energy_per_bit_j")
    ax.semilogy(x, y, styles.get(scheme, "-"), label=scheme)
ax.set_xlabel("announcement payload [bytes]")
ax.set_ylabel("energy per delivered bit [J/bit]")
ax.grid(True, which="both", alpha=0.4)
ax.legend()
fig.tight_layout()
fig.savefig(csv_path.parent / "energy_per_bit_vs_payload.png", dpi=150)
print("wrote", csv_path.parent / "power_vs_payload.png")
print("wrote", csv_path.parent / "energy_per_bit_vs_payload.png")
'''


def emit_plot_script(rows: list[dict], script_path: str | Path, csv_path: str | Path):
    """Write a self-contained matplotlib script consuming the sweep CSV."""
    if not rows:
        raise ValueError("cannot emit a plot script for an empty sweep")
    script_path = Path(script_path)
    script_path.write_text(_PLOT_TEMPLATE.format(
        script_name=script_path.name, csv_path=str(csv_path)
    ))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="d2d-underlay",
        description="Downlink power and energy efficiency of underlay "
                    "discovery announcements, analytic and Monte Carlo.",
    )
    parser.add_argument("--config", metavar="PATH",
                        help="flat key = value scenario file (default: built-in scenario)")
    parser.add_argument("--seed", type=int, help="override the scenario seed")
    parser.add_argument("--trials", type=int, help="override the Monte Carlo trial count")
    parser.add_argument("--schemes", metavar="LIST",
                        help="comma-separated subset of underlay,orthogonal")
    parser.add_argument("--analytic-only", action="store_true",
                        help="skip the Monte Carlo runs")
    parser.add_argument("--out", metavar="CSV-PATH", default="d2d_sweep.csv",
                        help="output CSV path (default: %(default)s)")
    parser.add_argument("--plot-script", metavar="PATH",
                        help="also write a matplotlib script consuming the CSV")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else ScenarioConfig()
        schemes = tuple(s.strip() for s in args.schemes.split(",")) if args.schemes else None
        cfg = with_overrides(cfg, seed=args.seed, trial_count=args.trials,
                             schemes=schemes,
                             monte_carlo=False if args.analytic_only else None)
        rows = run_sweep(cfg)
        write_csv(rows, cfg, args.out)
        if args.plot_script:
            emit_plot_script(rows, args.plot_script, args.out)
            print(f"wrote plot script {args.plot_script}")
        print(f"wrote {len(rows)} rows to {args.out} "
              f"(kernel: {kernel_backend()}, seed: {cfg.seed})")
        return EXIT_OK
    except ConfigError as exc:
        print(f"config-error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except InvariantViolation as exc:
        print(f"invariant-violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT_VIOLATION
    except ConvergenceError as exc:
        print(f"convergence-error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE_ERROR


if __name__ == "__main__":
    sys.exit(main())
