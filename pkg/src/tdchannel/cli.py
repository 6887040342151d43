"""Command-line front end.

    tdchannel <experiment> [--config PATH] [--out PATH] [--seed N] [--points N]
                           [--print-config] [--json PATH] [--workers N]
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .channel import ONE, detection_probability, symbol_by_label
from .config import EXPERIMENTS, RunConfig, format_config, parse_config
from .errors import ChannelError
from .experiments import (
    compare_measured,
    load_reference_table,
    monte_carlo_counts,
    mutual_information,
    phase_scan,
    spectrum_trace,
    truth_table,
)

log = logging.getLogger("tdchannel")


def fmt(x: float) -> str:
    return f"{x:.9f}"


def _truth_table(rc, cfg, workers):
    m = truth_table(cfg, workers=workers)
    columns = ["prep", *m.symbols]
    rows = [[p, *(fmt(v) for v in m.values[i])] for i, p in enumerate(m.symbols)]
    return columns, rows, []


def _phase_scan(rc, cfg, workers):
    curve = phase_scan(cfg, rc.points, symbol_by_label(rc.prep), symbol_by_label(rc.proj), workers=workers)
    rows = [
        [fmt(math.degrees(d)), fmt(s), fmt(a), fmt(curve.classical_baseline)]
        for d, s, a in zip(curve.delta_theta, curve.simulated, curve.analytic)
    ]
    return ["delta_theta_deg", "simulated", "analytic", "baseline"], rows, []


def _spectrum(rc, cfg, workers):
    spec = spectrum_trace(cfg, symbol_by_label(rc.prep), symbol_by_label(rc.proj))
    w, amp = spec.centered()
    power = np.abs(amp) ** 2
    mhz = w / (2 * math.pi) / 1e6
    keep = np.abs(mhz) <= rc.spectrum_window_mhz
    peak = power[keep].max()
    rows = [[fmt(f), fmt(p / peak), f"{p:.8e}"] for f, p in zip(mhz[keep], power[keep])]
    return ["detuning_mhz", "relative_power", "power"], rows, []


def _monte_carlo(rc, cfg, workers):
    rec = monte_carlo_counts(cfg, rc.pairs_per_setting, rc.seed, workers=workers)
    m = rec.to_matrix()
    rows = []
    for i, p in enumerate(rec.symbols):
        for j, q in enumerate(rec.symbols):
            rows.append([p, q, fmt(rec.means[i, j]), str(int(rec.counts[i, j])), fmt(m.values[i, j]), fmt(m.uncertainties[i, j])])
    return ["prep", "proj", "mean", "count", "value", "sigma"], rows, [f"pairs_per_setting: {rec.total_pairs}"]


def _capacity(rc, cfg, workers):
    m = truth_table(cfg, workers=workers)
    p_ref = detection_probability(ONE, ONE, cfg)
    rows = []
    for basis in (("0", "1", "2"), ("S+", "S-")):
        for mode, eff in (("normalized", None), ("absolute", p_ref)):
            bits = mutual_information(m, None, basis, efficiency=eff)
            rows.append([" ".join(basis), mode, fmt(bits), fmt(math.log2(len(basis)))])
    return ["basis", "scale", "mutual_information_bits", "max_bits"], rows, [f"reference_detection_probability: {fmt(p_ref)}"]


def _compare(rc, cfg, workers):
    ref = load_reference_table(None if rc.reference == "bundled" else rc.reference)
    sim = truth_table(cfg, [symbol_by_label(s) for s in ref.symbols], workers=workers)
    rep = compare_measured(sim, ref)
    rows = []
    for i, p in enumerate(ref.symbols):
        for j, q in enumerate(ref.symbols):
            z = rep.z_scores[i, j] if rep.z_scores is not None else float("nan")
            rows.append([p, q, fmt(sim.values[i, j]), fmt(ref.values[i, j]), fmt(ref.uncertainties[i, j]),
                         fmt(rep.deviation[i, j]), "nan" if math.isnan(z) else fmt(z)])
    notes = [
        "within-basis crosstalk per column (" + " ".join(ref.symbols) + ")",
        "crosstalk_simulated: " + " ".join(fmt(x) for x in rep.crosstalk_sim),
        "crosstalk_reference: " + " ".join(fmt(x) for x in rep.crosstalk_ref),
    ]
    return ["prep", "proj", "simulated", "reference", "reference_sigma", "deviation", "z"], rows, notes


_DISPATCH = {
    "truth-table": _truth_table,
    "phase-scan": _phase_scan,
    "spectrum": _spectrum,
    "monte-carlo": _monte_carlo,
    "capacity": _capacity,
    "compare": _compare,
}


def render_csv(header: list[str], columns: list[str], rows: list[list[str]]) -> str:
    lines = [f"# {h}" for h in header]
    lines.append(",".join(columns))
    lines.extend(",".join(r) for r in rows)
    return "\n".join(lines) + "\n"


def run(rc: RunConfig, out: str | None = None, json_path: str | None = None, workers: int = 1) -> int:
    """Execute ``rc.experiment`` and write its table; returns a process exit status."""
    try:
        cfg = rc.channel_config()
        log.info(
            "delta snapped from %.9g Hz to %.9g Hz (relative %.3e)",
            cfg.requested_delta / (2 * math.pi), cfg.delta / (2 * math.pi), cfg.delta_snap_error,
        )
        columns, rows, notes = _DISPATCH[rc.experiment](rc, cfg, max(1, workers))
    except ChannelError as exc:
        print(f"tdchannel {rc.experiment}: {exc}", file=sys.stderr)
        return 1
    header = [
        f"tdchannel {__version__}",
        f"experiment: {rc.experiment}",
        f"config_sha256: {rc.sha256()}",
        f"seed: {rc.seed}",
        f"delta_snap_relative_error: {cfg.delta_snap_error:.3e}",
        *notes,
    ]
    text = render_csv(header, columns, rows)
    try:
        if out is None or out == "-":
            sys.stdout.write(text)
        else:
            Path(out).write_text(text, encoding="utf-8", newline="\n")
        if json_path is not None:
            doc = {"provenance": header, "columns": columns, "rows": rows}
            Path(json_path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8", newline="\n")
    except OSError as exc:
        print(f"tdchannel: cannot write output: {exc}", file=sys.stderr)
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tdchannel", description="Frequency-bin qutrit channel simulator")
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", help="sectioned key = value configuration file (default: built-in parameters)")
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.add_argument("--json", dest="json_path", help="also write a single JSON document")
    p.add_argument("--seed", type=int, help="override [experiment] seed")
    p.add_argument("--points", type=int, help="override [experiment] points")
    p.add_argument("--workers", type=int, default=1, help="threads for independent matrix/scan entries")
    p.add_argument("--print-config", action="store_true", help="print the resolved configuration and exit")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        text = Path(args.config).read_text(encoding="utf-8") if args.config else ""
    except OSError as exc:
        print(f"tdchannel: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        rc = parse_config(text, args.experiment)
        overrides = {k: v for k, v in (("seed", args.seed), ("points", args.points)) if v is not None}
        if overrides:
            rc = parse_config(format_config(dataclasses.replace(rc, **overrides)), args.experiment)
    except ChannelError as exc:
        print(f"tdchannel: invalid configuration: {exc}", file=sys.stderr)
        return 1
    if args.print_config:
        sys.stdout.write(format_config(rc))
        return 0
    return run(rc, args.out, args.json_path, args.workers)


if __name__ == "__main__":
    sys.exit(main())
