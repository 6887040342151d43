"""Run configuration: a sectioned ``key = value`` text format in laboratory units.

Every key is optional; omitted keys take the built-in default values.

    [source]
    ring_down_time_ns = 21.0        # intensity 1/e decay of the photon
    center_detuning_mhz = 0.0
    emission_jitter_ns = 0.0        # uniform spread of emission time
    jitter_samples = 16

    [modulation]
    delta_mhz = 30.0                # bin spacing / EOM drive frequency
    beta = 1.2024127788...          # default: carrier-suppression index
    drive_phase_offset_rad = 3.14159...

    [filter]
    linewidth_mhz = 7.0             # detection cavity FWHM
    fsr_mhz = 1500.0
    transmission = 1.0              # on-resonance power transmission T0
    center_detuning_mhz = 0.0

    [electronics]
    tx_bandwidth_mhz = unlimited
    tx_filter_order = 1
    rx_bandwidth_mhz = unlimited
    rx_filter_order = 1

    [grid]
    n_samples = 65536
    span_ns = 1000.0
    t0_ns = 0.0

    [experiment]
    points = 73
    pairs_per_setting = 100000
    seed = 0
    prep = S+
    proj = S+
    spectrum_window_mhz = 150.0
    reference = bundled             # or a path to a prep,proj,value,sigma CSV
"""

from __future__ import annotations

import configparser
import dataclasses
import hashlib
import math
from dataclasses import dataclass

from .channel import ChannelConfig, symbol_by_label
from .errors import ConfigurationError, UnsupportedSymbolError
from .optics import CavityFilter, DriveElectronics, SourceModel, carrier_suppression_index
from .wavepacket import TimeGrid

__all__ = ["RunConfig", "parse_config", "format_config", "EXPERIMENTS"]

EXPERIMENTS = ("truth-table", "phase-scan", "spectrum", "monte-carlo", "capacity", "compare")
TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class RunConfig:
    ring_down_time_ns: float = 21.0
    source_center_detuning_mhz: float = 0.0
    emission_jitter_ns: float = 0.0
    jitter_samples: int = 16
    delta_mhz: float = 30.0
    beta: float = dataclasses.field(default_factory=carrier_suppression_index)
    drive_phase_offset_rad: float = math.pi
    filter_linewidth_mhz: float = 7.0
    filter_fsr_mhz: float = 1500.0
    filter_transmission: float = 1.0
    filter_center_detuning_mhz: float = 0.0
    tx_bandwidth_mhz: float = math.inf
    tx_filter_order: int = 1
    rx_bandwidth_mhz: float = math.inf
    rx_filter_order: int = 1
    n_samples: int = 65536
    span_ns: float = 1000.0
    t0_ns: float = 0.0
    experiment: str = "truth-table"
    points: int = 73
    pairs_per_setting: int = 100000
    seed: int = 0
    prep: str = "S+"
    proj: str = "S+"
    spectrum_window_mhz: float = 150.0
    reference: str = "bundled"

    def channel_config(self) -> ChannelConfig:
        return _build_channel(self)

    def sha256(self) -> str:
        return hashlib.sha256(format_config(self).encode("utf-8")).hexdigest()


# (section, key) -> (RunConfig field, kind)
_KEYS = {
    ("source", "ring_down_time_ns"): ("ring_down_time_ns", "float"),
    ("source", "center_detuning_mhz"): ("source_center_detuning_mhz", "float"),
    ("source", "emission_jitter_ns"): ("emission_jitter_ns", "float"),
    ("source", "jitter_samples"): ("jitter_samples", "int"),
    ("modulation", "delta_mhz"): ("delta_mhz", "float"),
    ("modulation", "beta"): ("beta", "float"),
    ("modulation", "drive_phase_offset_rad"): ("drive_phase_offset_rad", "float"),
    ("filter", "linewidth_mhz"): ("filter_linewidth_mhz", "float"),
    ("filter", "fsr_mhz"): ("filter_fsr_mhz", "float"),
    ("filter", "transmission"): ("filter_transmission", "float"),
    ("filter", "center_detuning_mhz"): ("filter_center_detuning_mhz", "float"),
    ("electronics", "tx_bandwidth_mhz"): ("tx_bandwidth_mhz", "bandwidth"),
    ("electronics", "tx_filter_order"): ("tx_filter_order", "int"),
    ("electronics", "rx_bandwidth_mhz"): ("rx_bandwidth_mhz", "bandwidth"),
    ("electronics", "rx_filter_order"): ("rx_filter_order", "int"),
    ("grid", "n_samples"): ("n_samples", "int"),
    ("grid", "span_ns"): ("span_ns", "float"),
    ("grid", "t0_ns"): ("t0_ns", "float"),
    ("experiment", "points"): ("points", "int"),
    ("experiment", "pairs_per_setting"): ("pairs_per_setting", "int"),
    ("experiment", "seed"): ("seed", "int"),
    ("experiment", "prep"): ("prep", "symbol"),
    ("experiment", "proj"): ("proj", "symbol"),
    ("experiment", "spectrum_window_mhz"): ("spectrum_window_mhz", "float"),
    ("experiment", "reference"): ("reference", "str"),
}
_FIELD_KEY = {fname: f"{sec}.{key}" for (sec, key), (fname, _) in _KEYS.items()}


def _convert(raw: str, kind: str, where: str):
    raw = raw.strip()
    try:
        if kind == "float":
            val = float(raw)
            if not math.isfinite(val):
                raise ValueError
            return val
        if kind == "int":
            return int(raw)
        if kind == "bandwidth":
            if raw.lower() in ("unlimited", "inf", "infinite", "none"):
                return math.inf
            return float(raw)
        if kind == "symbol":
            return symbol_by_label(raw).label
        return raw
    except (ValueError, UnsupportedSymbolError) as exc:
        raise ConfigurationError(f"{where}: cannot read {raw!r} as {kind}") from exc


def _check(cond: bool, field_name: str, constraint: str) -> None:
    if not cond:
        raise ConfigurationError(f"{_FIELD_KEY[field_name]}: must satisfy {constraint}")


def _validate_units(rc: RunConfig) -> None:
    _check(rc.ring_down_time_ns > 0, "ring_down_time_ns", "> 0")
    _check(rc.emission_jitter_ns >= 0, "emission_jitter_ns", ">= 0")
    _check(rc.jitter_samples >= 1, "jitter_samples", ">= 1")
    _check(rc.delta_mhz > 0, "delta_mhz", "> 0")
    _check(rc.beta >= 0, "beta", ">= 0")
    _check(rc.filter_linewidth_mhz > 0, "filter_linewidth_mhz", "> 0")
    _check(rc.filter_fsr_mhz > rc.filter_linewidth_mhz, "filter_fsr_mhz", "> filter.linewidth_mhz")
    _check(0 < rc.filter_transmission <= 1, "filter_transmission", "0 < T0 <= 1")
    _check(rc.filter_linewidth_mhz < rc.delta_mhz, "filter_linewidth_mhz", "< modulation.delta_mhz")
    _check(rc.tx_bandwidth_mhz > 0, "tx_bandwidth_mhz", "> 0")
    _check(rc.rx_bandwidth_mhz > 0, "rx_bandwidth_mhz", "> 0")
    _check(rc.tx_filter_order >= 1, "tx_filter_order", ">= 1")
    _check(rc.rx_filter_order >= 1, "rx_filter_order", ">= 1")
    _check(rc.n_samples >= 2, "n_samples", ">= 2")
    _check(rc.span_ns > 0, "span_ns", "> 0")
    _check(rc.points >= 2, "points", ">= 2")
    _check(rc.pairs_per_setting > 0, "pairs_per_setting", "> 0")
    _check(rc.spectrum_window_mhz > 0, "spectrum_window_mhz", "> 0")
    if rc.experiment not in EXPERIMENTS:
        raise ConfigurationError(f"experiment must be one of {', '.join(EXPERIMENTS)}, got {rc.experiment!r}")


def _ns(x: float) -> float:
    # division by an exact power of ten rounds like the literal, so 21 ns == 21e-9
    return x / 1e9


def _mhz(x: float) -> float:
    return TWO_PI * (x * 1e6)


def _build_channel(rc: RunConfig) -> ChannelConfig:
    grid = TimeGrid.from_span(rc.n_samples, _ns(rc.span_ns), _ns(rc.t0_ns))
    source = SourceModel(_ns(rc.ring_down_time_ns), _mhz(rc.source_center_detuning_mhz))
    cavity = CavityFilter(
        linewidth_fwhm=_mhz(rc.filter_linewidth_mhz),
        fsr=_mhz(rc.filter_fsr_mhz),
        peak_power_transmission=rc.filter_transmission,
        center_detuning=_mhz(rc.filter_center_detuning_mhz),
    )
    tx = DriveElectronics(rc.tx_bandwidth_mhz * 1e6, rc.tx_filter_order)
    rx = DriveElectronics(rc.rx_bandwidth_mhz * 1e6, rc.rx_filter_order)
    try:
        return ChannelConfig(
            source=source,
            delta=_mhz(rc.delta_mhz),
            beta=rc.beta,
            detection_filter=cavity,
            tx_electronics=tx,
            rx_electronics=rx,
            grid=grid,
            drive_phase_offset=rc.drive_phase_offset_rad,
            emission_jitter=_ns(rc.emission_jitter_ns),
            jitter_samples=rc.jitter_samples,
        )
    except ConfigurationError as exc:
        msg = str(exc)
        if "bin-aligned" in msg:
            keys = "modulation.delta_mhz / grid.span_ns"
        elif "Nyquist" in msg:
            keys = "grid.n_samples / grid.span_ns"
        elif "span" in msg:
            keys = "grid.span_ns / source.ring_down_time_ns"
        else:
            keys = "configuration"
        raise ConfigurationError(f"{keys}: {msg}") from exc


def parse_config(text: str, experiment: str | None = None) -> RunConfig:
    """Parse and fully validate a configuration document.

    Unknown sections or keys are rejected. The channel configuration is built
    once so that grid constraints are reported here, not mid-run.
    """
    parser = configparser.ConfigParser(
        inline_comment_prefixes=("#",), comment_prefixes=("#",), interpolation=None, strict=True
    )
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed configuration: {exc}") from exc
    sections = {sec for sec, _ in _KEYS}
    values = {}
    for sec in parser.sections():
        if sec not in sections:
            raise ConfigurationError(f"unknown section [{sec}]; expected one of {sorted(sections)}")
        for key, raw in parser.items(sec):
            if (sec, key) not in _KEYS:
                known = sorted(k for s, k in _KEYS if s == sec)
                raise ConfigurationError(f"unknown key {sec}.{key}; known keys: {', '.join(known)}")
            fname, kind = _KEYS[(sec, key)]
            values[fname] = _convert(raw, kind, f"{sec}.{key}")
    if experiment is not None:
        values["experiment"] = experiment
    rc = RunConfig(**values)
    _validate_units(rc)
    _build_channel(rc)
    return rc


def _fmt(value, kind: str) -> str:
    if kind == "bandwidth" and math.isinf(value):
        return "unlimited"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_config(rc: RunConfig) -> str:
    """Canonical text form; parses back to an equal :class:`RunConfig`."""
    lines = [f"# experiment: {rc.experiment}"]
    current = None
    for (sec, key), (fname, kind) in _KEYS.items():
        if sec != current:
            if current is not None:
                lines.append("")
            lines.append(f"[{sec}]")
            current = sec
        lines.append(f"{key} = {_fmt(getattr(rc, fname), kind)}")
    return "\n".join(lines) + "\n"
