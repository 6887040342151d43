"""Drivers for the truth table, spectra, coherence fringe, count statistics and channel scoring."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .channel import (
    BUILTIN_SYMBOLS,
    COMPUTATIONAL_BASIS,
    ONE,
    SPLUS,
    ChannelConfig,
    Sinusoid,
    Symbol,
    demodulate,
    detection_probability,
    prepare,
    state_vector,
)
from .errors import UnsupportedSymbolError, UsageError
from .optics import bessel_coeff
from .wavepacket import Spectrum, to_spectrum

__all__ = [
    "ProjectionMatrix",
    "FringeCurve",
    "CountRecord",
    "ComparisonReport",
    "BASES",
    "absolute_matrix",
    "truth_table",
    "phase_scan",
    "analytic_fringe",
    "classical_baseline",
    "spectrum_trace",
    "poisson_counts",
    "monte_carlo_counts",
    "mutual_information",
    "compare_measured",
    "load_reference_table",
]

# Within-basis groups used for crosstalk figures.
BASES: tuple[tuple[str, ...], ...] = (("0", "1", "2"), ("S+", "S-"))


def _map(fn: Callable, items: Sequence, workers: int) -> list:
    """Ordered map; results never depend on ``workers``."""
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True, eq=False)
class ProjectionMatrix:
    """Relative detection rates; ``values[k, j]`` is preparation k projected on j."""

    symbols: tuple[str, ...]
    values: np.ndarray = field(repr=False)
    uncertainties: np.ndarray | None = field(default=None, repr=False)
    normalization_entry: tuple[int, int] = (1, 1)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        n = len(self.symbols)
        if values.shape != (n, n):
            raise UsageError(f"values must be {n}x{n}, got {values.shape}")
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise UsageError("relative rates must be finite and non-negative")
        if values[self.normalization_entry] != 1.0:
            raise UsageError("value at the normalization entry must be exactly 1")
        object.__setattr__(self, "values", values)
        if self.uncertainties is not None:
            sig = np.asarray(self.uncertainties, dtype=float)
            if sig.shape != values.shape or np.any(sig < 0):
                raise UsageError("uncertainties must match values and be non-negative")
            object.__setattr__(self, "uncertainties", sig)

    @classmethod
    def from_absolute(cls, symbols: Iterable[str], absolute, normalization_entry=(1, 1)) -> "ProjectionMatrix":
        absolute = np.asarray(absolute, dtype=float)
        ref = absolute[normalization_entry]
        if not ref > 0:
            raise UsageError("normalization entry has zero rate")
        values = absolute / ref
        values[normalization_entry] = 1.0
        return cls(tuple(symbols), values, None, tuple(normalization_entry))

    def index(self, label: str) -> int:
        try:
            return self.symbols.index(label)
        except ValueError:
            raise UsageError(f"symbol {label!r} not in matrix {self.symbols}") from None

    def entry(self, prep: str, proj: str) -> float:
        return float(self.values[self.index(prep), self.index(proj)])

    def within_basis_crosstalk(self, bases=BASES) -> np.ndarray:
        """Per-column sum of off-diagonal rates from preparations in the column's own basis."""
        out = np.zeros(len(self.symbols))
        for basis in bases:
            idx = [self.symbols.index(s) for s in basis if s in self.symbols]
            for j in idx:
                out[j] = sum(self.values[i, j] for i in idx if i != j)
        return out


@dataclass(frozen=True, eq=False)
class FringeCurve:
    delta_theta: np.ndarray = field(repr=False)
    simulated: np.ndarray = field(repr=False)
    analytic: np.ndarray = field(repr=False)
    classical_baseline: float = 0.0

    def __post_init__(self):
        if len(self.simulated) != len(self.analytic) or len(self.simulated) != len(self.delta_theta):
            raise UsageError("fringe arrays must share a length")


@dataclass(frozen=True, eq=False)
class CountRecord:
    """Poisson coincidence counts for every (prep, proj) setting."""

    symbols: tuple[str, ...]
    counts: np.ndarray = field(repr=False)
    means: np.ndarray = field(repr=False)
    total_pairs: int
    seed: int

    def to_matrix(self, normalization_entry=(1, 1)) -> ProjectionMatrix:
        """Relative rates with Poisson errors of numerator and reference added in quadrature.

        A zero count is given the one-count scale 1/N_ref as its uncertainty.
        """
        counts = self.counts.astype(float)
        ref = counts[normalization_entry]
        if ref <= 0:
            raise UsageError("reference setting recorded no counts")
        values = counts / ref
        with np.errstate(divide="ignore"):
            rel = np.sqrt(np.where(counts > 0, 1.0 / counts, 0.0) + 1.0 / ref)
        sigma = np.where(counts > 0, values * rel, 1.0 / ref)
        values[normalization_entry] = 1.0
        sigma[normalization_entry] = 0.0
        return ProjectionMatrix(self.symbols, values, sigma, tuple(normalization_entry))


@dataclass(frozen=True, eq=False)
class ComparisonReport:
    symbols: tuple[str, ...]
    deviation: np.ndarray = field(repr=False)
    z_scores: np.ndarray | None = field(repr=False)
    crosstalk_sim: np.ndarray = field(repr=False)
    crosstalk_ref: np.ndarray = field(repr=False)

    @property
    def max_abs_deviation(self) -> float:
        return float(np.max(np.abs(self.deviation)))


def absolute_matrix(cfg: ChannelConfig, symbols: Sequence[Symbol] = BUILTIN_SYMBOLS, workers: int = 1) -> np.ndarray:
    pairs = [(k, j) for k in symbols for j in symbols]
    flat = _map(lambda kj: detection_probability(kj[0], kj[1], cfg), pairs, workers)
    return np.array(flat).reshape(len(symbols), len(symbols))


def truth_table(cfg: ChannelConfig, symbols: Sequence[Symbol] = BUILTIN_SYMBOLS, workers: int = 1) -> ProjectionMatrix:
    """Full-pipeline detection matrix normalized to the (1, 1) entry."""
    labels = [s.label for s in symbols]
    if ONE.label not in labels:
        raise UsageError("truth table needs symbol '1' for normalization")
    ref = labels.index(ONE.label)
    return ProjectionMatrix.from_absolute(labels, absolute_matrix(cfg, symbols, workers), (ref, ref))


def _require_sinusoid(sym: Symbol) -> None:
    if not (isinstance(sym.preparation, Sinusoid) and isinstance(sym.projection, Sinusoid)):
        raise UnsupportedSymbolError(f"symbol {sym.label!r} is not driven sinusoidally")


def analytic_fringe(cfg: ChannelConfig, delta_theta, prep: Symbol = SPLUS, proj: Symbol = SPLUS) -> np.ndarray:
    """Closed-form carrier weight after two sinusoidal drives, relative to its value at pi.

    Two drives at the same frequency add as phasors, b_p*exp(i*th_p) +
    b_j*exp(i*(th_j + dth)); the carrier then survives with J_0(|sum|)**2.
    """
    _require_sinusoid(prep)
    _require_sinusoid(proj)
    bp = cfg.beta if prep.preparation.beta is None else prep.preparation.beta
    bj = cfg.beta if proj.projection.beta is None else proj.projection.beta

    def carrier(dth):
        amp = np.abs(bp * np.exp(1j * prep.preparation.theta) + bj * np.exp(1j * (proj.projection.theta + dth)))
        return bessel_coeff(0, amp) ** 2

    return carrier(np.asarray(delta_theta, dtype=float)) / carrier(math.pi)


def phase_scan(
    cfg: ChannelConfig,
    n_points: int,
    prep: Symbol = SPLUS,
    proj: Symbol = SPLUS,
    workers: int = 1,
) -> FringeCurve:
    """Sweep the transmitter/receiver drive phase difference over [0, 2*pi]."""
    if n_points < 2:
        raise UsageError("phase scan needs at least two points")
    _require_sinusoid(prep)
    _require_sinusoid(proj)
    dth = np.linspace(0.0, 2 * math.pi, n_points)
    sim = np.array(
        _map(lambda x: detection_probability(prep, proj, cfg.with_(drive_phase_offset=float(x))), list(dth), workers)
    )
    peak = detection_probability(prep, proj, cfg.with_(drive_phase_offset=math.pi))
    return FringeCurve(dth, sim / peak, analytic_fringe(cfg, dth, prep, proj), classical_baseline(cfg, proj))


def classical_baseline(cfg: ChannelConfig, proj: Symbol = SPLUS) -> float:
    """Detection rate of an incoherent mixture of |0>, |1>, |2> with the weights of ``proj``.

    Uses the matched receiver (drive phase difference pi), and reports the
    rate relative to the coherent peak of ``proj`` prepared and projected.
    """
    _require_sinusoid(proj)
    matched = cfg.with_(drive_phase_offset=math.pi)
    weights = np.abs(state_vector(proj, matched).as_array()) ** 2
    weights = weights / weights.sum()
    rates = [detection_probability(s, proj, matched) for s in COMPUTATIONAL_BASIS]
    peak = detection_probability(proj, proj, matched)
    return float(np.dot(weights, rates) / peak)


def spectrum_trace(cfg: ChannelConfig, prep: Symbol, proj: Symbol) -> Spectrum:
    """Spectrum after preparation and receiver demodulation, before the detection cavity.

    The photon is emitted at the grid origin; emission jitter is not applied.
    """
    return to_spectrum(demodulate(prepare(prep, cfg), proj, cfg))


def poisson_counts(means, seed: int) -> np.ndarray:
    """One Poisson draw per entry of ``means`` from a stream keyed by (seed, index)."""
    means = np.asarray(means, dtype=float)
    out = np.empty(means.shape, dtype=np.int64)
    for idx in np.ndindex(means.shape):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(int(i) for i in idx)))
        out[idx] = rng.poisson(means[idx]) if means[idx] > 0 else 0
    return out


def monte_carlo_counts(
    cfg: ChannelConfig,
    pairs_per_setting: int,
    seed: int,
    symbols: Sequence[Symbol] = BUILTIN_SYMBOLS,
    workers: int = 1,
) -> CountRecord:
    if pairs_per_setting <= 0:
        raise UsageError("pairs_per_setting must be positive")
    means = pairs_per_setting * absolute_matrix(cfg, symbols, workers)
    return CountRecord(tuple(s.label for s in symbols), poisson_counts(means, seed), means, pairs_per_setting, seed)


def _information_bits(prior: np.ndarray, channel: np.ndarray) -> float:
    out_dist = prior @ channel
    total = 0.0
    for x, px in enumerate(prior):
        if px == 0:
            continue
        for y, w in enumerate(channel[x]):
            if w > 0:
                total += px * w * math.log2(w / out_dist[y])
    return max(total, 0.0)


def mutual_information(
    m: ProjectionMatrix,
    prior=None,
    subset: Sequence[str] | None = None,
    efficiency: float | None = None,
) -> float:
    """Mutual information (bits) of the discrete channel induced on ``subset``.

    Each input k produces outcome j with probability ``efficiency * m[k, j]``,
    plus an explicit no-detection outcome carrying the remainder. Without an
    ``efficiency`` the largest row is scaled to lose nothing.
    """
    subset = list(m.symbols if subset is None else subset)
    idx = [m.index(s) for s in subset]
    n = len(idx)
    if prior is None:
        prior = np.full(n, 1.0 / n)
    prior = np.asarray(prior, dtype=float)
    if prior.shape != (n,) or not np.all(np.isfinite(prior)) or np.any(prior < 0):
        raise UsageError(f"prior must be {n} finite non-negative weights")
    if abs(prior.sum() - 1.0) > 1e-9:
        raise UsageError(f"prior must sum to 1, got {prior.sum():.12g}")
    sub = m.values[np.ix_(idx, idx)]
    rows = sub.sum(axis=1)
    scale = 1.0 / rows.max() if efficiency is None else float(efficiency)
    if scale <= 0 or np.any(rows * scale > 1 + 1e-12):
        raise UsageError("efficiency makes some row exceed unit probability")
    channel = np.column_stack([sub * scale, np.clip(1.0 - rows * scale, 0.0, None)])
    return _information_bits(prior, channel)


def compare_measured(sim: ProjectionMatrix, ref: ProjectionMatrix) -> ComparisonReport:
    if sim.symbols != ref.symbols:
        raise UsageError(f"symbol ordering differs: {sim.symbols} vs {ref.symbols}")
    if sim.values.shape != ref.values.shape:
        raise UsageError("matrix shapes differ")
    deviation = sim.values - ref.values
    z = None
    if sim.uncertainties is not None or ref.uncertainties is not None:
        var = np.zeros_like(deviation)
        for s in (sim.uncertainties, ref.uncertainties):
            if s is not None:
                var = var + s**2
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(var > 0, deviation / np.sqrt(var), np.nan)
    return ComparisonReport(
        sim.symbols, deviation, z, sim.within_basis_crosstalk(), ref.within_basis_crosstalk()
    )


def load_reference_table(path: str | Path | None = None) -> ProjectionMatrix:
    """Read a (prep, proj, value, sigma) CSV; defaults to the bundled measured table."""
    if path is None:
        text = resources.files("tdchannel").joinpath("data/measured_crosstalk.csv").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    rows = list(csv.DictReader(io.StringIO("\n".join(lines))))
    if not rows or set(rows[0]) != {"prep", "proj", "value", "sigma"}:
        raise UsageError("reference table needs columns prep, proj, value, sigma")
    labels: list[str] = []
    for r in rows:
        for key in ("prep", "proj"):
            if r[key] not in labels:
                labels.append(r[key])
    n = len(labels)
    values = np.full((n, n), np.nan)
    sigma = np.full((n, n), np.nan)
    for r in rows:
        i, j = labels.index(r["prep"]), labels.index(r["proj"])
        values[i, j] = float(r["value"])
        sigma[i, j] = float(r["sigma"])
    if np.isnan(values).any():
        raise UsageError("reference table is missing entries")
    ref = labels.index(ONE.label)
    return ProjectionMatrix(tuple(labels), values, sigma, (ref, ref))
