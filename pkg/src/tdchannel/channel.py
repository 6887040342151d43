"""Prepare -> transmit -> demodulate -> filter pipeline for the five-symbol qutrit alphabet.

Symbols are described by the drive waveform each EOM receives rather than by
raw phase arrays, so the same symbol renders on any grid and modulation
frequency, and the closed-form state vectors stay available.

Phase sign convention: the transforms in :mod:`tdchannel.wavepacket` use an
exp(-i w t) analysis kernel, so a phase exp(+i D t) raises the frequency.
The conventional optics notation writes the field as exp(-i w t), where
exp(+i D t) lowers it. The built-in symbols therefore carry the complex
conjugates of the textbook phasors:

    ====  ==================  =====================
    sym   preparation phase   projection phase (dθ=π)
    ====  ==================  =====================
    0     -D t                +D t
    1     0                   0
    2     +D t                -D t
    S+    -1 - b sin(D t)     -1 + b sin(D t)
    S-    -1 + b sin(D t)     -1 - b sin(D t)
    ====  ==================  =====================

which places |0> at -D, |2> at +D and gives S+ = (J1, J0, -J1) on (-D, 0, +D).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence, Union

import numpy as np

from .errors import ConfigurationError, GridMismatchError, UnsupportedSymbolError
from .optics import (
    CavityFilter,
    DriveElectronics,
    PhaseProfile,
    SourceModel,
    apply_filter,
    apply_phase,
    bandlimit_drive,
    bessel_coeff,
    carrier_suppression_index,
    emit_photon,
    serrodyne_profile,
    sinusoid_profile,
)
from .wavepacket import DEFAULT_GRID, ComplexEnvelope, TimeGrid, inner_product, to_spectrum

__all__ = [
    "Flat",
    "Serrodyne",
    "Sinusoid",
    "Arbitrary",
    "Symbol",
    "custom_symbol",
    "ZERO",
    "ONE",
    "TWO",
    "SPLUS",
    "SMINUS",
    "BUILTIN_SYMBOLS",
    "symbol_by_label",
    "ChannelConfig",
    "recommended_filter",
    "StateVector3",
    "render_drive",
    "preparation_profile",
    "projection_profile",
    "prepare",
    "demodulate",
    "project",
    "detection_probability",
    "overlap_probability",
    "state_vector",
    "storage_loop_propagate",
]

TWO_PI = 2 * math.pi
MAX_DELTA_SNAP = 1e-6


@dataclass(frozen=True)
class Flat:
    """Undriven EOM (constant phase)."""

    offset: float = 0.0


@dataclass(frozen=True)
class Serrodyne:
    """Sawtooth drive shifting the photon by ``sign * order * delta``.

    ``wrapped=False`` renders the unwrapped linear ramp instead of the
    modulo-2*pi sawtooth; the two are physically identical.
    """

    sign: int
    order: int = 1
    offset: float = 0.0
    wrapped: bool = True


@dataclass(frozen=True)
class Sinusoid:
    """Drive ``offset + beta*sin(delta*t + theta)``; ``beta=None`` uses the config's index.

    On the receiver the drive phase is further advanced by the config's
    ``drive_phase_offset``.
    """

    theta: float = 0.0
    offset: float = 0.0
    beta: float | None = None


@dataclass(frozen=True, eq=False)
class Arbitrary:
    """Pre-sampled phase profile, used verbatim on both ends."""

    profile: PhaseProfile


Drive = Union[Flat, Serrodyne, Sinusoid, Arbitrary]


@dataclass(frozen=True, eq=False)
class Symbol:
    label: str
    preparation: Drive
    projection: Drive

    def __repr__(self):
        return f"Symbol({self.label!r})"


def custom_symbol(label: str, preparation: PhaseProfile, projection: PhaseProfile) -> Symbol:
    return Symbol(label, Arbitrary(preparation), Arbitrary(projection))


ZERO = Symbol("0", Serrodyne(-1), Serrodyne(+1))
ONE = Symbol("1", Flat(), Flat())
TWO = Symbol("2", Serrodyne(+1), Serrodyne(-1))
SPLUS = Symbol("S+", Sinusoid(theta=math.pi, offset=-1.0), Sinusoid(theta=math.pi, offset=-1.0))
SMINUS = Symbol("S-", Sinusoid(theta=0.0, offset=-1.0), Sinusoid(theta=0.0, offset=-1.0))

BUILTIN_SYMBOLS: tuple[Symbol, ...] = (ZERO, ONE, TWO, SPLUS, SMINUS)
COMPUTATIONAL_BASIS = (ZERO, ONE, TWO)
SUPERPOSITION_BASIS = (SPLUS, SMINUS)


def symbol_by_label(label: str) -> Symbol:
    aliases = {"|0>": "0", "|1>": "1", "|2>": "2", "s+": "S+", "s-": "S-", "splus": "S+", "sminus": "S-"}
    key = aliases.get(label.strip().lower(), label.strip())
    for sym in BUILTIN_SYMBOLS:
        if sym.label == key:
            return sym
    raise UnsupportedSymbolError(f"unknown symbol {label!r}; expected one of 0, 1, 2, S+, S-")


@dataclass(frozen=True)
class ChannelConfig:
    """Everything needed for one end-to-end run.

    ``delta`` is snapped to the nearest frequency bin of ``grid``; the
    requested value and the relative snap are kept for the run log.
    ``emission_jitter`` spreads the photon emission time uniformly over
    ``[0, emission_jitter]`` relative to the drives, evaluated with
    ``jitter_samples`` evenly spaced delays.
    """

    source: SourceModel = SourceModel()
    delta: float = TWO_PI * 30e6
    beta: float | None = None
    detection_filter: CavityFilter = CavityFilter()
    tx_electronics: DriveElectronics = DriveElectronics()
    rx_electronics: DriveElectronics = DriveElectronics()
    grid: TimeGrid = DEFAULT_GRID
    drive_phase_offset: float = math.pi
    emission_jitter: float = 0.0
    jitter_samples: int = 16
    requested_delta: float = field(init=False, repr=False, compare=False)
    delta_snap_error: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.beta is None:
            object.__setattr__(self, "beta", carrier_suppression_index())
        if self.beta < 0:
            raise ConfigurationError(f"beta must be >= 0, got {self.beta!r}")
        if not self.delta > 0:
            raise ConfigurationError(f"delta must be > 0, got {self.delta!r}")
        res = self.grid.angular_resolution
        snapped = round(self.delta / res) * res
        snap = abs(snapped - self.delta) / self.delta
        if snap > MAX_DELTA_SNAP:
            raise ConfigurationError(
                f"delta = {self.delta / TWO_PI:.9g} Hz is not bin-aligned on a grid of span "
                f"{self.grid.span:.9g} s (relative snap {snap:.3g} > {MAX_DELTA_SNAP:g}); "
                "choose a span holding an integer number of modulation periods"
            )
        object.__setattr__(self, "requested_delta", self.delta)
        object.__setattr__(self, "delta_snap_error", snap)
        object.__setattr__(self, "delta", snapped)
        if not self.detection_filter.linewidth_fwhm < self.delta:
            raise ConfigurationError("detection filter linewidth must be narrower than delta")
        if self.emission_jitter < 0:
            raise ConfigurationError("emission_jitter must be >= 0")
        if int(self.jitter_samples) != self.jitter_samples or self.jitter_samples < 1:
            raise ConfigurationError("jitter_samples must be a positive integer")
        self.grid.check_channel(
            self.delta, self.source.linewidth_hz, self.source.ring_down_time + self.emission_jitter
        )

    def with_(self, **changes) -> "ChannelConfig":
        return replace(self, **changes)

    @property
    def filter_to_photon_ratio(self) -> float:
        """Detection filter FWHM in units of the photon linewidth (the design rule targets ~1.5)."""
        return self.detection_filter.linewidth_fwhm / self.source.linewidth

    def emission_times(self) -> np.ndarray:
        if self.emission_jitter == 0:
            return np.array([self.grid.t0])
        k = np.arange(self.jitter_samples)
        return self.grid.t0 + (k + 0.5) / self.jitter_samples * self.emission_jitter

    def absolute_scale(self) -> float:
        """T0**2 * tau_filter, the dimensioned prefactor of the overlap estimate (diagnostic only)."""
        f = self.detection_filter
        return f.peak_power_transmission**2 * f.tau_filter


def recommended_filter(source: SourceModel, ratio: float = 1.5, **kwargs) -> CavityFilter:
    """Detection cavity sized at ``ratio`` photon linewidths."""
    return CavityFilter(linewidth_fwhm=ratio * source.linewidth, **kwargs)


@dataclass(frozen=True)
class StateVector3:
    """Amplitudes on the bins (-delta, 0, +delta)."""

    c_minus: complex
    c_zero: complex
    c_plus: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.c_minus, self.c_zero, self.c_plus], dtype=complex)

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.as_array()) ** 2))

    def inner(self, other: "StateVector3") -> complex:
        return complex(np.vdot(self.as_array(), other.as_array()))


def render_drive(drive: Drive, cfg: ChannelConfig, receiver: bool = False) -> PhaseProfile:
    grid = cfg.grid
    if isinstance(drive, Flat):
        return PhaseProfile(grid, np.full(grid.n_samples, drive.offset))
    if isinstance(drive, Serrodyne):
        shift = drive.order * cfg.delta
        if drive.wrapped:
            p = serrodyne_profile(shift, drive.sign, grid)
        else:
            p = PhaseProfile(grid, drive.sign * shift * grid.times)
        return p.with_offset(drive.offset) if drive.offset else p
    if isinstance(drive, Sinusoid):
        beta = cfg.beta if drive.beta is None else drive.beta
        theta = drive.theta + (cfg.drive_phase_offset if receiver else 0.0)
        return sinusoid_profile(beta, theta, cfg.delta, drive.offset, grid)
    if isinstance(drive, Arbitrary):
        if drive.profile.grid != grid:
            raise GridMismatchError("custom symbol profile is not on the configured grid")
        return drive.profile
    raise UnsupportedSymbolError(f"unknown drive type {type(drive).__name__}")


def preparation_profile(sym: Symbol, cfg: ChannelConfig) -> PhaseProfile:
    """Phase actually written by the transmitter EOM, after its drive electronics."""
    return bandlimit_drive(render_drive(sym.preparation, cfg), cfg.tx_electronics)


def projection_profile(sym: Symbol, cfg: ChannelConfig) -> PhaseProfile:
    return bandlimit_drive(render_drive(sym.projection, cfg, receiver=True), cfg.rx_electronics)


def prepare(sym: Symbol, cfg: ChannelConfig, start: float | None = None) -> ComplexEnvelope:
    photon = emit_photon(cfg.source, cfg.grid, start)
    return apply_phase(photon, preparation_profile(sym, cfg))


def demodulate(env: ComplexEnvelope, sym: Symbol, cfg: ChannelConfig) -> ComplexEnvelope:
    if env.grid != cfg.grid:
        raise GridMismatchError("envelope is not on the configured grid")
    return apply_phase(env, projection_profile(sym, cfg))


def project(env: ComplexEnvelope, sym: Symbol, cfg: ChannelConfig) -> float:
    """Probability that ``env`` passes the receiver set to ``sym``: demodulate, filter, take the norm."""
    spec = apply_filter(to_spectrum(demodulate(env, sym, cfg)), cfg.detection_filter)
    return spec.norm_squared()


def detection_probability(k: Symbol, j: Symbol, cfg: ChannelConfig) -> float:
    """Absolute probability of detection for preparation ``k`` and projection ``j``, averaged over emission jitter."""
    proj = projection_profile(j, cfg)
    prep = preparation_profile(k, cfg)
    total = 0.0
    times = cfg.emission_times()
    for start in times:
        env = apply_phase(apply_phase(emit_photon(cfg.source, cfg.grid, start), prep), proj)
        total += apply_filter(to_spectrum(env), cfg.detection_filter).norm_squared()
    return total / len(times)


def overlap_probability(k: Symbol, j: Symbol, cfg: ChannelConfig) -> float:
    """Temporal-overlap estimate of the (k, j) detection rate, relative to (1, 1).

    Computes |<photon * exp(-i proj_j) | photon * exp(i prep_k)>|**2; the
    detection cavity is not propagated.
    """
    prep = preparation_profile(k, cfg)
    proj = projection_profile(j, cfg)
    total = 0.0
    times = cfg.emission_times()
    for start in times:
        photon = emit_photon(cfg.source, cfg.grid, start)
        a = apply_phase(photon, -proj)
        b = apply_phase(photon, prep)
        total += abs(inner_product(a, b)) ** 2
    # (1, 1) overlap is |<photon|photon>|^2 = 1 for every emission time
    return total / len(times)


def state_vector(sym: Symbol, cfg: ChannelConfig) -> StateVector3:
    """Closed-form three-bin state of a prepared symbol, up to a global phase.

    Sinusoidal drives are truncated at first order: only J_-1, J_0, J_1 are
    kept, so the norm falls short of one by the weight of |n| >= 2 sidebands.
    Drive electronics are taken as ideal.
    """
    drive = sym.preparation
    if isinstance(drive, Flat):
        return StateVector3(0j, 1 + 0j, 0j)
    if isinstance(drive, Serrodyne):
        shift = drive.sign * drive.order
        if abs(shift) > 1:
            raise UnsupportedSymbolError(f"symbol {sym.label!r} shifts outside the three modelled bins")
        amps = [0j, 0j, 0j]
        amps[shift + 1] = 1 + 0j
        return StateVector3(*amps)
    if isinstance(drive, Sinusoid):
        beta = cfg.beta if drive.beta is None else drive.beta
        th = drive.theta
        return StateVector3(
            bessel_coeff(-1, beta) * np.exp(-1j * th),
            complex(bessel_coeff(0, beta)),
            bessel_coeff(1, beta) * np.exp(1j * th),
        )
    raise UnsupportedSymbolError(f"symbol {sym.label!r} has no closed-form three-bin state")


def storage_loop_propagate(env: ComplexEnvelope, patterns: Sequence[PhaseProfile]) -> ComplexEnvelope:
    """Round trips through a loop EOM.

    ``patterns[j]`` is the target cumulative phase after trip ``j + 1``; each
    trip writes only the increment over the previous target.
    """
    previous = None
    out = env
    for target in patterns:
        step = target if previous is None else target - previous
        out = apply_phase(out, step)
        previous = target
    return out
