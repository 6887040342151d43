"""Physical elements of the link: photon source, cavities, EOM phase profiles and drive electronics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import optimize

from .errors import ConfigurationError, GridMismatchError
from .wavepacket import ComplexEnvelope, Spectrum, TimeGrid

__all__ = [
    "SourceModel",
    "CavityFilter",
    "PhaseProfile",
    "DriveElectronics",
    "emit_photon",
    "filter_transmission",
    "apply_filter",
    "apply_phase",
    "serrodyne_profile",
    "sinusoid_profile",
    "bandlimit_drive",
    "pole_response",
    "bessel_coeff",
    "carrier_suppression_index",
]

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class SourceModel:
    """Narrowband heralded photon: a single cavity mode with intensity decay time ``ring_down_time``."""

    ring_down_time: float = 21e-9
    center_detuning: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.ring_down_time) and self.ring_down_time > 0):
            raise ConfigurationError(f"ring_down_time must be > 0, got {self.ring_down_time!r}")

    @property
    def linewidth_hz(self) -> float:
        """Spectral FWHM of the intensity, 1/(2*pi*ring_down_time)."""
        return 1.0 / (TWO_PI * self.ring_down_time)

    @property
    def linewidth(self) -> float:
        """FWHM in rad/s (equal to the intensity decay rate)."""
        return 1.0 / self.ring_down_time


@dataclass(frozen=True)
class CavityFilter:
    """Single Lorentzian resonance. ``fsr`` is only used to validate that the resonance is isolated."""

    linewidth_fwhm: float = TWO_PI * 7.0e6
    fsr: float = TWO_PI * 1.5e9
    peak_power_transmission: float = 1.0
    center_detuning: float = 0.0

    def __post_init__(self):
        if not (0 < self.linewidth_fwhm < self.fsr):
            raise ConfigurationError(
                f"cavity needs 0 < linewidth_fwhm < fsr, got {self.linewidth_fwhm!r}, {self.fsr!r}"
            )
        if not (0 <= self.peak_power_transmission <= 1):
            raise ConfigurationError(
                f"peak_power_transmission must lie in [0, 1], got {self.peak_power_transmission!r}"
            )

    @property
    def linewidth_hz(self) -> float:
        return self.linewidth_fwhm / TWO_PI

    @property
    def tau_filter(self) -> float:
        """Amplitude correlation time 1/(pi * FWHM in Hz)."""
        return 2.0 / self.linewidth_fwhm


@dataclass(frozen=True, eq=False)
class PhaseProfile:
    """Optical phase (radians) imprinted by an EOM at each grid time."""

    grid: TimeGrid
    phase: np.ndarray = field(repr=False)

    def __post_init__(self):
        phase = np.asarray(self.phase, dtype=float)
        if phase.shape != (self.grid.n_samples,):
            raise GridMismatchError(
                f"expected {self.grid.n_samples} phase samples, got shape {phase.shape}"
            )
        object.__setattr__(self, "phase", phase)

    def __add__(self, other: "PhaseProfile") -> "PhaseProfile":
        if other.grid != self.grid:
            raise GridMismatchError("cannot add phase profiles on different grids")
        return PhaseProfile(self.grid, self.phase + other.phase)

    def __neg__(self) -> "PhaseProfile":
        return PhaseProfile(self.grid, -self.phase)

    def __sub__(self, other: "PhaseProfile") -> "PhaseProfile":
        return self + (-other)

    def with_offset(self, offset: float) -> "PhaseProfile":
        return PhaseProfile(self.grid, self.phase + offset)

    @classmethod
    def zeros(cls, grid: TimeGrid) -> "PhaseProfile":
        return cls(grid, np.zeros(grid.n_samples))


@dataclass(frozen=True)
class DriveElectronics:
    """Low-pass response of an EOM driver; ``math.inf`` bandwidth means an ideal driver."""

    bandwidth_hz: float = math.inf
    filter_order: int = 1

    def __post_init__(self):
        if not self.bandwidth_hz > 0:
            raise ConfigurationError(f"bandwidth_hz must be > 0, got {self.bandwidth_hz!r}")
        if int(self.filter_order) != self.filter_order or self.filter_order < 1:
            raise ConfigurationError(f"filter_order must be a positive integer, got {self.filter_order!r}")

    @property
    def unlimited(self) -> bool:
        return math.isinf(self.bandwidth_hz)


IDEAL_ELECTRONICS = DriveElectronics()


def emit_photon(src: SourceModel, grid: TimeGrid, start: float | None = None) -> ComplexEnvelope:
    """Normalized one-sided exponential wavepacket emitted at ``start`` (default: grid origin).

    The amplitude decays as exp(-(t - start)/(2*ring_down_time)), which gives a
    Lorentzian power spectrum of FWHM 1/(2*pi*ring_down_time). A start later
    than the grid origin is applied as an exact spectral delay, so the
    spectrum is identical for every emission time.
    """
    if start is None:
        start = grid.t0
    delay = start - grid.t0
    remaining = grid.span - delay
    if delay < 0 or remaining < 8 * src.ring_down_time:
        raise ConfigurationError(
            f"emission at {start:.4g} s leaves {remaining:.4g} s of grid; need 0 <= delay and "
            f">= 8 ring-down times ({8 * src.ring_down_time:.4g} s)"
        )
    rel = grid.dt * np.arange(grid.n_samples)
    samples = np.exp(-rel / (2 * src.ring_down_time)) * np.exp(1j * src.center_detuning * rel)
    if delay:
        w = grid.angular_frequencies
        samples = np.fft.ifft(np.fft.fft(samples) * np.exp(-1j * w * delay))
    return ComplexEnvelope(grid, samples).normalized()


def filter_transmission(f: CavityFilter, detuning):
    """Complex amplitude response of the cavity at angular ``detuning`` (scalar or array)."""
    half = 0.5 * f.linewidth_fwhm
    return math.sqrt(f.peak_power_transmission) * half / (half + 1j * (np.asarray(detuning) - f.center_detuning))


def apply_filter(spec: Spectrum, f: CavityFilter) -> Spectrum:
    return Spectrum(spec.grid, spec.samples * filter_transmission(f, spec.frequencies))


def apply_phase(env: ComplexEnvelope, p: PhaseProfile) -> ComplexEnvelope:
    if env.grid != p.grid:
        raise GridMismatchError("envelope and phase profile are on different grids")
    return ComplexEnvelope(env.grid, env.samples * np.exp(1j * p.phase))


def serrodyne_profile(delta: float, sign: int, grid: TimeGrid) -> PhaseProfile:
    """Sawtooth phase ``(sign*delta*t) mod 2*pi``; equivalent to a shift of ``sign*delta``."""
    if sign not in (1, -1):
        raise ConfigurationError(f"sign must be +1 or -1, got {sign!r}")
    if abs(delta) >= grid.nyquist:
        raise ConfigurationError(
            f"serrodyne shift {delta:.4g} rad/s exceeds grid Nyquist {grid.nyquist:.4g} rad/s"
        )
    return PhaseProfile(grid, np.mod(sign * delta * grid.times, TWO_PI))


def sinusoid_profile(beta: float, theta: float, delta: float, offset: float, grid: TimeGrid) -> PhaseProfile:
    """Phase ``offset + beta*sin(delta*t + theta)``."""
    if beta < 0:
        raise ConfigurationError(f"modulation index must be >= 0, got {beta!r}")
    return PhaseProfile(grid, offset + beta * np.sin(delta * grid.times + theta))


def pole_response(e: DriveElectronics, freq_hz):
    """Complex gain of the driver at ``freq_hz`` (same exp(-i w t) convention as the transforms)."""
    freq_hz = np.asarray(freq_hz, dtype=float)
    if e.unlimited:
        return np.ones_like(freq_hz, dtype=complex)
    return (1.0 + 1j * freq_hz / e.bandwidth_hz) ** (-e.filter_order)


def bandlimit_drive(p: PhaseProfile, e: DriveElectronics) -> PhaseProfile:
    """Low-pass the drive waveform in steady state (the waveform repeats with the grid period)."""
    if e.unlimited:
        return p
    grid = p.grid
    spectrum = np.fft.rfft(p.phase)
    freqs = np.fft.rfftfreq(grid.n_samples, grid.dt)
    return PhaseProfile(grid, np.fft.irfft(spectrum * pole_response(e, freqs), n=grid.n_samples))


def _bessel_nodes(n: int, beta_max: float) -> int:
    # Trapezoid on a full period is exact up to aliased orders n +- 2K, whose
    # magnitude is negligible once 2K exceeds |n| + beta by a safe margin.
    return max(32, int(abs(n) + beta_max) + 48)


def bessel_coeff(n: int, beta):
    """Bessel function of the first kind J_n(beta) by quadrature.

    Evaluates (1/pi) * integral_0^pi cos(n*tau - beta*sin(tau)) dtau with the
    trapezoid rule. The integrand extends to a smooth 2*pi-periodic function,
    so the rule converges geometrically; the error is far below 1e-10 for the
    node counts chosen here. Accepts scalar or array ``beta``.
    """
    n = int(n)
    if n < 0:
        return (-1) ** (-n) * bessel_coeff(-n, beta)
    beta_arr = np.asarray(beta, dtype=float)
    k = _bessel_nodes(n, float(np.max(np.abs(beta_arr))) if beta_arr.size else 0.0)
    tau = np.linspace(0.0, math.pi, k + 1)
    w = np.full(k + 1, 1.0 / k)
    w[0] = w[-1] = 0.5 / k
    vals = np.cos(n * tau - np.multiply.outer(beta_arr, np.sin(tau))) @ w
    if np.ndim(beta) == 0:
        return float(vals)
    return vals


@lru_cache(maxsize=None)
def carrier_suppression_index() -> float:
    """Per-drive modulation index beta* with J_0(2*beta*) = 0.

    Two drives of index beta* adding in phase give the first carrier null, so
    one symbol's modulation and another's demodulation extinguish the carrier.
    """
    return optimize.bisect(lambda b: bessel_coeff(0, 2 * b), 1.0, 1.5, xtol=1e-12, rtol=1e-15)
