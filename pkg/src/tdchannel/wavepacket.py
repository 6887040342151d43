"""Sampled single-photon wavepackets in time and frequency.

Transform convention
--------------------
The spectrum of an envelope ``f(t)`` is

    F(w) = (2*pi)**-0.5 * integral f(t) exp(-1j*w*t) dt,

discretised as a unitary DFT: ``sum |F_m|**2 == sum |f_n|**2 * dt``. With this
kernel a phase factor ``exp(+1j*D*t)`` moves spectral weight to ``+D``. All
frequencies are angular detunings (rad/s) from the photon carrier, so bin 0
is the carrier and the optical frequency itself never enters the numerics.
Spectra are stored in numpy FFT order (bin m at index ``m % n``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, GridMismatchError

__all__ = [
    "TimeGrid",
    "ComplexEnvelope",
    "Spectrum",
    "DEFAULT_GRID",
    "to_spectrum",
    "to_time",
    "inner_product",
    "spectral_inner_product",
]


@dataclass(frozen=True)
class TimeGrid:
    """Uniform sampling grid ``t_n = t0 + n*dt`` for ``n = 0 .. n_samples-1``.

    The grid is treated as periodic by every transform, so drive waveforms
    should complete an integer number of cycles over :attr:`span`.
    """

    n_samples: int = 2**16
    dt: float = 1000e-9 / 2**16
    t0: float = 0.0

    def __post_init__(self):
        if int(self.n_samples) != self.n_samples or self.n_samples < 2:
            raise ConfigurationError(f"n_samples must be an integer >= 2, got {self.n_samples!r}")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ConfigurationError(f"dt must be a positive finite time, got {self.dt!r}")
        if not math.isfinite(self.t0):
            raise ConfigurationError(f"t0 must be finite, got {self.t0!r}")

    @classmethod
    def from_span(cls, n_samples: int, span: float, t0: float = 0.0) -> "TimeGrid":
        if not span > 0:
            raise ConfigurationError(f"grid span must be positive, got {span!r}")
        return cls(n_samples=int(n_samples), dt=span / n_samples, t0=t0)

    @property
    def span(self) -> float:
        return self.n_samples * self.dt

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n_samples)

    @property
    def angular_resolution(self) -> float:
        """Spacing between adjacent frequency bins in rad/s."""
        return 2 * math.pi / self.span

    @property
    def frequency_resolution(self) -> float:
        return 1.0 / self.span

    @property
    def nyquist(self) -> float:
        """Nyquist angular frequency, pi/dt."""
        return math.pi / self.dt

    @property
    def angular_frequencies(self) -> np.ndarray:
        """Angular detuning of every bin, in FFT order."""
        return 2 * math.pi * np.fft.fftfreq(self.n_samples, self.dt)

    def bin_index(self, detuning: float) -> int:
        """Array index of the bin nearest to ``detuning`` (rad/s)."""
        m = int(round(detuning / self.angular_resolution))
        return m % self.n_samples

    def check_channel(self, delta: float, linewidth_hz: float, lifetime: float) -> None:
        """Raise if the grid cannot resolve a channel run.

        Needs Nyquist above ``2*(2*delta + 3*linewidth)`` in angular units
        (all modelled sidebands) and a span of at least eight intensity
        lifetimes of the photon.
        """
        needed = 2 * (2 * abs(delta) + 3 * 2 * math.pi * linewidth_hz)
        if self.nyquist <= needed:
            raise ConfigurationError(
                f"grid Nyquist {self.nyquist:.4g} rad/s does not exceed the required "
                f"{needed:.4g} rad/s; reduce dt"
            )
        if self.span < 8 * lifetime:
            raise ConfigurationError(
                f"grid span {self.span:.4g} s is shorter than 8 photon lifetimes "
                f"({8 * lifetime:.4g} s); increase n_samples*dt"
            )


DEFAULT_GRID = TimeGrid()


def _same_grid(a: TimeGrid, b: TimeGrid) -> None:
    if a != b:
        raise GridMismatchError(f"grid mismatch: {a} vs {b}")


@dataclass(frozen=True, eq=False)
class ComplexEnvelope:
    """Complex field amplitude ``f(t_n)`` of a photon on a :class:`TimeGrid`."""

    grid: TimeGrid
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=complex)
        if samples.shape != (self.grid.n_samples,):
            raise GridMismatchError(
                f"expected {self.grid.n_samples} samples, got shape {samples.shape}"
            )
        object.__setattr__(self, "samples", samples)

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2) * self.grid.dt)

    def normalized(self) -> "ComplexEnvelope":
        n2 = self.norm_squared()
        if not n2 > 0:
            raise ConfigurationError("cannot normalize an envelope with zero norm")
        return ComplexEnvelope(self.grid, self.samples / math.sqrt(n2))

    def intensity(self) -> np.ndarray:
        return np.abs(self.samples) ** 2


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Unitary spectrum of an envelope; ``samples[m % n]`` is the amplitude of bin m."""

    grid: TimeGrid
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=complex)
        if samples.shape != (self.grid.n_samples,):
            raise GridMismatchError(
                f"expected {self.grid.n_samples} bins, got shape {samples.shape}"
            )
        object.__setattr__(self, "samples", samples)

    @property
    def frequencies(self) -> np.ndarray:
        return self.grid.angular_frequencies

    def power(self) -> np.ndarray:
        """Probability per bin; sums to the envelope's squared norm."""
        return np.abs(self.samples) ** 2

    def norm_squared(self) -> float:
        return float(np.sum(self.power()))

    def at(self, detuning: float) -> complex:
        """Amplitude of the bin nearest ``detuning`` (rad/s)."""
        return complex(self.samples[self.grid.bin_index(detuning)])

    def centered(self) -> tuple[np.ndarray, np.ndarray]:
        """(angular detunings, amplitudes) sorted from most negative to most positive."""
        return np.fft.fftshift(self.frequencies), np.fft.fftshift(self.samples)

    def shifted(self, bins: int) -> "Spectrum":
        """Spectrum moved up by an integer number of bins (circularly)."""
        return Spectrum(self.grid, np.roll(self.samples, bins))


def _carrier_phase(grid: TimeGrid) -> np.ndarray | None:
    # DFT sums run over n, physical time is t0 + n*dt
    if grid.t0 == 0.0:
        return None
    return np.exp(-1j * grid.angular_frequencies * grid.t0)


def to_spectrum(env: ComplexEnvelope) -> Spectrum:
    """Unitary Fourier transform of an envelope (see module docstring)."""
    grid = env.grid
    out = np.fft.fft(env.samples, norm="ortho") * math.sqrt(grid.dt)
    phase = _carrier_phase(grid)
    if phase is not None:
        out = out * phase
    return Spectrum(grid, out)


def to_time(spec: Spectrum) -> ComplexEnvelope:
    """Inverse of :func:`to_spectrum`."""
    grid = spec.grid
    samples = spec.samples
    phase = _carrier_phase(grid)
    if phase is not None:
        samples = samples * np.conj(phase)
    return ComplexEnvelope(grid, np.fft.ifft(samples, norm="ortho") / math.sqrt(grid.dt))


def inner_product(a: ComplexEnvelope, b: ComplexEnvelope) -> complex:
    """Discrete ``integral conj(a(t)) * b(t) dt``."""
    _same_grid(a.grid, b.grid)
    return complex(np.vdot(a.samples, b.samples) * a.grid.dt)


def spectral_inner_product(a: Spectrum, b: Spectrum) -> complex:
    """Frequency-domain counterpart of :func:`inner_product` (equal by Parseval)."""
    _same_grid(a.grid, b.grid)
    return complex(np.vdot(a.samples, b.samples))
