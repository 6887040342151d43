import math

import numpy as np
import pytest
from scipy import integrate, special

from tdchannel.channel import ChannelConfig, recommended_filter
from tdchannel.optics import SourceModel
from tdchannel.wavepacket import TimeGrid

TWO_PI = 2 * math.pi


@pytest.fixture(scope="session")
def cfg():
    return ChannelConfig()


@pytest.fixture(scope="session")
def resolved_cfg():
    """Bins far apart compared to the photon line: 1 us photon, filter at 1.5 photon linewidths."""
    src = SourceModel(ring_down_time=1e-6)
    grid = TimeGrid.from_span(2**17, 8000e-9)
    return ChannelConfig(source=src, grid=grid, detection_filter=recommended_filter(src, 1.5))


def sideband_coeffs(shift: int, amplitude: float, phase: float, nmax: int = 20) -> dict:
    """exp(i*(shift*x + amplitude*sin(x + phase))) = sum_n c_n exp(i*n*x), via scipy's J_n."""
    return {n + shift: special.jv(n, amplitude) * np.exp(1j * n * phase) for n in range(-nmax, nmax + 1)}


def lorentzian_line_detection(coeffs: dict, ring_down: float, filter_fwhm: float, delta: float) -> float:
    """Continuous-frequency detection probability of a one-sided exponential photon
    carrying the sidebands ``coeffs`` (offsets in units of ``delta``) behind a
    single-pole cavity of FWHM ``filter_fwhm``; evaluated by adaptive quadrature."""
    gam = 1.0 / ring_down
    half = filter_fwhm / 2

    def amp(w):
        return sum(c * math.sqrt(gam / TWO_PI) / (gam / 2 + 1j * (w - n * delta)) for n, c in coeffs.items())

    def integrand(w):
        return abs(amp(w)) ** 2 * half**2 / (half**2 + w**2)

    lines = sorted(n * delta for n in coeffs)
    lim = max(abs(lines[0]), abs(lines[-1])) + 400 * max(gam, filter_fwhm)
    pts = [x for x in lines if -lim < x < lim]
    val, _ = integrate.quad(integrand, -lim, lim, points=pts, limit=2000, epsabs=1e-13, epsrel=1e-11)
    return val


def geometric_photon_spectrum(grid, tau):
    """Closed-form DFT of the sampled, normalized one-sided exponential starting at the origin."""
    n = grid.n_samples
    r = math.exp(-grid.dt / (2 * tau))
    m = np.arange(n)
    amp = (1 - r**n) / (1 - r * np.exp(-2j * math.pi * m / n)) * math.sqrt(grid.dt / n)
    norm = math.sqrt(grid.dt * (1 - r ** (2 * n)) / (1 - r**2))
    return amp / norm
