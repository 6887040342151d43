import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from tdchannel.errors import ConfigurationError, GridMismatchError
from tdchannel.wavepacket import (
    DEFAULT_GRID,
    ComplexEnvelope,
    Spectrum,
    TimeGrid,
    inner_product,
    spectral_inner_product,
    to_spectrum,
    to_time,
)

SMALL = TimeGrid(n_samples=256, dt=1e-9)
finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite)


TINY = TimeGrid(n_samples=32, dt=1e-9)


def envelopes(grid=TINY):
    return arrays(np.complex128, grid.n_samples, elements=cplx).map(lambda a: ComplexEnvelope(grid, a))


def test_grid_rejects_bad_parameters():
    with pytest.raises(ConfigurationError):
        TimeGrid(n_samples=1, dt=1e-9)
    with pytest.raises(ConfigurationError):
        TimeGrid(n_samples=16, dt=0.0)
    with pytest.raises(ConfigurationError):
        TimeGrid.from_span(16, -1.0)


def test_default_grid_resolution_and_nyquist():
    g = DEFAULT_GRID
    assert g.n_samples == 2**16
    assert g.span == pytest.approx(1000e-9, rel=1e-15)
    assert g.frequency_resolution == pytest.approx(1e6, rel=1e-12)
    assert g.nyquist == pytest.approx(math.pi / g.dt)
    g.check_channel(2 * math.pi * 30e6, 7.58e6, 21e-9)


def test_check_channel_flags_nyquist_and_span():
    coarse = TimeGrid.from_span(64, 1000e-9)
    with pytest.raises(ConfigurationError, match="Nyquist"):
        coarse.check_channel(2 * math.pi * 30e6, 7.58e6, 21e-9)
    short = TimeGrid.from_span(2**12, 100e-9)
    with pytest.raises(ConfigurationError, match="span"):
        short.check_channel(2 * math.pi * 30e6, 7.58e6, 21e-9)


def test_dc_envelope_lands_in_bin_zero():
    g = SMALL
    env = ComplexEnvelope(g, np.full(g.n_samples, 1 / math.sqrt(g.span)))
    spec = to_spectrum(env)
    assert abs(spec.samples[0]) ** 2 == pytest.approx(env.norm_squared(), rel=1e-12)
    assert np.sum(spec.power()[1:]) < 1e-20


def test_shift_theorem_positive_phase_moves_up():
    g = SMALL
    rng = np.random.default_rng(1)
    env = ComplexEnvelope(g, rng.normal(size=g.n_samples) + 1j * rng.normal(size=g.n_samples))
    k = 5
    d = k * g.angular_resolution
    shifted = ComplexEnvelope(g, env.samples * np.exp(1j * d * g.times))
    np.testing.assert_allclose(to_spectrum(shifted).samples, np.roll(to_spectrum(env).samples, k), atol=1e-12)


def test_nonzero_t0_keeps_shift_theorem_and_round_trip():
    g = TimeGrid(n_samples=128, dt=2e-9, t0=-37e-9)
    rng = np.random.default_rng(2)
    env = ComplexEnvelope(g, rng.normal(size=g.n_samples) + 0j)
    d = 3 * g.angular_resolution
    shifted = ComplexEnvelope(g, env.samples * np.exp(1j * d * g.times))
    # bins that wrap across Nyquist pick up the t0 phase of the opposite edge
    inner = np.abs(g.angular_frequencies) < g.nyquist - 4 * g.angular_resolution
    got = to_spectrum(shifted).samples[inner]
    want = np.roll(to_spectrum(env).samples, 3)[inner]
    np.testing.assert_allclose(got, want, atol=1e-12)
    np.testing.assert_allclose(to_time(to_spectrum(env)).samples, env.samples, atol=1e-12)


def test_one_sided_exponential_matches_geometric_series_and_lorentzian():
    g = DEFAULT_GRID
    tau = 21e-9
    r = math.exp(-g.dt / (2 * tau))
    env = ComplexEnvelope(g, r ** np.arange(g.n_samples))
    spec = to_spectrum(env)
    # exact DFT of a sampled geometric sequence
    m = np.arange(g.n_samples)
    closed = (1 - r**g.n_samples) / (1 - r * np.exp(-2j * math.pi * m / g.n_samples))
    closed = closed * math.sqrt(g.dt / g.n_samples)
    np.testing.assert_allclose(spec.samples, closed, rtol=1e-9, atol=1e-18)
    # continuous Lorentzian pair near the line
    w = g.angular_frequencies
    lor = 1 / (1 / (2 * tau) + 1j * w) / math.sqrt(2 * math.pi)
    scale = abs(spec.samples[0]) / abs(lor[0])
    near = np.abs(w) < 2 * math.pi * 100e6
    np.testing.assert_allclose(np.abs(spec.samples[near]), scale * np.abs(lor[near]), rtol=1e-3)
    # half-maximum search on the power spectrum
    f, amp = spec.centered()
    p = np.abs(amp) ** 2
    fwhm_hz = _fwhm(f / (2 * math.pi), p)
    assert fwhm_hz == pytest.approx(1 / (2 * math.pi * tau), abs=g.frequency_resolution)


def _fwhm(freqs, power):
    half = power.max() / 2
    above = np.nonzero(power >= half)[0]
    lo, hi = above[0], above[-1]
    f_lo = np.interp(half, [power[lo - 1], power[lo]], [freqs[lo - 1], freqs[lo]])
    f_hi = np.interp(half, [power[hi + 1], power[hi]], [freqs[hi + 1], freqs[hi]])
    return f_hi - f_lo


def test_single_bin_spectrum_is_pure_tone():
    g = SMALL
    m = 7
    s = np.zeros(g.n_samples, complex)
    s[m] = 1.0
    env = to_time(Spectrum(g, s))
    tone = np.exp(2j * math.pi * m * g.times / g.span) / math.sqrt(g.span)
    np.testing.assert_allclose(env.samples, tone, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(envelopes())
def test_round_trip_and_parseval(env):
    back = to_time(to_spectrum(env))
    np.testing.assert_allclose(back.samples, env.samples, atol=1e-10 * max(1.0, np.abs(env.samples).max()))
    n2 = env.norm_squared()
    assert to_spectrum(env).norm_squared() == pytest.approx(n2, rel=1e-10, abs=1e-300)
    assert back.norm_squared() == pytest.approx(n2, rel=1e-10, abs=1e-300)


@settings(max_examples=30, deadline=None)
@given(envelopes(), envelopes(), cplx, cplx)
def test_linearity(x, y, a, b):
    lhs = to_spectrum(ComplexEnvelope(TINY, a * x.samples + b * y.samples)).samples
    rhs = a * to_spectrum(x).samples + b * to_spectrum(y).samples
    scale = max(1.0, np.abs(rhs).max(), np.abs(lhs).max())
    np.testing.assert_allclose(lhs, rhs, atol=1e-10 * scale)


@settings(max_examples=40, deadline=None)
@given(envelopes(), envelopes())
def test_inner_product_properties(a, b):
    ab = inner_product(a, b)
    ba = inner_product(b, a)
    scale = max(1.0, a.norm_squared(), b.norm_squared())
    assert abs(ab - ba.conjugate()) <= 1e-10 * scale
    assert abs(ab - spectral_inner_product(to_spectrum(a), to_spectrum(b))) <= 1e-10 * scale
    assert abs(ab) ** 2 <= a.norm_squared() * b.norm_squared() * (1 + 1e-12) + 1e-300
    aa = inner_product(a, a)
    assert abs(aa.imag) < 1e-12 * scale
    assert aa.real == pytest.approx(a.norm_squared(), rel=1e-12, abs=1e-300)


def test_tones_one_bin_apart_are_orthogonal():
    g = SMALL
    t = g.times
    a = ComplexEnvelope(g, np.exp(1j * 3 * g.angular_resolution * t))
    b = ComplexEnvelope(g, np.exp(1j * 4 * g.angular_resolution * t))
    assert abs(inner_product(a, b)) < 1e-10


@pytest.mark.parametrize("detune_mhz", [0.0, 3.0, 7.58, 30.0])
def test_detuned_exponential_overlap(detune_mhz):
    g = DEFAULT_GRID
    tau = 21e-9
    t = g.times - g.t0
    base = np.exp(-t / (2 * tau))
    dw = 2 * math.pi * detune_mhz * 1e6
    a = ComplexEnvelope(g, base).normalized()
    b = ComplexEnvelope(g, base * np.exp(1j * dw * t)).normalized()
    expected = 1 / (1 + (dw * tau) ** 2)
    assert abs(inner_product(a, b)) ** 2 == pytest.approx(expected, rel=1e-6)


def test_grid_mismatch_is_rejected():
    a = ComplexEnvelope(SMALL, np.ones(SMALL.n_samples))
    other = TimeGrid(n_samples=256, dt=2e-9)
    b = ComplexEnvelope(other, np.ones(other.n_samples))
    with pytest.raises(GridMismatchError):
        inner_product(a, b)
    with pytest.raises(GridMismatchError):
        ComplexEnvelope(SMALL, np.ones(10))
