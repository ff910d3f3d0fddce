import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from squeezelab.drive import CrystalParams, DrivePulse, load_tabulated_csv, reality_check, write_tabulated_csv
from squeezelab.errors import CWSpectrumRequested


def test_time_domain_examples():
    E0, g = 2.5, 3.0
    assert DrivePulse.hcp(E0, g).field_time(0.0) == pytest.approx(E0)
    assert DrivePulse.scp(E0, g).field_time(0.0) == 0.0
    assert DrivePulse.hcp(E0, g).field_time(1.0 / g) == pytest.approx(E0 / math.cosh(1.0), rel=1e-15)


def test_frequency_domain_examples():
    E0, g = 2.5, 3.0
    assert DrivePulse.hcp(E0, g).field_freq(0.0) == pytest.approx(E0 / (2 * g), rel=1e-15)
    assert DrivePulse.scp(E0, g).field_freq(0.0) == 0.0


def test_cw_has_no_pointwise_spectrum():
    cw = DrivePulse.cw(0.3 + 0.1j, 2.0)
    with pytest.raises(CWSpectrumRequested):
        cw.field_freq(1.0)
    assert cw.cw_lines() == ((2.0, 0.3 + 0.1j), (-2.0, 0.3 - 0.1j))
    assert cw.field_time(0.0) == pytest.approx(0.6)


def test_invalid_pulses():
    with pytest.raises(ValueError):
        DrivePulse("gauss")
    with pytest.raises(ValueError):
        DrivePulse.hcp(1.0, 0.0)
    with pytest.raises(ValueError):
        DrivePulse.hcp(1.0 + 1.0j)


@pytest.mark.parametrize("shape", ["hcp", "scp"])
def test_transform_matches_direct_fourier_integral(shape):
    # E(w) = (1/2pi) int E(t) exp(+i w t) dt
    p = DrivePulse(shape, 1.0, 1.0)
    for w in (0.0, 0.4, 1.3, 3.0):
        re, _ = integrate.quad(lambda t: p.field_time(t) * math.cos(w * t), -60, 60, limit=400, epsabs=1e-14)
        im, _ = integrate.quad(lambda t: p.field_time(t) * math.sin(w * t), -60, 60, limit=400, epsabs=1e-14)
        assert complex(p.field_freq(w)) == pytest.approx((re + 1j * im) / (2 * math.pi), abs=1e-12)


@pytest.mark.parametrize("shape", ["hcp", "scp"])
def test_parseval(shape):
    p = DrivePulse(shape, 1.7, 1.0)
    t_int, _ = integrate.quad(lambda t: p.field_time(t) ** 2, -80, 80, limit=400)
    w_int, _ = integrate.quad(lambda w: abs(p.field_freq(w)) ** 2, -80, 80, limit=400)
    assert t_int == pytest.approx(2 * math.pi * w_int, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(w=st.floats(0.0, 20.0))
def test_spectral_parity(w):
    h, s = DrivePulse.hcp(), DrivePulse.scp()
    assert h.field_freq(-w) == h.field_freq(w)
    assert complex(h.field_freq(w)).imag == 0.0
    assert s.field_freq(-w) == pytest.approx(-s.field_freq(w), abs=1e-300)
    assert complex(s.field_freq(w)).real == 0.0


def test_reality_check():
    assert reality_check(DrivePulse.hcp())
    assert reality_check(DrivePulse.scp())
    assert reality_check(DrivePulse.cw(0.2 + 0.5j))
    t = np.linspace(-20, 20, 801)
    bad = DrivePulse.tabulated(t, np.exp(-t * t) * (1.0 + 0.5j * np.tanh(t)))
    assert not reality_check(bad)


def test_tabulated_sech_matches_closed_transform():
    t = np.linspace(-40.0, 40.0, 4001)
    tab = DrivePulse.tabulated(t, 1.0 / np.cosh(t), amplitude=1.3, gamma=2.0)
    ref = DrivePulse.hcp(1.3, 2.0)
    w = np.linspace(-8.0, 8.0, 33)
    assert np.allclose(tab.field_freq(w), ref.field_freq(w), rtol=0, atol=1e-6 * abs(ref.field_freq(0.0)))
    assert reality_check(tab)


def test_tabulated_third_derivative_spectral_route():
    t = np.linspace(-40.0, 40.0, 1601)
    tab = DrivePulse.tabulated(t, 1.0 / np.cosh(t))
    taus = np.array([-1.5, -0.2, 0.7, 2.0])
    ref = DrivePulse.hcp().third_derivative(taus)
    assert np.allclose(tab.third_derivative(taus), ref, atol=1e-5)


def test_third_derivative_closed_forms_against_finite_differences():
    h = 1e-3
    for p in (DrivePulse.hcp(1.0, 1.4), DrivePulse.scp(0.8, 0.7), DrivePulse.cw(0.5 - 0.2j, 1.1)):
        x = np.linspace(-3, 3, 13)
        f = p.field_time
        fd = (f(x + 2 * h) - 2 * f(x + h) + 2 * f(x - h) - f(x - 2 * h)) / (2 * h**3)
        assert np.allclose(p.third_derivative(x), fd, atol=1e-5)
    assert DrivePulse.hcp().third_derivative(0.0) == 0.0


def test_tabulated_csv_round_trip(tmp_path):
    t = np.linspace(-10, 10, 41)
    p = DrivePulse.tabulated(t, np.exp(-t * t), 1.0, 1.0)
    path = tmp_path / "pulse.csv"
    write_tabulated_csv(p, path)
    q = load_tabulated_csv(path)
    assert np.allclose(np.array(q.samples), np.array(p.samples), rtol=1e-12, atol=0)


def test_crystal_params_groups():
    cp = CrystalParams(d=2e-12, n=2.0, L=1e-4, A=1e-8)
    assert cp.C == pytest.approx(2e-12 * 1e-4 / (2.0 * 299792458.0))
    E0, g = 1e7, 1e13
    assert cp.r(E0, g) == pytest.approx(abs(cp.C * E0) * g, rel=1e-14)
    assert CrystalParams.with_coupling(0.3, n=1.5).C == pytest.approx(0.3, rel=1e-15)
    with pytest.raises(ValueError):
        CrystalParams(d=1.0, n=0.0, L=1.0)
