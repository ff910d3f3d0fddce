import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from squeezelab.errors import DomainError, InsufficientData, NonConvergence, NonPositiveSample, NoSignChange
from squeezelab.numerics import (
    EULER_GAMMA,
    QuadratureSpec,
    chi,
    envelope_cutoff,
    fit_exponential_tail,
    gauss_legendre_panels,
    integrate_1d,
    solve_monotone_root,
)


def sech2(x):
    return 1.0 / math.cosh(x) ** 2


def test_integral_of_sech_squared_is_one():
    spec = QuadratureSpec(cutoff=40.0)
    assert integrate_1d(sech2, (0.0, math.inf), spec) == pytest.approx(1.0, abs=1e-12)


def test_zero_integrand_and_empty_interval():
    assert integrate_1d(lambda x: 0.0, (0.0, 1.0)) == 0.0
    assert integrate_1d(math.exp, (2.0, 2.0)) == 0.0


def test_matches_dense_simpson_oracle():
    f = lambda x: math.exp(-0.3 * x) * math.sin(3 * x) ** 2
    x = np.linspace(0.0, 7.0, 1_000_001)
    ref = integrate.simpson(np.exp(-0.3 * x) * np.sin(3 * x) ** 2, x=x)
    assert integrate_1d(f, (0.0, 7.0)) == pytest.approx(ref, rel=1e-10)


def test_breakpoints_are_used():
    f = lambda x: abs(x - 0.3)
    assert integrate_1d(f, (0.0, 1.0), points=[0.3]) == pytest.approx(0.5 * (0.09 + 0.49), rel=1e-13)


def test_nonconvergence_is_reported():
    spec = QuadratureSpec(max_subdivisions=2, rel_tol=1e-14, abs_tol=1e-16)
    with pytest.raises(NonConvergence):
        integrate_1d(lambda x: math.sin(1.0 / x) if x else 0.0, (1e-6, 1.0), spec)


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(max_subdivisions=0)


@settings(max_examples=40, deadline=None)
@given(a=st.floats(-5, 5), b=st.floats(-5, 5), k=st.floats(0.1, 4.0))
def test_quadrature_is_linear(a, b, k):
    f = lambda x: math.exp(-k * x)
    g = lambda x: math.cos(k * x)
    lhs = integrate_1d(lambda x: a * f(x) + b * g(x), (0.0, 3.0))
    rhs = a * integrate_1d(f, (0.0, 3.0)) + b * integrate_1d(g, (0.0, 3.0))
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_envelope_cutoff_finds_level():
    cut = envelope_cutoff(lambda x: math.exp(-x), 1e-10)
    assert cut == pytest.approx(10 * math.log(10), rel=1e-9)
    with pytest.raises(ValueError):
        envelope_cutoff(lambda x: 1.0, 0.0)


def test_gauss_legendre_panels_integrate_polynomials_exactly():
    x, w = gauss_legendre_panels(np.array([0.0, 0.5, 2.0]), 5)
    assert np.sum(w * x**9) == pytest.approx(2.0**10 / 10, rel=1e-13)


# Chi ----------------------------------------------------------------------------

def test_chi_small_argument_limit():
    x = 1e-8
    assert chi(x) - (EULER_GAMMA + math.log(x)) == pytest.approx(0.0, abs=1e-15)


def test_chi_one_against_quadrature_oracle():
    tail, _ = integrate.quad(lambda t: (math.cosh(t) - 1.0) / t, 0.0, 1.0, epsabs=1e-14, epsrel=1e-12)
    ref = EULER_GAMMA + tail
    assert chi(1.0) == pytest.approx(ref, rel=1e-13)
    assert chi(1.0) == pytest.approx(0.8378669, abs=1e-7)


def test_chi_matches_scipy_shichi():
    x = np.geomspace(1e-6, 700.0, 400)
    _, ref = special.shichi(x)
    assert np.allclose(chi(x), ref, rtol=1e-13, atol=0)


def test_chi_large_argument_asymptotics():
    x = 60.0
    assert chi(x) / (math.cosh(x) / x) == pytest.approx(1.0 + 1.0 / x + 2.0 / x**2 + 6.0 / x**3 + 24.0 / x**4, rel=5e-7)
    assert math.isinf(chi(800.0))


def test_chi_rejects_non_positive():
    with pytest.raises(DomainError):
        chi(0.0)
    with pytest.raises(DomainError):
        chi(np.array([1.0, -2.0]))


@settings(max_examples=50, deadline=None)
@given(x=st.floats(0.05, 30.0))
def test_chi_derivative_is_cosh_over_x(x):
    h = 1e-5 * x
    d = (chi(x + h) - chi(x - h)) / (2 * h)
    assert d == pytest.approx(math.cosh(x) / x, rel=1e-7)


# tail fit -----------------------------------------------------------------------

def test_tail_fit_exact_exponential():
    w = np.linspace(0.0, 10.0, 101)
    fit = fit_exponential_tail(np.column_stack([w, 3.0 * np.exp(-2.0 * w)]), (1.0, 9.0))
    assert fit.amplitude == pytest.approx(3.0, abs=1e-10)
    assert fit.decay_rate == pytest.approx(2.0, abs=1e-10)
    assert fit.residual_rms < 1e-12


def test_tail_fit_constant_samples_give_zero_decay():
    w = np.linspace(0.0, 10.0, 50)
    fit = fit_exponential_tail(np.column_stack([w, np.full_like(w, 0.7)]), (0.0, 10.0))
    assert fit.decay_rate == pytest.approx(0.0, abs=1e-10)


def test_tail_fit_power_prefactor():
    w = np.linspace(4.0, 13.0, 200)
    y = 0.2 * w**1.5 * np.exp(-math.pi * w)
    fixed = fit_exponential_tail(np.column_stack([w, y]), (5.0, 12.0), power=1.5)
    free = fit_exponential_tail(np.column_stack([w, y]), (5.0, 12.0), power=None)
    for fit in (fixed, free):
        assert fit.decay_rate == pytest.approx(math.pi, rel=1e-10)
        assert fit.amplitude == pytest.approx(0.2, rel=1e-8)
    assert free.power == pytest.approx(1.5, rel=1e-9)
    assert fixed(w[10]) == pytest.approx(y[10], rel=1e-10)


def test_tail_fit_errors():
    w = np.linspace(0.0, 10.0, 20)
    with pytest.raises(InsufficientData):
        fit_exponential_tail(np.column_stack([w, np.exp(-w)]), (0.0, 2.0))
    y = np.exp(-w)
    y[5] = 0.0
    with pytest.raises(NonPositiveSample):
        fit_exponential_tail(np.column_stack([w, y]), (0.0, 10.0))
    with pytest.raises(ValueError):
        fit_exponential_tail(np.column_stack([w, np.exp(-w)]), (3.0, 1.0))


# roots --------------------------------------------------------------------------

def test_root_examples():
    assert solve_monotone_root(lambda x: x - 1.0, (0.0, 2.0)) == pytest.approx(1.0, abs=1e-12)
    assert solve_monotone_root(lambda x: math.sinh(x) - 1.0, (0.0, 2.0)) == pytest.approx(math.asinh(1.0), abs=1e-12)


def test_root_no_sign_change():
    with pytest.raises(NoSignChange):
        solve_monotone_root(lambda x: x * x + 1.0, (-1.0, 1.0))


def test_geodesic_style_root_matches_grid_scan():
    alpha, zeta, n, y0 = 1.96, 6.0, 2.0, 0.4
    g = lambda x: alpha * zeta * x / n - math.sinh(zeta * (y0 - n * x))
    root = solve_monotone_root(g, (0.0, 1.0))
    grid = np.linspace(0.0, 1.0, 2_000_001)
    vals = alpha * zeta * grid / n - np.sinh(zeta * (y0 - n * grid))
    scan = grid[np.argmin(np.abs(vals))]
    assert root == pytest.approx(scan, abs=1e-6)
