"""Acceptance criteria and invariant checks shared by the test-suite and ``squeezelab validate``."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import analysis, geodesics, kernel, numerics, spectra, variance
from .drive import DrivePulse, CrystalParams

PI = math.pi
UNIT = CrystalParams.with_coupling(1.0)


@dataclass(frozen=True)
class CheckResult:
    key: str
    title: str
    passed: bool
    detail: str
    seconds: float
    budget: float

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.key} {self.title}: {self.detail} ({self.seconds:.2f}s / {self.budget:.0f}s)"


def _run(key, title, budget, fn: Callable[[], tuple[bool, str]]) -> CheckResult:
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failed check, reported with its type
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    dt = time.perf_counter() - t0
    if ok and dt > budget:
        ok, detail = False, detail + f"; runtime {dt:.1f}s over budget"
    return CheckResult(key, title, bool(ok), detail, dt, budget)


# 1 ------------------------------------------------------------------------------

def closed_vs_oracle():
    nus = np.logspace(math.log10(0.05), 1.0, 50)
    worst = {}
    for shape, closed in (("hcp", spectra.spd_hcp_closed), ("scp", spectra.spd_scp_closed)):
        pulse = DrivePulse(shape, 1.0, 1.0)
        num = spectra.spd_order2_numeric(pulse, UNIT, nus)
        ref = closed(nus, UNIT, 1.0, 1.0)
        worst[shape] = float(np.max(np.abs(num / ref - 1.0)))
    ok = all(v <= 1e-6 for v in worst.values())
    return ok, f"max rel diff hcp {worst['hcp']:.2e}, scp {worst['scp']:.2e} (tol 1e-6)"


# 2 ------------------------------------------------------------------------------

def tail_law():
    x = np.linspace(5.0, 12.0, 141)
    rates = {}
    for shape, closed in (("hcp", spectra.spd_hcp_closed), ("scp", spectra.spd_scp_closed)):
        y = closed(x, UNIT, 1.0, 1.0)
        fit = numerics.fit_exponential_tail(np.column_stack([x, y]), (5.0, 12.0), power=None)
        rates[shape] = fit.decay_rate
    errs = {k: abs(v / PI - 1.0) for k, v in rates.items()}
    ok = all(e <= 0.01 for e in errs.values())
    return ok, (f"decay/pi hcp {rates['hcp'] / PI:.8f}, scp {rates['scp'] / PI:.8f} "
                f"(tol 1%, prefactor-aware fit)")


# 3 ------------------------------------------------------------------------------

WINDOW_PROBE = np.arange(1, 10) / 10.0


def windowed_deviation(N: int) -> float:
    """max |windowed - limit| / max(limit) on w/w0 in {0.1, ..., 0.9}."""
    vals = np.array([spectra.cw_flux_windowed(UNIT, 1.0, 1.0, N, int(round(x * N))) for x in WINDOW_PROBE])
    ref = spectra.cw_flux_closed(WINDOW_PROBE, UNIT, 1.0, 1.0, 2)
    return float(np.max(np.abs(vals - ref)) / 0.25)


def cw_flux():
    w = np.linspace(0.0, 2.5, 2501)
    o2 = spectra.cw_flux_closed(w, UNIT, 1.0, 1.0, 2)
    parab = np.where(w < 1.0, w * (1.0 - w), 0.0)
    parab_err = float(np.max(np.abs(o2 - parab)))
    o4 = spectra.cw_flux_closed(w, UNIT, 1.0, 1.0, 4)
    band = (w > 1.0) & (w < 2.0)
    band_ok = bool(np.all(o4[band] > 0) and np.all(o2[band] == 0))
    outside_ok = bool(np.all(o4[w > 2.0] == 0))
    devs = [windowed_deviation(N) for N in (10, 50, 200)]
    mono = devs[0] > devs[1] > devs[2]
    ok = parab_err <= 4 * np.finfo(float).eps and band_ok and outside_ok and mono
    return ok, (f"parabola err {parab_err:.1e}; order-4 band (w0,2w0) positive {band_ok}; "
                f"windowed dev N=10/50/200: {devs[0]:.2e}/{devs[1]:.2e}/{devs[2]:.2e}")


# 4 ------------------------------------------------------------------------------

def bogoliubov_route():
    worst = {}
    for shape, closed in (("hcp", spectra.spd_hcp_closed), ("scp", spectra.spd_scp_closed)):
        pulse = DrivePulse(shape, 0.1, 1.0)
        grid = kernel.SignedFrequencyGrid(16.0, 2048)
        bmap = kernel.expand_bogoliubov(kernel.build_xi(pulse, UNIT, grid), 1.0, 1)
        spd = spectra.spd_from_map(bmap)
        sel = (spd.omega >= 0.1) & (spd.omega <= 5.0)
        ref = closed(spd.omega[sel], UNIT, 0.1, 1.0)
        worst[shape] = float(np.max(np.abs(spd.value[sel] / ref - 1.0)))
    sym = {}
    for shape in ("hcp", "scp"):
        pulse = DrivePulse(shape, 0.1, 1.0)   # r = |C E0| gamma = 0.1
        grid = kernel.SignedFrequencyGrid(16.0, 1024)
        bmap = kernel.expand_bogoliubov(kernel.build_xi(pulse, UNIT, grid), 1.0, 24)
        sym[shape] = kernel.check_bogoliubov_symmetry(bmap).symplectic_residual
    ok = all(v <= 0.01 for v in worst.values()) and all(v < 1e-8 for v in sym.values())
    return ok, (f"order-1 map vs closed form max rel {max(worst.values()):.2e} (tol 1e-2); "
                f"order-24 symplectic residual {max(sym.values()):.1e} (tol 1e-8)")


# 5 ------------------------------------------------------------------------------

def _fd3(f, x, h):
    return (f(x + 2 * h) - 2 * f(x + h) + 2 * f(x - h) - f(x - 2 * h)) / (2 * h**3)


def fd_third_derivative(f, x, h, richardson: bool = True):
    """Central 5-point third derivative; with ``richardson`` the h and 2h stencils are
    combined to cancel the h^2 f^(5) / 4 truncation term."""
    d1 = _fd3(f, x, h)
    if not richardson:
        return d1
    return (4.0 * d1 - _fd3(f, x, 2 * h)) / 3.0


def v1_fd_error(seed: int = 7, step: float = 5e-3, richardson: bool = True) -> float:
    """Max |FD - analytic| third derivative at 20 random tau per pulse, relative to the peak value."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for pulse in (DrivePulse.hcp(1.0, 1.0), DrivePulse.scp(1.0, 1.0), DrivePulse.cw(1.0, 1.0)):
        taus = rng.uniform(-4.0, 4.0, 20)
        exact = pulse.third_derivative(taus)
        peak = float(np.max(np.abs(pulse.third_derivative(np.linspace(-6, 6, 2001)))))
        fd = fd_third_derivative(pulse.field_time, taus, step / pulse.gamma, richardson)
        worst = max(worst, float(np.max(np.abs(fd - exact)) / peak))
    return worst


def variance_props():
    fd = v1_fd_error()
    taus = np.linspace(-10.0, 10.0, 401)
    ratio_err = 0.0
    for shape in ("hcp", "scp"):
        full = variance._v2_raw(DrivePulse(shape, 1.0, 1.0), taus[::20], variance.DEFAULT_V2)
        half = variance._v2_raw(DrivePulse(shape, 0.5, 1.0), taus[::20], variance.DEFAULT_V2)
        big = np.abs(full) > 1e-12 * np.max(np.abs(full))
        ratio_err = max(ratio_err, float(np.max(np.abs(full[big] / half[big] / 4.0 - 1.0))))
    mins = {}
    for shape, r in (("hcp", 0.21), ("scp", 1.54)):
        tr = variance.variance_trace(DrivePulse(shape, r, 1.0), UNIT, taus)
        mins[shape] = float(np.min(tr.normalized()[:, 3]))
    tr = variance.variance_trace(DrivePulse("hcp", 0.21, 1.0), UNIT, taus)
    v1 = tr.V1 / tr.V0
    v21 = tr.parts[:, 0]
    odd = float(np.max(np.abs(v1 + v1[::-1])) / np.max(np.abs(v1)))
    even = float(np.max(np.abs(v21 - v21[::-1])) / np.max(np.abs(v21)))
    ok = fd <= 1e-6 and ratio_err <= 1e-8 and mins["hcp"] < 0 and mins["scp"] < 0 and odd < 1e-12 and even < 1e-12
    return ok, (f"V1 vs FD {fd:.1e}; V2 4:1 err {ratio_err:.1e}; min V/V0 hcp(r=0.21) {mins['hcp']:.4f}, "
                f"scp(r=1.54) {mins['scp']:.4f}; parity V1 odd {odd:.1e}, V2_1 even {even:.1e}")


# 6 ------------------------------------------------------------------------------

def geodesic_checks():
    p = geodesics.GeodesicParams.from_groups(0.49, 12.0)
    z = np.linspace(0.0, 1.0, 201)
    launches = np.linspace(-0.9, 0.9, 10)
    dev = 0.0
    for shape in geodesics.SHAPES:
        for l in launches:
            a = geodesics.worldline_implicit(shape, p, float(l), z)
            b = geodesics.worldline_ode(shape, p, float(l), z)
            dev = max(dev, float(np.max(np.abs(a.x0 - b.x0))))
    flat = geodesics.GeodesicParams(0.0, p.n, p.zeta)
    slope0 = 0.0
    for shape in geodesics.SHAPES:
        for l in (-0.5, 0.4):
            for wl in (geodesics.worldline_implicit(shape, flat, l, z), geodesics.worldline_ode(shape, flat, l, z)):
                slope0 = max(slope0, float(np.max(np.abs(np.diff(wl.x0) / np.diff(wl.x1) - p.n))))
    slow = geodesics.GeodesicParams(p.alpha, p.n, 1e-3)
    wl = geodesics.worldline_implicit("hcp", slow, 0.0, z)
    slope_z = float(np.max(np.abs(np.diff(wl.x0) / np.diff(wl.x1) - (p.n + p.alpha / p.n))))
    ok = dev < 1e-6 and slope0 < 1e-12 and slope_z < 1e-4
    return ok, (f"implicit vs ODE max |dx0| {dev:.1e} (tol 1e-6); alpha=0 slope err {slope0:.1e}; "
                f"zeta=1e-3 slope err {slope_z:.1e} (tol 1e-4)")


# 7 ------------------------------------------------------------------------------

def planck_recovery(T: float = 300.0) -> float:
    gamma = analysis.KB * T / analysis.HBAR
    x = np.linspace(4.0, 13.0, 181)
    occ = 1.0 / np.expm1(x)
    spec = spectra.Spectrum(x * gamma, occ)
    rep = analysis.effective_temperature_from_spectrum(spec, gamma, (5.0, 12.0))
    return abs(rep.T_eff_tail / T - 1.0)


def temperature_checks():
    T_D = 1.0
    hi = analysis.temperature_profile(50.0, T_D, 0.0) / 50.0        # eps = 100
    lo = analysis.temperature_profile(0.005, T_D, 0.0) / T_D       # eps = 0.01
    t = np.linspace(-0.99, 0.99, 199)
    even_ok, mono_ok = True, True
    for eps in (0.01, 1.0, 100.0):
        prof = analysis.temperature_profile(eps / 2.0, T_D, t)
        even_ok &= bool(np.allclose(prof, prof[::-1], rtol=1e-13, atol=0))
        right = prof[t >= 0]
        mono_ok &= bool(np.all(np.diff(right) > 0))
    planck = planck_recovery()
    ok = abs(hi - 1) <= 0.01 and abs(lo - 1) <= 0.01 and even_ok and mono_ok and planck <= 0.02
    return ok, (f"T(0)/T_U at eps=100 {hi:.5f}; T(0)/T_D at eps=0.01 {lo:.5f}; even {even_ok}; "
                f"monotone {mono_ok}; Planck recovery err {planck:.1e}")


# 8 ------------------------------------------------------------------------------

def regime_roundtrip():
    kappa = spectra.coupling_from_smallness(0.02)
    pulse = DrivePulse.cw(kappa, 1.0)
    rep = spectra.regime_check(pulse, UNIT)
    err = abs(rep.smallness_factor / 0.02 - 1.0)
    ok = err <= 1e-3 and rep.classification == "perturbative"
    return ok, f"|C E0| w0 = {rep.coupling:.6f}; smallness back {rep.smallness_factor:.6f}; {rep.classification}"


CRITERIA = [
    ("C1", "closed-form vs oracle SPD", 10.0, closed_vs_oracle),
    ("C2", "tail law decay pi/gamma", 5.0, tail_law),
    ("C3", "CW flux", 30.0, cw_flux),
    ("C4", "Bogoliubov route", 60.0, bogoliubov_route),
    ("C5", "variance properties", 300.0, variance_props),
    ("C6", "world lines", 10.0, geodesic_checks),
    ("C7", "temperature law", 1.0, temperature_checks),
    ("C8", "regime round trip", 1.0, regime_roundtrip),
]


# further invariants --------------------------------------------------------------

def _inv_quadrature():
    spec = numerics.QuadratureSpec()
    f = lambda x: math.exp(-x) * math.cos(x)
    g = lambda x: 1.0 / (1.0 + x * x)
    lhs = numerics.integrate_1d(lambda x: 2 * f(x) - 3 * g(x), (0.0, 5.0), spec)
    rhs = 2 * numerics.integrate_1d(f, (0.0, 5.0), spec) - 3 * numerics.integrate_1d(g, (0.0, 5.0), spec)
    err = abs(lhs - rhs)
    return err <= 1e-9, f"linearity defect {err:.1e}"


def _inv_chi():
    x = np.linspace(0.5, 5.0, 19)
    h = 1e-5
    d = (numerics.chi(x + h) - numerics.chi(x - h)) / (2 * h)
    err = float(np.max(np.abs(d / (np.cosh(x) / x) - 1)))
    return err <= 1e-6, f"Chi' vs cosh(x)/x {err:.1e}"


def _inv_tailfit():
    w = np.linspace(1.0, 4.0, 30)
    fit = numerics.fit_exponential_tail(np.column_stack([w, 3.0 * np.exp(-2.0 * w)]), (1.0, 4.0))
    err = max(abs(fit.amplitude / 3 - 1), abs(fit.decay_rate / 2 - 1))
    return err <= 1e-10, f"exact exponential recovery {err:.1e}"


def _inv_parseval():
    from scipy import integrate
    worst = 0.0
    for shape in ("hcp", "scp"):
        p = DrivePulse(shape, 1.0, 1.0)
        t_side = integrate.quad(lambda t: float(p.field_time(t)) ** 2, -60, 60, limit=400, epsabs=0, epsrel=1e-12)[0]
        w_side = integrate.quad(lambda w: abs(complex(p.field_freq(w))) ** 2, -60, 60, limit=400, epsabs=0, epsrel=1e-12)[0]
        worst = max(worst, abs(t_side / (2 * PI * w_side) - 1))
    return worst <= 1e-8, f"int|E(t)|^2 = 2 pi int|E(w)|^2 to {worst:.1e}"


def _inv_parity():
    w = np.linspace(-8, 8, 161)
    h = DrivePulse.hcp().field_freq(w)
    s = DrivePulse.scp().field_freq(w)
    ok = np.allclose(h, h[::-1], rtol=0, atol=1e-14) and np.all(h.imag == 0)
    ok &= np.allclose(s, -s[::-1], rtol=0, atol=1e-14) and np.all(s.real == 0)
    return bool(ok), "hcp spectrum even and real, scp odd and imaginary"


def _inv_kernel():
    grid = kernel.SignedFrequencyGrid(8.0, 128)
    k1 = kernel.build_xi(DrivePulse.hcp(1.0), UNIT, grid)
    k2 = kernel.build_xi(DrivePulse.hcp(2.0), UNIT, grid)
    lin = float(np.max(np.abs(k2.xi - 2 * k1.xi)))
    rt = kernel.SqueezeKernel.assemble(grid, k1.blocks())
    blocks_ok = bool(np.array_equal(rt.xi, k1.xi))
    refl = float(np.max(np.abs(k1.xi[::-1, ::-1] - np.conj(k1.xi))))
    ok = lin <= 1e-15 and blocks_ok and refl <= 1e-15
    return ok, f"linearity {lin:.1e}; block round trip {blocks_ok}; Xi(-w,-w') = Xi* to {refl:.1e}"


def _inv_map_refinement():
    pulse = DrivePulse.hcp(0.1)
    errs = []
    for N in (512, 1024):
        grid = kernel.SignedFrequencyGrid(16.0, N)
        spd = spectra.spd_from_map(kernel.expand_bogoliubov(kernel.build_xi(pulse, UNIT, grid), 1.0, 1))
        sel = (spd.omega >= 0.1) & (spd.omega <= 5.0)
        errs.append(float(np.max(np.abs(spd.value[sel] / spectra.spd_hcp_closed(spd.omega[sel], UNIT, 0.1, 1.0) - 1))))
    return errs[1] <= 0.5 * errs[0] and errs[1] < 0.01, f"map error N=512 {errs[0]:.2e}, N=1024 {errs[1]:.2e}"


def _inv_order1_residual():
    grid = kernel.SignedFrequencyGrid(16.0, 256)
    res = [kernel.check_bogoliubov_symmetry(kernel.expand_bogoliubov(
        kernel.build_xi(DrivePulse.hcp(e), UNIT, grid), 1.0, 1)).symplectic_residual for e in (0.1, 0.05)]
    ratio = res[0] / res[1]
    return abs(ratio - 4) < 1e-6, f"order-1 symplectic residual ratio under E0/2: {ratio:.6f}"


def _inv_nonnegative():
    w = np.linspace(0.0, 20.0, 401)
    ok = bool(np.all(spectra.spd_hcp_closed(w, UNIT, 1, 1) >= 0) and np.all(spectra.spd_scp_closed(w, UNIT, 1, 1) >= 0))
    x = np.linspace(0.0, 1.0, 101)
    o2 = spectra.cw_flux_closed(x, UNIT, 1, 1, 2)
    ok &= bool(np.all(o2 >= 0))
    sym = float(np.max(np.abs(o2 - spectra.cw_flux_closed(1.0 - x, UNIT, 1, 1, 2))))
    return ok and sym < 1e-15, f"order-2 spectra non-negative; CW parabola symmetric about w0/2 ({sym:.1e})"


def _inv_pair_hermitian():
    p = DrivePulse.scp(1.0)
    a = spectra.pair_expectation(p, UNIT, 0.7, -1.3).value
    b = spectra.pair_expectation(p, UNIT, -1.3, 0.7).value
    err = abs(a - np.conj(b)) / abs(a)
    return err < 1e-9, f"pair expectation Hermiticity {err:.1e}"


def _inv_cw_variance_period():
    pulse = DrivePulse.cw(0.07, 1.0)
    t = np.linspace(0.0, 2 * PI, 50)
    a = variance.variance_trace(pulse, UNIT, t).normalized()[:, 3]
    b = variance.variance_trace(pulse, UNIT, t + 2 * PI).normalized()[:, 3]
    err = float(np.max(np.abs(a - b)))
    return err < 1e-8, f"CW trace periodic in 2 pi/w0 to {err:.1e}"


def _inv_confinement():
    p = geodesics.GeodesicParams.from_groups(0.49, 12.0)
    z = np.linspace(0.0, 1.0, 401)
    worst = 0.0
    for l in geodesics.launch_grid(21, 8.0, p.zeta):
        wl = geodesics.worldline_implicit("hcp", p, float(l), z)
        u = p.zeta * (wl.x0 - p.n * wl.x1)
        curv = np.abs(np.diff(wl.x0, 2))
        outside = np.abs(u[1:-1]) > 10
        if np.any(outside):
            worst = max(worst, float(np.max(curv[outside])))
    return worst < 1e-8, f"curvature outside |u| > 10: {worst:.1e}"


def _inv_null():
    p = geodesics.GeodesicParams.from_groups(0.49, 12.0)
    worst = max(float(np.max(np.abs(geodesics.null_geodesic(s, p, 0.2).null_residual()))) for s in geodesics.SHAPES)
    return worst < 1e-9, f"null-norm drift of full geodesics {worst:.1e}"


def _inv_tail_rescale():
    x = np.linspace(4.0, 13.0, 91)
    s1 = spectra.Spectrum(x, spectra.spd_hcp_closed(x, UNIT, 1, 1))
    s2 = spectra.Spectrum(x, 1e5 * s1.value)
    a = analysis.effective_temperature_from_spectrum(s1, 1.0)
    b = analysis.effective_temperature_from_spectrum(s2, 1.0)
    err = abs(a.T_eff_tail / b.T_eff_tail - 1)
    return err < 1e-10, f"T_eff invariant under rescaling ({err:.1e}); T_eff/T_D = {a.ratio_tail_to_diamond:.6f}"


INVARIANTS = [
    ("I1", "quadrature linearity", 5.0, _inv_quadrature),
    ("I2", "Chi derivative", 5.0, _inv_chi),
    ("I3", "tail fit exactness", 5.0, _inv_tailfit),
    ("I4", "Parseval", 5.0, _inv_parseval),
    ("I5", "spectral parity", 5.0, _inv_parity),
    ("I6", "kernel structure", 5.0, _inv_kernel),
    ("I7", "map grid refinement", 30.0, _inv_map_refinement),
    ("I8", "order-1 symplectic scaling", 10.0, _inv_order1_residual),
    ("I9", "non-negativity and CW symmetry", 5.0, _inv_nonnegative),
    ("I10", "pair expectation Hermiticity", 10.0, _inv_pair_hermitian),
    ("I11", "CW variance periodicity", 5.0, _inv_cw_variance_period),
    ("I12", "world-line confinement", 10.0, _inv_confinement),
    ("I13", "null geodesic norm", 10.0, _inv_null),
    ("I14", "tail temperature rescaling", 5.0, _inv_tail_rescale),
]


def run_criterion(key: str) -> CheckResult:
    for k, title, budget, fn in CRITERIA + INVARIANTS:
        if k == key:
            return _run(k, title, budget, fn)
    raise KeyError(key)


def run_all(include_invariants: bool = True, report: Callable[[CheckResult], None] | None = None) -> list[CheckResult]:
    out = []
    for k, title, budget, fn in CRITERIA + (INVARIANTS if include_invariants else []):
        res = _run(k, title, budget, fn)
        out.append(res)
        if report is not None:
            report(res)
    return out
