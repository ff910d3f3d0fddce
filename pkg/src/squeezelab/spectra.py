"""Spectral photon density (SPD) and CW spectral photon flux density.

Pulsed integrals are evaluated in the dimensionless variable nu = omega/gamma
and rescaled at the end: an SPD term of order C**m scales as
C**m E0**m gamma**(m-1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .drive import CrystalParams, DrivePulse
from .errors import CostBudgetExceeded, CWNotSupported, NonConvergence
from .kernel import BogoliubovMap
from .numerics import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    envelope_cutoff,
    gauss_legendre_panels,
    integrate_1d,
)

PI = math.pi


@dataclass(frozen=True, eq=False)
class Spectrum:
    omega: np.ndarray
    value: np.ndarray
    order: int = 2
    normalization: str = "absolute"
    kind: str = "spd"

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        value = np.asarray(self.value, dtype=float)
        if omega.shape != value.shape or omega.ndim != 1:
            raise ValueError("omega and value must be 1-D arrays of equal length")
        if np.any(np.diff(omega) <= 0):
            raise ValueError("omega must be strictly increasing")
        if np.any(omega < 0):
            raise ValueError("spectra are sampled at omega >= 0")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "value", value)

    @property
    def samples(self) -> np.ndarray:
        return np.column_stack([self.omega, self.value])

    def normalized(self, rho0: float, unit: float) -> "Spectrum":
        """Frequencies in units of ``unit`` and values divided by ``rho0``."""
        return Spectrum(self.omega / unit, self.value / rho0, self.order, "rho0", self.kind)

    def to_csv(self, path) -> None:
        if self.kind == "flux":
            header = "omega_over_omega0,phi_over_rho0omega0,order"
        else:
            header = "omega_over_Gamma,rho_over_rho0,order"
        with open(path, "w", newline="") as fh:
            fh.write(header + "\n")
            for w, v in zip(self.omega, self.value):
                fh.write(f"{w:.10e},{v:.12e},{self.order}\n")


@dataclass(frozen=True)
class PairExpectation:
    """<a^dagger(w) a(w')> to second order in C.

    ``delta_term`` flags the vacuum term theta(-w)theta(-w')delta(w - w'),
    which is never folded into ``value``.
    """

    omega: float
    omega_p: float
    value: complex
    delta_term: bool


def rho0_pulsed(params: CrystalParams, E0, gamma) -> float:
    """SPD normalization C^2 E0^2 gamma / pi^2."""
    return params.C**2 * abs(E0) ** 2 * gamma / PI**2


def rho0_omega0_cw(params: CrystalParams, E0, omega0) -> float:
    """CW flux normalization rho0*w0 = C^2 |E0|^2 w0^2 / pi^2."""
    return params.C**2 * abs(E0) ** 2 * omega0**2 / PI**2


def _log1p_exp_neg(x):
    return np.log1p(np.exp(-np.asarray(x, dtype=float)))


def spd_hcp_closed(omega, params: CrystalParams, E0, gamma):
    omega = np.asarray(omega, dtype=float)
    return params.C**2 * E0**2 / PI**2 * omega * _log1p_exp_neg(PI * omega / gamma)


def spd_scp_closed(omega, params: CrystalParams, E0, gamma):
    omega = np.asarray(omega, dtype=float)
    x = PI * omega / (2.0 * gamma)
    sech2 = 1.0 / np.cosh(np.minimum(x, 350.0)) ** 2
    return params.C**2 * E0**2 / 12.0 * omega * (_log1p_exp_neg(2.0 * x) + 0.5 * sech2)


def _relative_cutoff(pulse: DrivePulse, nu: float, level: float) -> float:
    """Extent s beyond which s * (env(nu+s)/env(nu))^2 < level."""
    base = max(float(pulse.spectral_envelope(nu)), 1e-300)

    def ratio(s):
        return s * (float(pulse.spectral_envelope(nu + s)) / base) ** 2

    if pulse.shape == "tabulated":
        return max(pulse.spectral_cutoff(level) - nu, 1.0) + 1.0
    return envelope_cutoff(ratio, level, start=1.0)


def _order2_dimensionless(pulse: DrivePulse, nu: float, spec: QuadratureSpec) -> float:
    if nu <= 0:
        return 0.0
    cut = _relative_cutoff(pulse, nu, spec.rel_tol * 1e-4)
    scale = float(pulse.spectral_envelope(nu)) ** 2
    local = QuadratureSpec(spec.rel_tol, max(spec.abs_tol * scale, 1e-300), spec.max_subdivisions)

    def integrand(s):
        return s * abs(pulse.shape_freq(nu + s)) ** 2

    pts = [1.0, 2.0, 4.0] if cut > 4 else None
    return nu * integrate_1d(integrand, (0.0, cut), local, points=pts)


def spd_order2_numeric(pulse: DrivePulse, params: CrystalParams, omega, spec: QuadratureSpec = DEFAULT_QUADRATURE):
    """C^2 int_0^inf dw' w w' |E(w + w')|^2 by adaptive quadrature."""
    if not pulse.is_pulsed:
        raise CWNotSupported("the pulsed SPD integral diverges for CW drives; use cw_flux_closed")
    scale = params.C**2 * abs(pulse.amplitude) ** 2 * pulse.gamma
    nus = np.asarray(omega, dtype=float) / pulse.gamma
    if scale == 0.0:
        return np.zeros_like(nus) if nus.ndim else 0.0
    vals = np.array([_order2_dimensionless(pulse, float(v), spec) for v in nus.ravel()])
    vals = scale * vals.reshape(nus.shape)
    return vals if nus.ndim else float(vals)


# higher orders ---------------------------------------------------------

FORMS = ("series", "bogoliubov")


def _panel_nodes(lo, hi, width, order, breaks=(0.0,)):
    n = max(1, int(math.ceil((hi - lo) / width)))
    edges = np.linspace(lo, hi, n + 1)
    extra = [b for b in breaks if lo < b < hi]
    edges = np.unique(np.concatenate([edges, extra]))
    return gauss_legendre_panels(edges, order)


def _higher_terms(e, nu, K, width, order):
    """Dimensionless C^3 and C^4 pieces on tensor Gauss grids.

    Returns (c3_series, c3_bogoliubov, c4a_series, c4a_bogoliubov, c4b, evaluations).
    """
    a, wa = _panel_nodes(-nu - 2 * K, 2 * K, width, order)
    b, wb = a, wa
    c, wc = _panel_nodes(0.0, max(K - nu, 0.0) + K, width, order)
    sa = np.sign(a) * np.abs(a) * wa          # sign(w')|w'| dw'
    sb = np.sign(b) * np.abs(b) * wb
    vc = wc * c * np.conj(e(nu + c))          # w''' E*(w + w''') dw'''
    ea = e(nu + a)

    # C^3: ∫da ∫dc sign(a)|nu a c| E*(nu+c) E(nu+a) X(c - a)
    Eca = e(c[None, :] - a[:, None])           # E(c - a), shape (a, c)
    inner_p = np.conj(Eca) @ vc
    inner_b = Eca @ vc
    c3_p = -np.real(1j * nu * np.sum(sa * ea * inner_p))
    c3_b = -np.real(1j * nu * np.sum(sa * ea * inner_b))

    # C^4 first term
    Ebc_sum = e(b[:, None] + c[None, :])       # E(b + c)
    Ecb = e(c[None, :] - b[:, None])           # E(c - b)
    Eab = e(a[:, None] - b[None, :])           # E(a - b)
    g_p = Ebc_sum @ vc                          # over c, function of b
    g_b = Ecb @ vc
    m_p = np.conj(Eab) @ (sb * g_p)            # over b, function of a: E*(a-b)
    m_b = e(b[None, :] - a[:, None]) @ (sb * g_b)   # E(b - a)
    c4a_p = nu / 3.0 * np.real(np.sum(sa * ea * m_p))
    c4a_b = -nu / 3.0 * np.real(np.sum(sa * ea * m_b))

    # C^4 second term: nu/4 ∫dc c |G(c)|^2, G(c) = ∫db sign(b)|b| E(nu+b) E*(b-c)
    Gc = (sb * e(nu + b)) @ np.conj(e(b[:, None] - c[None, :]))
    c4b = nu / 4.0 * float(np.sum(wc * c * np.abs(Gc) ** 2))

    evals = Eca.size + Ebc_sum.size + Ecb.size + 2 * Eab.size + len(b) * len(c)
    return c3_p, c3_b, c4a_p, c4a_b, c4b, evals


def spd_higher_order_numeric(
    pulse: DrivePulse,
    params: CrystalParams,
    omega: float,
    order: int = 4,
    form: str = "series",
    rel_tol: float = 1e-6,
    budget: int = 10_000_000,
):
    """C^3 (order=3) or C^4 (order=4) correction to the SPD at ``omega > 0``.

    ``form="series"`` evaluates the standard higher-order series term by
    term. ``form="bogoliubov"`` evaluates the same structure re-derived from
    the truncated exponential map with the kernel used by :func:`build_xi`;
    it agrees with ``spd_from_map`` and differs from the series form in
    the conjugation/argument of the inner field factors.

    Grids are refined by halving the panel width until two successive
    results agree to ``rel_tol``. ``budget`` caps the number of field
    samples per pass.
    """
    if order not in (3, 4):
        raise ValueError("order must be 3 or 4")
    if form not in FORMS:
        raise ValueError(f"form must be one of {FORMS}")
    if not pulse.is_pulsed:
        raise CWNotSupported("use cw_flux_closed for CW drives")
    nu = float(omega) / pulse.gamma
    if not nu > 0:
        raise ValueError("omega must be positive")
    C, E0, G = params.C, abs(pulse.amplitude), pulse.gamma
    scale = C**order * E0**order * G ** (order - 1)
    if pulse.amplitude < 0 and order == 3:
        scale = -scale
    if scale == 0.0:
        return 0.0
    K = pulse.spectral_cutoff(1e-9)
    e = pulse.shape_freq

    def pick(res):
        c3p, c3b, c4ap, c4ab, c4b, _ = res
        if order == 3:
            return c3p if form == "series" else c3b
        return (c4ap if form == "series" else c4ab) + c4b

    width = 1.0
    prev = _higher_terms(e, nu, K, width, 8)
    if prev[-1] > budget:
        raise CostBudgetExceeded(f"{prev[-1]} field samples exceed budget {budget}")
    for _ in range(6):
        width /= 2.0
        cur = _higher_terms(e, nu, K, width, 8)
        if cur[-1] > budget:
            raise CostBudgetExceeded(f"{cur[-1]} field samples exceed budget {budget}")
        v0, v1 = pick(prev), pick(cur)
        ref = max(abs(v1), 1e-300)
        if abs(v1 - v0) <= rel_tol * ref or abs(v1 - v0) < 1e-15:
            return scale * v1
        prev = cur
    raise NonConvergence("higher-order SPD did not converge under panel refinement")


# pair expectation ------------------------------------------------------

def _theta_sign(x: float) -> float:
    return 1.0 if x > 0 else 0.0


def _complex_integral(f, interval, spec, points=None):
    re = integrate_1d(lambda t: float(np.real(f(t))), interval, spec, points)
    im = integrate_1d(lambda t: float(np.imag(f(t))), interval, spec, points)
    return complex(re, im)


def pair_expectation(pulse: DrivePulse, params: CrystalParams, omega: float, omega_p: float,
                     spec: QuadratureSpec = DEFAULT_QUADRATURE) -> PairExpectation:
    """<a^dagger(w) a(w')> through second order in C for signed frequencies."""
    if not pulse.is_pulsed:
        raise CWNotSupported("pair_expectation needs a pulsed drive")
    G = pulse.gamma
    E0 = pulse.amplitude
    nu, nup = float(omega) / G, float(omega_p) / G
    e = pulse.shape_freq
    delta = omega < 0 and omega_p < 0 and omega == omega_p

    x, y = -nu, -nup
    root = math.sqrt(abs(x * y))
    theta_minus = root * (_theta_sign(x) - _theta_sign(y))
    theta_plus = root * (_theta_sign(x) + _theta_sign(y))
    K = pulse.spectral_cutoff(1e-9)
    local = QuadratureSpec(spec.rel_tol, max(spec.abs_tol * 1e-6, 1e-300), spec.max_subdivisions)

    def integrand(t):
        return t * np.conj(e(nu + t)) * e(t + nup)

    value = 0j
    if theta_minus != 0.0:
        value += -1j * params.C * E0 * theta_minus * complex(e(nup - nu))
    if theta_plus != 0.0:
        lo, hi = -max(nu, nup) - K, -min(nu, nup) + K
        full = _complex_integral(integrand, (lo, hi), local, points=[0.0])
        value += -0.5 * params.C**2 * E0**2 * G * theta_plus * full
    hi = max(K - min(nu, nup), 0.0) + 1.0
    half = _complex_integral(integrand, (0.0, hi), local)
    value += params.C**2 * E0**2 * G * math.sqrt(abs(nu * nup)) * half
    return PairExpectation(float(omega), float(omega_p), complex(value), bool(delta))


# CW --------------------------------------------------------------------

def _heaviside(x):
    return np.heaviside(np.asarray(x, dtype=float), 0.5)


def cw_flux_closed(omega, params: CrystalParams, E0, omega0, order: int = 2):
    """Limiting CW spectral photon flux density through order 2 or 4 in alpha."""
    if order not in (2, 4):
        raise ValueError("order must be 2 or 4")
    w = np.asarray(omega, dtype=float)
    a2 = params.C**2 * abs(E0) ** 2
    phi = a2 * w * (omega0 - w) * _heaviside(omega0 - w)
    if order == 4:
        a4 = a2 * a2
        phi = phi + a4 / 4.0 * _heaviside(2 * omega0 - w) * w * (2 * omega0 - w) * (omega0 - w) ** 2
        phi = phi + a4 / 3.0 * _heaviside(omega0 - w) * w * (
            3 * w**3 - 6 * omega0 * w**2 + 5 * omega0**2 * w - 2 * omega0**3
        )
    return phi if w.ndim else float(phi)


def cw_flux_windowed(params: CrystalParams, E0, omega0, periods: int, mu: int,
                     spec: QuadratureSpec = QuadratureSpec(rel_tol=1e-10, abs_tol=1e-15)) -> float:
    """Time-averaged flux in window mode ``mu`` for an observation of ``periods`` drive periods.

    The mode sits at w_mu = mu * w0 / periods; the result is <n_mu> / (dt dw)
    with dt = periods * 2 pi / w0 and dw = w0 / periods. Non-integer ``mu``
    evaluates the same window centred between modes.
    """
    N, mu = int(periods), float(mu)
    if N < 1 or not mu > 0:
        raise ValueError("periods must be >= 1 and mu positive")
    m = mu / N

    def integrand(x):
        # np.sinc(u) = sin(pi u)/(pi u)
        return x * x * (1.0 - x) * np.sinc(N * (m - x)) ** 2

    zeros = m + np.arange(-N - 1, N + 2) / N
    pts = [float(z) for z in zeros if 0.0 < z < 1.0]
    J = integrate_1d(integrand, (0.0, 1.0), spec, points=pts)
    return params.C**2 * abs(E0) ** 2 * omega0**2 * N * N / mu * J


# Bogoliubov route --------------------------------------------------------

def spd_from_map(bmap: BogoliubovMap) -> Spectrum:
    """Vacuum SPD through the discrete map: sum over negative columns of |U|^2 / step."""
    grid = bmap.grid
    pos = grid.positive
    neg = ~pos
    rho = np.sum(np.abs(bmap.U[np.ix_(pos, neg)]) ** 2, axis=1) / grid.step
    return Spectrum(grid.points[pos], rho, order=bmap.order + 1, normalization="absolute", kind="spd")


# perturbative regime -----------------------------------------------------

PERTURBATIVE_LIMIT = 0.1
INVALID_LIMIT = 1.0


@dataclass(frozen=True)
class RegimeReport:
    coupling: float             # |C E0| Gamma' (Gamma' = w0 for CW)
    epsilon_L_over_Lp: float    # estimate equal to the coupling
    L_over_Lp: float            # Gamma' L / c0
    smallness_factor: float     # pi^2 coupling^2 / 4, the relative weight of the C^4 terms
    classification: str


def smallness_factor(coupling: float) -> float:
    """pi^4 rho0 w0 / 4 expressed through |C E0| w0."""
    return PI**2 * coupling**2 / 4.0


def coupling_from_smallness(factor: float) -> float:
    return 2.0 * math.sqrt(factor) / PI


def regime_check(pulse: DrivePulse, params: CrystalParams) -> RegimeReport:
    coupling = abs(params.C * pulse.amplitude) * pulse.gamma
    if coupling > INVALID_LIMIT:
        label = "invalid"
    elif coupling > PERTURBATIVE_LIMIT:
        label = "marginal"
    else:
        label = "perturbative"
    return RegimeReport(
        coupling=coupling,
        epsilon_L_over_Lp=coupling,
        L_over_Lp=params.zeta(pulse.gamma),
        smallness_factor=smallness_factor(coupling),
        classification=label,
    )
