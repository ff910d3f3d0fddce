"""Normally ordered variance (NOV) of the emitted field, first and second order in C."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .drive import CrystalParams, DrivePulse
from .errors import CostBudgetExceeded, CWNotSupported, NonConvergence
from .numerics import gauss_legendre_panels

PI = math.pi


@dataclass(frozen=True)
class PhaseConvention:
    """Mode phase phi(w, t, z) = -w (t - n z / c0) + pi/2, written through tau = t - n z / c0."""

    offset: float = PI / 2

    def phase(self, omega, tau):
        return -np.asarray(omega) * tau + self.offset

    def factor(self, omega, tau):
        """exp(i phi)."""
        return np.exp(1j * self.phase(omega, tau))


PHASE = PhaseConvention()


def threads() -> int:
    """Worker cap from SQUEEZELAB_THREADS (default: CPU count)."""
    raw = os.environ.get("SQUEEZELAB_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def v0(params: CrystalParams, gamma: float) -> float:
    """Normalization hbar gamma^2 / (24 pi eps0 c0 n A)."""
    return params.variance_prefactor * gamma**2


# first order ------------------------------------------------------------

def v1_closed(pulse: DrivePulse, params: CrystalParams, tau):
    """hbar C / (24 pi eps0 c0 n A) * d^3 E / d tau^3."""
    return params.C * params.variance_prefactor * pulse.third_derivative(tau)


def v1_quadrature(pulse: DrivePulse, params: CrystalParams, tau: float, rel_tol: float = 1e-10) -> float:
    """First-order NOV from its two-frequency integral (independent of the derivative form).

    V1 = -hbar C / (2 pi eps0 c0 n A) int_0^inf int_0^inf w w' Im[E(w+w') exp(-i(w+w')tau)] dw dw'
    """
    if not pulse.is_pulsed:
        raise CWNotSupported("the double integral is a delta sum for CW drives")
    x = pulse.gamma * float(tau)
    cut = pulse.spectral_cutoff(1e-14) + 2.0

    def f(nup, nu):
        s = nu + nup
        return nu * nup * float(np.imag(pulse.shape_freq(s) * np.exp(-1j * s * x)))

    val, err = integrate.dblquad(f, 0.0, cut, 0.0, lambda nu: max(cut - nu, 0.0),
                                 epsabs=1e-15, epsrel=rel_tol)
    if not math.isfinite(val):
        raise NonConvergence("v1 double integral is not finite")
    scale = pulse.amplitude * pulse.gamma**3
    return -12.0 * params.C * params.variance_prefactor * scale * val


# second order -------------------------------------------------------------

@dataclass(frozen=True)
class V2Quadrature:
    """Gauss-Legendre grid on [0, wmax] (units of gamma) shared by all three triple integrals."""

    wmax: float | None = None
    panel_width: float = 0.5
    order: int = 10
    budget: int = 50_000_000

    def refined(self, factor: int = 2) -> "V2Quadrature":
        return V2Quadrature(self.wmax, self.panel_width / factor, self.order, self.budget)


DEFAULT_V2 = V2Quadrature()


class V2Terms(NamedTuple):
    v2_1: float
    v2_2: float
    v2_3: float
    total: float


class _V2Cache:
    """Frequency-pair matrices reused for every tau.

    G[i, j] = int_0^inf dv v E*(w_i + v) E(v + w_j)
    H[i, j] = int_0^inf dv v E(w_i - v) E(v + w_j)
    K[i, j] = int_R dv v E(w_i + v) E*(v - w_j), split at v = 0
    """

    def __init__(self, pulse: DrivePulse, quad: V2Quadrature):
        e = pulse.shape_freq
        wmax = quad.wmax
        if wmax is None:
            wmax = max(24.0, 1.4 * pulse.spectral_cutoff(1e-12))
        panels = max(1, int(math.ceil(wmax / quad.panel_width)))
        w, ww = gauss_legendre_panels(np.linspace(0.0, wmax, panels + 1), quad.order)
        mu, mw = gauss_legendre_panels(np.linspace(0.0, 2 * wmax, 2 * panels + 1), quad.order)
        M, Mu = len(w), len(mu)
        if 3 * M * M + 2 * M * Mu > quad.budget:
            raise CostBudgetExceeded(f"V2 grid needs {3 * M * M + 2 * M * Mu} samples")
        A = e(w[:, None] + w[None, :])          # E(w_i + v_k)
        B = e(w[:, None] - w[None, :])          # E(w_i - v_k)
        self.G = (np.conj(A) * (w * ww)) @ A.T
        self.H = (B * (w * ww)) @ A.T
        P = e(w[:, None] + mu[None, :])
        Q = e(w[:, None] - mu[None, :])
        # E*(v - w_j) = E(w_j - v) for real fields
        self.K = (P * (mu * mw)) @ Q.T - (Q * (mu * mw)) @ P.T
        self.w = w
        self.weight = w * ww

    def terms(self, x: np.ndarray) -> np.ndarray:
        """Dimensionless (v1, v2, v3) at gamma*tau = x, shape (len(x), 3)."""
        x = np.atleast_1d(x)
        p = PHASE.factor(self.w[None, :], x[:, None])   # i exp(-i w x)
        em = self.weight * (p / 1j)                       # w dw exp(-i w x)
        ep = np.conj(em)                                  # w dw exp(+i w x)
        t1 = np.real(np.einsum("ti,ij,tj->t", ep, self.G, em))
        t2 = 0.5 * np.real(np.einsum("ti,ij,tj->t", em, self.K, em))
        t3 = -np.real(np.einsum("ti,ij,tj->t", em, self.H, em))
        return np.column_stack([t1, t2, t3])


@lru_cache(maxsize=8)
def _cache_for(shape_key: DrivePulse, quad: V2Quadrature) -> _V2Cache:
    return _V2Cache(shape_key, quad)


def _unit_pulse(pulse: DrivePulse) -> DrivePulse:
    return DrivePulse(pulse.shape, 1.0, 1.0, pulse.samples)


def _cw_terms(pulse: DrivePulse, tau) -> np.ndarray:
    # delta-pair reduction: only w = w' = w0 survives in V2_1, V2_2 vanishes
    E0, w0 = pulse.amplitude, pulse.gamma
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    t1 = np.full(tau.shape, abs(E0) ** 2 * w0**4 / 12.0)
    t2 = np.zeros_like(t1)
    t3 = -(w0**4 / 4.0) * np.real(E0**2 * np.exp(-2j * w0 * tau))
    return np.column_stack([t1, t2, t3])


def _v2_raw(pulse: DrivePulse, tau, quad: V2Quadrature) -> np.ndarray:
    """The three integrals in physical units (field^2 * frequency^4), shape (len(tau), 3)."""
    if not pulse.is_pulsed:
        return _cw_terms(pulse, tau)
    cache = _cache_for(_unit_pulse(pulse), quad)
    x = pulse.gamma * np.atleast_1d(np.asarray(tau, dtype=float))
    scale = pulse.amplitude**2 * pulse.gamma**4
    chunks = np.array_split(x, max(1, min(threads(), len(x) // 64)))
    if len(chunks) == 1:
        return scale * cache.terms(x)
    with ThreadPoolExecutor(max_workers=threads()) as pool:
        parts = list(pool.map(cache.terms, chunks))
    return scale * np.vstack(parts)


def v2_prefactor(params: CrystalParams) -> float:
    """hbar C^2 / (2 pi eps0 c0 n A)."""
    return 12.0 * params.C**2 * params.variance_prefactor


def v2_terms(pulse: DrivePulse, params: CrystalParams, tau: float, quad: V2Quadrature = DEFAULT_V2) -> V2Terms:
    """The three second-order integrals at one retarded time and their scaled sum."""
    t = _v2_raw(pulse, [float(tau)], quad)[0]
    return V2Terms(float(t[0]), float(t[1]), float(t[2]), float(v2_prefactor(params) * t.sum()))


# traces ---------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class VarianceTrace:
    tau: np.ndarray
    V1: np.ndarray
    V2: np.ndarray
    V0: float
    gamma: float
    r: float
    drive: str = ""
    parts: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        tau = np.asarray(self.tau, dtype=float)
        if tau.ndim != 1 or np.any(np.diff(tau) <= 0):
            raise ValueError("tau must be strictly increasing")

    @property
    def V(self) -> np.ndarray:
        return self.V1 + self.V2

    def normalized(self) -> np.ndarray:
        """Columns tau*gamma, V1/V0, V2/V0, V/V0."""
        return np.column_stack([self.tau * self.gamma, self.V1 / self.V0, self.V2 / self.V0, self.V / self.V0])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("tau_Gamma,V1_over_V0,V2_over_V0,V_over_V0\n")
            for row in self.normalized():
                fh.write(",".join(f"{v:.12e}" for v in row) + "\n")


def default_tau_grid(pulse: DrivePulse, points: int = 401, half_width: float = 10.0) -> np.ndarray:
    """Symmetric grid in tau reaching ``half_width``/gamma on both sides (several periods for CW)."""
    if not pulse.is_pulsed:
        half_width = max(half_width, 4 * PI)
    return np.linspace(-half_width, half_width, points) / pulse.gamma


def variance_trace(pulse: DrivePulse, params: CrystalParams, taus, quad: V2Quadrature = DEFAULT_V2) -> VarianceTrace:
    taus = np.asarray(taus, dtype=float)
    if taus.ndim != 1 or np.any(np.diff(taus) <= 0):
        raise ValueError("tau grid must be strictly increasing")
    V1 = np.asarray(v1_closed(pulse, params, taus), dtype=float)
    raw = _v2_raw(pulse, taus, quad)
    V2 = v2_prefactor(params) * raw.sum(axis=1)
    r = abs(params.C * pulse.amplitude) * pulse.gamma
    return VarianceTrace(taus, V1, V2, v0(params, pulse.gamma), pulse.gamma, r, pulse.shape, raw)
