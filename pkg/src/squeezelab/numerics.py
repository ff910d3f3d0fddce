"""Shared numerical primitives: quadrature, Chi, root finding and tail regression."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize

from .errors import (
    DomainError,
    InsufficientData,
    NoSignChange,
    NonConvergence,
    NonPositiveSample,
)

EULER_GAMMA = 0.57721566490153286061

# cosh(x)/x overflows a double just above this
_CHI_OVERFLOW = 709.0


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and truncation for :func:`integrate_1d`.

    ``cutoff`` replaces an infinite endpoint; callers derive it from the
    analytic envelope of their integrand (see :func:`envelope_cutoff`).
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 500
    cutoff: float = math.inf

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if not self.cutoff > 0:
            raise ValueError("cutoff must be positive")

    def with_cutoff(self, cutoff: float) -> "QuadratureSpec":
        return replace(self, cutoff=cutoff)


DEFAULT_QUADRATURE = QuadratureSpec()


def integrate_1d(
    f: Callable[[float], float],
    interval: tuple[float, float],
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    points: Sequence[float] | None = None,
) -> float:
    """Adaptive Gauss-Kronrod integral of a real function.

    Infinite endpoints are replaced by ``±spec.cutoff`` when the cutoff is
    finite. ``points`` are interior breakpoints (kinks, sign changes).

    Raises:
        NonConvergence: the subdivision budget was exhausted or the error
            estimate exceeds ``max(rel_tol*|I|, abs_tol)``.
    """
    a, b = float(interval[0]), float(interval[1])
    if a == b:
        return 0.0
    if math.isinf(a) and math.isfinite(spec.cutoff):
        a = -spec.cutoff if a < 0 else spec.cutoff
    if math.isinf(b) and math.isfinite(spec.cutoff):
        b = spec.cutoff if b > 0 else -spec.cutoff
    if a >= b and math.isfinite(a) and math.isfinite(b):
        # truncation swallowed the whole interval
        return 0.0

    kwargs = dict(epsabs=spec.abs_tol, epsrel=spec.rel_tol, limit=spec.max_subdivisions)
    if points is not None and math.isfinite(a) and math.isfinite(b):
        inner = sorted(p for p in points if a < p < b)
        if inner:
            kwargs["points"] = inner
            kwargs["limit"] = max(spec.max_subdivisions, 2 * len(inner) + 50)

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, err = integrate.quad(f, a, b, **kwargs)
        except integrate.IntegrationWarning as exc:
            raise NonConvergence(f"quadrature on [{a}, {b}] failed: {exc}") from exc

    if not math.isfinite(value):
        raise NonConvergence(f"non-finite quadrature result on [{a}, {b}]")
    if err > max(spec.rel_tol * abs(value), spec.abs_tol):
        raise NonConvergence(
            f"error estimate {err:.3e} above tolerance for value {value:.6e} on [{a}, {b}]"
        )
    return value


def envelope_cutoff(envelope: Callable[[float], float], level: float, start: float = 1.0) -> float:
    """Smallest x (to bisection accuracy) beyond which ``envelope`` stays below ``level``.

    ``envelope`` must be non-increasing for x >= start.
    """
    if level <= 0:
        raise ValueError("level must be positive")
    lo = max(float(start), 1e-12)
    if envelope(lo) <= level:
        return lo
    hi = 2.0 * lo
    while envelope(hi) > level:
        lo, hi = hi, 2.0 * hi
        if hi > 1e12:
            raise NonConvergence("envelope does not decay below requested level")
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if envelope(mid) > level:
            lo = mid
        else:
            hi = mid
    return hi


@lru_cache(maxsize=32)
def _legendre(order: int):
    return np.polynomial.legendre.leggauss(order)


def gauss_legendre_panels(edges, order: int = 8) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on consecutive panels."""
    x, w = _legendre(order)
    e = np.asarray(edges, dtype=float)
    h = np.diff(e)
    nodes = (h[:, None] * (x + 1.0) / 2.0 + e[:-1, None]).ravel()
    weights = (h[:, None] * w / 2.0).ravel()
    return nodes, weights


def _chi_series(x: np.ndarray) -> np.ndarray:
    # gamma + ln x + sum_{k>=1} x^{2k} / (2k (2k)!); every term is positive, so the
    # sum has no cancellation and converges for all x (about x + 20 terms)
    x2 = x * x
    term = np.ones_like(x)
    total = np.zeros_like(x)
    k = 0
    while True:
        k += 1
        term = term * x2 / ((2 * k - 1) * (2 * k))
        contrib = term / (2 * k)
        total += contrib
        if k > 2 and np.all(contrib <= 1e-17 * total):
            break
    return EULER_GAMMA + np.log(x) + total


def chi(x):
    """Hyperbolic cosine integral Chi(x) = gamma + ln x + int_0^x (cosh t - 1)/t dt.

    Accepts a scalar or array; every element must be positive. Returns inf
    where cosh overflows.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError(f"Chi(x) requires x > 0, got min {np.min(arr)}")
    out = np.full(arr.shape, np.inf)
    ok = arr <= _CHI_OVERFLOW
    if np.any(ok):
        out[ok] = _chi_series(arr[ok])
    return float(out) if arr.ndim == 0 else out


@dataclass(frozen=True)
class TailFit:
    """Result of an exponential tail fit y ~ amplitude * w**power * exp(-decay_rate * w)."""

    amplitude: float
    decay_rate: float
    window: tuple[float, float]
    residual_rms: float
    power: float = 0.0

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        return self.amplitude * w**self.power * np.exp(-self.decay_rate * w)


def fit_exponential_tail(samples, window, power: float | None = 0.0) -> TailFit:
    """Least-squares fit of ``ln y`` against ``w`` inside ``window``.

    With the default ``power=0`` this is a straight line on (w, ln y).
    A fixed non-zero ``power`` divides out a known algebraic prefactor
    ``w**power`` first; ``power=None`` fits that exponent as a third
    parameter, i.e. ``ln y = ln A + p ln w - lambda w``.
    """
    data = np.asarray(samples, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise ValueError("samples must be a sequence of (w, y) pairs")
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise ValueError("window must satisfy lo < hi")
    mask = (data[:, 0] >= lo) & (data[:, 0] <= hi)
    w, y = data[mask, 0], data[mask, 1]
    if len(w) < 8:
        raise InsufficientData(f"need at least 8 samples in window, got {len(w)}")
    if np.any(y <= 0):
        raise NonPositiveSample("tail fit requires strictly positive samples")

    logy = np.log(y)
    if power is None:
        if np.any(w <= 0):
            raise DomainError("fitting the power-law prefactor needs w > 0")
        design = np.column_stack([np.ones_like(w), -w, np.log(w)])
    else:
        if power != 0.0:
            logy = logy - power * np.log(w)
        design = np.column_stack([np.ones_like(w), -w])
    coef, *_ = np.linalg.lstsq(design, logy, rcond=None)
    resid = logy - design @ coef
    fitted_power = float(coef[2]) if power is None else float(power)
    return TailFit(
        amplitude=float(np.exp(coef[0])),
        decay_rate=float(coef[1]),
        window=(lo, hi),
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        power=fitted_power,
    )


def solve_monotone_root(g: Callable[[float], float], bracket, tol: float = 1e-12) -> float:
    """Root of ``g`` inside ``bracket`` by Brent's bisection/secant hybrid."""
    a, b = float(bracket[0]), float(bracket[1])
    ga, gb = g(a), g(b)
    if ga == 0.0:
        return a
    if gb == 0.0:
        return b
    if ga * gb > 0:
        raise NoSignChange(f"g({a})={ga:.3e} and g({b})={gb:.3e} have the same sign")
    return float(optimize.brentq(g, a, b, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500))
