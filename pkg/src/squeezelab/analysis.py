"""Finite-lifetime (diamond) and Unruh temperatures, and effective temperatures of SPD tails."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from .drive import C0, HBAR, KB
from .errors import DomainError
from .numerics import fit_exponential_tail
from .spectra import Spectrum


def diamond_temperature(lifetime: float) -> float:
    """T_D = 2 hbar / (pi k_B T) for an acceleration lasting ``lifetime`` seconds."""
    if not lifetime > 0:
        raise DomainError("lifetime must be positive")
    return 2.0 * HBAR / (math.pi * KB * lifetime)


def unruh_temperature(acceleration: float) -> float:
    """T_U = hbar a / (2 pi c0 k_B)."""
    if not acceleration > 0:
        raise DomainError("acceleration must be positive")
    return HBAR * acceleration / (2.0 * math.pi * C0 * KB)


def temperature_profile(T_U: float, T_D: float, t):
    """T(t) = T_U eps / [sqrt(1 + eps^2) - sqrt(1 + eps^2 t^2)] with eps = 2 T_U / T_D, |t| < 1."""
    if not (T_U > 0 and T_D > 0):
        raise DomainError("temperatures must be positive")
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) >= 1.0):
        raise DomainError("the profile is defined for |t| < 1 only")
    eps = 2.0 * T_U / T_D
    e2 = eps * eps
    # difference of square roots rewritten to avoid cancellation at small eps
    denom = e2 * (1.0 - t * t) / (np.sqrt(1.0 + e2) + np.sqrt(1.0 + e2 * t * t))
    out = T_U * eps / denom
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class TemperatureReport:
    T_D: float
    lifetime: float
    decay_rate: float           # tail decay in units of 1/gamma
    T_eff_tail: float
    ratio_tail_to_diamond: float
    tail_power: float = 0.0
    T_U: float = math.nan
    epsilon: float = math.nan

    def profile(self, t):
        if math.isnan(self.T_U):
            raise DomainError("T_U was not supplied")
        return temperature_profile(self.T_U, self.T_D, t)

    def to_text(self) -> str:
        return "".join(f"{k} = {v:.12e}\n" for k, v in asdict(self).items())

    @classmethod
    def from_text(cls, text: str) -> "TemperatureReport":
        names = {f.name for f in fields(cls)}
        vals = {}
        for line in text.splitlines():
            if "=" in line:
                k, v = (s.strip() for s in line.split("=", 1))
                if k in names:
                    vals[k] = float(v)
        return cls(**vals)


def effective_temperature_from_spectrum(spectrum: Spectrum, gamma: float, window=(5.0, 12.0),
                                        power: float | None = None,
                                        acceleration: float | None = None) -> TemperatureReport:
    """Fit the tail of ``spectrum`` in units of omega/gamma and convert the decay to a temperature.

    A decay exp(-lambda omega / gamma) corresponds to hbar/(k_B T) = lambda / gamma. The
    diamond reference uses the lifetime 1/gamma.
    """
    if not gamma > 0:
        raise DomainError("gamma must be positive")
    x = spectrum.omega / gamma if spectrum.normalization == "absolute" else spectrum.omega
    fit = fit_exponential_tail(np.column_stack([x, spectrum.value]), window, power=power)
    if not fit.decay_rate > 0:
        raise DomainError("spectrum tail does not decay")
    T_eff = HBAR * gamma / (KB * fit.decay_rate)
    lifetime = 1.0 / gamma
    T_D = diamond_temperature(lifetime)
    T_U, eps = math.nan, math.nan
    if acceleration is not None:
        T_U = unruh_temperature(acceleration)
        eps = 2.0 * T_U / T_D
    return TemperatureReport(T_D, lifetime, fit.decay_rate, T_eff, T_eff / T_D, fit.power, T_U, eps)
