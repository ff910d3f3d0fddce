"""Coherent mid-infrared driving fields and crystal constants.

Fourier convention used throughout the package::

    E(w)   = 1/(2 pi) * int E(t) exp(+i w t) dt
    E(t)   = int E(w) exp(-i w t) dw

With it the half-cycle pulse E0 sech(G t) has E(w) = E0/(2G) sech(pi w / 2G).

Every pulse is stored as an amplitude ``E0``, a rate ``gamma`` and a
dimensionless shape: ``field_time(t) = E0 * shape_time(gamma * t)`` and
``field_freq(w) = E0 / gamma * shape_freq(w / gamma)``. For CW drives
``gamma`` holds the carrier frequency w0.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy import constants
from scipy.interpolate import CubicSpline

from .errors import CWSpectrumRequested, NotDifferentiable
from .numerics import envelope_cutoff, gauss_legendre_panels

SHAPES = ("cw", "hcp", "scp", "tabulated")

C0 = constants.c
HBAR = constants.hbar
EPS0 = constants.epsilon_0
KB = constants.k


def _sech(x):
    # 1/cosh without overflow warnings for |x| > 710
    x = np.abs(np.asarray(x, dtype=float))
    e = np.exp(-x)
    return 2.0 * e / (1.0 + e * e)


@dataclass(frozen=True)
class DrivePulse:
    shape: str
    amplitude: complex = 1.0
    gamma: float = 1.0
    samples: tuple = field(default=(), repr=False)

    def __post_init__(self):
        shape = self.shape.lower()
        object.__setattr__(self, "shape", shape)
        if shape not in SHAPES:
            raise ValueError(f"unknown drive shape {self.shape!r}; expected one of {SHAPES}")
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        amp = complex(self.amplitude)
        if shape != "cw":
            if amp.imag != 0.0:
                raise ValueError("complex amplitudes are only supported for CW drives")
            object.__setattr__(self, "amplitude", amp.real)
        else:
            object.__setattr__(self, "amplitude", amp)
        if shape == "tabulated":
            if len(self.samples) < 4:
                raise ValueError("tabulated pulse needs at least 4 samples")
            taus = np.array([s[0] for s in self.samples], dtype=float)
            if np.any(np.diff(taus) <= 0):
                raise ValueError("tabulated samples must be strictly increasing in tau")
        elif self.samples:
            raise ValueError("samples are only meaningful for tabulated pulses")

    # constructors -------------------------------------------------------

    @classmethod
    def hcp(cls, amplitude=1.0, gamma=1.0):
        return cls("hcp", amplitude, gamma)

    @classmethod
    def scp(cls, amplitude=1.0, gamma=1.0):
        return cls("scp", amplitude, gamma)

    @classmethod
    def cw(cls, amplitude=1.0, omega0=1.0):
        return cls("cw", amplitude, omega0)

    @classmethod
    def tabulated(cls, taus, values, amplitude=1.0, gamma=1.0):
        """Pulse from samples of the shape; ``taus`` in units of 1/gamma, values in units of E0."""
        vals = np.asarray(values)
        cast = complex if np.iscomplexobj(vals) else float
        samples = tuple((float(t), cast(v)) for t, v in zip(taus, vals))
        return cls("tabulated", amplitude, gamma, samples)

    @property
    def is_pulsed(self) -> bool:
        return self.shape != "cw"

    @property
    def omega0(self) -> float:
        return self.gamma

    def scaled(self, factor) -> "DrivePulse":
        """Same shape with the amplitude multiplied by ``factor``."""
        return DrivePulse(self.shape, self.amplitude * factor, self.gamma, self.samples)

    # tabulated support ----------------------------------------------------

    @cached_property
    def _spline(self):
        taus = np.array([s[0] for s in self.samples], dtype=float)
        vals = np.array([s[1] for s in self.samples])
        return CubicSpline(taus, vals, bc_type="natural")

    @cached_property
    def _tab_quadrature(self):
        # 4-point Gauss rule on every spline segment: exact for the cubic itself
        taus = self._spline.x
        nodes, weights = gauss_legendre_panels(taus, 4)
        return nodes, weights, self._spline(nodes)

    def _tab_transform(self, nu):
        nodes, weights, vals = self._tab_quadrature
        nu = np.atleast_1d(np.asarray(nu, dtype=float))
        out = np.empty(nu.shape, dtype=complex)
        flat_nu, flat_out = nu.ravel(), out.reshape(-1)
        wv = weights * vals
        for start in range(0, flat_nu.size, 128):
            chunk = flat_nu[start : start + 128]
            phase = np.exp(1j * np.outer(chunk, nodes))
            flat_out[start : start + 128] = phase @ wv
        return out / (2.0 * math.pi)

    @cached_property
    def _tab_cutoff(self):
        # last probe frequency where |E| exceeds 1e-14 of its peak, capped at Nyquist
        dx = float(np.min(np.diff(self._spline.x)))
        nyquist = math.pi / dx
        probe = np.linspace(0.0, nyquist, 4001)
        mag = np.maximum(np.abs(self._tab_transform(probe)), np.abs(self._tab_transform(-probe)))
        above = np.nonzero(mag > 1e-14 * mag.max())[0]
        return float(min(probe[above[-1]] + probe[1], nyquist)) if above.size else probe[1]

    # dimensionless shapes --------------------------------------------------

    def shape_time(self, x):
        x = np.asarray(x, dtype=float)
        if self.shape == "hcp":
            return _sech(x)
        if self.shape == "scp":
            return -x * _sech(x)
        if self.shape == "cw":
            a = self.amplitude / abs(self.amplitude) if self.amplitude != 0 else 1.0
            return 2.0 * np.real(a * np.exp(-1j * x))
        lo, hi = self._spline.x[0], self._spline.x[-1]
        vals = self._spline(x)
        return np.where((x >= lo) & (x <= hi), vals, 0.0)

    def shape_freq(self, nu):
        nu = np.asarray(nu, dtype=float)
        if self.shape == "hcp":
            return 0.5 * _sech(0.5 * math.pi * nu) + 0j
        if self.shape == "scp":
            arg = 0.5 * math.pi * nu
            return (math.pi / 4j) * _sech(arg) * np.tanh(arg)
        if self.shape == "cw":
            raise CWSpectrumRequested(
                "CW drive has no pointwise spectrum; use cw_lines() for its delta components"
            )
        out = self._tab_transform(nu)
        return out.reshape(nu.shape) if nu.ndim else complex(out[0])

    def spectral_envelope(self, nu):
        """Upper bound on |shape_freq(nu)|, non-increasing in |nu|."""
        nu = np.abs(np.asarray(nu, dtype=float))
        if self.shape == "hcp":
            return np.exp(-0.5 * math.pi * nu)
        if self.shape == "scp":
            return 0.5 * math.pi * np.exp(-0.5 * math.pi * nu)
        if self.shape == "cw":
            raise CWSpectrumRequested("CW drive has no spectral envelope")
        peak = float(np.max(np.abs(self._tab_transform(np.linspace(-5, 5, 201)))))
        return np.where(nu <= self._tab_cutoff, 2.0 * peak, 0.0)

    def spectral_cutoff(self, level: float) -> float:
        """|nu| beyond which the dimensionless spectrum stays below ``level``."""
        if self.shape == "tabulated":
            return self._tab_cutoff
        return envelope_cutoff(lambda v: float(self.spectral_envelope(v)), level, start=1.0)

    def shape_third_derivative(self, x):
        x = np.asarray(x, dtype=float)
        if self.shape in ("hcp", "scp"):
            s, t = _sech(x), np.tanh(x)
            f3 = s * (5.0 * t * s * s - t**3)
            if self.shape == "hcp":
                return f3
            f2 = s * (t * t - s * s)
            return -x * f3 - 3.0 * f2
        if self.shape == "cw":
            a = self.amplitude / abs(self.amplitude) if self.amplitude != 0 else 1.0
            return 2.0 * np.real(1j * a * np.exp(-1j * x))
        return self._tab_third_derivative(x)

    def _tab_third_derivative(self, x):
        # spectral route: d^3/dt^3 E = int (-i w)^3 E(w) exp(-i w t) dw
        cut = self._tab_cutoff
        if not math.isfinite(cut) or cut <= 0:
            raise NotDifferentiable("tabulated spectrum has no usable band limit")
        nu, w = gauss_legendre_panels(np.linspace(-cut, cut, 401), 8)
        spec = self._tab_transform(nu) * w * (1j * nu**3)
        xs = np.atleast_1d(x)
        vals = np.array([np.sum(spec * np.exp(-1j * nu * xi)) for xi in xs.ravel()])
        if np.all(np.abs(vals.imag) <= 1e-9 * max(1.0, np.abs(vals).max())):
            vals = vals.real
        vals = vals.reshape(xs.shape)
        return vals if np.ndim(x) else vals.item()

    # physical fields -----------------------------------------------------

    def field_time(self, tau):
        """Real time-domain field E_MIR(tau)."""
        if self.shape == "cw":
            return 2.0 * np.real(self.amplitude * np.exp(-1j * self.gamma * np.asarray(tau, float)))
        return self.amplitude * self.shape_time(self.gamma * np.asarray(tau, dtype=float))

    def field_freq(self, omega):
        """Spectral amplitude E_MIR(omega) at signed angular frequency ``omega``."""
        return self.amplitude / self.gamma * self.shape_freq(np.asarray(omega, dtype=float) / self.gamma)

    def third_derivative(self, tau):
        """d^3 E_MIR / d tau^3."""
        if self.shape == "cw":
            w0 = self.gamma
            return 2.0 * np.real(1j * w0**3 * self.amplitude * np.exp(-1j * w0 * np.asarray(tau, float)))
        return self.amplitude * self.gamma**3 * self.shape_third_derivative(self.gamma * np.asarray(tau, float))

    def cw_lines(self):
        """Delta-line decomposition of a CW spectrum: ((w0, E0), (-w0, E0*))."""
        if self.shape != "cw":
            raise ValueError("cw_lines is only defined for CW drives")
        return ((self.gamma, self.amplitude), (-self.gamma, self.amplitude.conjugate()))


def reality_check(pulse: DrivePulse, probe=None, rtol: float = 1e-10) -> bool:
    """True when E(-w) = E(w)* on a probe grid, i.e. the time-domain field is real."""
    if pulse.shape == "cw":
        (w1, a1), (w2, a2) = pulse.cw_lines()
        return w1 == -w2 and a2 == a1.conjugate()
    if probe is None:
        probe = np.linspace(0.05, 6.0, 60) * pulse.gamma
    probe = np.asarray(probe, dtype=float)
    pos = pulse.field_freq(probe)
    neg = pulse.field_freq(-probe)
    scale = max(float(np.max(np.abs(pos))), float(np.max(np.abs(neg))), 1e-300)
    return bool(np.max(np.abs(neg - np.conj(pos))) <= rtol * scale)


def load_tabulated_csv(path, amplitude=1.0, gamma=1.0) -> DrivePulse:
    """Read a ``tau,field`` CSV (tau in 1/gamma, field in E0) into a tabulated pulse."""
    with open(Path(path), newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader)]
        if header != ["tau", "field"]:
            raise ValueError(f"expected header 'tau,field', got {','.join(header)!r}")
        rows = [(float(r[0]), complex(r[1].strip().replace(" ", "")) if "j" in r[1] else float(r[1]))
                for r in reader if r]
    taus, vals = zip(*rows)
    return DrivePulse.tabulated(taus, vals, amplitude, gamma)


def write_tabulated_csv(pulse: DrivePulse, path) -> None:
    with open(Path(path), "w", newline="") as fh:
        fh.write("tau,field\n")
        for tau, val in pulse.samples:
            fh.write(f"{tau:.12e},{val:.12e}\n" if not isinstance(val, complex) else f"{tau:.12e},{val}\n")


@dataclass(frozen=True)
class CrystalParams:
    """Thin chi(2) crystal: nonlinear coefficient d (m/V), index n, thickness L (m), area A (m^2)."""

    d: float
    n: float
    L: float
    A: float = 1.0
    c0: float = C0
    hbar: float = HBAR
    eps0: float = EPS0

    def __post_init__(self):
        for name in ("d", "n", "L", "A", "c0", "hbar", "eps0"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def with_coupling(cls, C: float, n: float = 1.0, L: float = 1.0, A: float = 1.0) -> "CrystalParams":
        """Crystal whose coupling C = d L/(n c0) equals ``C``."""
        return cls(d=C * n * C0 / L, n=n, L=L, A=A)

    @property
    def C(self) -> float:
        return self.d * self.L / (self.n * self.c0)

    def alpha(self, E0) -> float:
        return self.d * abs(E0)

    def zeta(self, gamma) -> float:
        return gamma * self.L / self.c0

    def r(self, E0, gamma) -> float:
        """Squeezing strength |alpha| zeta / n, identical to |C E0| gamma."""
        return self.alpha(E0) * self.zeta(gamma) / self.n

    @property
    def variance_prefactor(self) -> float:
        """hbar / (24 pi eps0 c0 n A); V0 = this * gamma**2."""
        return self.hbar / (24.0 * math.pi * self.eps0 * self.c0 * self.n * self.A)
