"""Discretized squeezing kernel and its truncated-exponential Bogoliubov map."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .drive import CrystalParams, DrivePulse
from .errors import CWNotSupported


@dataclass(frozen=True)
class SignedFrequencyGrid:
    """Uniform midpoint grid on [-omega_max, omega_max] that never contains zero.

    ``points[k] = (k - N/2 + 1/2) * step``, so ``points[N-1-k] == -points[k]``.
    """

    omega_max: float
    N: int

    def __post_init__(self):
        if self.N < 4 or self.N % 2:
            raise ValueError("N must be an even count >= 4")
        if not self.omega_max > 0:
            raise ValueError("omega_max must be positive")

    @property
    def step(self) -> float:
        return 2.0 * self.omega_max / self.N

    @property
    def points(self) -> np.ndarray:
        return (np.arange(self.N) - self.N / 2 + 0.5) * self.step

    @property
    def positive(self) -> np.ndarray:
        """Boolean mask of positive frequencies (the upper half)."""
        return np.arange(self.N) >= self.N // 2

    def refined(self) -> "SignedFrequencyGrid":
        return SignedFrequencyGrid(self.omega_max, 2 * self.N)


@dataclass(frozen=True, eq=False)
class SqueezeKernel:
    grid: SignedFrequencyGrid
    xi: np.ndarray

    def blocks(self) -> dict:
        """Split into frequency-conversion ('pp', 'nn') and down-conversion ('pn', 'np') blocks."""
        h = self.grid.N // 2
        neg, pos = slice(0, h), slice(h, None)
        return {
            "pp": self.xi[pos, pos].copy(),
            "pn": self.xi[pos, neg].copy(),
            "np": self.xi[neg, pos].copy(),
            "nn": self.xi[neg, neg].copy(),
        }

    @staticmethod
    def assemble(grid: SignedFrequencyGrid, blocks: dict) -> "SqueezeKernel":
        top = np.hstack([blocks["nn"], blocks["np"]])
        bottom = np.hstack([blocks["pn"], blocks["pp"]])
        return SqueezeKernel(grid, np.vstack([top, bottom]))

    def scaled(self, factor) -> "SqueezeKernel":
        return SqueezeKernel(self.grid, self.xi * factor)


@dataclass(frozen=True, eq=False)
class BogoliubovMap:
    grid: SignedFrequencyGrid
    U: np.ndarray
    order: int
    z: float


def xi_element(pulse: DrivePulse, params: CrystalParams, omega, omega_p):
    """Continuum kernel i C sign(w') sqrt|w w'| E(w - w')."""
    if not pulse.is_pulsed:
        raise CWNotSupported("the CW kernel is a sum of deltas; use the closed CW expressions")
    omega = np.asarray(omega, dtype=float)
    omega_p = np.asarray(omega_p, dtype=float)
    return (
        1j * params.C * np.sign(omega_p) * np.sqrt(np.abs(omega * omega_p))
        * pulse.field_freq(omega - omega_p)
    )


def build_xi(pulse: DrivePulse, params: CrystalParams, grid: SignedFrequencyGrid) -> SqueezeKernel:
    """Kernel matrix with entries xi_element(w_k, w_l) * step (rectangle rule)."""
    if not pulse.is_pulsed:
        raise CWNotSupported("build_xi needs a pulsed drive")
    w = grid.points
    N = grid.N
    # w_k - w_l = (k - l) * step: only 2N-1 distinct spectral samples are needed
    diffs = np.arange(-(N - 1), N) * grid.step
    spectrum = np.asarray(pulse.field_freq(diffs), dtype=complex)
    idx = np.arange(N)[:, None] - np.arange(N)[None, :] + (N - 1)
    E = spectrum[idx]
    root = np.sqrt(np.abs(np.outer(w, w)))
    xi = 1j * params.C * np.sign(w)[None, :] * root * E * grid.step
    return SqueezeKernel(grid, xi)


def expand_bogoliubov(kernel: SqueezeKernel, z: float = 1.0, order: int = 1) -> BogoliubovMap:
    """U = sum_{m=0}^{order} (z Xi)^m / m!, evaluated by Horner's scheme."""
    if order < 0:
        raise ValueError("order must be non-negative")
    if not 0.0 <= z <= 1.0:
        raise ValueError("z must lie in [0, 1]")
    N = kernel.grid.N
    X = z * kernel.xi
    U = np.eye(N, dtype=complex)
    for m in range(order, 0, -1):
        U = np.eye(N, dtype=complex) + (X @ U) / m
    return BogoliubovMap(kernel.grid, U, order, z)


@dataclass(frozen=True)
class SymmetryReport:
    reality_residual: float
    symplectic_residual: float


def check_bogoliubov_symmetry(bmap: BogoliubovMap) -> SymmetryReport:
    """Residuals of U(-w,-w') = U(w,w')* and of U S U^dagger = S with S = diag(sign w)."""
    U = bmap.U
    reality = float(np.max(np.abs(U[::-1, ::-1] - np.conj(U))))
    s = np.sign(bmap.grid.points)
    sympl = (U * s[None, :]) @ U.conj().T - np.diag(s)
    return SymmetryReport(reality, float(np.max(np.abs(sympl))))
