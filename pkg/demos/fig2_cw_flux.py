"""Photon flux from a crystal driven by a continuous wave at w0.

To second order in the coupling the spectrum is the parabola
C^2 |E0|^2 w (w0 - w): pairs share the drive quantum, nothing comes out at
w0 itself. The fourth-order terms add a weak band between w0 and 2 w0.
A detector integrating over N drive periods sees the parabola smeared by
a sinc^2 window. Run:

    python demos/fig2_cw_flux.py
"""

import numpy as np

from squeezelab.drive import CrystalParams, DrivePulse
from squeezelab.spectra import (
    coupling_from_smallness,
    cw_flux_closed,
    cw_flux_windowed,
    regime_check,
    rho0_omega0_cw,
)

from _plot import figure, save

unit = CrystalParams.with_coupling(1.0)
# the drive strength follows from the quoted smallness factor 0.02
E0 = coupling_from_smallness(0.02)
rep = regime_check(DrivePulse.cw(E0, 1.0), unit)
print(f"|C E0| w0 = {rep.coupling:.5f} -> smallness {rep.smallness_factor:.4f} ({rep.classification})")

norm = rho0_omega0_cw(unit, E0, 1.0)
w = np.linspace(0.01, 2.2, 220)
phi2 = cw_flux_closed(w, unit, E0, 1.0, order=2) / norm
phi4 = cw_flux_closed(w, unit, E0, 1.0, order=4) / norm
win = np.array([cw_flux_windowed(unit, E0, 1.0, 50, x * 50) for x in w]) / norm

print(f"peak at w0/2: {cw_flux_closed(0.5, unit, E0, 1.0) / norm:.6f} (pi^2/4 = {np.pi**2 / 4:.6f})")
print(f"upconverted flux at 3 w0/2: {cw_flux_closed(1.5, unit, E0, 1.0, order=4) / norm:.3e}")
for N in (10, 50, 200):
    m = np.linspace(0.1, 0.9, 9)
    dev = max(abs(cw_flux_windowed(unit, E0, 1.0, N, x * N) - cw_flux_closed(x, unit, E0, 1.0)) for x in m) / norm
    print(f"N = {N:3d}: max deviation from the limit {dev / (np.pi**2 / 4):.3e} of the peak")

fig_ax = figure(figsize=(5, 3.5))
if fig_ax:
    fig, ax = fig_ax
    ax.plot(w, phi2, label="order 2")
    ax.plot(w, phi4, "--", label="order 4")
    ax.plot(w, win, ":", label="N = 50 window")
    ax.set_xlabel("w / w0")
    ax.set_ylabel("flux / (rho0 w0)")
    ax.set_ylim(0, 3)
    ax.legend()
    save(fig, "fig2_cw_flux.png")
