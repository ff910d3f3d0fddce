"""Spectral photon density behind half- and single-cycle pulses.

Both spectra fall off as exp(-pi w / Gamma) at high frequency. Read as a
Boltzmann factor this is a temperature of hbar Gamma / (pi k_B), half of
the diamond temperature of an acceleration lasting 1/Gamma. Run:

    python demos/fig3_spectra.py
"""

import math

import numpy as np

from squeezelab.analysis import effective_temperature_from_spectrum
from squeezelab.drive import CrystalParams, DrivePulse
from squeezelab.spectra import Spectrum, rho0_pulsed, spd_hcp_closed, spd_order2_numeric, spd_scp_closed

from _plot import figure, save

unit = CrystalParams.with_coupling(1.0)
w = np.linspace(0.0, 12.0, 241)
rho0 = rho0_pulsed(unit, 1.0, 1.0)

curves = {}
for shape, closed in (("hcp", spd_hcp_closed), ("scp", spd_scp_closed)):
    exact = closed(w, unit, 1.0, 1.0)
    oracle = spd_order2_numeric(DrivePulse(shape, 1.0, 1.0), unit, w[1:])
    worst = np.max(np.abs(oracle / exact[1:] - 1))
    tail = effective_temperature_from_spectrum(Spectrum(w[1:], exact[1:]), 1.0, (5.0, 12.0))
    print(f"{shape}: closed vs quadrature {worst:.1e}; tail decay {tail.decay_rate / math.pi:.6f} pi/Gamma; "
          f"T_eff / T_D = {tail.ratio_tail_to_diamond:.4f}")
    curves[shape] = exact / rho0

fig_ax = figure(figsize=(5, 3.5))
if fig_ax:
    fig, ax = fig_ax
    for shape, y in curves.items():
        ax.semilogy(w[1:], y[1:], label=shape)
    ax.semilogy(w[20:], 0.5 * w[20:] * np.exp(-math.pi * w[20:]), "k:", label="~ exp(-pi w/Gamma)")
    ax.set_xlabel("w / Gamma")
    ax.set_ylabel("rho / rho0")
    ax.legend()
    save(fig, "fig3_spectra.png")
