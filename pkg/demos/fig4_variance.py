"""Normally ordered field variance behind the crystal.

The first-order term follows the third derivative of the drive and averages
to zero; the second-order term makes it dip below the vacuum level, the
signature of squeezing. Strengths r = |C E0| Gamma match the figure:
0.07 (CW), 0.21 (half cycle), 1.54 (single cycle). Run:

    python demos/fig4_variance.py
"""

import numpy as np

from squeezelab.drive import CrystalParams, DrivePulse
from squeezelab.variance import default_tau_grid, variance_trace

from _plot import figure, save

unit = CrystalParams.with_coupling(1.0)
traces = {}
for shape, r in (("cw", 0.07), ("hcp", 0.21), ("scp", 1.54)):
    pulse = DrivePulse(shape, r, 1.0)
    half = 4 * np.pi if shape == "cw" else 10.0
    tr = variance_trace(pulse, unit, default_tau_grid(pulse, 401, half))
    data = tr.normalized()
    i = int(np.argmin(data[:, 3]))
    print(f"{shape}: r = {r}, min V/V0 = {data[i, 3]:.4f} at tau Gamma = {data[i, 0]:.3f}, "
          f"max |V1|/V0 = {np.max(np.abs(data[:, 1])):.4f}")
    traces[shape] = data

fig_ax = figure(3, 1, figsize=(5, 7))
if fig_ax:
    fig, axes = fig_ax
    for ax, (shape, d) in zip(axes, traces.items()):
        ax.plot(d[:, 0], d[:, 1], label="V1")
        ax.plot(d[:, 0], d[:, 3], label="V1 + V2")
        ax.axhline(0, color="0.5", lw=0.5)
        ax.set_title(shape)
        ax.set_ylabel("V / V0")
    axes[-1].set_xlabel("tau Gamma")
    axes[0].legend()
    save(fig, "fig4_variance.png")
