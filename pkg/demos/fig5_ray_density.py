"""Density of world lines at the crystal exit for half- and single-cycle drives.

Where the lines bunch, the field is compressed in time. For weak drives the
excess density follows -dE/dtau of the pulse and correlates with the
first-order variance; at the figure strength the bending is nonlinear and
the link is only qualitative. A line
entering exactly at the node of the single-cycle pulse sits on the branch
point of the implicit solution, so that bundle is shifted half a spacing. Run:

    python demos/fig5_ray_density.py
"""

import numpy as np

from squeezelab.drive import DrivePulse
from squeezelab.errors import BranchSingularity
from squeezelab.geodesics import GeodesicParams, launch_grid, ray_density, worldline_bundle, worldline_implicit

from _plot import figure, save

p = GeodesicParams.from_groups(0.49, 12.0)
z = np.linspace(0.0, 1.0, 201)

try:
    worldline_implicit("scp", p, 0.0, z)
except BranchSingularity as exc:
    print(f"launch at the node: {exc}")

profiles = {}
for shape in ("hcp", "scp"):
    for a2 in (0.49, 0.05):
        q = GeodesicParams.from_groups(a2, 12.0)
        bundle = worldline_bundle(shape, q, launch_grid(81, 8.0, q.zeta, avoid_zero=shape == "scp"), z)
        tau, dens = ray_density(bundle)
        u = q.zeta * tau
        pulse = DrivePulse(shape, 1.0, 1.0)
        slope = np.gradient(pulse.shape_time(u), u)
        v1 = pulse.shape_third_derivative(u)
        c_slope = np.corrcoef(dens - 1, -slope)[0, 1]
        c_v1 = np.corrcoef(dens - 1, v1)[0, 1]
        print(f"{shape}, alpha/n^2 = {a2}: density in [{dens.min():.3f}, {dens.max():.3f}]; "
              f"corr with -dE/dtau {c_slope:+.2f}, with V1 {c_v1:+.2f}")
        if a2 == 0.49:
            profiles[shape] = (tau, dens)

fig_ax = figure(figsize=(5, 3.5))
if fig_ax:
    fig, ax = fig_ax
    for shape, (tau, dens) in profiles.items():
        ax.plot(tau, dens, label=shape)
    ax.set_xlabel("exit retarded time (x0 - n x1)")
    ax.set_ylabel("world-line density")
    ax.legend()
    save(fig, "fig5_ray_density.png")
