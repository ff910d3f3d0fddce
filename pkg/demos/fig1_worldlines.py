"""World lines of field modes crossing a crystal driven by a half-cycle pulse.

Without the drive every mode travels on a straight line of slope n in the
(x1 = z/L, x0 = c0 t/L) plane. The pulse bends the lines only where the
retarded time x0 - n x1 sits inside the pulse, so the acceleration is
confined to a diamond-shaped region. Run from the repository root:

    python demos/fig1_worldlines.py
"""

import numpy as np

from squeezelab.geodesics import GeodesicParams, launch_grid, worldline_bundle, worldline_implicit_hcp, worldline_ode

from _plot import figure, save

p = GeodesicParams.from_groups(alpha_over_n2=0.49, n_zeta=12.0)
z = np.linspace(0.0, 1.0, 201)

# the highlighted line of the figure has C1 = 0, i.e. it enters at the pulse peak
central = worldline_implicit_hcp(p, 0.0, z)
slope_in = np.diff(central.x0[:2])[0] / np.diff(central.x1[:2])[0]
print(f"alpha = {p.alpha:.3f}, zeta = {p.zeta:.3f}, n = {p.n}")
print(f"C1 = 0 line: entry slope {slope_in:.4f}, vacuum slope {p.n}, peak slope n + alpha/n = {p.n + p.alpha / p.n:.4f}")

# the same lines from direct integration of the reduced ray equation
launches = launch_grid(21, 8.0, p.zeta)
bundle = worldline_bundle("hcp", p, launches, z)
check = worldline_bundle("hcp", p, launches, z, method="ode")
dev = max(np.max(np.abs(a.x0 - b.x0)) for a, b in zip(bundle, check))
print(f"implicit vs integrated world lines: max |dx0| = {dev:.2e}")

fig_ax = figure(figsize=(4.5, 5))
if fig_ax:
    fig, ax = fig_ax
    for wl in bundle:
        ax.plot(wl.x1, wl.x0, color="0.6", lw=0.7)
    ax.plot(central.x1, central.x0, color="purple", lw=2, label="C1 = 0")
    ax.set_xlabel("z / L")
    ax.set_ylabel("c0 t / L")
    ax.legend()
    save(fig, "fig1_worldlines.png")
