import math
from pathlib import Path

import numpy as np
import pytest
from scipy.optimize import brentq

from squeezelab.errors import BranchSingularity, DomainError, EmptyBundle
from squeezelab.geodesics import (
    GeodesicParams,
    PerturbationField,
    launch_constant,
    launch_grid,
    null_geodesic,
    ray_density,
    worldline_bundle,
    worldline_implicit,
    worldline_implicit_hcp,
    worldline_implicit_scp,
    worldline_ode,
    write_bundle_csv,
)
from squeezelab.numerics import chi

GOLDEN = Path(__file__).parent / "golden"
FIG = GeodesicParams.from_groups(0.49, 12.0)
Z = np.linspace(0.0, 1.0, 201)


def test_parameter_groups():
    p = GeodesicParams.from_groups(0.49, 12.0, n=3.0)
    assert p.alpha / p.n**2 == pytest.approx(0.49)
    assert p.n * p.zeta == pytest.approx(12.0)
    with pytest.raises(DomainError):
        GeodesicParams(1.0, 2.0, 0.0)


def test_field_reduces_to_background_without_drive():
    f = PerturbationField(GeodesicParams(0.0, 1.7, 3.0), "scp")
    x0 = np.linspace(-1, 2, 7)
    assert np.allclose(f.h(x0, 0.3), 1.7**2 - 1, atol=0)


@pytest.mark.parametrize("shape", ["hcp", "scp"])
def test_field_derivatives(shape):
    f = PerturbationField(FIG, shape)
    x0, x1, h = 0.37, 0.21, 1e-6
    d0 = (f.h(x0 + h, x1) - f.h(x0 - h, x1)) / (2 * h)
    d1 = (f.h(x0, x1 + h) - f.h(x0, x1 - h)) / (2 * h)
    assert f.dh0(x0, x1) == pytest.approx(d0, rel=1e-7)
    assert f.dh1(x0, x1) == pytest.approx(d1, rel=1e-7)


def test_flat_world_lines_are_straight():
    flat = GeodesicParams(0.0, FIG.n, FIG.zeta)
    for shape in ("hcp", "scp"):
        for wl in (worldline_implicit(shape, flat, 0.3, Z), worldline_ode(shape, flat, 0.3, Z)):
            assert np.allclose(wl.x0, 0.3 + flat.n * Z, rtol=0, atol=1e-12)


def test_slow_drive_slope():
    slow = GeodesicParams(FIG.alpha, FIG.n, 1e-3)
    wl = worldline_implicit_hcp(slow, 0.0, Z)
    slope = np.diff(wl.x0) / np.diff(wl.x1)
    assert np.max(np.abs(slope - (slow.n + slow.alpha / slow.n))) < 1e-4


def test_zero_constant_line_against_dense_root_solve():
    wl = worldline_implicit_hcp(FIG, 0.0, Z)
    a = FIG.alpha * FIG.zeta / FIG.n
    for z, x0 in zip(Z[::20], wl.x0[::20]):
        ref = brentq(lambda t: a * z - math.sinh(FIG.zeta * (t - FIG.n * z)), -5, 5, xtol=1e-14)
        assert x0 == pytest.approx(ref, abs=1e-12)
    assert np.max(np.abs(wl.residual())) < 1e-8


@pytest.mark.parametrize("shape", ["hcp", "scp"])
def test_implicit_matches_ode(shape):
    for l in np.linspace(-0.9, 0.9, 10):
        a = worldline_implicit(shape, FIG, float(l), Z)
        b = worldline_ode(shape, FIG, float(l), Z)
        assert np.max(np.abs(a.x0 - b.x0)) < 1e-7
        assert np.max(np.abs(b.residual())) < 1e-6 * max(1.0, abs(b.constant))


def test_scp_constant_normalizations():
    wl = worldline_implicit("scp", FIG, 0.2, Z)
    assert wl.constant == pytest.approx(chi(FIG.zeta * 0.2))
    assert wl.constant_rescaled == pytest.approx(FIG.n * wl.constant / FIG.zeta)


def test_scp_branch_singularity():
    with pytest.raises(BranchSingularity):
        launch_constant("scp", FIG, 0.0)
    # a constant below Chi at the smallest allowed argument is unreachable
    with pytest.raises(BranchSingularity):
        worldline_implicit_scp(FIG, float(chi(1e-12)), Z)


def test_scp_far_from_node_slope_tends_to_n():
    devs = []
    for l in (1.5, 3.0):
        wl = worldline_implicit("scp", FIG, l, Z)
        devs.append(np.max(np.abs(np.diff(wl.x0) / np.diff(wl.x1) - FIG.n)))
    assert devs[1] < 1e-6 and devs[1] < 1e-3 * devs[0]


def test_world_lines_monotone_and_inside_crystal():
    for shape in ("hcp", "scp"):
        for wl in worldline_bundle(shape, FIG, launch_grid(9, 6.0, FIG.zeta, avoid_zero=True), Z):
            assert np.all(np.diff(wl.x0) > 0)
            assert wl.x1.min() == 0.0 and wl.x1.max() == 1.0


def test_curvature_confined_to_diamond():
    for l in (-1.5, -0.2, 0.4, 2.0):
        wl = worldline_implicit("hcp", FIG, l, Z)
        u = FIG.zeta * (wl.x0 - FIG.n * wl.x1)
        curv = np.abs(np.diff(wl.x0, 2))
        outside = np.abs(u[1:-1]) > 10
        if np.any(outside):
            assert np.max(curv[outside]) < 1e-8


@pytest.mark.parametrize("shape", ["hcp", "scp"])
def test_full_null_geodesic_conserves_norm(shape):
    sol = null_geodesic(shape, FIG, 0.1)
    assert np.max(np.abs(sol.null_residual())) < 1e-10
    assert sol.worldline.x1[-1] == pytest.approx(1.0, abs=1e-12)


def test_ray_density_flat_and_errors():
    flat = GeodesicParams(0.0, FIG.n, FIG.zeta)
    bundle = worldline_bundle("hcp", flat, launch_grid(11, 6.0, flat.zeta), Z)
    _, dens = ray_density(bundle)
    assert np.allclose(dens, 1.0, atol=1e-12)
    with pytest.raises(EmptyBundle):
        ray_density(bundle[:1])


def test_ray_density_stable_under_bundle_doubling():
    a_tau, a = ray_density(worldline_bundle("hcp", FIG, launch_grid(41, 8.0, FIG.zeta), Z))
    b_tau, b = ray_density(worldline_bundle("hcp", FIG, launch_grid(81, 8.0, FIG.zeta), Z))
    assert np.max(np.abs(np.interp(a_tau, b_tau, b) - a)) < 1 / math.sqrt(41)
    assert np.max(np.abs(a - 1)) > 0.05


@pytest.mark.parametrize("shape", ["hcp", "scp"])
def test_golden_bundles(shape, tmp_path):
    p = GeodesicParams.from_groups(0.49, 12.0, 2.0)
    bundle = worldline_bundle(shape, p, launch_grid(21, 8.0, p.zeta, avoid_zero=shape == "scp"), Z)
    path = tmp_path / "b.csv"
    write_bundle_csv(bundle, path)
    got = np.loadtxt(path, delimiter=",", skiprows=1)
    gold = np.loadtxt(GOLDEN / f"worldlines_{shape}.csv", delimiter=",", skiprows=1)
    assert np.allclose(got, gold, rtol=1e-10, atol=1e-11)
    tau, dens = ray_density(bundle)
    gd = np.loadtxt(GOLDEN / f"worldlines_{shape}.csv.density.csv", delimiter=",", skiprows=1)
    assert np.allclose(np.column_stack([tau, dens]), gd, rtol=1e-9, atol=1e-11)
