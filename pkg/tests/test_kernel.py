import math

import numpy as np
import pytest

from squeezelab.drive import DrivePulse
from squeezelab.errors import CWNotSupported
from squeezelab.kernel import (
    SignedFrequencyGrid,
    SqueezeKernel,
    build_xi,
    check_bogoliubov_symmetry,
    expand_bogoliubov,
    xi_element,
)


def test_grid_is_mirror_symmetric_and_avoids_zero():
    g = SignedFrequencyGrid(4.0, 16)
    assert np.all(g.points != 0)
    assert np.allclose(g.points[::-1], -g.points, atol=0)
    assert g.positive.sum() == 8
    with pytest.raises(ValueError):
        SignedFrequencyGrid(4.0, 7)


def test_xi_element_examples(unit_params):
    E0, G = 0.8, 1.0
    hcp = DrivePulse.hcp(E0, G)
    w = 1.7
    assert xi_element(hcp, unit_params, w, w) == pytest.approx(1j * w * E0 / (2 * G), rel=1e-15)
    assert xi_element(DrivePulse.scp(E0, G), unit_params, w, w) == 0
    expected = 1j * (-1.0) * G * E0 / (2 * G) / math.cosh(math.pi)
    assert xi_element(hcp, unit_params, G, -G) == pytest.approx(expected, rel=1e-14)


def test_build_xi_entries_match_continuum_kernel(unit_params):
    g = SignedFrequencyGrid(6.0, 24)
    p = DrivePulse.scp(0.4, 1.3)
    K = build_xi(p, unit_params, g)
    w = g.points
    ref = xi_element(p, unit_params, w[:, None], w[None, :]) * g.step
    assert np.allclose(K.xi, ref, rtol=1e-14, atol=0)
    with pytest.raises(CWNotSupported):
        build_xi(DrivePulse.cw(), unit_params, g)


def test_kernel_is_linear_in_amplitude(unit_params):
    g = SignedFrequencyGrid(8.0, 32)
    a = build_xi(DrivePulse.hcp(0.3), unit_params, g).xi
    b = build_xi(DrivePulse.hcp(0.9), unit_params, g).xi
    assert np.allclose(3 * a, b, rtol=1e-14, atol=0)


def test_kernel_reality_structure(unit_params):
    g = SignedFrequencyGrid(8.0, 32)
    for p in (DrivePulse.hcp(0.5), DrivePulse.scp(0.5)):
        xi = build_xi(p, unit_params, g).xi
        assert np.allclose(xi[::-1, ::-1], np.conj(xi), atol=1e-16)


def test_block_round_trip(unit_params):
    g = SignedFrequencyGrid(8.0, 32)
    K = build_xi(DrivePulse.scp(0.5), unit_params, g)
    again = SqueezeKernel.assemble(g, K.blocks())
    assert np.array_equal(again.xi, K.xi)


def test_expansion_low_orders(unit_params):
    g = SignedFrequencyGrid(8.0, 32)
    K = build_xi(DrivePulse.hcp(0.5), unit_params, g)
    assert np.array_equal(expand_bogoliubov(K, 1.0, 0).U, np.eye(32))
    assert np.allclose(expand_bogoliubov(K, 1.0, 1).U, np.eye(32) + K.xi, atol=0)
    half = expand_bogoliubov(K, 0.5, 2).U
    assert np.allclose(half, np.eye(32) + 0.5 * K.xi + 0.125 * K.xi @ K.xi, atol=1e-15)
    with pytest.raises(ValueError):
        expand_bogoliubov(K, 1.5, 1)


def test_remainder_bounded_by_next_term(unit_params):
    g = SignedFrequencyGrid(16.0, 256)
    K = build_xi(DrivePulse.hcp(0.1), unit_params, g)
    u8 = expand_bogoliubov(K, 1.0, 8).U
    u9 = expand_bogoliubov(K, 1.0, 9).U
    u30 = expand_bogoliubov(K, 1.0, 30).U
    norm = np.linalg.norm(K.xi, 2)
    assert np.linalg.norm(u30 - u8, 2) <= 1.1 * norm**9 / math.factorial(9)
    assert np.linalg.norm(u30 - u9, 2) < np.linalg.norm(u30 - u8, 2)


def test_identity_map_residuals_vanish(unit_params):
    g = SignedFrequencyGrid(8.0, 32)
    K = build_xi(DrivePulse.hcp(0.0), unit_params, g)
    rep = check_bogoliubov_symmetry(expand_bogoliubov(K, 1.0, 5))
    assert rep.reality_residual == 0.0
    assert rep.symplectic_residual == 0.0


def test_order_one_residual_scales_quadratically(unit_params):
    g = SignedFrequencyGrid(16.0, 256)
    res = []
    for E0 in (0.2, 0.1):
        K = build_xi(DrivePulse.scp(E0), unit_params, g)
        res.append(check_bogoliubov_symmetry(expand_bogoliubov(K, 1.0, 1)).symplectic_residual)
    assert res[0] / res[1] == pytest.approx(4.0, rel=1e-10)


def test_full_order_map_is_symplectic(unit_params):
    g = SignedFrequencyGrid(16.0, 512)
    K = build_xi(DrivePulse.hcp(0.1), unit_params, g)
    rep = check_bogoliubov_symmetry(expand_bogoliubov(K, 1.0, 24))
    assert rep.symplectic_residual < 1e-8
    assert rep.reality_residual < 1e-12
