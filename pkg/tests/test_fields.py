import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from electron_sg.constants import Vec3, constants
from electron_sg.fields import (FieldSingularityError, IdealGradientField, SharpTipField,
                                TwoWireConfig, TwoWireField, UniformField, ZeroField,
                                constant_inhomogeneity_plane, epsilon_profile,
                                inhomogeneity_map, sample, sharp_tip_gradient,
                                two_wire_field, two_wire_gradient, two_wire_gradient_y,
                                two_wire_magnitude)

A = 1e-3
CFG = TwoWireConfig(current=2.0, half_separation=A)


def biot_savart_H(cfg, y, z):
    """Line integral of dH = I dl x r / (4 pi r^3) along both wires (oracle)."""
    total = np.zeros(3)
    for yw, current in ((cfg.half_separation, cfg.current), (-cfg.half_separation, -cfg.current)):
        dy, dz = y - yw, z + cfg.z_offset
        d2 = dy * dy + dz * dz
        integral, _ = quad(lambda s: (s * s + d2) ** -1.5, -np.inf, np.inf, epsabs=0,
                           epsrel=1e-12)
        total += current / (4 * math.pi) * integral * np.array([0.0, -dz, dy])
    return total


@pytest.mark.parametrize("y,z", [(0, 0), (A / 3, 0), (-0.4 * A, 0.3 * A), (0.9 * A, -0.5 * A)])
def test_two_wire_field_matches_biot_savart(y, z):
    H = two_wire_field(CFG, Vec3(0.0, y, z))
    ref = biot_savart_H(CFG, y, z)
    assert H.x == 0.0
    np.testing.assert_allclose(H.as_array(), ref, rtol=1e-9, atol=1e-12 * np.abs(ref).max())
    assert two_wire_magnitude(CFG, y, z) == pytest.approx(H.norm(), rel=1e-9)


def test_on_axis_magnitude_and_direction():
    # y = 0: r1 = r2 = r, |H| = (I/pi) a / r^2, field along z
    for z in (-0.5 * A, 0.0, 0.7 * A):
        r2 = A * A + (z + CFG.z_offset) ** 2
        H = two_wire_field(CFG, Vec3(0, 0, z))
        assert H.norm() == pytest.approx(CFG.current / math.pi * A / r2, rel=1e-12)
        assert abs(H.y) <= 1e-12 * H.norm()


def test_midpoint_between_wires():
    H = two_wire_field(CFG, Vec3(0, 0, -CFG.z_offset))
    assert H.y == 0.0
    assert H.norm() == pytest.approx(CFG.current / (math.pi * A), rel=1e-12)


def test_working_plane_value():
    # r^2 = a^2 (1 + 5/3) -> H = 3 I / (8 pi a)
    assert two_wire_magnitude(CFG, 0.0, 0.0) == pytest.approx(
        3 * CFG.current / (8 * math.pi * A), rel=1e-12)


@given(st.floats(-0.9, 0.9), st.floats(-0.8, 1.0))
def test_mirror_symmetry_and_linearity(yf, zf):
    y, z = yf * A, zf * A
    assert two_wire_magnitude(CFG, y, z) == pytest.approx(two_wire_magnitude(CFG, -y, z),
                                                          rel=1e-12)
    assert two_wire_gradient(CFG, y, z) == pytest.approx(two_wire_gradient(CFG, -y, z),
                                                         rel=1e-12)
    double = TwoWireConfig(2 * CFG.current, A)
    assert two_wire_magnitude(double, y, z) == pytest.approx(2 * two_wire_magnitude(CFG, y, z),
                                                             rel=1e-12)
    assert epsilon_profile(double, y, z) == pytest.approx(epsilon_profile(CFG, y, z), rel=1e-12)


def test_singularity():
    with pytest.raises(FieldSingularityError):
        two_wire_magnitude(CFG, A, -CFG.z_offset)
    with pytest.raises(FieldSingularityError):
        two_wire_field(CFG, Vec3(0, -A, -CFG.z_offset + 1e-10))
    # approaching the wire the field grows without bound
    near = [two_wire_magnitude(CFG, A - d, -CFG.z_offset) for d in (1e-4, 1e-6, 1e-8)]
    assert near[0] < near[1] < near[2]


def central_difference(f, x, h):
    return (f(x + h) - f(x - h)) / (2 * h)


@pytest.mark.parametrize("y,z", [(A / 3, 0.0), (0.0, 0.0), (-0.6 * A, 0.4 * A), (0.2 * A, -0.7 * A)])
def test_gradient_matches_finite_difference(y, z):
    h = A * 1e-6
    fd_z = central_difference(lambda t: two_wire_magnitude(CFG, y, t), z, h)
    fd_y = central_difference(lambda t: two_wire_magnitude(CFG, t, z), y, h)
    assert two_wire_gradient(CFG, y, z) == pytest.approx(fd_z, rel=1e-6)
    if abs(fd_y) > 1e-3:
        assert two_wire_gradient_y(CFG, y, z) == pytest.approx(fd_y, rel=1e-6)


def test_gradient_conversion_constant():
    H = two_wire_magnitude(CFG, 0.0, 0.0)
    g = two_wire_gradient(CFG, 0.0, 0.0)
    assert g < 0
    assert abs(g) == pytest.approx(0.968 * H / A, rel=1e-3)
    assert epsilon_profile(CFG, 0.0, 0.0) == pytest.approx(0.968, abs=1e-3)


def test_constant_inhomogeneity_plane():
    z0, z1, eps = constant_inhomogeneity_plane(1.0)
    assert z0 == pytest.approx(1.29, abs=0.005)
    assert z1 == pytest.approx(0.12, abs=0.005)
    assert eps == pytest.approx(0.968, abs=0.001)
    assert z0 + z1 == pytest.approx(math.sqrt(2.0), rel=1e-12)
    z0b, z1b, epsb = constant_inhomogeneity_plane(2.0)
    assert (z0b, z1b) == pytest.approx((2 * z0, 2 * z1), rel=1e-12)
    assert epsb == eps
    for bad in (0.0, -1.0):
        with pytest.raises(ValueError):
            constant_inhomogeneity_plane(bad)


def test_gradient_flat_in_y_at_sqrt2_plane():
    # |dH/dz| has no y^2 term where z + z0 = sqrt(2) a
    cfg = TwoWireConfig(1.0, A)
    z1 = constant_inhomogeneity_plane(A)[1]
    g0 = two_wire_gradient(cfg, 0.0, z1)
    for y in (0.01 * A, 0.03 * A):
        assert abs(two_wire_gradient(cfg, y, z1) / g0 - 1) < 5 * (y / A) ** 4


def _eps_y2_coefficient(cfg, z):
    """Fit epsilon(y) ~ eps0 (1 + c y^2) from two small offsets."""
    e0 = epsilon_profile(cfg, 0.0, z)
    y = 1e-3 * cfg.half_separation
    return (epsilon_profile(cfg, y, z) / e0 - 1) / y ** 2


def test_epsilon_y_dependence_at_working_plane():
    # numerically |eps(a/10) - eps(0)| / eps(0) = 1.857e-3 at z = 0; the
    # series term is (3a^2 - u^2)/(a^2 + u^2)^2 with u = z + z0
    rel = epsilon_profile(CFG, A / 10, 0.0) / epsilon_profile(CFG, 0.0, 0.0) - 1
    assert rel == pytest.approx(1.857e-3, rel=1e-3)
    u2 = 5.0 / 3.0 * A * A
    assert _eps_y2_coefficient(CFG, 0.0) == pytest.approx(
        (3 * A * A - u2) / (A * A + u2) ** 2, rel=1e-4)


def test_epsilon_y2_coefficient_sign_change():
    zc = (math.sqrt(3.0) - math.sqrt(5.0 / 3.0)) * A
    zs = np.linspace(-0.3 * A, 0.9 * A, 25)
    coeffs = np.array([_eps_y2_coefficient(CFG, z) for z in zs])
    crossing = zs[np.flatnonzero(np.diff(np.sign(coeffs)))[0]]
    assert crossing <= zc <= crossing + (zs[1] - zs[0])


def test_radiation_window_flatness():
    ys = np.linspace(-2 * A / 3, 2 * A / 3, 201)
    g = two_wire_gradient(CFG, ys, 0.0)
    assert np.max(np.abs(g / two_wire_gradient(CFG, 0.0, 0.0) - 1)) <= 0.05


def test_inhomogeneity_map_defaults_and_grid():
    fmap = inhomogeneity_map(CFG, z_range=(0.0, 0.0), resolution=(9, 1))
    assert fmap.y[0] == pytest.approx(-2 * A / 3) and fmap.y[-1] == pytest.approx(2 * A / 3)
    row = fmap.dHdz[0]
    assert np.max(np.abs(row / two_wire_gradient(CFG, 0.0, 0.0) - 1)) <= 0.05
    single = inhomogeneity_map(CFG, (0.1 * A, 0.2 * A), (0.05 * A, 0.3 * A), 1)
    assert single.H.shape == (1, 1)
    assert single.H[0, 0] == two_wire_magnitude(CFG, 0.1 * A, 0.05 * A)
    assert single.epsilon[0, 0] == epsilon_profile(CFG, 0.1 * A, 0.05 * A)


def test_inhomogeneity_map_refinement_shares_points():
    coarse = inhomogeneity_map(CFG, resolution=(11, 7))
    fine = inhomogeneity_map(CFG, resolution=(21, 13))
    np.testing.assert_array_equal(fine.H[::2, ::2], coarse.H)
    np.testing.assert_array_equal(fine.dHdz[::2, ::2], coarse.dHdz)


def test_inhomogeneity_map_rejects_wire():
    with pytest.raises(FieldSingularityError):
        inhomogeneity_map(CFG, (-A, A), (-CFG.z_offset, 0.0), (3, 2))


def test_sharp_tip_gradient():
    assert sharp_tip_gradient(1.0, 0.1) == pytest.approx(10.0)
    assert sharp_tip_gradient(0.0, 0.1) == 0.0
    assert sharp_tip_gradient(0.5, 0.05) == pytest.approx(2 * sharp_tip_gradient(0.5, 0.1))
    with pytest.raises(ValueError):
        sharp_tip_gradient(1.0, 0.0)


def test_sample_controls():
    p = Vec3(0.01, 2e-4, -3e-4)
    s = sample(ZeroField(), p)
    assert s.B == Vec3.zero() and s.grad_Bz == 0 and s.grad_By == 0
    s = sample(UniformField(Vec3(0, 0.01, 0.02)), p)
    assert s.B == Vec3(0, 0.01, 0.02) and s.grad_Bz == 0
    s = sample(IdealGradientField(0.1, 1e3), Vec3(0, 0, 1e-3))
    assert s.B.z == pytest.approx(1.1)  # 0.1 T + 1e3 T/m * 1 mm
    assert s.grad_Bz == 1e3 and s.grad_By == -1e3


def _fd_divergence(cfg, y, z, h):
    By = lambda yy, zz: sample(cfg, Vec3(0, yy, zz)).B.y
    Bz = lambda yy, zz: sample(cfg, Vec3(0, yy, zz)).B.z
    dBy_dy = (By(y + h, z) - By(y - h, z)) / (2 * h)
    dBz_dz = (Bz(y, z + h) - Bz(y, z - h)) / (2 * h)
    dBz_dy = (Bz(y + h, z) - Bz(y - h, z)) / (2 * h)
    return dBy_dy, dBz_dz, dBz_dy


@pytest.mark.parametrize("y,z", [(0.3 * A, 0.1 * A), (-0.5 * A, -0.2 * A), (0.7 * A, 0.5 * A)])
def test_two_wire_sample_divergence_free(y, z):
    f = TwoWireField(CFG)
    s = sample(f, Vec3(0, y, z))
    assert s.B == two_wire_field(CFG, Vec3(0, y, z)) * constants().vacuum_permeability
    assert s.grad_Bz == pytest.approx(-s.grad_By, rel=1e-12)
    dBy_dy, dBz_dz, dBz_dy = _fd_divergence(f, y, z, A * 1e-6)
    assert s.grad_Bz == pytest.approx(dBz_dz, rel=1e-6)
    assert s.grad_By == pytest.approx(dBy_dy, rel=1e-6)
    assert s.dBz_dy == pytest.approx(dBz_dy, rel=1e-6)
    scale = math.hypot(dBz_dz, dBz_dy)
    assert abs(dBy_dy + dBz_dz) < 1e-6 * scale


def test_ideal_gradient_divergence_free():
    f = IdealGradientField(0.05, 2e5)
    dBy_dy, dBz_dz, _ = _fd_divergence(f, 1e-4, -2e-4, 1e-7)
    assert abs(dBy_dy + dBz_dz) < 1e-6 * 2e5


def test_sharp_tip_patch():
    f = SharpTipField(B_surface=0.5, tip_radius=1e-5)
    inside = sample(f, Vec3(0, 2e-6, 1e-6))
    assert inside.grad_Bz == pytest.approx(0.5 / 1e-5)
    assert inside.B.z == pytest.approx(0.5 + 0.5 / 1e-5 * 1e-6)
    outside = sample(f, Vec3(0, 0, 1.1e-4))
    assert outside.B == Vec3.zero() and outside.grad_Bz == 0
    # taper derivative matches finite differences
    y, z, h = 2e-5, 3e-5, 1e-10
    s = sample(f, Vec3(0, y, z))
    fd = (sample(f, Vec3(0, y, z + h)).B.z - sample(f, Vec3(0, y, z - h)).B.z) / (2 * h)
    assert s.grad_Bz == pytest.approx(fd, rel=1e-5)
    with pytest.raises(ValueError):
        SharpTipField(1.0, 0.0)
