"""Magnetostatic field models.

The two-wire model follows the classic Stern-Gerlach pole-piece analysis:
pole faces lie on equipotentials of two anti-parallel line currents along
``x``, wire 1 at ``(y, z) = (+a, -z0)`` carrying ``+I``, wire 2 at
``(-a, -z0)`` carrying ``-I``. The two-wire functions return ``H`` in A/m;
:func:`sample` returns ``B = mu0 H`` in tesla. That is the only place the
conversion happens.

Besides the two-wire field there are controls (zero, uniform, an ideal
linear gradient) and a sharp-tip patch built on the ``dB/dz = B/a`` rule.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Union

import numpy as np

from .constants import Vec3, constants

__all__ = [
    "SINGULARITY_DISTANCE",
    "FieldSingularityError",
    "TwoWireConfig",
    "ZeroField",
    "UniformField",
    "IdealGradientField",
    "TwoWireField",
    "SharpTipField",
    "FieldConfig",
    "FieldSample",
    "FieldArrays",
    "FieldMap",
    "two_wire_field",
    "two_wire_magnitude",
    "two_wire_gradient",
    "two_wire_gradient_y",
    "constant_inhomogeneity_plane",
    "epsilon_profile",
    "inhomogeneity_map",
    "sharp_tip_gradient",
    "sample",
    "sample_arrays",
]

SINGULARITY_DISTANCE = 1e-9  # m
SHARP_TIP_CUTOFF = 10.0  # patch vanishes beyond this many tip radii


class FieldSingularityError(ArithmeticError):
    """Raised when a field is evaluated on (or within 1 nm of) a wire."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


@dataclass(frozen=True)
class TwoWireConfig:
    """Excitation current ``I``, half separation ``a`` and wire-plane offset ``z0``.

    ``z_offset`` defaults to ``sqrt(5/3) a``, which puts the working plane
    ``z = 0`` where ``|dH/dz| a / H = 0.968``.
    """

    current: float
    half_separation: float
    z_offset: float | None = None

    def __post_init__(self):
        if self.current == 0 or not math.isfinite(self.current):
            raise ValueError("two-wire current must be finite and non-zero")
        if not self.half_separation > 0:
            raise ValueError("half_separation must be positive")
        if self.z_offset is None:
            object.__setattr__(self, "z_offset", math.sqrt(5.0 / 3.0) * self.half_separation)
        if not self.z_offset > 0:
            raise ValueError("z_offset must be positive")


@dataclass(frozen=True)
class ZeroField:
    pass


@dataclass(frozen=True)
class UniformField:
    B: Vec3 = field(default_factory=Vec3.zero)


@dataclass(frozen=True)
class IdealGradientField:
    """``Bz = B0 + g z``, ``By = -g y``: divergence- and curl-free."""

    B0: float = 0.0
    gradient: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.B0) and math.isfinite(self.gradient)):
            raise ValueError("ideal gradient parameters must be finite")


@dataclass(frozen=True)
class TwoWireField:
    wires: TwoWireConfig


@dataclass(frozen=True)
class SharpTipField:
    """Locally linear gradient ``B_surface / tip_radius`` around the beam axis.

    Inside a transverse radius ``tip_radius`` the field is the ideal
    gradient with ``B0 = B_surface``. A cosine ramp tapers it to zero at
    ``10 * tip_radius``. Nothing is claimed about the field away from the
    tip; the taper keeps the patch local and is not divergence-free.
    """

    B_surface: float
    tip_radius: float

    def __post_init__(self):
        if not self.tip_radius > 0:
            raise ValueError("tip_radius must be positive")
        if not math.isfinite(self.B_surface):
            raise ValueError("B_surface must be finite")


FieldConfig = Union[ZeroField, UniformField, IdealGradientField, TwoWireField, SharpTipField]


@dataclass(frozen=True)
class FieldSample:
    B: Vec3  # T
    grad_Bz: float  # dBz/dz, T/m
    grad_By: float  # dBy/dy, T/m
    dBz_dy: float = 0.0  # T/m


class FieldArrays(NamedTuple):
    Bx: np.ndarray | float
    By: np.ndarray | float
    Bz: np.ndarray | float
    dBz_dz: np.ndarray | float
    dBy_dy: np.ndarray | float
    dBz_dy: np.ndarray | float


# -- two-wire field -------------------------------------------------------

def _two_wire_geometry(cfg: TwoWireConfig, y, z, strict=True):
    a = cfg.half_separation
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    u = z + cfg.z_offset
    p1 = y - a
    p2 = y + a
    r1sq = p1 * p1 + u * u
    r2sq = p2 * p2 + u * u
    if strict:
        near = np.minimum(r1sq, r2sq) <= SINGULARITY_DISTANCE ** 2
        if np.any(near):
            where = np.argwhere(np.atleast_1d(near))[0]
            yy = np.broadcast_to(y, near.shape)[tuple(where)] if near.ndim else float(y)
            zz = np.broadcast_to(z, near.shape)[tuple(where)] if near.ndim else float(z)
            raise FieldSingularityError(
                f"two-wire field evaluated on a wire at y={yy!r}, z={zz!r}", (yy, zz))
    return p1, p2, u, r1sq, r2sq


def _two_wire_H_arrays(cfg: TwoWireConfig, y, z, strict=True):
    """(Hy, Hz, dHz/dz, dHy/dy, dHz/dy) by superposing both wires."""
    p1, p2, u, r1sq, r2sq = _two_wire_geometry(cfg, y, z, strict)
    k = cfg.current / (2.0 * math.pi)
    r1q = r1sq * r1sq
    r2q = r2sq * r2sq
    Hy = k * (-u / r1sq + u / r2sq)
    Hz = k * (p1 / r1sq - p2 / r2sq)
    dHz_dz = k * (-2.0 * p1 * u / r1q + 2.0 * p2 * u / r2q)
    dHz_dy = k * ((u * u - p1 * p1) / r1q - (u * u - p2 * p2) / r2q)
    return Hy, Hz, dHz_dz, -dHz_dz, dHz_dy


def two_wire_field(cfg: TwoWireConfig, point: Vec3) -> Vec3:
    """H vector (A/m) at ``point``; the x component is always zero."""
    Hy, Hz, *_ = _two_wire_H_arrays(cfg, point.y, point.z)
    return Vec3(0.0, float(Hy), float(Hz))


def two_wire_magnitude(cfg: TwoWireConfig, y, z):
    """``|H| = (I / pi) a / (r1 r2)`` in A/m (sign of I dropped)."""
    _, _, _, r1sq, r2sq = _two_wire_geometry(cfg, y, z)
    return abs(cfg.current) / math.pi * cfg.half_separation / np.sqrt(r1sq * r2sq)


def two_wire_gradient(cfg: TwoWireConfig, y, z):
    """Signed ``d|H|/dz`` in A/m^2.

    ``-(I a / pi) (z + z0) (r1^2 + r2^2) / (r1^3 r2^3)``; negative above the
    wire plane since the field weakens away from the wires.
    """
    _, _, u, r1sq, r2sq = _two_wire_geometry(cfg, y, z)
    H = abs(cfg.current) / math.pi * cfg.half_separation / np.sqrt(r1sq * r2sq)
    return -H * u * (r1sq + r2sq) / (r1sq * r2sq)


def two_wire_gradient_y(cfg: TwoWireConfig, y, z):
    """Signed ``d|H|/dy`` in A/m^2 (odd in y)."""
    p1, p2, _, r1sq, r2sq = _two_wire_geometry(cfg, y, z)
    H = abs(cfg.current) / math.pi * cfg.half_separation / np.sqrt(r1sq * r2sq)
    return -H * (p2 * r1sq + p1 * r2sq) / (r1sq * r2sq)


def constant_inhomogeneity_plane(a: float) -> tuple[float, float, float]:
    """Return ``(z0, z1, epsilon)`` for half separation ``a``.

    ``z0 = sqrt(5/3) a`` places the working plane, ``z1 = (sqrt 2 - sqrt(5/3)) a``
    is the offset of the plane of flattest gradient (``z0 + z1 = sqrt(2) a``)
    and ``epsilon = 2 sqrt(5/3) / (1 + 5/3)`` the inhomogeneity at ``z = 0``.
    """
    if not a > 0:
        raise ValueError("half separation must be positive")
    r = math.sqrt(5.0 / 3.0)
    z0 = r * a
    z1 = math.sqrt(2.0) * a - z0
    return z0, z1, 2.0 * r / (1.0 + 5.0 / 3.0)


def epsilon_profile(cfg: TwoWireConfig, y, z):
    """Field inhomogeneity ``|dH/dz| a / H``; independent of the current."""
    H = two_wire_magnitude(cfg, y, z)
    if np.any(H == 0):
        raise ZeroDivisionError("field magnitude vanishes")
    return np.abs(two_wire_gradient(cfg, y, z)) * cfg.half_separation / H


@dataclass
class FieldMap:
    """Two-wire field sampled on a rectangular (z, y) grid.

    2-D arrays are indexed ``[iz, iy]``. ``H`` and its derivatives refer to
    the magnitude in A/m; ``B`` and ``dBdz`` are the same in tesla.
    """

    y: np.ndarray
    z: np.ndarray
    H: np.ndarray
    dHdz: np.ndarray
    dHdy: np.ndarray
    epsilon: np.ndarray
    mu0: float

    @property
    def B(self) -> np.ndarray:
        return self.mu0 * self.H

    @property
    def dBdz(self) -> np.ndarray:
        return self.mu0 * self.dHdz

    @property
    def grad_B_norm(self) -> np.ndarray:
        return self.mu0 * np.hypot(self.dHdz, self.dHdy)

    def sample(self, iz: int, iy: int, cfg: TwoWireConfig) -> FieldSample:
        return sample(TwoWireField(cfg), Vec3(0.0, float(self.y[iy]), float(self.z[iz])))


def _grid(lo: float, hi: float, n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("resolution must be >= 1")
    if n == 1:
        return np.array([float(lo)])
    # same expression at every resolution so refined grids share points bit-exactly
    return lo + np.arange(n) * ((hi - lo) / (n - 1))


def inhomogeneity_map(cfg: TwoWireConfig, y_range=None, z_range=None,
                      resolution=(41, 41)) -> FieldMap:
    """Sample ``H``, ``dH/dz``, ``dH/dy`` and epsilon on a grid.

    The default y range is the radiation window ``|y| <= 2a/3`` and the
    default z range ``|z| <= 0.6 a`` around the working plane.
    ``resolution`` is ``(ny, nz)`` points per axis (or one int for both).
    """
    a = cfg.half_separation
    if y_range is None:
        y_range = (-2.0 * a / 3.0, 2.0 * a / 3.0)
    if z_range is None:
        z_range = (-0.6 * a, 0.6 * a)
    if np.isscalar(resolution):
        resolution = (int(resolution), int(resolution))
    ys = _grid(*y_range, resolution[0])
    zs = _grid(*z_range, resolution[1])
    Z, Y = np.meshgrid(zs, ys, indexing="ij")
    H = two_wire_magnitude(cfg, Y, Z)
    dHdz = two_wire_gradient(cfg, Y, Z)
    dHdy = two_wire_gradient_y(cfg, Y, Z)
    return FieldMap(ys, zs, H, dHdz, dHdy, np.abs(dHdz) * a / H,
                    constants().vacuum_permeability)


def sharp_tip_gradient(B_surface: float, tip_radius: float) -> float:
    """``dB/dz = B / a`` for a pole tip of radius ``a``."""
    if not tip_radius > 0:
        raise ValueError("tip radius must be positive")
    if B_surface < 0:
        raise ValueError("surface field must be non-negative")
    return B_surface / tip_radius


# -- uniform dispatch --------------------------------------------------------

def _sharp_tip_arrays(cfg: SharpTipField, y, z) -> FieldArrays:
    r = cfg.tip_radius
    g = cfg.B_surface / r
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    rho = np.hypot(y, z)
    span = (SHARP_TIP_CUTOFF - 1.0) * r
    phase = np.clip((rho - r) / span, 0.0, 1.0) * math.pi
    w = 0.5 * (1.0 + np.cos(phase))
    ramp = (rho > r) & (rho < SHARP_TIP_CUTOFF * r)
    dw = np.where(ramp, -0.5 * np.sin(phase) * math.pi / span, 0.0)
    safe = np.where(rho > 0, rho, 1.0)
    ny, nz = y / safe, z / safe
    Bz0 = cfg.B_surface + g * z
    By0 = -g * y
    zeros = np.zeros_like(rho)
    return FieldArrays(zeros, w * By0, w * Bz0,
                       w * g + dw * nz * Bz0,
                       -w * g + dw * ny * By0,
                       dw * ny * Bz0)


def sample_arrays(cfg: FieldConfig, x, y, z, strict: bool = True) -> FieldArrays:
    """Vectorized field evaluation in tesla.

    Zero and uniform fields return scalars, which broadcast. With
    ``strict=False`` two-wire points on a wire give non-finite values instead
    of raising.
    """
    match cfg:
        case ZeroField():
            return FieldArrays(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        case UniformField(B=B):
            return FieldArrays(B.x, B.y, B.z, 0.0, 0.0, 0.0)
        case IdealGradientField(B0=B0, gradient=g):
            return FieldArrays(0.0, -g * np.asarray(y, dtype=float),
                               B0 + g * np.asarray(z, dtype=float), g, -g, 0.0)
        case TwoWireField(wires=w):
            mu0 = constants().vacuum_permeability
            if strict:
                Hy, Hz, dz, dy, dzy = _two_wire_H_arrays(w, y, z)
            else:
                with np.errstate(divide="ignore", invalid="ignore"):
                    Hy, Hz, dz, dy, dzy = _two_wire_H_arrays(w, y, z, strict=False)
            return FieldArrays(0.0, mu0 * Hy, mu0 * Hz, mu0 * dz, mu0 * dy, mu0 * dzy)
        case SharpTipField():
            return _sharp_tip_arrays(cfg, y, z)
    raise TypeError(f"unknown field configuration {cfg!r}")


def sample(cfg: FieldConfig, point: Vec3) -> FieldSample:
    """Field and its gradients at one point (tesla, tesla/metre)."""
    f = sample_arrays(cfg, point.x, point.y, point.z)
    return FieldSample(Vec3(float(f.Bx), float(f.By), float(f.Bz)),
                       float(f.dBz_dz), float(f.dBy_dy), float(f.dBz_dy))
