"""Electron gun kinematics: voltage to velocity, energy, momentum, wavelength."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

from .constants import Constants, constants

__all__ = [
    "KinematicsRow",
    "TABLE_1_VOLTAGES_KV",
    "accelerate_classical",
    "accelerate_relativistic",
    "gamma_factor",
    "table_1",
    "write_table_csv",
]

# 11 kV is missing from the published table and stays missing here.
TABLE_1_VOLTAGES_KV = (5, 6, 7, 8, 9, 10, 12, 13, 14, 15, 16, 17, 18, 19, 20,
                       21, 22, 23, 24, 25, 26, 27, 28, 29, 30)

TABLE_1_HEADER = ("voltage_kV", "velocity_m_per_s", "mass_kg", "energy_J",
                  "momentum_N_s", "wavelength_m")


@dataclass(frozen=True)
class KinematicsRow:
    voltage: float  # V
    velocity: float  # m/s
    mass: float  # kg
    energy: float  # J
    momentum: float  # kg m/s
    wavelength: float  # m


def _check_voltage(voltage: float) -> float:
    voltage = float(voltage)
    if not voltage > 0 or not math.isfinite(voltage):
        raise ValueError(f"accelerating voltage must be positive, got {voltage!r}")
    return voltage


def accelerate_classical(voltage: float, const: Constants | None = None) -> KinematicsRow:
    """Non-relativistic gun: ``e V = m v^2 / 2``."""
    c = const or constants()
    voltage = _check_voltage(voltage)
    energy = c.electron_charge_magnitude * voltage
    velocity = math.sqrt(2.0 * energy / c.electron_mass)
    momentum = c.electron_mass * velocity
    return KinematicsRow(voltage, velocity, c.electron_mass, energy, momentum,
                         c.planck_constant / momentum)


def accelerate_relativistic(voltage: float, const: Constants | None = None) -> KinematicsRow:
    """Relativistic gun, ``gamma = 1 + e V / (m c^2)``.

    ``mass`` is the rest mass and ``energy`` the kinetic energy ``e V``;
    momentum is ``gamma m v``.
    """
    c = const or constants()
    voltage = _check_voltage(voltage)
    energy = c.electron_charge_magnitude * voltage
    rest = c.electron_mass * c.speed_of_light ** 2
    gamma = 1.0 + energy / rest
    # 1 - 1/gamma^2 written to avoid cancellation at low voltage
    k = energy / rest
    beta = math.sqrt(k * (2.0 + k)) / gamma
    velocity = c.speed_of_light * beta
    momentum = gamma * c.electron_mass * velocity
    return KinematicsRow(voltage, velocity, c.electron_mass, energy, momentum,
                         c.planck_constant / momentum)


def gamma_factor(velocity: float, const: Constants | None = None) -> float:
    c = const or constants()
    if velocity < 0:
        raise ValueError("speed must be non-negative")
    beta = velocity / c.speed_of_light
    if beta >= 1.0:
        raise ValueError(f"speed {velocity!r} m/s is not below c")
    return 1.0 / math.sqrt(1.0 - beta * beta)


def table_1(const: Constants | None = None) -> list[KinematicsRow]:
    """The 25 rows of the 5-30 kV gun table, computed classically."""
    return [accelerate_classical(kv * 1e3, const) for kv in TABLE_1_VOLTAGES_KV]


def write_table_csv(rows, path) -> None:
    """Write rows as CSV, three significant digits in scientific notation."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TABLE_1_HEADER)
        for r in rows:
            w.writerow([f"{r.voltage / 1e3:g}"] + [
                f"{v:.2E}" for v in (r.velocity, r.mass, r.energy, r.momentum, r.wavelength)
            ])
