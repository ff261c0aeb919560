"""Flat ``key = value`` run configuration.

One assignment per line, ``#`` starts a comment. Numbers take an optional
unit suffix; without one they are read in SI base units:

========== ==========================================
dimension  suffixes
========== ==========================================
voltage    V, kV
length     m, cm, mm, um, nm
field      T, mT
gradient   T_per_m
current    A
E field    V_per_m, kV_per_m
time       s, ns, ps, fs
========== ==========================================

A list value (``gradients``, ``voltages``) is comma separated with a single
trailing suffix, e.g. ``voltages = 5, 10, 20 kV``. ``auto`` selects the
computed default for keys that have one.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, fields, replace

from .constants import Vec3
from .dynamics import ForceModel, IntegratorConfig, LORENTZ_FIELDS, SCHEMES
from .experiment import BeamSpec, Geometry
from .fields import (IdealGradientField, SharpTipField, TwoWireConfig, TwoWireField,
                     UniformField, ZeroField)
from .kinematics import accelerate_classical

__all__ = ["ConfigError", "Params", "parse_config", "render", "apply_overrides", "FIELD_KINDS"]

FIELD_KINDS = ("zero", "uniform", "ideal-gradient", "two-wire", "sharp-tip")

UNITS = {
    "voltage": ("V", {"V": 1.0, "kV": 1e3}),
    "length": ("m", {"m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "nm": 1e-9}),
    "field": ("T", {"T": 1.0, "mT": 1e-3}),
    "gradient": ("T_per_m", {"T_per_m": 1.0}),
    "current": ("A", {"A": 1.0}),
    "efield": ("V_per_m", {"V_per_m": 1.0, "kV_per_m": 1e3}),
    "time": ("s", {"s": 1.0, "ns": 1e-9, "ps": 1e-12, "fs": 1e-15}),
}

# key -> kind; kinds are unit dimensions or int/float/bool/choice/list:<dim>
KINDS = {
    "voltage": "voltage", "sigma": "length", "count": "int", "seed": "int",
    "spin_mix": "float",
    "gun_exit_x": "length", "magnet_entry_x": "length", "magnet_exit_x": "length",
    "screen_x": "length",
    "field": "choice", "field_B": "field", "gradient": "gradient", "current": "current",
    "half_separation": "length", "z_offset": "length", "tip_radius": "length",
    "e_field_x": "efield", "e_field_y": "efield", "e_field_z": "efield",
    "include_spin": "bool", "lorentz_field": "choice", "scheme": "choice",
    "steps": "int", "time_step": "time", "max_steps": "int",
    "target_split": "length", "gradients": "list:gradient", "voltages": "list:voltage",
    "bin_size": "length", "max_bins": "int",
    "map_resolution": "int", "map_y_min": "length", "map_y_max": "length",
    "map_z_min": "length", "map_z_max": "length",
    "trajectory_count": "int", "trajectory_stride": "int",
}
CHOICES = {"field": FIELD_KINDS, "lorentz_field": LORENTZ_FIELDS, "scheme": SCHEMES}
AUTO_KEYS = {"z_offset", "time_step", "max_steps", "map_y_min", "map_y_max",
             "map_z_min", "map_z_max"}

_NUMBER = re.compile(r"^([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z_]*)$")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Params:
    """Every run parameter, SI units, defaults applied."""

    voltage: float = 10e3
    sigma: float = 1e-6
    count: int = 10_000
    seed: int = 0
    spin_mix: float = 0.5
    gun_exit_x: float = 0.0
    magnet_entry_x: float = 0.01
    magnet_exit_x: float = 0.06
    screen_x: float = 0.21
    field: str = "ideal-gradient"
    field_B: float = 0.0
    gradient: float = 0.0
    current: float = 1.0
    half_separation: float = 1e-3
    z_offset: float | None = None
    tip_radius: float = 10e-6
    e_field_x: float = 0.0
    e_field_y: float = 0.0
    e_field_z: float = 0.0
    include_spin: bool = True
    lorentz_field: str = "axis"
    scheme: str = "rk4"
    steps: int = 1000
    time_step: float | None = None
    max_steps: int | None = None
    target_split: float = 20e-6
    gradients: tuple = (0.0,)
    voltages: tuple = (5e3, 10e3, 15e3, 20e3, 25e3)
    bin_size: float = 1e-6
    max_bins: int = 1024
    map_resolution: int = 41
    map_y_min: float | None = None
    map_y_max: float | None = None
    map_z_min: float | None = None
    map_z_max: float | None = None
    trajectory_count: int = 0
    trajectory_stride: int = 10

    # -- builders ---------------------------------------------------------------

    def beam(self) -> BeamSpec:
        return BeamSpec(self.voltage, self.sigma, self.count, self.seed, self.spin_mix)

    def geometry(self) -> Geometry:
        return Geometry(self.gun_exit_x, self.magnet_entry_x, self.magnet_exit_x, self.screen_x)

    def wires(self) -> TwoWireConfig:
        return TwoWireConfig(self.current, self.half_separation, self.z_offset)

    def field_config(self):
        match self.field:
            case "zero":
                return ZeroField()
            case "uniform":
                return UniformField(Vec3(0.0, 0.0, self.field_B))
            case "ideal-gradient":
                return IdealGradientField(self.field_B, self.gradient)
            case "two-wire":
                return TwoWireField(self.wires())
            case "sharp-tip":
                return SharpTipField(self.field_B, self.tip_radius)
        raise ConfigError(f"unknown field kind {self.field!r}")

    def force_model(self) -> ForceModel:
        return ForceModel(Vec3(self.e_field_x, self.e_field_y, self.e_field_z),
                          self.field_config(), self.include_spin, self.lorentz_field)

    def integrator(self, voltage: float | None = None) -> IntegratorConfig:
        v = accelerate_classical(self.voltage if voltage is None else voltage).velocity
        L = self.magnet_exit_x - self.magnet_entry_x
        dt = self.time_step if self.time_step is not None else L / v / self.steps
        max_steps = self.max_steps
        if max_steps is None:
            max_steps = 2 * int(math.ceil(L / v / dt)) + 16
        return IntegratorConfig(dt, max_steps, self.scheme)


def _parse_number(text: str, dim: str) -> float:
    m = _NUMBER.match(text.strip())
    if not m:
        raise ConfigError(f"cannot read a number from {text!r}")
    value, suffix = float(m.group(1)), m.group(2)
    if dim in ("int", "float"):
        if suffix:
            raise ConfigError(f"unexpected unit {suffix!r} on a dimensionless value")
        return value
    base, table = UNITS[dim]
    if suffix and suffix not in table:
        raise ConfigError(f"unit {suffix!r} does not fit a {dim} value (use {', '.join(table)})")
    return value * table.get(suffix, 1.0)


def _parse_value(key: str, text: str):
    kind = KINDS[key]
    text = text.strip()
    if key in AUTO_KEYS and text == "auto":
        return None
    if kind == "bool":
        low = text.lower()
        if low in ("true", "yes", "1", "on"):
            return True
        if low in ("false", "no", "0", "off"):
            return False
        raise ConfigError(f"expected true/false, got {text!r}")
    if kind == "choice":
        if text not in CHOICES[key]:
            raise ConfigError(f"expected one of {', '.join(CHOICES[key])}, got {text!r}")
        return text
    if kind == "int":
        if not re.fullmatch(r"[-+]?\d+", text):
            raise ConfigError(f"expected an integer, got {text!r}")
        return int(text)
    if kind.startswith("list:"):
        dim = kind[5:]
        parts = [p.strip() for p in text.split(",")]
        if parts == [""]:
            return ()
        m = _NUMBER.match(parts[-1])
        suffix = m.group(2) if m else ""
        out = []
        for p in parts:
            pm = _NUMBER.match(p)
            if pm and not pm.group(2) and suffix:
                p = f"{p} {suffix}"
            out.append(_parse_number(p, dim))
        return tuple(out)
    return _parse_number(text, kind)


def _validate(p: Params) -> None:
    """Raise ConfigError(key, message) on an out-of-range value."""
    checks = [
        ("voltage", p.voltage > 0, "accelerating voltage must be positive"),
        ("sigma", p.sigma >= 0, "beam width must be non-negative"),
        ("count", p.count >= 1, "electron count must be at least 1"),
        ("spin_mix", 0.0 <= p.spin_mix <= 1.0, "spin_mix must lie in [0, 1]"),
        ("magnet_entry_x", p.gun_exit_x < p.magnet_entry_x < p.magnet_exit_x < p.screen_x,
         "planes must satisfy gun_exit_x < magnet_entry_x < magnet_exit_x < screen_x"),
        ("half_separation", p.half_separation > 0, "half_separation must be positive"),
        ("current", p.current != 0, "two-wire current must be non-zero"),
        ("z_offset", p.z_offset is None or p.z_offset > 0, "z_offset must be positive"),
        ("tip_radius", p.tip_radius > 0, "tip_radius must be positive"),
        ("steps", p.steps >= 1, "steps must be at least 1"),
        ("time_step", p.time_step is None or p.time_step > 0, "time_step must be positive"),
        ("max_steps", p.max_steps is None or p.max_steps >= 1, "max_steps must be >= 1"),
        ("target_split", p.target_split > 0, "target_split must be positive"),
        ("voltages", all(v > 0 for v in p.voltages), "accelerating voltages must be positive"),
        ("bin_size", p.bin_size > 0, "bin_size must be positive"),
        ("max_bins", p.max_bins >= 2, "max_bins must be >= 2"),
        ("map_resolution", p.map_resolution >= 1, "map_resolution must be >= 1"),
        ("trajectory_count", p.trajectory_count >= 0, "trajectory_count must be >= 0"),
        ("trajectory_stride", p.trajectory_stride >= 1, "trajectory_stride must be >= 1"),
    ]
    if p.field == "sharp-tip":
        checks.append(("field_B", p.field_B >= 0, "sharp-tip surface field must be >= 0"))
    for key, ok, msg in checks:
        if not ok:
            raise ConfigError(f"{key}: {msg}")


def _apply_lines(params: Params, lines, labels) -> Params:
    values = {}
    where = {}
    for label, raw in zip(labels, lines):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{label}: expected 'key = value', got {raw.strip()!r}")
        key, text = (s.strip() for s in line.split("=", 1))
        if key not in KINDS:
            raise ConfigError(f"{label}: unknown key {key!r}")
        try:
            values[key] = _parse_value(key, text)
        except ConfigError as exc:
            raise ConfigError(f"{label}: {key}: {exc}") from None
        where[key] = label
    out = replace(params, **values)
    try:
        _validate(out)
    except ConfigError as exc:
        key = str(exc).split(":", 1)[0]
        label = where.get(key)
        raise ConfigError(f"{label}: {exc}" if label else str(exc)) from None
    return out


def parse_config(text: str, base: Params | None = None) -> Params:
    """Parse config text into validated :class:`Params`; errors name the line."""
    lines = text.splitlines()
    return _apply_lines(base or Params(), lines, [f"line {i + 1}" for i in range(len(lines))])


def apply_overrides(params: Params, overrides) -> Params:
    """Apply ``key=value`` strings (from ``--set``) on top of ``params``."""
    overrides = list(overrides)
    return _apply_lines(params, overrides, [f"--set {o}" for o in overrides])


def _render_value(key: str, value) -> str:
    kind = KINDS[key]
    if value is None:
        return "auto"
    if kind == "bool":
        return "true" if value else "false"
    if kind in ("choice", "int"):
        return str(value)
    if kind == "float":
        return repr(float(value))
    if kind.startswith("list:"):
        unit = UNITS[kind[5:]][0]
        return ", ".join(repr(float(v)) for v in value) + f" {unit}" if value else ""
    return f"{float(value)!r} {UNITS[kind][0]}"


def render(params: Params) -> str:
    """Config text that parses back to exactly ``params``."""
    return "".join(f"{f.name} = {_render_value(f.name, getattr(params, f.name))}\n"
                   for f in fields(params))
