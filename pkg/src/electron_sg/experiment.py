"""End-to-end Stern-Gerlach runs: gun, magnet, drift, screen.

The field acts only between ``magnet_entry_x`` and ``magnet_exit_x``.
Outside the magnet electrons fly ballistically, and those stretches are
computed in closed form. Splitting and Lorentz deflection are measured
against each electron's own field-free flight path. With that baseline a
field-free control gives exactly zero, which a comparison of noisy
centroids never does.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .constants import Constants, ElectronState, Vec3, constants
from .dynamics import (ForceModel, IntegratorConfig, EnsembleResult, integrator_for,
                       propagate_ensemble)
from .fields import IdealGradientField, sample
from .kinematics import accelerate_classical

__all__ = [
    "BeamSpec",
    "Geometry",
    "ScreenImage",
    "SplitReport",
    "ScenarioError",
    "beam_arrays",
    "generate_beam",
    "run_scenario",
    "trace_trajectories",
    "gradient_sweep",
    "voltage_sweep",
    "LOSS_LIMIT",
]

LOSS_LIMIT = 0.01  # a scenario fails when more than this fraction never reaches the screen


class ScenarioError(RuntimeError):
    pass


@dataclass(frozen=True)
class BeamSpec:
    voltage: float = 10e3  # V
    sigma_transverse: float = 1e-6  # m, Gaussian width in y and z
    count: int = 10_000
    seed: int = 0
    spin_mix: float = 0.5  # fraction with spin_sign = +1

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if not self.sigma_transverse >= 0:
            raise ValueError("sigma_transverse must be >= 0")
        if not 0.0 <= self.spin_mix <= 1.0:
            raise ValueError("spin_mix must lie in [0, 1]")
        if not self.voltage > 0:
            raise ValueError("voltage must be positive")


@dataclass(frozen=True)
class Geometry:
    """Planes along the beam axis; defaults give L = 5 cm and a 15 cm drift."""

    gun_exit_x: float = 0.0
    magnet_entry_x: float = 0.01
    magnet_exit_x: float = 0.06
    screen_x: float = 0.21

    def __post_init__(self):
        if not (self.gun_exit_x < self.magnet_entry_x < self.magnet_exit_x < self.screen_x):
            raise ValueError("geometry planes must satisfy gun < entry < exit < screen")

    @property
    def interaction_length(self) -> float:
        return self.magnet_exit_x - self.magnet_entry_x

    @property
    def drift_length(self) -> float:
        return self.screen_x - self.magnet_exit_x


@dataclass
class ScreenImage:
    """Hit histogram at the screen plus the raw hits.

    ``grid[iy, iz]`` counts hits with ``y`` in
    ``[y_origin + iy * bin_size, y_origin + (iy + 1) * bin_size)``, likewise for z.
    """

    grid: np.ndarray
    bin_size: float
    y_origin: float
    z_origin: float
    y: np.ndarray
    z: np.ndarray
    spin: np.ndarray

    @property
    def total_hits(self) -> int:
        return int(self.grid.sum())

    def hits(self, spin_sign: int) -> np.ndarray:
        """``(n, 2)`` array of (y, z) for one population."""
        sel = self.spin == spin_sign
        return np.column_stack([self.y[sel], self.z[sel]])


@dataclass
class SplitReport:
    """Spin splitting and Lorentz deflection of one run.

    Centroids are mean z displacements from the field-free path, taken at
    the magnet exit plane. ``splitting`` is their difference, which is what
    the closed-form deflection formula predicts. ``screen_splitting`` is the
    same quantity at the screen, grown by the drift. ``lorentz_deflection``
    is the magnitude of the mean displacement of the whole beam at the
    screen. ``resolved`` asks whether an observer who only sees absolute
    hit positions at the exit plane would separate the two centroids:
    ``splitting > 2 * standard_error`` where the standard error pools both
    populations' position variances.
    """

    centroid_up_z: float
    centroid_down_z: float
    splitting: float
    lorentz_deflection: float
    resolved: bool
    screen_splitting: float = 0.0
    standard_error: float = 0.0
    lorentz_y: float = 0.0
    lorentz_z: float = 0.0
    n_up: int = 0
    n_down: int = 0
    n_lost: int = 0
    mean_speed_up: float = math.nan
    mean_speed_down: float = math.nan
    voltage: float = math.nan
    gradient: float = math.nan


def beam_arrays(spec: BeamSpec, gun_exit_x: float = 0.0, const: Constants | None = None):
    """Beam as ``(X, V, S)`` arrays of shapes (3, N), (3, N), (N,).

    Randomness comes from numpy's Philox counter-based generator seeded with
    ``spec.seed``: first ``N`` standard normals for y, then ``N`` for z,
    then a permutation choosing which ``round(spin_mix N)`` electrons are
    spin up.
    """
    n = spec.count
    rng = np.random.Generator(np.random.Philox(spec.seed))
    y = spec.sigma_transverse * rng.standard_normal(n)
    z = spec.sigma_transverse * rng.standard_normal(n)
    n_up = int(math.floor(spec.spin_mix * n + 0.5))
    S = np.full(n, -1.0)
    S[rng.permutation(n)[:n_up]] = 1.0
    v = accelerate_classical(spec.voltage, const).velocity
    X = np.vstack([np.full(n, float(gun_exit_x)), y, z])
    V = np.vstack([np.full(n, v), np.zeros(n), np.zeros(n)])
    return X, V, S


def generate_beam(spec: BeamSpec, gun_exit_x: float = 0.0,
                  const: Constants | None = None) -> list[ElectronState]:
    X, V, S = beam_arrays(spec, gun_exit_x, const)
    return [ElectronState(Vec3.from_array(X[:, i]), Vec3.from_array(V[:, i]), int(S[i]))
            for i in range(spec.count)]


def _ballistic(X, V, plane_x):
    t = (plane_x - X[0]) / V[0]
    out = X + V * t
    out[0] = plane_x
    return out


def _propagate_chunks(X, V, S, model, integrator, exit_x, const, threads) -> EnsembleResult:
    n = X.shape[1]
    threads = max(1, min(int(threads), n))
    if threads == 1:
        return propagate_ensemble(X, V, S, model, integrator, exit_x, const)
    bounds = np.linspace(0, n, threads + 1).astype(int)
    chunks = [slice(bounds[i], bounds[i + 1]) for i in range(threads)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(
            lambda s: propagate_ensemble(X[:, s], V[:, s], S[s], model, integrator, exit_x, const),
            chunks))
    # merged in index order, so the result does not depend on thread count
    return EnsembleResult(
        np.concatenate([p.position for p in parts], axis=1),
        np.concatenate([p.velocity for p in parts], axis=1),
        np.concatenate([p.time for p in parts]),
        np.concatenate([p.crossed for p in parts]),
        np.concatenate([p.lost for p in parts]),
    )


def _screen_image(y, z, spin, bin_size, max_bins) -> ScreenImage:
    if y.size == 0:
        return ScreenImage(np.zeros((1, 1), dtype=np.int64), bin_size, 0.0, 0.0, y, z, spin)
    y0, z0 = float(y.min()), float(z.min())
    span = max(float(y.max()) - y0, float(z.max()) - z0)
    b = float(bin_size)
    if span / b + 1 > max_bins:
        b = span / (max_bins - 1)
    ny = int((float(y.max()) - y0) // b) + 1
    nz = int((float(z.max()) - z0) // b) + 1
    iy = np.minimum(((y - y0) // b).astype(np.int64), ny - 1)
    iz = np.minimum(((z - z0) // b).astype(np.int64), nz - 1)
    grid = np.zeros((ny, nz), dtype=np.int64)
    np.add.at(grid, (iy, iz), 1)
    return ScreenImage(grid, b, y0, z0, y, z, spin)


def _axis_gradient(model: ForceModel, geometry: Geometry) -> float:
    xm = 0.5 * (geometry.magnet_entry_x + geometry.magnet_exit_x)
    return sample(model.field, Vec3(xm, 0.0, 0.0)).grad_Bz


def run_scenario(spec: BeamSpec, geometry: Geometry, model: ForceModel,
                 integrator: IntegratorConfig | None = None, *, threads: int = 1,
                 bin_size: float = 1e-6, max_bins: int = 1024,
                 const: Constants | None = None) -> tuple[ScreenImage, SplitReport]:
    """Fly a beam through the magnet to the screen and measure it.

    ``integrator`` defaults to 1000 RK4 steps across the magnet.
    """
    c = const or constants()
    L = geometry.interaction_length
    if integrator is None:
        integrator = integrator_for(L, accelerate_classical(spec.voltage, c).velocity)
    X0, V0, S = beam_arrays(spec, geometry.gun_exit_x, c)
    X1 = _ballistic(X0, V0, geometry.magnet_entry_x)
    res = _propagate_chunks(X1, V0, S, model, integrator, geometry.magnet_exit_x, c, threads)

    ok = res.crossed & ~res.lost & (res.velocity[0] > 0)
    n_lost = int(spec.count - ok.sum())
    if n_lost > LOSS_LIMIT * spec.count:
        raise ScenarioError(
            f"{n_lost} of {spec.count} electrons never reached the magnet exit "
            f"({int(res.lost.sum())} hit a singularity, "
            f"{int((~res.crossed & ~res.lost).sum())} ran out of steps)")

    Xe, Ve, S = res.position[:, ok], res.velocity[:, ok], S[ok]
    base_exit = _ballistic(X0[:, ok], V0[:, ok], geometry.magnet_exit_x)
    base_screen = _ballistic(X0[:, ok], V0[:, ok], geometry.screen_x)
    Xs = _ballistic(Xe, Ve, geometry.screen_x)

    up = S > 0
    down = ~up
    dz_exit = Xe[2] - base_exit[2]
    dz_screen = Xs[2] - base_screen[2]
    n_up, n_down = int(up.sum()), int(down.sum())
    if n_up and n_down:
        cu, cd = float(dz_exit[up].mean()), float(dz_exit[down].mean())
        splitting = abs(cu - cd)
        screen_split = abs(float(dz_screen[up].mean()) - float(dz_screen[down].mean()))
        var_u = float(Xe[2, up].var(ddof=1)) if n_up > 1 else 0.0
        var_d = float(Xe[2, down].var(ddof=1)) if n_down > 1 else 0.0
        se = math.sqrt(var_u / n_up + var_d / n_down)
        resolved = splitting > 2.0 * se
    else:
        cu = float(dz_exit[up].mean()) if n_up else math.nan
        cd = float(dz_exit[down].mean()) if n_down else math.nan
        splitting = screen_split = se = 0.0
        resolved = False

    ly = float((Xs[1] - base_screen[1]).mean())
    lz = float(dz_screen.mean())
    speed = np.sqrt((Ve * Ve).sum(axis=0))
    report = SplitReport(
        centroid_up_z=cu, centroid_down_z=cd, splitting=splitting,
        lorentz_deflection=math.hypot(ly, lz), resolved=bool(resolved),
        screen_splitting=screen_split, standard_error=se, lorentz_y=ly, lorentz_z=lz,
        n_up=n_up, n_down=n_down, n_lost=n_lost,
        mean_speed_up=float(speed[up].mean()) if n_up else math.nan,
        mean_speed_down=float(speed[down].mean()) if n_down else math.nan,
        voltage=spec.voltage, gradient=_axis_gradient(model, geometry),
    )
    image = _screen_image(Xs[1], Xs[2], S.astype(np.int64), bin_size, max_bins)
    return image, report


def trace_trajectories(spec: BeamSpec, geometry: Geometry, model: ForceModel,
                       integrator: IntegratorConfig | None = None, *, count: int = 1,
                       stride: int = 10, const: Constants | None = None) -> np.ndarray:
    """Recorded magnet-region trajectories of the first ``count`` electrons.

    Rows are ``(t, x, y, z, vx, vy, vz, spin_sign, index)`` with ``t``
    measured from the magnet entry.
    """
    c = const or constants()
    if integrator is None:
        integrator = integrator_for(geometry.interaction_length,
                                    accelerate_classical(spec.voltage, c).velocity)
    X0, V0, S = beam_arrays(spec, geometry.gun_exit_x, c)
    count = min(count, spec.count)
    X1 = _ballistic(X0[:, :count], V0[:, :count], geometry.magnet_entry_x)
    res = propagate_ensemble(X1, V0[:, :count], S[:count], model, integrator,
                             geometry.magnet_exit_x, c, record_stride=stride)
    return res.trajectory


def gradient_sweep(spec: BeamSpec, geometry: Geometry, gradients, integrator=None,
                   model: ForceModel | None = None, **kwargs) -> list[SplitReport]:
    """One run per gradient with an ideal-gradient magnet.

    ``model`` supplies the electric field, spin toggle, Lorentz mode and
    ``B0``; only the gradient is swept.
    """
    model = model or ForceModel(field=IdealGradientField())
    B0 = model.field.B0 if isinstance(model.field, IdealGradientField) else 0.0
    reports = []
    for g in gradients:
        m = replace(model, field=IdealGradientField(B0, float(g)))
        try:
            reports.append(run_scenario(spec, geometry, m, integrator, **kwargs)[1])
        except Exception as exc:
            raise ScenarioError(f"gradient {g!r} T/m: {exc}") from exc
    return reports


def voltage_sweep(voltages, spec: BeamSpec, geometry: Geometry, model: ForceModel,
                  integrator: IntegratorConfig | None = None, steps: int = 1000,
                  **kwargs) -> list[SplitReport]:
    """One run per gun voltage, everything else fixed.

    Without an explicit integrator each voltage gets ``steps`` RK4 steps
    across the magnet.
    """
    reports = []
    for volts in voltages:
        s = replace(spec, voltage=float(volts))
        integ = integrator or integrator_for(
            geometry.interaction_length, accelerate_classical(s.voltage).velocity, steps)
        try:
            reports.append(run_scenario(s, geometry, model, integ, **kwargs)[1])
        except Exception as exc:
            raise ScenarioError(f"voltage {volts!r} V: {exc}") from exc
    return reports
