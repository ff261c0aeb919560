"""Forces on electrons, the closed-form spin deflection and trajectory integration.

The electron charge is ``q = -e`` everywhere.

Two forces act inside the magnet:

* Lorentz, ``q (v x B + E)``;
* spin gradient, ``s mu (dBz/dy, dBz/dz)`` for moment projection sign ``s``
  (from ``U = -mu . B`` with the moment along ``z``).

``ForceModel.lorentz_field`` selects where the Lorentz term reads ``B``.
``"axis"`` (default) takes the field on the beam axis ``y = z = 0`` at the
electron's ``x``, which keeps the spin-independent bending separate from
the gradient force, the same separation behind the closed-form deflection
estimate. ``"local"`` takes the field at the electron. For gradients of
order 1e6 T/m this is violently unstable: a micron of displacement already
means a tesla of field.

Integration runs on ``(3, N)`` arrays so that whole ensembles advance in
one numpy pass; the single-electron functions wrap that path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .constants import Constants, ElectronState, Vec3, constants
from .fields import FieldConfig, FieldSingularityError, ZeroField, sample_arrays

__all__ = [
    "ForceModel",
    "IntegratorConfig",
    "DeflectionInput",
    "TruncationError",
    "IntegrationError",
    "EnsembleResult",
    "lorentz_force",
    "spin_force",
    "analytic_deflection",
    "required_gradient",
    "integrator_for",
    "step",
    "propagate",
    "propagate_ensemble",
]

SCHEMES = ("rk4", "semi-implicit")
LORENTZ_FIELDS = ("axis", "local")


@dataclass(frozen=True)
class ForceModel:
    electric_field: Vec3 = dc_field(default_factory=Vec3.zero)  # V/m
    field: FieldConfig = dc_field(default_factory=ZeroField)
    include_spin_force: bool = True
    lorentz_field: str = "axis"

    def __post_init__(self):
        if self.lorentz_field not in LORENTZ_FIELDS:
            raise ValueError(f"lorentz_field must be one of {LORENTZ_FIELDS}")


@dataclass(frozen=True)
class IntegratorConfig:
    time_step: float
    max_steps: int = 1_000_000
    scheme: str = "rk4"

    def __post_init__(self):
        if not self.time_step > 0:
            raise ValueError("time_step must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")


@dataclass(frozen=True)
class DeflectionInput:
    gradient: float  # T/m
    interaction_length: float  # m
    speed: float  # m/s
    include_vt_term: bool = False

    def __post_init__(self):
        if not self.speed > 0:
            raise ValueError("speed must be positive")
        if not self.interaction_length > 0:
            raise ValueError("interaction_length must be positive")


class IntegrationError(RuntimeError):
    """The state became non-finite or superluminal during integration."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class TruncationError(RuntimeError):
    """Integration stopped at ``max_steps`` before reaching the exit plane."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


# -- forces -------------------------------------------------------------------

def _accel(model: ForceModel, X, V, S, const: Constants, strict=True):
    """Acceleration for positions X, velocities V (both (3, N)) and spins S."""
    x, y, z = X
    f = sample_arrays(model.field, x, y, z, strict=strict)
    if model.lorentz_field == "axis":
        fl = sample_arrays(model.field, x, 0.0, 0.0, strict=strict)
    else:
        fl = f
    vx, vy, vz = V
    E = model.electric_field
    qm = -const.electron_charge_magnitude / const.electron_mass
    A = np.empty_like(V)
    A[0] = qm * (vy * fl.Bz - vz * fl.By + E.x)
    A[1] = qm * (vz * fl.Bx - vx * fl.Bz + E.y)
    A[2] = qm * (vx * fl.By - vy * fl.Bx + E.z)
    if model.include_spin_force:
        k = S * const.moment_to_mass
        A[1] += k * f.dBz_dy
        A[2] += k * f.dBz_dz
    return A


def _state_arrays(state: ElectronState):
    X = state.position.as_array().reshape(3, 1)
    V = state.velocity.as_array().reshape(3, 1)
    return X, V, np.array([float(state.spin_sign)])


def lorentz_force(state: ElectronState, model: ForceModel, const: Constants | None = None) -> Vec3:
    """``-e (v x B + E)`` in newtons."""
    c = const or constants()
    m = ForceModel(model.electric_field, model.field, False, model.lorentz_field)
    X, V, S = _state_arrays(state)
    return Vec3.from_array(_accel(m, X, V, S, c)[:, 0] * c.electron_mass)


def spin_force(state: ElectronState, model: ForceModel, const: Constants | None = None) -> Vec3:
    """Spin-gradient force ``s mu grad(Bz)`` in newtons; zero when disabled."""
    c = const or constants()
    if not model.include_spin_force:
        return Vec3.zero()
    f = sample_arrays(model.field, state.position.x, state.position.y, state.position.z)
    k = state.spin_sign * c.bohr_magneton
    return Vec3(0.0, float(k * f.dBz_dy), float(k * f.dBz_dz))


# -- closed form ----------------------------------------------------------------

def analytic_deflection(inp: DeflectionInput, const: Constants | None = None) -> float:
    """Transverse deflection of one spin population, ``(mu/m) g t^2 / 2`` with ``t = L/v``.

    ``include_vt_term`` adds ``v t`` as in the printed formula. That term is
    the longitudinal advance (it equals ``L``), not a deflection, so it is
    off by default.
    """
    c = const or constants()
    t = inp.interaction_length / inp.speed
    dz = 0.5 * c.moment_to_mass * inp.gradient * t * t
    if inp.include_vt_term:
        dz += inp.speed * t
    return dz


def required_gradient(target_split: float, interaction_length: float, speed: float,
                      const: Constants | None = None) -> float:
    """Gradient (T/m) that separates the two populations by ``target_split``.

    ``target_split`` is the full up/down separation, twice the single
    population deflection: ``g = target v^2 / ((mu/m) L^2)``.
    """
    if not (target_split > 0 and interaction_length > 0 and speed > 0):
        raise ValueError("target_split, interaction_length and speed must be positive")
    c = const or constants()
    return target_split * speed * speed / (c.moment_to_mass * interaction_length ** 2)


def integrator_for(interaction_length: float, speed: float, steps: int = 1000,
                   scheme: str = "rk4") -> IntegratorConfig:
    """Step size giving ``steps`` steps across the interaction region."""
    dt = interaction_length / speed / steps
    return IntegratorConfig(dt, max_steps=2 * steps + 16, scheme=scheme)


# -- steppers -----------------------------------------------------------------

def _rk4(model, X, V, S, dt, const, strict):
    a1 = _accel(model, X, V, S, const, strict)
    X2 = X + 0.5 * dt * V
    V2 = V + 0.5 * dt * a1
    a2 = _accel(model, X2, V2, S, const, strict)
    X3 = X + 0.5 * dt * V2
    V3 = V + 0.5 * dt * a2
    a3 = _accel(model, X3, V3, S, const, strict)
    X4 = X + dt * V3
    V4 = V + dt * a3
    a4 = _accel(model, X4, V4, S, const, strict)
    Xn = X + (dt / 6.0) * (V + 2.0 * V2 + 2.0 * V3 + V4)
    Vn = V + (dt / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
    return Xn, Vn


def _boris(model, X, V, S, dt, const, strict):
    # kick-rotate-kick-drift; non-magnetic accelerations are the half kicks
    zero_v = np.zeros_like(V)
    a_nm = _accel(model, X, zero_v, S, const, strict)
    x, y, z = X
    if model.lorentz_field == "local":
        f = sample_arrays(model.field, x, y, z, strict)
    else:
        f = sample_arrays(model.field, x, 0.0, 0.0, strict)
    qm = -const.electron_charge_magnitude / const.electron_mass
    h = 0.5 * dt * qm
    tx = h * np.broadcast_to(f.Bx, x.shape)
    ty = h * np.broadcast_to(f.By, x.shape)
    tz = h * np.broadcast_to(f.Bz, x.shape)
    vm = V + 0.5 * dt * a_nm
    cx = vm[1] * tz - vm[2] * ty
    cy = vm[2] * tx - vm[0] * tz
    cz = vm[0] * ty - vm[1] * tx
    vpx, vpy, vpz = vm[0] + cx, vm[1] + cy, vm[2] + cz
    s = 2.0 / (1.0 + tx * tx + ty * ty + tz * tz)
    Vn = np.empty_like(V)
    Vn[0] = vm[0] + s * (vpy * tz - vpz * ty)
    Vn[1] = vm[1] + s * (vpz * tx - vpx * tz)
    Vn[2] = vm[2] + s * (vpx * ty - vpy * tx)
    Vn += 0.5 * dt * a_nm
    return X + dt * Vn, Vn


_STEPPERS = {"rk4": _rk4, "semi-implicit": _boris}


def step(state: ElectronState, model: ForceModel, dt: float, scheme: str = "rk4",
         const: Constants | None = None) -> ElectronState:
    """Advance one electron by ``dt``.

    ``"semi-implicit"`` is the Boris rotation with the electric and spin
    forces as half kicks; it holds the speed exactly in a pure magnetic
    field.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    c = const or constants()
    X, V, S = _state_arrays(state)
    try:
        Xn, Vn = _STEPPERS[scheme](model, X, V, S, dt, c, True)
    except FieldSingularityError as exc:
        raise FieldSingularityError(f"step failed at position {state.position}: {exc}",
                                    state.position) from exc
    return ElectronState(Vec3.from_array(Xn[:, 0]), Vec3.from_array(Vn[:, 0]), state.spin_sign)


# -- propagation ----------------------------------------------------------------

@dataclass
class EnsembleResult:
    """State of every electron at the exit plane.

    ``time`` is the time spent reaching the plane. Electrons that did not
    arrive have ``crossed = False`` and hold their last finite state;
    ``lost`` marks those whose state became non-finite or reached the speed
    of light (a wire was hit or the integration blew up).
    ``trajectory`` holds rows ``(t, x, y, z, vx, vy, vz, spin, index)``
    when recording was requested.
    """

    position: np.ndarray
    velocity: np.ndarray
    time: np.ndarray
    crossed: np.ndarray
    lost: np.ndarray
    trajectory: np.ndarray | None = None


def propagate_ensemble(position, velocity, spin, model: ForceModel, cfg: IntegratorConfig,
                       exit_plane_x: float, const: Constants | None = None,
                       record_stride: int = 0, record_indices=None,
                       strict: bool = False) -> EnsembleResult:
    """Integrate an ensemble until each electron crosses ``x = exit_plane_x``.

    ``position`` and ``velocity`` are ``(3, N)`` arrays, ``spin`` has shape
    ``(N,)``. The final step of each electron is linearly interpolated onto
    the plane. Arithmetic is element-wise, so results for one electron do not
    depend on which other electrons share the call. With ``strict=True`` a
    field singularity raises instead of marking the electron lost.
    """
    c = const or constants()
    X = np.array(position, dtype=float, copy=True).reshape(3, -1)
    V = np.array(velocity, dtype=float, copy=True).reshape(3, -1)
    S = np.asarray(spin, dtype=float).reshape(-1)
    n = X.shape[1]
    if np.any(X[0] >= exit_plane_x):
        raise ValueError("all electrons must start before the exit plane")
    stepper = _STEPPERS[cfg.scheme]
    dt = cfg.time_step
    c2 = c.speed_of_light ** 2

    out_X, out_V = X.copy(), V.copy()
    t_out = np.full(n, np.nan)
    crossed = np.zeros(n, dtype=bool)
    lost = np.zeros(n, dtype=bool)

    rec = []
    rec_set = None
    if record_stride > 0:
        rec_set = np.zeros(n, dtype=bool)
        rec_set[np.arange(n) if record_indices is None else np.asarray(record_indices)] = True

    def record(k, idx, Xa, Va, Sa, t=None):
        sel = rec_set[idx]
        if not sel.any():
            return
        tt = np.full(sel.sum(), k * dt) if t is None else t[sel]
        rec.append(np.column_stack([tt, Xa[:, sel].T, Va[:, sel].T, Sa[sel], idx[sel]]))

    active = np.arange(n)
    Xa, Va, Sa = X, V, S
    if rec_set is not None:
        record(0, active, Xa, Va, Sa)
    with np.errstate(all="ignore"):
        for k in range(cfg.max_steps):
            Xn, Vn = stepper(model, Xa, Va, Sa, dt, c, strict)
            bad = ~(np.isfinite(Xn).all(axis=0) & np.isfinite(Vn).all(axis=0))
            bad |= (Vn * Vn).sum(axis=0) >= c2
            hit = (Xn[0] >= exit_plane_x) & ~bad
            if rec_set is not None and (k + 1) % record_stride == 0:
                keep_rec = ~(hit | bad)
                record(k + 1, active[keep_rec], Xn[:, keep_rec], Vn[:, keep_rec], Sa[keep_rec])
            if hit.any() or bad.any():
                if hit.any():
                    idx = active[hit]
                    x0 = Xa[:, hit]
                    v0 = Va[:, hit]
                    frac = (exit_plane_x - x0[0]) / (Xn[0, hit] - x0[0])
                    out_X[:, idx] = x0 + frac * (Xn[:, hit] - x0)
                    out_X[0, idx] = exit_plane_x
                    out_V[:, idx] = v0 + frac * (Vn[:, hit] - v0)
                    t_out[idx] = (k + frac) * dt
                    crossed[idx] = True
                    if rec_set is not None:
                        record(k, idx, out_X[:, idx], out_V[:, idx], Sa[hit], t_out[idx])
                if bad.any():
                    idx = active[bad]
                    lost[idx] = True
                    out_X[:, idx] = Xa[:, bad]
                    out_V[:, idx] = Va[:, bad]
                    t_out[idx] = k * dt
                keep = ~(hit | bad)
                active = active[keep]
                Xa, Va, Sa = Xn[:, keep], Vn[:, keep], Sa[keep]
                if active.size == 0:
                    break
            else:
                Xa, Va = Xn, Vn
    if active.size:
        out_X[:, active] = Xa
        out_V[:, active] = Va
        t_out[active] = cfg.max_steps * dt
    traj = None
    if rec_set is not None:
        traj = np.concatenate(rec) if rec else np.empty((0, 9))
        order = np.lexsort((traj[:, 0], traj[:, 8]))
        traj = traj[order]
    return EnsembleResult(out_X, out_V, t_out, crossed, lost, traj)


def propagate(state: ElectronState, model: ForceModel, cfg: IntegratorConfig,
              exit_plane_x: float, const: Constants | None = None) -> ElectronState:
    """Step one electron until it crosses ``exit_plane_x``.

    Raises :class:`TruncationError` (carrying the last state) when
    ``max_steps`` runs out, :class:`FieldSingularityError` when the electron
    reaches a wire and :class:`IntegrationError` when the state blows up.
    """
    if not state.position.x < exit_plane_x:
        raise ValueError("electron must start before the exit plane")
    if not state.velocity.x > 0:
        raise ValueError("electron must move towards the exit plane (vx > 0)")
    X, V, S = _state_arrays(state)
    res = propagate_ensemble(X, V, S, model, cfg, exit_plane_x, const, strict=True)
    if res.lost[0]:
        pos = Vec3.from_array(res.position[:, 0])
        raise IntegrationError(f"integration blew up after leaving {pos}", pos)
    last = ElectronState(Vec3.from_array(res.position[:, 0]),
                         Vec3.from_array(res.velocity[:, 0]), state.spin_sign)
    if not res.crossed[0]:
        raise TruncationError(f"exit plane not reached after {cfg.max_steps} steps", last)
    return last
