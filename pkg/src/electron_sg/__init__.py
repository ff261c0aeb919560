"""Free-electron Stern-Gerlach simulator.

Electron gun kinematics, two-wire and sharp-tip magnet fields, Lorentz and
spin-gradient trajectory integration, and screen-level measurements of spin
splitting against Lorentz deflection.
"""
from .constants import Constants, ElectronState, Vec3, constants
from .kinematics import (KinematicsRow, accelerate_classical, accelerate_relativistic,
                         gamma_factor, table_1)
from .fields import (FieldSample, FieldSingularityError, IdealGradientField, SharpTipField,
                     TwoWireConfig, TwoWireField, UniformField, ZeroField,
                     constant_inhomogeneity_plane, epsilon_profile, inhomogeneity_map, sample,
                     sharp_tip_gradient, two_wire_field, two_wire_gradient, two_wire_magnitude)
from .dynamics import (DeflectionInput, ForceModel, IntegrationError, IntegratorConfig, TruncationError,
                       analytic_deflection, integrator_for, lorentz_force, propagate,
                       propagate_ensemble, required_gradient, spin_force, step)
from .experiment import (BeamSpec, Geometry, ScenarioError, ScreenImage, SplitReport,
                         generate_beam, gradient_sweep, run_scenario, voltage_sweep)

__version__ = "0.1.0"
