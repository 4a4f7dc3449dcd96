"""5-DOF single-track lateral vehicle model and fixed-step RK4 integration.

State is [beta, r, x, y, psi]: side-slip angle, yaw rate, Earth-fixed
position, and yaw angle. The CG speed is a model constant; there are no
longitudinal dynamics. The front axle steers, the rear does not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "VehicleParams",
    "ModelCoefficients",
    "VehicleState",
    "ControlInput",
    "DEFAULT_PARAMS",
    "derive_coefficients",
    "state_derivative",
    "integrate_step",
]


@dataclass(frozen=True)
class VehicleParams:
    """Physical parameters of the single-track lateral model.

    The defaults are a mid-size-sedan placeholder set (right orders of
    magnitude, not measured ground truth); every scenario may override them.
    """

    m: float = 1500.0       # mass, kg
    iz: float = 2500.0      # yaw inertia, kg m^2
    cf: float = 60000.0     # front cornering stiffness, N/rad
    cr: float = 60000.0     # rear cornering stiffness, N/rad
    lf: float = 1.2         # CG to front axle, m
    lr: float = 1.4         # CG to rear axle, m
    v: float = 10.0         # constant CG speed, m/s
    half_width: float = 0.9  # half of vehicle width, m (obstacle inflation only)

    def __post_init__(self) -> None:
        for name in ("m", "iz", "cf", "cr", "lf", "lr", "v", "half_width"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"VehicleParams.{name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class ModelCoefficients:
    """Coefficients of the linear side-slip/yaw-rate block.

    a11 < 0 and b1, b2 > 0 always hold for valid parameters; a21 vanishes
    when cf*lf == cr*lr.
    """

    a11: float  # 1/s
    a12: float  # dimensionless
    a21: float  # 1/s^2
    a22: float  # 1/s
    b1: float   # 1/s
    b2: float   # 1/s^2


@dataclass(frozen=True)
class VehicleState:
    """Vehicle state. psi accumulates (no wrapping)."""

    beta: float = 0.0  # side-slip angle, rad
    r: float = 0.0     # yaw rate, rad/s
    x: float = 0.0     # m
    y: float = 0.0     # m
    psi: float = 0.0   # yaw angle, rad

    def is_finite(self) -> bool:
        return (math.isfinite(self.beta) and math.isfinite(self.r)
                and math.isfinite(self.x) and math.isfinite(self.y)
                and math.isfinite(self.psi))


@dataclass(frozen=True)
class ControlInput:
    """Front steer angle plus an exogenous yaw disturbance moment (default 0)."""

    delta_f: float      # rad
    m_zd: float = 0.0   # N m


DEFAULT_PARAMS = VehicleParams()


def derive_coefficients(params: VehicleParams) -> ModelCoefficients:
    """Evaluate the six model coefficients from the physical parameters."""
    m, iz, cf, cr, lf, lr, v = (params.m, params.iz, params.cf, params.cr,
                                params.lf, params.lr, params.v)
    return ModelCoefficients(
        a11=(-cf - cr) / (m * v),
        a12=-1.0 + (cr * lr - cf * lf) / (m * v * v),
        a21=(cr * lr - cf * lf) / iz,
        a22=(-cf * lf * lf - cr * lr * lr) / (iz * v),
        b1=cf / (m * v),
        b2=cf * lf / iz,
    )


def state_derivative(
    state: VehicleState,
    coeffs: ModelCoefficients,
    params: VehicleParams,
    control: ControlInput,
) -> tuple[float, float, float, float, float]:
    """Time derivative of [beta, r, x, y, psi].

    The side-slip/yaw-rate block is linear in the state and the steer angle;
    the position kinematics move the CG at constant speed along beta + psi.
    By construction xdot^2 + ydot^2 == v^2.
    """
    if not state.is_finite():
        raise ValueError(f"non-finite state: {state}")
    if not (math.isfinite(control.delta_f) and math.isfinite(control.m_zd)):
        raise ValueError(f"non-finite control: {control}")
    beta, r, psi = state.beta, state.r, state.psi
    delta_f = control.delta_f
    v = params.v
    course = beta + psi
    return (
        coeffs.a11 * beta + coeffs.a12 * r + coeffs.b1 * delta_f,
        coeffs.a21 * beta + coeffs.a22 * r + coeffs.b2 * delta_f + control.m_zd / params.iz,
        v * math.cos(course),
        v * math.sin(course),
        r,
    )


def integrate_step(
    state: VehicleState,
    control: ControlInput,
    dt: float,
    coeffs: ModelCoefficients,
    params: VehicleParams,
) -> VehicleState:
    """Advance one step with classical RK4, holding the input constant."""
    if not (dt > 0.0):
        raise ValueError(f"dt must be > 0, got {dt!r}")

    def deriv(beta: float, r: float, x: float, y: float, psi: float):
        return state_derivative(VehicleState(beta, r, x, y, psi), coeffs, params, control)

    s = (state.beta, state.r, state.x, state.y, state.psi)
    k1 = deriv(*s)
    k2 = deriv(*(si + 0.5 * dt * ki for si, ki in zip(s, k1)))
    k3 = deriv(*(si + 0.5 * dt * ki for si, ki in zip(s, k2)))
    k4 = deriv(*(si + dt * ki for si, ki in zip(s, k3)))
    out = tuple(
        si + (dt / 6.0) * (a + 2.0 * b + 2.0 * c + d)
        for si, a, b, c, d in zip(s, k1, k2, k3, k4)
    )
    return VehicleState(*out)
