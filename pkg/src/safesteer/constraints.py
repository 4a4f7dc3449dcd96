"""Tracking and collision-avoidance inequality constraints on the steer angle.

Both constraint families start from the squared planar distance between the
CG and a reference point (a goal for tracking, an obstacle center for
avoidance). That candidate has relative degree 2 under the lateral model:
its first time derivative contains no steer term, the second does. The
shared derivative chain is evaluated once per reference point and then
rearranged into an affine inequality row in the decision variables
(steer angle u, tracking slack).

Tracking rows carry the slack channel so avoidance can override tracking;
avoidance rows never do.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from .vehicle import ModelCoefficients, VehicleParams, VehicleState

__all__ = [
    "PointTarget",
    "ObstacleDisk",
    "GainSet",
    "LieBundle",
    "ConstraintRow",
    "DEFAULT_GAINS",
    "CLF",
    "CBF",
    "BOX",
    "lie_bundle",
    "clf_row",
    "cbf_row",
    "steer_box_rows",
    "slack_nonneg_row",
]

RowKind = Literal["CLF", "CBF", "BOX"]
CLF: RowKind = "CLF"
CBF: RowKind = "CBF"
BOX: RowKind = "BOX"


@dataclass(frozen=True)
class PointTarget:
    """Goal coordinates fed to the tracking constraint."""

    x: float
    y: float


@dataclass(frozen=True)
class ObstacleDisk:
    """Circular danger zone: center plus effective safety radius.

    The radius is the inflated one (physical radius + vehicle half width
    + margin); the constraint keeps the CG outside it.
    """

    x: float
    y: float
    radius: float

    def __post_init__(self) -> None:
        if not (self.radius > 0.0):
            raise ValueError(f"obstacle radius must be > 0, got {self.radius!r}")


@dataclass(frozen=True)
class GainSet:
    """Constraint gains and the slack penalty weight.

    clf_gain1/clf_gain2 multiply the first derivative and the value of the
    tracking candidate, cbf_gain1/cbf_gain2 the avoidance candidate, all
    acting as linear class-kappa functions. slack_weight is the quadratic
    penalty on the tracking slack in the objective.
    """

    clf_gain1: float = 2.0
    clf_gain2: float = 1.0
    cbf_gain1: float = 3.0
    cbf_gain2: float = 2.0
    slack_weight: float = 100.0

    def __post_init__(self) -> None:
        for name in ("clf_gain1", "clf_gain2", "cbf_gain1", "cbf_gain2", "slack_weight"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"GainSet.{name} must be finite and > 0, got {value!r}")


DEFAULT_GAINS = GainSet()


@dataclass(frozen=True)
class LieBundle:
    """Derivative chain of a squared-distance candidate at one state.

    value:  candidate value (squared center distance minus offset_sq)
    lf:     first derivative along the flow (steer-free: relative degree 2)
    lf2:    drift part of the second derivative
    lglf:   coefficient of the steer angle in the second derivative
    """

    value: float
    lf: float
    lf2: float
    lglf: float


@dataclass(frozen=True)
class ConstraintRow:
    """One affine inequality coef_u * u + coef_slack * slack <= rhs."""

    coef_u: float
    coef_slack: float
    rhs: float
    kind: RowKind
    tag: str = ""

    def residual(self, u: float, slack: float) -> float:
        """Signed constraint residual; <= 0 means satisfied."""
        return self.coef_u * u + self.coef_slack * slack - self.rhs


def lie_bundle(
    state: VehicleState,
    coeffs: ModelCoefficients,
    params: VehicleParams,
    center_x: float,
    center_y: float,
    offset_sq: float = 0.0,
) -> LieBundle:
    """Evaluate the squared-distance candidate and its derivative chain.

    The candidate is (x - cx)^2 + (y - cy)^2 - offset_sq. Tracking uses
    offset_sq = 0, avoidance offset_sq = radius^2; everything except the
    value itself is identical between the two.
    """
    dx = state.x - center_x
    dy = state.y - center_y
    v = params.v
    course = state.beta + state.psi
    cos_c = math.cos(course)
    sin_c = math.sin(course)
    # rate of rotation of the course angle under the drift field
    course_rate = coeffs.a11 * state.beta + coeffs.a12 * state.r + state.r
    cross = -2.0 * v * sin_c * dx + 2.0 * v * cos_c * dy
    return LieBundle(
        value=dx * dx + dy * dy - offset_sq,
        lf=2.0 * v * cos_c * dx + 2.0 * v * sin_c * dy,
        lf2=cross * course_rate + 2.0 * v * v,
        lglf=cross * coeffs.b1,
    )


def clf_row(bundle: LieBundle, gains: GainSet, tag: str = "goal") -> ConstraintRow:
    """Tracking row: second derivative + gain-weighted chain <= slack.

    Rearranged to lglf * u - slack <= -(lf2 + g1*lf + g2*value).
    """
    return ConstraintRow(
        coef_u=bundle.lglf,
        coef_slack=-1.0,
        rhs=-(bundle.lf2 + gains.clf_gain1 * bundle.lf + gains.clf_gain2 * bundle.value),
        kind=CLF,
        tag=tag,
    )


def cbf_row(bundle: LieBundle, gains: GainSet, tag: str) -> ConstraintRow:
    """Avoidance row: second derivative + gain-weighted chain >= 0.

    Sign-flipped into <= form: -lglf * u <= lf2 + g1*lf + g2*value.
    A row with coef_u == 0 and rhs < 0 is unsatisfiable: no steer authority
    while the chain already demands action.
    """
    return ConstraintRow(
        coef_u=-bundle.lglf,
        coef_slack=0.0,
        rhs=bundle.lf2 + gains.cbf_gain1 * bundle.lf + gains.cbf_gain2 * bundle.value,
        kind=CBF,
        tag=tag,
    )


def steer_box_rows(limit: float) -> tuple[ConstraintRow, ConstraintRow]:
    """|u| <= limit as two rows; enforced inside the QP, not by clipping."""
    if not (limit > 0.0):
        raise ValueError(f"steer limit must be > 0, got {limit!r}")
    return (
        ConstraintRow(coef_u=1.0, coef_slack=0.0, rhs=limit, kind=BOX, tag="steer_hi"),
        ConstraintRow(coef_u=-1.0, coef_slack=0.0, rhs=limit, kind=BOX, tag="steer_lo"),
    )


def slack_nonneg_row() -> ConstraintRow:
    """Optional slack >= 0 row (off by default; the penalty keeps slack small)."""
    return ConstraintRow(coef_u=0.0, coef_slack=-1.0, rhs=0.0, kind=BOX, tag="slack_nonneg")
