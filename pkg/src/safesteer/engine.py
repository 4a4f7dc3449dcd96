"""Closed-loop executor: target selection, constraint rows, QP, integration.

One rollout is a strict sequence of identical steps; everything is a pure
function of the scenario config, so identical configs give bit-identical
logs. An infeasible QP is data, not an error: the step applies the previous
steer angle (clipped to the limit) and the record is marked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from . import qp
from .constraints import (GainSet, ObstacleDisk, PointTarget, cbf_row, clf_row,
                          lie_bundle, slack_nonneg_row, steer_box_rows)
from .vehicle import ControlInput, VehicleState, derive_coefficients, integrate_step
from .world import (POINT_TRACKING, ScenarioConfig, effective_radius,
                    lateral_error, obstacle_position, target_point)

__all__ = [
    "StepRecord",
    "TrajectoryLog",
    "Metrics",
    "GOAL_EPS",
    "GOAL_REACHED_DIST",
    "RETURN_ERROR",
    "COLLISION_TOL",
    "step",
    "run",
    "compute_metrics",
]

GOAL_EPS = 0.5           # m; point-tracking stops inside this radius (near-goal
                         # the tracking row is ill-posed for a constant-speed plant)
GOAL_REACHED_DIST = 1.0  # m; final-distance threshold for goal_reached
RETURN_ERROR = 0.3       # m; lateral error counted as "back on the path"
COLLISION_TOL = 1e-6     # m; center distance below radius by more than this

U_REF = 0.0              # nominal steer reference in the QP objective


@dataclass(frozen=True)
class StepRecord:
    """Everything observed at one control step (state at t, control applied at t)."""

    t: float
    state: VehicleState
    delta_f: float
    slack: float
    qp_status: str
    clearances: tuple[float, ...]   # center distance - effective radius, per obstacle
    min_h: float                    # min over obstacles of dist^2 - radius^2
    lateral_error: float            # nan in point-tracking mode
    goal: PointTarget
    problem: qp.QPProblem | None = None
    solution: qp.QPSolution | None = None

    @property
    def min_clearance(self) -> float:
        return min(self.clearances) if self.clearances else math.inf


@dataclass(frozen=True)
class TrajectoryLog:
    config: ScenarioConfig
    records: tuple[StepRecord, ...]


@dataclass(frozen=True)
class Metrics:
    min_clearance: float
    min_h: float
    collision: bool
    max_lateral_error: float
    infeasible_steps: int
    goal_reached: bool
    return_time: float | None


def step(
    state: VehicleState,
    config: ScenarioConfig,
    t: float,
    prev_delta: float = 0.0,
) -> tuple[VehicleState, StepRecord]:
    """Run one control step at time t and integrate one dt.

    Builds the tracking row (dropped inside GOAL_EPS of a point goal), one
    avoidance row per obstacle frozen at its position at t, and the steer
    box rows; solves the QP; applies the optimum or the clipped previous
    steer on infeasibility.
    """
    params = config.params
    coeffs = derive_coefficients(params)
    gains: GainSet = config.gains

    if config.mode == POINT_TRACKING:
        goal = config.goal
    else:
        goal = target_point(config.path, state.x, state.y, config.lookahead)
    goal_dist = math.hypot(state.x - goal.x, state.y - goal.y)

    disks = []
    for obs in config.obstacles:
        ox, oy = obstacle_position(obs, t)
        disks.append(ObstacleDisk(ox, oy, effective_radius(obs, config)))

    rows = []
    drop_tracking = config.mode == POINT_TRACKING and goal_dist < GOAL_EPS
    if not drop_tracking:
        goal_bundle = lie_bundle(state, coeffs, params, goal.x, goal.y, 0.0)
        rows.append(clf_row(goal_bundle, gains))
    for i, disk in enumerate(disks):
        bundle = lie_bundle(state, coeffs, params, disk.x, disk.y,
                            disk.radius * disk.radius)
        rows.append(cbf_row(bundle, gains, tag=f"obs{i}"))
    rows.extend(steer_box_rows(config.steer_limit))
    if config.slack_nonneg:
        rows.append(slack_nonneg_row())

    problem = qp.QPProblem(u_ref=U_REF, q=gains.slack_weight, rows=tuple(rows))
    solution = qp.solve(problem)
    if solution.status == qp.OPTIMAL:
        delta = solution.u_star
        slack = solution.slack_star
    else:
        delta = min(config.steer_limit, max(-config.steer_limit, prev_delta))
        slack = math.nan

    clearances = tuple(
        math.hypot(state.x - d.x, state.y - d.y) - d.radius for d in disks
    )
    min_h = math.inf
    for d in disks:
        dx, dy = state.x - d.x, state.y - d.y
        min_h = min(min_h, dx * dx + dy * dy - d.radius * d.radius)

    record = StepRecord(
        t=t,
        state=state,
        delta_f=delta,
        slack=slack,
        qp_status=solution.status,
        clearances=clearances,
        min_h=min_h,
        lateral_error=(lateral_error(config.path, state.x, state.y)
                       if config.mode != POINT_TRACKING else math.nan),
        goal=goal,
        problem=problem,
        solution=solution,
    )
    new_state = integrate_step(state, ControlInput(delta), config.dt, coeffs, params)
    return new_state, record


def run(config: ScenarioConfig) -> TrajectoryLog:
    """Deterministic rollout over the configured duration.

    Produces floor(duration/dt) + 1 records (the last one is observed at the
    final time without a further integration), except that point-tracking
    rollouts stop at the step that reaches the goal radius.
    """
    n_steps = int(math.floor(config.duration / config.dt + 1e-9))
    state = config.initial_state
    prev_delta = 0.0
    records: list[StepRecord] = []
    for k in range(n_steps + 1):
        t = k * config.dt
        state_next, record = step(state, config, t, prev_delta)
        records.append(record)
        prev_delta = record.delta_f
        if config.mode == POINT_TRACKING:
            d = math.hypot(record.state.x - config.goal.x,
                           record.state.y - config.goal.y)
            if d < GOAL_EPS:
                break
        state = state_next
    return TrajectoryLog(config=config, records=tuple(records))


def _in_window(record: StepRecord, radii: Sequence[float]) -> bool:
    """Avoidance window: any obstacle closer than twice its effective radius."""
    return any(c < 2.0 * r for c, r in zip(record.clearances, radii))


def compute_metrics(log: TrajectoryLog) -> Metrics:
    """Scenario-level summary of a trajectory log."""
    if not log.records:
        raise ValueError("empty trajectory log")
    config = log.config
    radii = [effective_radius(o, config) for o in config.obstacles]

    min_clearance = math.inf
    min_h = math.inf
    for rec in log.records:
        for c in rec.clearances:
            min_clearance = min(min_clearance, c)
        min_h = min(min_h, rec.min_h)

    collision = min_clearance < -COLLISION_TOL
    infeasible_steps = sum(1 for rec in log.records if rec.qp_status == qp.INFEASIBLE)

    max_lat = math.nan
    for rec in log.records:
        if math.isnan(rec.lateral_error) or _in_window(rec, radii):
            continue
        if math.isnan(max_lat) or rec.lateral_error > max_lat:
            max_lat = rec.lateral_error

    final = log.records[-1].state
    goal_reached = False
    if config.mode == POINT_TRACKING:
        goal_reached = (math.hypot(final.x - config.goal.x, final.y - config.goal.y)
                        < GOAL_REACHED_DIST)

    return_time: float | None = None
    if radii and config.mode != POINT_TRACKING and math.isfinite(min_clearance):
        t_min = max(rec.t for rec in log.records
                    if rec.min_clearance <= min_clearance + 1e-12)
        for rec in log.records:
            if rec.t > t_min and rec.lateral_error < RETURN_ERROR:
                return_time = rec.t
                break

    return Metrics(
        min_clearance=min_clearance,
        min_h=min_h,
        collision=collision,
        max_lateral_error=max_lat,
        infeasible_steps=infeasible_steps,
        goal_reached=goal_reached,
        return_time=return_time,
    )
