"""Declarative scenario world: reference paths, moving obstacles, builders.

Scenario geometry for the built-in scenarios is synthesized at desk scale.
The crash-archetype builders (fars210/220/310) reconstruct the qualitative
conflict geometry only: a left turn across a straight-riding bicyclist, a
bicyclist merging into the ego lane ahead, and a bicyclist entering the
lane mid-block from the roadside. Coordinates are builder constants and can
be overridden through the config file; none of them are measured data. All
bicyclists ride predefined trajectories and do not react to the ego vehicle.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .constraints import GainSet, PointTarget
from .vehicle import VehicleParams, VehicleState

__all__ = [
    "ReferencePath",
    "MovingObstacle",
    "ScenarioConfig",
    "PATH_TRACKING",
    "POINT_TRACKING",
    "SCENARIO_IDS",
    "obstacle_position",
    "target_point",
    "lateral_error",
    "effective_radius",
    "build_scenario",
]

Mode = Literal["PATH_TRACKING", "POINT_TRACKING"]
PATH_TRACKING: Mode = "PATH_TRACKING"
POINT_TRACKING: Mode = "POINT_TRACKING"


class ReferencePath:
    """Piecewise-linear reference path with cumulative arc length."""

    def __init__(self, waypoints: Sequence[Sequence[float]]) -> None:
        pts = np.asarray(waypoints, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
            raise ValueError("a path needs at least two (x, y) waypoints")
        if not np.all(np.isfinite(pts)):
            raise ValueError("waypoints must be finite")
        seg = np.diff(pts, axis=0)
        seg_len = np.hypot(seg[:, 0], seg[:, 1])
        if np.any(seg_len <= 0.0):
            raise ValueError("consecutive waypoints must be distinct")
        self.waypoints = pts
        self.seg = seg
        self.seg_len = seg_len
        self.arc = np.concatenate(([0.0], np.cumsum(seg_len)))

    @property
    def length(self) -> float:
        return float(self.arc[-1])

    def point_at(self, s: float) -> tuple[float, float]:
        """Point at arc length s, clamped to the endpoints."""
        if s <= 0.0:
            return float(self.waypoints[0, 0]), float(self.waypoints[0, 1])
        if s >= self.length:
            return float(self.waypoints[-1, 0]), float(self.waypoints[-1, 1])
        k = int(np.searchsorted(self.arc, s, side="right") - 1)
        k = min(k, len(self.seg_len) - 1)
        t = (s - self.arc[k]) / self.seg_len[k]
        p = self.waypoints[k] + t * self.seg[k]
        return float(p[0]), float(p[1])

    def project(self, x: float, y: float) -> tuple[float, float]:
        """(arc length, distance) of the nearest path point.

        Exact ties between segments resolve to the smaller arc length.
        """
        p = np.array((x, y), dtype=float)
        rel = p - self.waypoints[:-1]
        t = np.einsum("ij,ij->i", rel, self.seg) / (self.seg_len * self.seg_len)
        t = np.clip(t, 0.0, 1.0)
        closest = self.waypoints[:-1] + t[:, None] * self.seg
        d2 = np.einsum("ij,ij->i", closest - p, closest - p)
        k = int(np.argmin(d2))
        s = float(self.arc[k] + t[k] * self.seg_len[k])
        return s, float(math.sqrt(d2[k]))


@dataclass(frozen=True)
class MovingObstacle:
    """Disk obstacle riding a piecewise-linear (t, x, y) trajectory.

    A single knot is a static obstacle; outside the knot range the position
    clamps to the first/last knot.
    """

    radius: float
    trajectory: tuple[tuple[float, float, float], ...]
    label: str = ""

    def __post_init__(self) -> None:
        if not (self.radius > 0.0):
            raise ValueError(f"obstacle radius must be > 0, got {self.radius!r}")
        if len(self.trajectory) < 1:
            raise ValueError("trajectory needs at least one (t, x, y) knot")
        times = [knot[0] for knot in self.trajectory]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("knot times must be strictly increasing")


def obstacle_position(obs: MovingObstacle, t: float) -> tuple[float, float]:
    """Piecewise-linear interpolation of the obstacle center at time t."""
    knots = obs.trajectory
    if t <= knots[0][0]:
        return knots[0][1], knots[0][2]
    if t >= knots[-1][0]:
        return knots[-1][1], knots[-1][2]
    i = bisect_right([k[0] for k in knots], t) - 1
    t0, x0, y0 = knots[i]
    t1, x1, y1 = knots[i + 1]
    w = (t - t0) / (t1 - t0)
    return x0 + w * (x1 - x0), y0 + w * (y1 - y0)


def target_point(path: ReferencePath, x: float, y: float, lookahead: float) -> PointTarget:
    """Path point one lookahead ahead of the projection of (x, y)."""
    if not (lookahead > 0.0):
        raise ValueError(f"lookahead must be > 0, got {lookahead!r}")
    s, _ = path.project(x, y)
    gx, gy = path.point_at(s + lookahead)
    return PointTarget(gx, gy)


def lateral_error(path: ReferencePath, x: float, y: float) -> float:
    """Distance from (x, y) to the nearest point of the path polyline."""
    _, dist = path.project(x, y)
    return dist


@dataclass(frozen=True)
class ScenarioConfig:
    """Complete declarative description of one closed-loop run."""

    name: str
    mode: Mode
    params: VehicleParams
    gains: GainSet
    initial_state: VehicleState
    duration: float            # s
    dt: float                  # s
    lookahead: float = 6.0     # m, path-tracking preview distance
    margin: float = 0.3        # m, extra obstacle inflation
    steer_limit: float = 0.5   # rad
    slack_nonneg: bool = False  # add slack >= 0 to the QP
    path: ReferencePath | None = None
    goal: PointTarget | None = None
    obstacles: tuple[MovingObstacle, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.mode not in (PATH_TRACKING, POINT_TRACKING):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == PATH_TRACKING and self.path is None:
            raise ValueError("PATH_TRACKING needs a reference path")
        if self.mode == POINT_TRACKING and self.goal is None:
            raise ValueError("POINT_TRACKING needs a goal point")
        if not (self.duration > 0.0 and self.dt > 0.0):
            raise ValueError("duration and dt must be > 0")
        if not (self.lookahead > 0.0 and self.steer_limit > 0.0 and self.margin >= 0.0):
            raise ValueError("lookahead/steer_limit must be > 0 and margin >= 0")
        if not self.initial_state.is_finite():
            raise ValueError("initial state must be finite")


def effective_radius(obs: MovingObstacle, config: ScenarioConfig) -> float:
    """Safety radius seen by the controller: physical + half width + margin."""
    return obs.radius + config.params.half_width + config.margin


# ---------------------------------------------------------------------------
# built-in scenarios
# ---------------------------------------------------------------------------
#
# Gains are per-scenario simulation-tuned values. For path tracking the
# useful operating point couples the two tracking gains through speed and
# lookahead: with clf_gain2 at (2*g1*V*L - 2*V^2)/L^2 the tracking row turns
# into a proportional line-of-sight steering law with no dead band; below
# that the controller tolerates a lateral sag before reacting.

_LANE_WIDTH = 3.5       # m, lateral offset of the lane change
_RAMP_START = 20.0      # m
_RAMP_LEN = 40.0        # m
_PATH_STEP = 0.5        # m, waypoint spacing
_BIKE_RADIUS = 0.5      # m, physical bicyclist footprint radius


def _smoothstep(s: float) -> float:
    s = min(1.0, max(0.0, s))
    return s * s * (3.0 - 2.0 * s)


def _lane_change_path(x_end: float = 160.0) -> ReferencePath:
    xs = np.arange(0.0, x_end + 0.5 * _PATH_STEP, _PATH_STEP)
    ys = [_LANE_WIDTH * _smoothstep((x - _RAMP_START) / _RAMP_LEN) for x in xs]
    return ReferencePath(np.column_stack([xs, ys]))


def _straight_path(x_end: float = 170.0) -> ReferencePath:
    xs = np.arange(0.0, x_end + 0.5 * _PATH_STEP, _PATH_STEP)
    return ReferencePath(np.column_stack([xs, np.zeros_like(xs)]))


def _left_turn_path(straight_in: float = 30.0, turn_radius: float = 25.0,
                    straight_out: float = 80.0) -> ReferencePath:
    """Straight leg, quarter-circle left turn, straight exit leg."""
    pts: list[tuple[float, float]] = []
    for s in np.arange(0.0, straight_in, _PATH_STEP):
        pts.append((s, 0.0))
    arc_len = 0.5 * math.pi * turn_radius
    for s in np.arange(0.0, arc_len, _PATH_STEP):
        phi = s / turn_radius
        pts.append((straight_in + turn_radius * math.sin(phi),
                    turn_radius * (1.0 - math.cos(phi))))
    for s in np.arange(0.0, straight_out + 0.5 * _PATH_STEP, _PATH_STEP):
        pts.append((straight_in + turn_radius, turn_radius + s))
    return ReferencePath(pts)


def _tracking_gains(g1: float, v: float, lookahead: float,
                    cbf_gain1: float, cbf_gain2: float,
                    slack_weight: float = 100.0, reserve: float = 0.05) -> GainSet:
    """Gain set with clf_gain2 pinned just below the no-dead-band point."""
    g2 = (2.0 * g1 * v * lookahead - 2.0 * v * v - reserve) / (lookahead * lookahead)
    return GainSet(clf_gain1=g1, clf_gain2=g2,
                   cbf_gain1=cbf_gain1, cbf_gain2=cbf_gain2,
                   slack_weight=slack_weight)


def _build_lane_change() -> ScenarioConfig:
    return ScenarioConfig(
        name="lane_change",
        mode=PATH_TRACKING,
        params=VehicleParams(),
        gains=_tracking_gains(g1=6.0, v=10.0, lookahead=4.5, cbf_gain1=3.0, cbf_gain2=2.0),
        initial_state=VehicleState(),
        duration=10.0,
        dt=0.01,
        lookahead=4.5,
        path=_lane_change_path(),
    )


def _build_static_one() -> ScenarioConfig:
    # one static obstacle parked 0.5 m left of the post-ramp centerline;
    # avoidance gains keep real characteristic roots (2 and 3) so the
    # enforced barrier cannot oscillate through zero
    obstacle = MovingObstacle(radius=_BIKE_RADIUS,
                              trajectory=((0.0, 80.0, _LANE_WIDTH + 0.5),),
                              label="parked obstacle")
    return ScenarioConfig(
        name="static_one",
        mode=PATH_TRACKING,
        params=VehicleParams(),
        gains=_tracking_gains(g1=6.0, v=10.0, lookahead=4.5, cbf_gain1=5.0, cbf_gain2=6.0),
        initial_state=VehicleState(),
        duration=14.0,
        dt=0.01,
        lookahead=4.5,
        margin=1.0,
        path=_lane_change_path(),
        obstacles=(obstacle,),
    )


def _build_point_multi() -> ScenarioConfig:
    # three staggered static disks between the start and a 38 m distant goal;
    # tracking gains sit at the tangency point (g2 = g1^2/2 for V=10), which
    # keeps the tracking row mildly active at every range with no dead band
    obstacles = tuple(
        MovingObstacle(radius=_BIKE_RADIUS, trajectory=((0.0, ox, oy),), label=f"disk{i}")
        for i, (ox, oy) in enumerate([(15.0, 1.0), (22.0, -1.1), (29.0, 1.0)])
    )
    return ScenarioConfig(
        name="point_multi",
        mode=POINT_TRACKING,
        params=VehicleParams(),
        gains=GainSet(clf_gain1=1.5, clf_gain2=1.125, cbf_gain1=5.0, cbf_gain2=6.0,
                      slack_weight=100.0),
        initial_state=VehicleState(),
        duration=10.0,
        dt=0.01,
        margin=0.3,
        goal=PointTarget(38.0, 0.0),
        obstacles=obstacles,
    )


def _build_dynamic_one() -> ScenarioConfig:
    # bicyclist crossing the straight lane bottom-to-top at 2.5 m/s, timed so
    # the controller threads behind it; the large margin pulls the avoidance
    # activation inside the clearance window used by the metrics
    crossing = MovingObstacle(
        radius=_BIKE_RADIUS,
        trajectory=((0.0, 50.0, -6.0), (9.6, 50.0, 18.0)),
        label="crossing bicyclist",
    )
    return ScenarioConfig(
        name="dynamic_one",
        mode=PATH_TRACKING,
        params=VehicleParams(),
        gains=_tracking_gains(g1=6.0, v=10.0, lookahead=4.5, cbf_gain1=6.0, cbf_gain2=9.0),
        initial_state=VehicleState(),
        duration=12.0,
        dt=0.01,
        lookahead=4.5,
        margin=3.0,
        path=_straight_path(),
        obstacles=(crossing,),
    )


def _build_fars210() -> ScenarioConfig:
    # ego turns left across the path of a bicyclist riding straight through
    # the junction at 4 m/s; the ego crosses the bicyclist's line just after
    # the bicyclist has cleared the conflict point
    bike = MovingObstacle(
        radius=_BIKE_RADIUS,
        trajectory=((0.0, 75.0, 18.0), (24.0, -21.0, 18.0)),
        label="bicyclist",
    )
    return ScenarioConfig(
        name="fars210",
        mode=PATH_TRACKING,
        params=VehicleParams(),
        gains=_tracking_gains(g1=7.0, v=10.0, lookahead=4.5, cbf_gain1=6.0, cbf_gain2=9.0),
        initial_state=VehicleState(),
        duration=12.0,
        dt=0.01,
        lookahead=4.5,
        margin=1.0,
        path=_left_turn_path(),
        obstacles=(bike,),
    )


def _build_fars220() -> ScenarioConfig:
    # bicyclist rides the adjacent lane at 4 m/s, merges into the ego lane
    # ahead of the vehicle and slows to 2 m/s; the ego overtakes around it
    bike = MovingObstacle(
        radius=_BIKE_RADIUS,
        trajectory=((0.0, 35.0, 3.2), (2.0, 43.0, 3.2), (5.0, 55.0, 0.2),
                    (14.0, 73.0, 0.2)),
        label="merging bicyclist",
    )
    return ScenarioConfig(
        name="fars220",
        mode=PATH_TRACKING,
        params=VehicleParams(),
        gains=_tracking_gains(g1=6.0, v=10.0, lookahead=4.5, cbf_gain1=5.0, cbf_gain2=6.0),
        initial_state=VehicleState(),
        duration=12.0,
        dt=0.01,
        lookahead=4.5,
        margin=1.2,
        path=_straight_path(),
        obstacles=(bike,),
    )


def _build_fars310() -> ScenarioConfig:
    # bicyclist waits at the roadside mid-block, then darts across the lane
    # at 2.5 m/s; the ego threads behind it
    bike = MovingObstacle(
        radius=_BIKE_RADIUS,
        trajectory=((0.0, 60.0, -7.0), (1.5, 60.0, -7.0), (7.5, 60.0, 8.0)),
        label="roadside bicyclist",
    )
    return ScenarioConfig(
        name="fars310",
        mode=PATH_TRACKING,
        params=VehicleParams(),
        gains=_tracking_gains(g1=6.0, v=10.0, lookahead=4.5, cbf_gain1=6.0, cbf_gain2=9.0),
        initial_state=VehicleState(),
        duration=12.0,
        dt=0.01,
        lookahead=4.5,
        margin=1.2,
        path=_straight_path(),
        obstacles=(bike,),
    )


_BUILDERS = {
    "lane_change": _build_lane_change,
    "static_one": _build_static_one,
    "point_multi": _build_point_multi,
    "dynamic_one": _build_dynamic_one,
    "fars210": _build_fars210,
    "fars220": _build_fars220,
    "fars310": _build_fars310,
}

SCENARIO_IDS = tuple(_BUILDERS)


def build_scenario(scenario_id: str) -> ScenarioConfig:
    """Instantiate a built-in scenario by id (case-insensitive)."""
    key = scenario_id.lower()
    if key not in _BUILDERS:
        raise ValueError(f"unknown scenario {scenario_id!r}; known: {', '.join(SCENARIO_IDS)}")
    return _BUILDERS[key]()
