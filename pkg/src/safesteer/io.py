"""Serialization: scenario config JSON, trajectory CSV, metrics JSON, SVG plot.

The config document mirrors ScenarioConfig field for field; unknown keys are
rejected so typos in gain names fail loudly instead of silently using
defaults. Floats in the CSV are written with 17 significant digits, which
round-trips doubles exactly, so re-running from an emitted config reproduces
the CSV byte for byte.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict
from pathlib import Path
from typing import Any, Iterable

from .constraints import GainSet, PointTarget
from .engine import Metrics, StepRecord, TrajectoryLog
from .qp import problem_to_dict
from .vehicle import VehicleParams, VehicleState
from .world import (MovingObstacle, ReferencePath, ScenarioConfig,
                    effective_radius, obstacle_position)

__all__ = [
    "config_to_dict",
    "config_from_dict",
    "load_config",
    "save_config",
    "CSV_COLUMNS",
    "write_csv",
    "read_csv",
    "metrics_to_dict",
    "write_metrics",
    "write_svg",
    "write_qp_dump",
]

CSV_COLUMNS = ("t", "x", "y", "psi", "beta", "r", "delta_f", "slack", "qp_status",
               "min_h", "min_clearance", "lateral_error", "goal_x", "goal_y")


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _check_keys(data: dict, allowed: Iterable[str], required: Iterable[str],
                context: str) -> None:
    allowed = set(allowed)
    required = set(required)
    unknown = set(data) - allowed
    if unknown:
        raise ValueError(f"unknown {context} keys: {sorted(unknown)}")
    missing = required - set(data)
    if missing:
        raise ValueError(f"missing {context} keys: {sorted(missing)}")


# ---------------------------------------------------------------------------
# scenario config
# ---------------------------------------------------------------------------

def config_to_dict(config: ScenarioConfig) -> dict[str, Any]:
    return {
        "name": config.name,
        "mode": config.mode,
        "params": asdict(config.params),
        "gains": asdict(config.gains),
        "initial_state": asdict(config.initial_state),
        "path": (None if config.path is None
                 else [[float(x), float(y)] for x, y in config.path.waypoints]),
        "goal": None if config.goal is None else [config.goal.x, config.goal.y],
        "obstacles": [
            {"radius": o.radius, "label": o.label,
             "trajectory": [[t, x, y] for t, x, y in o.trajectory]}
            for o in config.obstacles
        ],
        "duration": config.duration,
        "dt": config.dt,
        "lookahead": config.lookahead,
        "margin": config.margin,
        "steer_limit": config.steer_limit,
        "slack_nonneg": config.slack_nonneg,
    }


def config_from_dict(data: dict[str, Any]) -> ScenarioConfig:
    required = {"mode", "params", "gains", "initial_state", "path", "goal",
                "obstacles", "duration", "dt", "lookahead", "margin", "steer_limit"}
    _check_keys(data, required | {"name", "slack_nonneg"}, required, "config")
    _check_keys(data["params"], VehicleParams.__dataclass_fields__,
                VehicleParams.__dataclass_fields__, "params")
    _check_keys(data["gains"], GainSet.__dataclass_fields__,
                GainSet.__dataclass_fields__, "gains")
    _check_keys(data["initial_state"], VehicleState.__dataclass_fields__,
                VehicleState.__dataclass_fields__, "initial_state")
    obstacles = []
    for i, entry in enumerate(data["obstacles"]):
        _check_keys(entry, {"radius", "label", "trajectory"},
                    {"radius", "trajectory"}, f"obstacle[{i}]")
        obstacles.append(MovingObstacle(
            radius=float(entry["radius"]),
            trajectory=tuple((float(t), float(x), float(y))
                             for t, x, y in entry["trajectory"]),
            label=str(entry.get("label", "")),
        ))
    return ScenarioConfig(
        name=str(data.get("name", "custom")),
        mode=data["mode"],
        params=VehicleParams(**{k: float(v) for k, v in data["params"].items()}),
        gains=GainSet(**{k: float(v) for k, v in data["gains"].items()}),
        initial_state=VehicleState(**{k: float(v)
                                      for k, v in data["initial_state"].items()}),
        path=None if data["path"] is None else ReferencePath(data["path"]),
        goal=None if data["goal"] is None else PointTarget(float(data["goal"][0]),
                                                           float(data["goal"][1])),
        obstacles=tuple(obstacles),
        duration=float(data["duration"]),
        dt=float(data["dt"]),
        lookahead=float(data["lookahead"]),
        margin=float(data["margin"]),
        steer_limit=float(data["steer_limit"]),
        slack_nonneg=bool(data.get("slack_nonneg", False)),
    )


def save_config(config: ScenarioConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(config_to_dict(config), indent=2) + "\n")


def load_config(path: str | Path) -> ScenarioConfig:
    return config_from_dict(json.loads(Path(path).read_text()))


# ---------------------------------------------------------------------------
# trajectory CSV
# ---------------------------------------------------------------------------

def write_csv(log: TrajectoryLog, path: str | Path) -> None:
    lines = [",".join(CSV_COLUMNS)]
    for rec in log.records:
        s = rec.state
        lines.append(",".join((
            _fmt(rec.t), _fmt(s.x), _fmt(s.y), _fmt(s.psi), _fmt(s.beta), _fmt(s.r),
            _fmt(rec.delta_f), _fmt(rec.slack), rec.qp_status,
            _fmt(rec.min_h), _fmt(rec.min_clearance), _fmt(rec.lateral_error),
            _fmt(rec.goal.x), _fmt(rec.goal.y),
        )))
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv(path: str | Path, config: ScenarioConfig) -> TrajectoryLog:
    """Rebuild a trajectory log from an emitted CSV plus its scenario config.

    Per-obstacle clearances are recomputed from the logged positions and the
    configured obstacle trajectories with the same arithmetic the engine
    uses, so downstream metrics agree exactly.
    """
    text = Path(path).read_text().strip().splitlines()
    header = tuple(text[0].split(","))
    if header != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {header}")
    radii = [effective_radius(o, config) for o in config.obstacles]
    records = []
    for line in text[1:]:
        cells = line.split(",")
        row = dict(zip(CSV_COLUMNS, cells))
        t = float(row["t"])
        state = VehicleState(beta=float(row["beta"]), r=float(row["r"]),
                             x=float(row["x"]), y=float(row["y"]),
                             psi=float(row["psi"]))
        clearances = []
        for obs, radius in zip(config.obstacles, radii):
            ox, oy = obstacle_position(obs, t)
            clearances.append(math.hypot(state.x - ox, state.y - oy) - radius)
        records.append(StepRecord(
            t=t,
            state=state,
            delta_f=float(row["delta_f"]),
            slack=float(row["slack"]),
            qp_status=row["qp_status"],
            clearances=tuple(clearances),
            min_h=float(row["min_h"]),
            lateral_error=float(row["lateral_error"]),
            goal=PointTarget(float(row["goal_x"]), float(row["goal_y"])),
        ))
    return TrajectoryLog(config=config, records=tuple(records))


# ---------------------------------------------------------------------------
# metrics and QP dump
# ---------------------------------------------------------------------------

def metrics_to_dict(metrics: Metrics) -> dict[str, Any]:
    return {
        "min_clearance": metrics.min_clearance,
        "min_h": metrics.min_h,
        "collision": metrics.collision,
        "max_lateral_error": metrics.max_lateral_error,
        "infeasible_steps": metrics.infeasible_steps,
        "goal_reached": metrics.goal_reached,
        "return_time": metrics.return_time,
    }


def write_metrics(metrics: Metrics, path: str | Path) -> None:
    Path(path).write_text(json.dumps(metrics_to_dict(metrics), indent=2) + "\n")


def write_qp_dump(log: TrajectoryLog, path: str | Path) -> None:
    """One QP per line as JSON, for fuzzing and replay."""
    lines = []
    for rec in log.records:
        if rec.problem is not None:
            lines.append(json.dumps(problem_to_dict(rec.problem)))
    Path(path).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# SVG plot (human inspection only; nothing reads these back)
# ---------------------------------------------------------------------------

_SVG_W, _SVG_H, _SVG_PAD = 900.0, 560.0, 40.0


def write_svg(log: TrajectoryLog, path: str | Path) -> None:
    config = log.config
    xs = [rec.state.x for rec in log.records]
    ys = [rec.state.y for rec in log.records]
    if config.path is not None:
        xs += [float(p[0]) for p in config.path.waypoints]
        ys += [float(p[1]) for p in config.path.waypoints]
    if config.goal is not None:
        xs.append(config.goal.x)
        ys.append(config.goal.y)
    t_end = log.records[-1].t
    sample_times = [i * t_end / 4.0 for i in range(5)] if t_end > 0 else [0.0]
    for obs in config.obstacles:
        for t in sample_times:
            ox, oy = obstacle_position(obs, t)
            xs += [ox - obs.radius, ox + obs.radius]
            ys += [oy - obs.radius, oy + obs.radius]

    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    span = max(x1 - x0, y1 - y0, 1.0)
    scale = min((_SVG_W - 2 * _SVG_PAD), (_SVG_H - 2 * _SVG_PAD)) / span

    def sx(x: float) -> float:
        return _SVG_PAD + (x - x0) * scale

    def sy(y: float) -> float:
        return _SVG_H - _SVG_PAD - (y - y0) * scale

    def polyline(points, color, dash="", width=1.5):
        pts = " ".join(f"{sx(px):.2f},{sy(py):.2f}" for px, py in points)
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        return (f'<polyline points="{pts}" fill="none" stroke="{color}"'
                f' stroke-width="{width}"{dash_attr}/>')

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W:.0f}" '
        f'height="{_SVG_H:.0f}" viewBox="0 0 {_SVG_W:.0f} {_SVG_H:.0f}">',
        f'<rect width="{_SVG_W:.0f}" height="{_SVG_H:.0f}" fill="white"/>',
        f'<text x="{_SVG_PAD}" y="24" font-family="sans-serif" font-size="16">'
        f'{config.name}</text>',
    ]
    if config.path is not None:
        parts.append(polyline(config.path.waypoints, "#999999", dash="6 4"))
    for obs in config.obstacles:
        for i, t in enumerate(sample_times):
            ox, oy = obstacle_position(obs, t)
            opacity = 0.25 + 0.75 * (i / max(1, len(sample_times) - 1))
            parts.append(
                f'<circle cx="{sx(ox):.2f}" cy="{sy(oy):.2f}" '
                f'r="{obs.radius * scale:.2f}" fill="#e08030" '
                f'fill-opacity="{opacity:.2f}"/>')
    parts.append(polyline(zip(xs[:len(log.records)], ys[:len(log.records)]),
                          "#1f5fbf", width=2.0))
    if config.goal is not None:
        parts.append(f'<circle cx="{sx(config.goal.x):.2f}" '
                     f'cy="{sy(config.goal.y):.2f}" r="5" fill="#2a9d2a"/>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")
