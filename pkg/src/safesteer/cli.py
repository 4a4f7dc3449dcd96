"""Command-line front end: scenario execution and artifact emission.

Exit codes: 0 collision-free completion, 1 usage/config error, 2 collision,
3 infeasible QP steps without a collision.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from dataclasses import dataclass
from pathlib import Path

from .engine import compute_metrics, run
from .io import (load_config, save_config, write_csv, write_metrics,
                 write_qp_dump, write_svg)
from .world import SCENARIO_IDS, build_scenario

__all__ = ["RunRequest", "CLIError", "parse_args", "execute", "main", "entry"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_COLLISION = 2
EXIT_INFEASIBLE = 3


class CLIError(Exception):
    """Usage or configuration error; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit(2)
        raise CLIError(message)


@dataclass
class RunRequest:
    scenario: str | None
    config_path: str | None
    out_dir: str
    dt: float | None = None
    duration: float | None = None
    csv: bool = True
    svg: bool = True
    metrics: bool = True
    dump_qp: bool = False
    emit_config: bool = False


def _build_parser() -> _Parser:
    parser = _Parser(prog="safesteer", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute one scenario")
    source = run_p.add_mutually_exclusive_group(required=True)
    source.add_argument("--scenario", help=f"built-in scenario id: {', '.join(SCENARIO_IDS)}")
    source.add_argument("--config", help="path to a scenario JSON file")
    run_p.add_argument("--out", default="out", help="output directory (default: out)")
    run_p.add_argument("--dt", type=float, help="override the step size [s]")
    run_p.add_argument("--duration", type=float, help="override the duration [s]")
    run_p.add_argument("--csv", action=argparse.BooleanOptionalAction, default=True,
                       help="write trajectory.csv (default on)")
    run_p.add_argument("--svg", action=argparse.BooleanOptionalAction, default=True,
                       help="write scenario.svg (default on)")
    run_p.add_argument("--metrics", action=argparse.BooleanOptionalAction, default=True,
                       help="write metrics.json (default on)")
    run_p.add_argument("--dump-qp", action="store_true",
                       help="write qp_dump.jsonl (one QP per step)")
    run_p.add_argument("--emit-config", action="store_true",
                       help="write the resolved scenario.json")

    sub.add_parser("list", help="print the built-in scenario ids")
    return parser


def parse_args(argv: list[str]) -> RunRequest | None:
    """Parse argv; RunRequest for `run`, None for `list`. Raises CLIError."""
    ns = _build_parser().parse_args(argv)
    if ns.command == "list":
        return None
    return RunRequest(
        scenario=ns.scenario,
        config_path=ns.config,
        out_dir=ns.out,
        dt=ns.dt,
        duration=ns.duration,
        csv=ns.csv,
        svg=ns.svg,
        metrics=ns.metrics,
        dump_qp=ns.dump_qp,
        emit_config=ns.emit_config,
    )


def execute(request: RunRequest) -> int:
    """Run the requested scenario and write the selected artifacts."""
    try:
        if request.scenario is not None:
            config = build_scenario(request.scenario)
        else:
            config = load_config(request.config_path)
    except (ValueError, OSError, KeyError) as exc:
        raise CLIError(str(exc)) from exc

    overrides = {}
    if request.dt is not None:
        overrides["dt"] = request.dt
    if request.duration is not None:
        overrides["duration"] = request.duration
    if overrides:
        config = dataclasses.replace(config, **overrides)

    out = Path(request.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    log = run(config)
    metrics = compute_metrics(log)

    if request.emit_config:
        save_config(config, out / "scenario.json")
    if request.csv:
        write_csv(log, out / "trajectory.csv")
    if request.metrics:
        write_metrics(metrics, out / "metrics.json")
    if request.svg:
        write_svg(log, out / "scenario.svg")
    if request.dump_qp:
        write_qp_dump(log, out / "qp_dump.jsonl")

    print(f"{config.name}: steps={len(log.records)} "
          f"min_clearance={metrics.min_clearance:.3f} "
          f"collision={metrics.collision} infeasible={metrics.infeasible_steps} "
          f"-> {out}")

    if metrics.collision:
        return EXIT_COLLISION
    if metrics.infeasible_steps > 0:
        return EXIT_INFEASIBLE
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        request = parse_args(argv)
        if request is None:
            for scenario_id in SCENARIO_IDS:
                print(scenario_id)
            return EXIT_OK
        return execute(request)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())
