"""Exact solver for the per-step steering QP.

The decision space is two-dimensional (steer angle u, tracking slack), the
objective (u - u_ref)^2 + q * slack^2 is strictly convex, and there are at
most a dozen inequality rows. That makes exhaustive active-set enumeration
both globally optimal and cheap: the optimizer is the best feasible
KKT-consistent point among the unconstrained minimizer, every single active
row, and every non-degenerate active pair. No iterative solver, nothing to
warm start, and every returned point carries a KKT certificate.

Infeasibility (conflicting avoidance rows under bounded steering) is
reported as a status, not an exception; the caller owns the fallback.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

from .constraints import CLF, ConstraintRow

__all__ = [
    "QPProblem",
    "QPSolution",
    "KKTReport",
    "OPTIMAL",
    "INFEASIBLE",
    "solve",
    "certify_kkt",
    "problem_to_dict",
    "problem_from_dict",
]

Status = Literal["OPTIMAL", "INFEASIBLE"]
OPTIMAL: Status = "OPTIMAL"
INFEASIBLE: Status = "INFEASIBLE"

FEAS_TOL = 1e-9       # accepted primal residual
MULT_TOL = 1e-10      # accepted multiplier negativity
DEGEN_TOL = 1e-12     # rank test for parallel active pairs


@dataclass(frozen=True)
class QPProblem:
    """One steering QP: minimize (u - u_ref)^2 + q * slack^2 over the rows."""

    u_ref: float
    q: float
    rows: tuple[ConstraintRow, ...]

    def __post_init__(self) -> None:
        if not (math.isfinite(self.q) and self.q > 0.0):
            raise ValueError(f"slack weight q must be finite and > 0, got {self.q!r}")
        if not math.isfinite(self.u_ref):
            raise ValueError("u_ref must be finite")
        clf_rows = sum(1 for row in self.rows if row.kind == CLF)
        if clf_rows > 1:
            raise ValueError(f"at most one tracking row per solve, got {clf_rows}")
        for i, row in enumerate(self.rows):
            if not (math.isfinite(row.coef_u) and math.isfinite(row.coef_slack)
                    and math.isfinite(row.rhs)):
                raise ValueError(f"row {i} has non-finite coefficients: {row}")

    def objective(self, u: float, slack: float) -> float:
        du = u - self.u_ref
        return du * du + self.q * slack * slack


@dataclass(frozen=True)
class QPSolution:
    u_star: float
    slack_star: float
    status: Status
    active_set: tuple[int, ...]        # indices into problem.rows
    multipliers: tuple[float, ...]     # aligned with active_set
    objective: float
    kkt_residual: float


@dataclass(frozen=True)
class KKTReport:
    """First-order optimality residuals of a claimed optimizer."""

    primal_infeasibility: float
    stationarity: float
    complementarity: float
    multiplier_negativity: float

    @property
    def max_residual(self) -> float:
        return max(self.primal_infeasibility, self.stationarity,
                   self.complementarity, self.multiplier_negativity)


def _max_violation(rows: Sequence[ConstraintRow], u: float, slack: float) -> float:
    worst = 0.0
    for row in rows:
        res = row.residual(u, slack)
        if res > worst:
            worst = res
    return worst


def _kkt_report(problem: QPProblem, u: float, slack: float,
                active: Sequence[int], mults: Sequence[float]) -> KKTReport:
    gu = 2.0 * (u - problem.u_ref)
    gs = 2.0 * problem.q * slack
    for idx, lam in zip(active, mults):
        row = problem.rows[idx]
        gu += lam * row.coef_u
        gs += lam * row.coef_slack
    comp = 0.0
    for idx, lam in zip(active, mults):
        comp = max(comp, abs(lam * problem.rows[idx].residual(u, slack)))
    neg = max([0.0] + [-lam for lam in mults])
    return KKTReport(
        primal_infeasibility=_max_violation(problem.rows, u, slack),
        stationarity=max(abs(gu), abs(gs)),
        complementarity=comp,
        multiplier_negativity=neg,
    )


def _enumerate(problem: QPProblem, feas_tol: float, mult_tol: float):
    """Best feasible KKT-consistent candidate, or None.

    Enumeration order (empty set, singles, pairs, each ascending) plus a
    strict improvement test fixes the tie-break: among equal objectives the
    lowest-index active set wins.
    """
    rows = problem.rows
    u_ref, q = problem.u_ref, problem.q
    best = None  # (objective, u, slack, active, mults)

    def consider(u, slack, active, mults):
        nonlocal best
        if _max_violation(rows, u, slack) > feas_tol:
            return
        obj = problem.objective(u, slack)
        if best is None or obj < best[0]:
            best = (obj, u, slack, active, mults)

    consider(u_ref, 0.0, (), ())
    if best is not None and not best[3]:
        return best  # unconstrained minimizer is feasible, hence globally optimal

    live = [i for i, row in enumerate(rows)
            if abs(row.coef_u) > 0.0 or abs(row.coef_slack) > 0.0]

    for i in live:
        row = rows[i]
        au, asl, b = row.coef_u, row.coef_slack, row.rhs
        denom = 0.5 * au * au + asl * asl / (2.0 * q)
        lam = (au * u_ref - b) / denom
        if lam < -mult_tol:
            continue
        consider(u_ref - 0.5 * lam * au, -lam * asl / (2.0 * q), (i,), (lam,))

    for ai in range(len(live)):
        for aj in range(ai + 1, len(live)):
            i, j = live[ai], live[aj]
            ri, rj = rows[i], rows[j]
            det = ri.coef_u * rj.coef_slack - ri.coef_slack * rj.coef_u
            scale = max(1.0,
                        max(abs(ri.coef_u), abs(ri.coef_slack))
                        * max(abs(rj.coef_u), abs(rj.coef_slack)))
            if abs(det) <= DEGEN_TOL * scale:
                continue
            u = (ri.rhs * rj.coef_slack - ri.coef_slack * rj.rhs) / det
            slack = (ri.coef_u * rj.rhs - ri.rhs * rj.coef_u) / det
            gu = 2.0 * (u - u_ref)
            gs = 2.0 * q * slack
            lam_i = (-gu * rj.coef_slack + gs * rj.coef_u) / det
            lam_j = (-gs * ri.coef_u + gu * ri.coef_slack) / det
            if lam_i < -mult_tol or lam_j < -mult_tol:
                continue
            consider(u, slack, (i, j), (lam_i, lam_j))

    return best


def _lp_feasible(rows: Iterable[ConstraintRow]) -> bool:
    """Phase-1 check: is the row polyhedron non-empty?

    Minimizes the worst violation t over (u, slack, t) with t floored at -1;
    the rows admit a point iff the minimum is <= 0.
    """
    from scipy.optimize import linprog

    rows = list(rows)
    if not rows:
        return True
    a_ub = [[row.coef_u, row.coef_slack, -1.0] for row in rows]
    b_ub = [row.rhs for row in rows]
    res = linprog(c=[0.0, 0.0, 1.0], A_ub=a_ub, b_ub=b_ub,
                  bounds=[(None, None), (None, None), (-1.0, None)],
                  method="highs")
    return bool(res.success) and res.fun <= FEAS_TOL


def solve(problem: QPProblem) -> QPSolution:
    """Globally solve the QP, or report INFEASIBLE when no point satisfies the rows."""
    for row in problem.rows:
        if abs(row.coef_u) == 0.0 and abs(row.coef_slack) == 0.0 and row.rhs < -FEAS_TOL:
            return QPSolution(math.nan, math.nan, INFEASIBLE, (), (), math.nan, math.nan)

    best = _enumerate(problem, FEAS_TOL, MULT_TOL)
    if best is None and _lp_feasible(problem.rows):
        # numerically marginal feasible set; retry once with loosened tolerances
        best = _enumerate(problem, FEAS_TOL * 100.0, MULT_TOL * 100.0)
    if best is None:
        return QPSolution(math.nan, math.nan, INFEASIBLE, (), (), math.nan, math.nan)

    obj, u, slack, active, mults = best
    report = _kkt_report(problem, u, slack, active, mults)
    return QPSolution(u, slack, OPTIMAL, active, mults, obj, report.max_residual)


def certify_kkt(problem: QPProblem, solution: QPSolution) -> KKTReport:
    """Recompute the optimality residuals of a solution from scratch."""
    if solution.status != OPTIMAL:
        raise ValueError("can only certify OPTIMAL solutions")
    return _kkt_report(problem, solution.u_star, solution.slack_star,
                       solution.active_set, solution.multipliers)


def problem_to_dict(problem: QPProblem) -> dict:
    """JSON-ready form of one QP (the dump/replay line format)."""
    return {
        "u_ref": problem.u_ref,
        "q": problem.q,
        "rows": [
            {"coef_u": row.coef_u, "coef_slack": row.coef_slack, "rhs": row.rhs,
             "kind": row.kind, "tag": row.tag}
            for row in problem.rows
        ],
    }


def problem_from_dict(data: dict) -> QPProblem:
    rows = tuple(
        ConstraintRow(coef_u=r["coef_u"], coef_slack=r["coef_slack"], rhs=r["rhs"],
                      kind=r["kind"], tag=r.get("tag", ""))
        for r in data["rows"]
    )
    return QPProblem(u_ref=data["u_ref"], q=data["q"], rows=rows)
