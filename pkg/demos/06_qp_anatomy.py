"""Anatomy of one control step: rows, solve, certificate.

Builds the per-step QP by hand for a vehicle approaching an obstacle,
solves it, and inspects the active set and the KKT certificate.

Run:  python demos/06_qp_anatomy.py
"""

from safesteer import (DEFAULT_PARAMS, GainSet, QPProblem, VehicleState,
                       cbf_row, certify_kkt, clf_row, derive_coefficients,
                       lie_bundle, solve, steer_box_rows)

params = DEFAULT_PARAMS
coeffs = derive_coefficients(params)
gains = GainSet(clf_gain1=6.0, clf_gain2=16.4, cbf_gain1=5.0, cbf_gain2=6.0,
                slack_weight=100.0)

# vehicle entering the avoidance band of an obstacle ahead-left
state = VehicleState(beta=0.005, r=0.05, x=0.0, y=-0.2, psi=0.02)
goal = (4.4, 0.0)       # lookahead point on the reference path
obstacle = (14.0, 1.8)  # obstacle center
radius = 2.4            # inflated safety radius

goal_chain = lie_bundle(state, coeffs, params, *goal, 0.0)
obs_chain = lie_bundle(state, coeffs, params, *obstacle, radius * radius)

rows = (clf_row(goal_chain, gains),
        cbf_row(obs_chain, gains, tag="bike"),
        *steer_box_rows(0.5))
problem = QPProblem(u_ref=0.0, q=gains.slack_weight, rows=rows)

print("rows (coef_u * u + coef_slack * slack <= rhs):")
for i, row in enumerate(rows):
    print(f"  [{i}] {row.kind:3s} {row.tag:8s} "
          f"{row.coef_u:+9.3f} u {row.coef_slack:+5.1f} s <= {row.rhs:+9.3f}")

solution = solve(problem)
print(f"\nstatus: {solution.status}")
print(f"steer:  {solution.u_star:+.4f} rad   slack: {solution.slack_star:+.4f}")
print(f"active rows: {[rows[i].tag or rows[i].kind for i in solution.active_set]}")
print(f"multipliers: {[f'{m:.3f}' for m in solution.multipliers]}")

report = certify_kkt(problem, solution)
print("\nKKT certificate:")
print(f"  primal infeasibility : {report.primal_infeasibility:.2e}")
print(f"  stationarity         : {report.stationarity:.2e}")
print(f"  complementarity      : {report.complementarity:.2e}")
print(f"  multiplier negativity: {report.multiplier_negativity:.2e}")
