"""Single-track lateral model basics: coefficients, step response, accuracy.

Run:  python demos/01_vehicle_model.py
"""

from safesteer import (ControlInput, DEFAULT_PARAMS, VehicleState,
                       derive_coefficients, integrate_step, state_derivative)

params = DEFAULT_PARAMS
coeffs = derive_coefficients(params)

print("Default vehicle:", params)
print("Model coefficients:")
for name in ("a11", "a12", "a21", "a22", "b1", "b2"):
    print(f"  {name} = {getattr(coeffs, name):+.4f}")

# step response to a held 0.05 rad steer input
state = VehicleState()
dt = 0.01
print("\nHeld 0.05 rad steer from rest (sampled at 0.25 s):")
print(f"{'t':>5} {'beta':>9} {'yaw rate':>9} {'x':>8} {'y':>8} {'psi':>8}")
for k in range(1, 101):
    state = integrate_step(state, ControlInput(0.05), dt, coeffs, params)
    if k % 25 == 0:
        print(f"{k * dt:5.2f} {state.beta:9.5f} {state.r:9.5f} "
              f"{state.x:8.3f} {state.y:8.3f} {state.psi:8.5f}")

# the yaw-rate response settles near the linear steady state
a = coeffs
den = a.a11 * a.a22 - a.a12 * a.a21
r_ss = (a.a21 * a.b1 - a.a11 * a.b2) * 0.05 / den
print(f"\nsteady-state yaw rate (linear block): {r_ss:.5f} rad/s")

# speed is conserved by construction: xdot^2 + ydot^2 == v^2
d = state_derivative(state, coeffs, params, ControlInput(0.05))
print(f"speed invariant residual: {d[2]**2 + d[3]**2 - params.v**2:.2e}")

# halving dt shrinks the one-step splitting error ~2^5 (4th-order scheme)
probe = VehicleState(0.02, 0.1, 3.0, -1.0, 0.4)


def split_gap(h):
    full = integrate_step(probe, ControlInput(0.2), h, coeffs, params)
    half = integrate_step(probe, ControlInput(0.2), h / 2, coeffs, params)
    half = integrate_step(half, ControlInput(0.2), h / 2, coeffs, params)
    return max(abs(x - y) for x, y in zip(
        (full.beta, full.r, full.x, full.y, full.psi),
        (half.beta, half.r, half.x, half.y, half.psi)))


g1, g2 = split_gap(0.04), split_gap(0.02)
print(f"one-step splitting gap at dt=0.04 / dt=0.02: {g1:.2e} / {g2:.2e} "
      f"(ratio {g1 / g2:.1f}, ~32 expected)")
