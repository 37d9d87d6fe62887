"""Eigenstate tracking with and without the correction.

The bare precessing drive only holds its eigenstate in the adiabatic
limit. With the counterdiabatic term added the state stays pinned at any
loop rate. Sweeps the rate ratio over four decades and prints the worst
tracking fidelity for both drives.
"""
import numpy as np

from tqdecho import (
    LoopParams,
    StepPolicy,
    evolve_eigenstate,
    single_loop_schedule,
    tracking_fidelity,
)

theta = np.pi / 3
pol = StepPolicy(substeps=4096)

print(f"cone angle {theta:.4f}, ratios omega/omega0 from 0.01 to 100")
print(f"{'ratio':>8s} {'corrected min F':>16s} {'uncorrected min F':>18s}")
for ratio in (0.01, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0):
    p = LoopParams(theta=theta, omega=ratio, omega0=1.0)
    rows = []
    for corrected in (True, False):
        sched = single_loop_schedule(p, corrected=corrected)
        traj = evolve_eigenstate(sched, 0, pol, samples=128)
        rows.append(tracking_fidelity(traj, 0).min())
    print(f"{ratio:8.2f} {rows[0]:16.12f} {rows[1]:18.12f}")

print()
print("The uncorrected floor has a closed form: ((omega0 - omega cos theta)/nu)^2")
print("with nu^2 = omega0^2 + omega^2 - 2 omega omega0 cos theta. At ratio 1:")
p = LoopParams(theta=theta, omega=1.0, omega0=1.0)
nu2 = p.omega0**2 + p.omega**2 - 2 * p.omega * p.omega0 * np.cos(theta)
print(f"  analytic {((p.omega0 - p.omega * np.cos(theta)) ** 2 / nu2):.6f}")
