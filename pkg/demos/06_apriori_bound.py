"""Certify the a-priori velocity bound on a forced trajectory.

With c1 = ||u0||^2 and c2 = 2 sup_t int ||f|| ds, the energy inequality
closes into the quadratic relation b^2 <= c1 + c2 b for the running
velocity sup b(t), whose explicit root b* = (c2 + sqrt(c2^2 + 4 c1))/2
bounds the solution for all time; the dissipation budget is then
bounded by c1 + c2 b*.
"""

import math

import numpy as np

import gns
from gns.verifier import quadratic_root_bound

config = gns.ScenarioConfig(
    nu=0.5, horizon=2.0, dt=1e-3, cutoff=2,
    ic=gns.BeltramiShell(1, seed=11),
    forcing=gns.ExponentialDecayForcing(0.5, 2.0, gns.SingleModePattern((1, 0, 0), 1, 0)),
    stride=10,
)
traj = gns.simulate(config)

c1 = traj.energy[0]
c2 = 2.0 * traj.int_f[-1]
bstar = quadratic_root_bound(c1, c2)
print(f"c1 = ||u0||^2 = {c1:.6f}")
print(f"c2 = 2 sup int ||f|| = {c2:.6f}  (closed-form bound {2 * 0.5 / 2.0:.6f})")
print(f"b* = (c2 + sqrt(c2^2 + 4 c1)) / 2 = {bstar:.6f}")
print(f"root identity |b*^2 - (c1 + c2 b*)| = {abs(bstar**2 - (c1 + c2 * bstar)):.2e}")

print(f"\nsup_t ||u(t)||           = {math.sqrt(np.max(traj.energy)):.6f}")
print(f"sup_t [E + 2 nu int ...] = {np.max(traj.energy + 2 * config.nu * traj.int_grad2):.6f}"
      f"  vs budget {c1 + c2 * bstar:.6f}")

for report in gns.apriori_bound(traj) + [gns.parseval_sup(traj), gns.assumption_A(traj)]:
    print(f"  {report.name:24s} lhs={report.lhs:9.5f} rhs={report.rhs:9.5f} "
          f"margin={report.margin:9.5f} satisfied={report.satisfied}")
