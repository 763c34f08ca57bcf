"""Project initial conditions and evaluate the three norms of the estimates.

The Taylor-Green vortex projects exactly onto eight sine modes of the
|k|^2 = 3 shell; its L2 norm has the closed form sqrt((2 pi)^3 / 4).
The L4 norm is computed by quadrature on a grid fine enough that |u|^4
is integrated exactly.
"""

import math

import numpy as np

import gns

basis = gns.build_basis(2)
tg = gns.project_initial(gns.TaylorGreen(), basis)
print(f"Taylor-Green on cutoff 2: {np.count_nonzero(tg.values)} nonzero coefficients")
print(f"  ||u||^2   = {gns.norm_l2(tg) ** 2:.12f}  (closed form {(2 * math.pi) ** 3 / 4:.12f})")
print(f"  ||grad u|| = {gns.norm_h1(tg):.12f}  (= sqrt(3) ||u||, single shell)")
print(f"  ||u||_L4  = {gns.norm_l4(tg):.12f}")

ratio = gns.norm_l2(tg) / gns.norm_h1(tg)
print(f"  Poincare check: ||u|| / ||grad u|| = {ratio:.6f} <= 1")

print("\ngrid round trip at three resolutions:")
rng = np.random.default_rng(0)
c = gns.CoefficientVector(rng.standard_normal(basis.n), basis)
for M in (5, 9, 16):
    grid = gns.to_grid(c, M)
    back = gns.grid_to_coefficients(grid, basis)
    err = np.max(np.abs(back.values - c.values))
    div = gns.spectral_divergence_max(grid)
    print(f"  M={M:2d}: round-trip error {err:.2e}, spectral divergence {div:.2e}")

single = np.zeros(basis.n)
single[next(i for i, m in enumerate(basis.modes) if m.lam == 1.0 and m.index.parity == 1)] = 1.0
cs = gns.CoefficientVector(single, basis)
expected = 1.5 ** 0.25 * (2 * math.pi) ** -0.75
print(f"\nsingle sine mode: ||phi||_L4 = {gns.norm_l4(cs):.10f} "
      f"(closed form {expected:.10f})")
