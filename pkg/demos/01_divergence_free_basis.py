"""Build the divergence-free Fourier basis and check its structure.

Every mode is a single plane wave with a polarization vector orthogonal
to its wavevector, normalized to unit L2 norm.  The family is
orthonormal and the stiffness form (grad phi_i, grad phi_j) is exactly
diagonal with entries |k|^2, which is what the Galerkin construction
needs from a basis.
"""

import numpy as np

import gns

for cutoff in (1, 2, 3):
    basis = gns.build_basis(cutoff)
    print(f"cutoff {cutoff}: {basis.n} modes "
          f"({(2 * cutoff + 1) ** 3 - 1} nonzero wavevectors, half kept)")

basis = gns.build_basis(1)
print("\nfirst modes (j, k, pol, parity, lambda):")
for j, mode in enumerate(basis.modes[:8]):
    parity = ("cos", "sin")[mode.index.parity]
    print(f"  {j:2d}  k={mode.index.k}  p{mode.index.pol}  {parity}  lam={mode.lam:g}")

e1, e2 = gns.polarization_pair((1, 0, 0))
print(f"\npolarization pair of k=(1,0,0): e1={e1}, e2={e2}")
print("right-handed triad: e1 x e2 =", np.cross(e1, e2))

for cutoff in (1, 2, 3, 4):
    b = gns.build_basis(cutoff)
    gram_dev, stiff_dev = gns.gram_report(b, 2 * cutoff + 1)
    print(f"cutoff {cutoff}: max |(phi_i,phi_j) - delta| = {gram_dev:.2e}, "
          f"max |(grad phi_i,grad phi_j) - lam delta| = {stiff_dev:.2e}")
