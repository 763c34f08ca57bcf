"""Real divergence-free Fourier basis on the periodic box [0, 2*pi)^3.

Each basis field is a single plane wave

    phi(x) = amp * e * cos(k.x)   or   amp * e * sin(k.x)

with an integer wavevector k != 0, a unit polarization vector e
orthogonal to k (so the field is exactly solenoidal), and amplitude
``amp = sqrt(2 / (2*pi)^3)`` so that ||phi||_L2 = 1.  The family is
L2-orthonormal and diagonalizes the vector Laplacian on mean-zero
divergence-free fields:

    (phi_i, phi_j) = delta_ij,      (grad phi_i, grad phi_j) = |k_j|^2 delta_ij.

The periodic box is a surrogate domain: it supplies exactly these two
structural properties (orthonormality and a diagonal stiffness form),
which is what the Galerkin construction downstream relies on.  No-slip
boundaries and exterior domains are out of scope.

Only one representative of each conjugate pair {k, -k} is enumerated
(the lexicographically positive one), since the pair spans the same
real modes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import product

import numpy as np

from .errors import ResolutionError

BOX_LENGTH = 2.0 * math.pi
VOLUME = BOX_LENGTH**3
#: L2-normalizing amplitude of a single cosine/sine mode.
MODE_AMPLITUDE = math.sqrt(2.0 / VOLUME)

COSINE = 0
SINE = 1
PARITY_NAMES = ("cos", "sin")


def lex_positive(k) -> bool:
    """True if the first nonzero component of ``k`` is positive."""
    for comp in k:
        if comp != 0:
            return comp > 0
    return False


def polarization_pair(k):
    """Deterministic orthonormal pair (e1, e2) spanning the plane normal to k.

    e1 = normalize(k x a) where a is the first standard axis (in index
    order) not parallel to k, and e2 = normalize(k x e1).  Together with
    k/|k| the pair forms a right-handed orthonormal triad:
    e1 x e2 = k/|k| exactly.

    Raises ValueError for k = 0, which has no normal plane.
    """
    kv = np.asarray(k, dtype=float)
    if kv.shape != (3,):
        raise ValueError(f"wavevector must be a 3-vector, got shape {kv.shape}")
    if not np.any(kv):
        raise ValueError("wavevector k = 0 admits no polarization pair")
    for axis in range(3):
        a = np.zeros(3)
        a[axis] = 1.0
        c = np.cross(kv, a)
        if np.any(c):
            e1 = c / np.linalg.norm(c)
            break
    c2 = np.cross(kv, e1)
    e2 = c2 / np.linalg.norm(c2)
    return e1, e2


@dataclass(frozen=True, order=True)
class ModeIndex:
    """Identity of one basis field: wavevector, polarization slot, parity."""

    k: tuple[int, int, int]
    pol: int  # 1 or 2, selecting e1 or e2
    parity: int  # COSINE or SINE

    def __post_init__(self):
        if not any(self.k):
            raise ValueError("mode wavevector must be nonzero")
        if not lex_positive(self.k):
            raise ValueError(f"wavevector {self.k} is not the conjugate representative")
        if self.pol not in (1, 2):
            raise ValueError(f"polarization slot must be 1 or 2, got {self.pol}")
        if self.parity not in (COSINE, SINE):
            raise ValueError(f"parity must be COSINE(0) or SINE(1), got {self.parity}")


@dataclass(frozen=True)
class BasisMode:
    """One orthonormal divergence-free field with its Laplacian eigenvalue."""

    index: ModeIndex
    e: tuple[float, float, float]
    lam: float


class BasisSet:
    """Ordered, immutable collection of basis modes up to a cutoff.

    Ordering is (lambda, lexicographic k, pol, parity), so two builds
    with the same cutoff produce identical lists and smaller bases are
    subsets (by mode identity) of larger ones.
    """

    def __init__(self, modes, cutoff):
        self.modes = tuple(modes)
        self.cutoff = int(cutoff)

    @property
    def n(self) -> int:
        return len(self.modes)

    @property
    def basis_id(self) -> str:
        return f"fourier-divfree-K{self.cutoff}-n{self.n}"

    @cached_property
    def wavevectors(self) -> np.ndarray:
        """Integer wavevectors, shape (n, 3)."""
        arr = np.array([m.index.k for m in self.modes], dtype=np.int64)
        arr.setflags(write=False)
        return arr

    @cached_property
    def pol_vectors(self) -> np.ndarray:
        """Unit polarization vectors, shape (n, 3)."""
        arr = np.array([m.e for m in self.modes], dtype=float)
        arr.setflags(write=False)
        return arr

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        """|k|^2 per mode, shape (n,)."""
        arr = np.array([m.lam for m in self.modes], dtype=float)
        arr.setflags(write=False)
        return arr

    @cached_property
    def parities(self) -> np.ndarray:
        arr = np.array([m.index.parity for m in self.modes], dtype=np.int64)
        arr.setflags(write=False)
        return arr

    @cached_property
    def pols(self) -> np.ndarray:
        arr = np.array([m.index.pol for m in self.modes], dtype=np.int64)
        arr.setflags(write=False)
        return arr

    @cached_property
    def _positions(self) -> dict:
        return {m.index: i for i, m in enumerate(self.modes)}

    def position(self, index: ModeIndex) -> int:
        """Position of a mode identity in the ordered list (KeyError if absent)."""
        return self._positions[index]

    def __len__(self):
        return self.n

    def __eq__(self, other):
        return isinstance(other, BasisSet) and self.modes == other.modes

    def __hash__(self):
        return hash((self.cutoff, self.n))

    def __repr__(self):
        return f"BasisSet(cutoff={self.cutoff}, n={self.n})"


def build_basis(cutoff: int) -> BasisSet:
    """Enumerate all real divergence-free modes with |k|_inf <= cutoff.

    The k = 0 shell is excluded (mean-zero fields only), and of each
    conjugate pair {k, -k} only the lexicographically positive member is
    kept; with 2 polarizations and 2 parities per representative the
    count is n = 4 * ((2*cutoff+1)^3 - 1) / 2.

    Raises ValueError for cutoff < 1 (empty basis).
    """
    cutoff = int(cutoff)
    if cutoff < 1:
        raise ValueError(f"cutoff must be >= 1, got {cutoff} (empty basis)")
    modes = []
    rng = range(-cutoff, cutoff + 1)
    for k in product(rng, rng, rng):
        if not lex_positive(k):
            continue
        e1, e2 = polarization_pair(k)
        lam = float(k[0] * k[0] + k[1] * k[1] + k[2] * k[2])
        for pol, e in ((1, e1), (2, e2)):
            for parity in (COSINE, SINE):
                modes.append(BasisMode(ModeIndex(k, pol, parity), tuple(e), lam))
    modes.sort(key=lambda m: (m.lam, m.index.k, m.index.pol, m.index.parity))
    return BasisSet(modes, cutoff)


def collocation_mesh(resolution: int) -> np.ndarray:
    """Flattened uniform nodes of the box, shape (resolution^3, 3)."""
    x = BOX_LENGTH * np.arange(resolution) / resolution
    g = np.meshgrid(x, x, x, indexing="ij")
    return np.stack([a.ravel() for a in g], axis=1)


def _trig_tables(basis: BasisSet, resolution: int):
    """Values and parity-derivative values of every mode's carrier wave.

    Returns (T, Tp) of shape (n, resolution^3): T holds cos/sin(k.x)
    per mode parity, Tp the derivative carrier (-sin for cosine modes,
    cos for sine modes).
    """
    mesh = collocation_mesh(resolution)
    theta = basis.wavevectors.astype(float) @ mesh.T
    cos_t = np.cos(theta)
    sin_t = np.sin(theta)
    is_cos = (basis.parities == COSINE)[:, None]
    T = np.where(is_cos, cos_t, sin_t)
    Tp = np.where(is_cos, -sin_t, cos_t)
    return T, Tp


def gram_report(basis: BasisSet, quadrature_resolution: int):
    """Measure orthonormality and stiffness diagonality by grid quadrature.

    Returns ``(max |(phi_i, phi_j) - delta_ij|, max |(grad phi_i, grad
    phi_j) - lambda_j delta_ij|)``.  The trapezoidal tensor-product rule
    on M^3 nodes is exact for trigonometric polynomials of per-axis
    degree <= M - 1; pairwise products have degree 2*cutoff, so M >=
    2*cutoff + 1 is required and enforced.
    """
    M = int(quadrature_resolution)
    needed = 2 * basis.cutoff + 1
    if M < needed:
        raise ResolutionError(
            f"quadrature resolution {M} under-resolves cutoff {basis.cutoff}: "
            f"need at least {needed} nodes per axis"
        )
    T, Tp = _trig_tables(basis, M)
    # (phi_i, phi_j) = amp^2 (e_i.e_j) * w * sum_x t_i t_j, w = (2pi/M)^3;
    # the (a, b) index contraction is done analytically so the floating
    # sums stay small and the 1e-12 exactness target is met with margin.
    scale = 2.0 / M**3  # amp^2 * (2*pi/M)^3
    ee = basis.pol_vectors @ basis.pol_vectors.T
    kk = (basis.wavevectors @ basis.wavevectors.T).astype(float)
    gram = scale * ee * (T @ T.T)
    stiff = scale * ee * kk * (Tp @ Tp.T)
    n = basis.n
    gram_dev = float(np.max(np.abs(gram - np.eye(n))))
    stiff_dev = float(np.max(np.abs(stiff - np.diag(basis.eigenvalues))))
    return gram_dev, stiff_dev
