"""Galerkin states: coefficient vectors, grid synthesis, and norms.

A state is a real coefficient vector c against a :class:`~gns.basis.BasisSet`;
the velocity field it represents is u(x) = sum_j c_j phi_j(x).  By
orthonormality the L2 norm is |c| exactly (Parseval) and the H1
seminorm is sqrt(sum lambda_j c_j^2); the L4 norm is evaluated by exact
quadrature of |u|^4 on an enlarged collocation grid.

Conversions between coefficients and collocation grids go through the
complex Fourier lattice with numpy FFTs.  All quadratures here are on
uniform tensor grids, where the rectangle rule is exact for
trigonometric polynomials of per-axis degree < resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .basis import BOX_LENGTH, COSINE, MODE_AMPLITUDE, SINE, BasisSet, ModeIndex
from .errors import DimensionError, ResolutionError

VOLUME = BOX_LENGTH**3


# ---------------------------------------------------------------------------
# state containers


@dataclass(frozen=True)
class CoefficientVector:
    """Real Galerkin coefficients c_j tied to the basis that defines them."""

    values: np.ndarray
    basis: BasisSet

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.basis.n,):
            raise DimensionError(
                f"coefficient vector has shape {v.shape}, basis expects ({self.basis.n},)"
            )
        if not np.all(np.isfinite(v)):
            raise DimensionError("coefficient vector contains non-finite entries")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.basis.n


@dataclass(frozen=True)
class GridField:
    """Velocity samples u(x_i) on an M^3 collocation grid, shape (M, M, M, 3)."""

    values: np.ndarray
    resolution: int
    cutoff: int

    def __post_init__(self):
        M = self.resolution
        if self.values.shape != (M, M, M, 3):
            raise DimensionError(
                f"grid values have shape {self.values.shape}, expected {(M, M, M, 3)}"
            )


# ---------------------------------------------------------------------------
# initial condition specifications


@dataclass(frozen=True)
class TaylorGreen:
    """The classical Taylor-Green vortex u = (sin x cos y cos z, -cos x sin y cos z, 0)."""


@dataclass(frozen=True)
class BeltramiShell:
    """Seeded combination of curl eigenfields on a single shell |k|^2 = shell.

    Every member satisfies curl u = sqrt(shell) * u, so its self-advection
    is a pure gradient and the divergence-free projection of the
    nonlinearity vanishes identically; under viscous dynamics the state
    decays as exp(-nu * shell * t) exactly.  ``amplitude`` is the L2 norm
    of the generated state.
    """

    shell: int
    seed: int | None = None
    amplitude: float = 1.0


@dataclass(frozen=True)
class RandomBand:
    """Seeded Gaussian coefficients on all modes with |k|^2 <= max_shell,
    normalized to the requested L2 amplitude."""

    max_shell: int
    seed: int | None = None
    amplitude: float = 1.0


@dataclass(frozen=True)
class ExplicitCoefficients:
    """A literal coefficient list (must match the basis length)."""

    values: Sequence[float]


InitialCondition = Union[TaylorGreen, BeltramiShell, RandomBand, ExplicitCoefficients]


def project_initial(spec: InitialCondition, basis: BasisSet, default_seed: int = 0) -> CoefficientVector:
    """Exact projection (u0, phi_j) of a built-in initial condition.

    Specs carrying ``seed=None`` inherit ``default_seed`` (the scenario
    seed), so one scenario-level seed reproduces the whole run.
    """
    n = basis.n
    if isinstance(spec, ExplicitCoefficients):
        v = np.asarray(list(spec.values), dtype=float)
        if v.shape != (n,):
            raise DimensionError(
                f"explicit coefficient list has length {v.size}, basis expects {n}"
            )
        return CoefficientVector(v, basis)

    if isinstance(spec, TaylorGreen):
        return _project_taylor_green(basis)

    if isinstance(spec, BeltramiShell):
        seed = spec.seed if spec.seed is not None else default_seed
        return _project_beltrami(basis, spec.shell, seed, spec.amplitude)

    if isinstance(spec, RandomBand):
        seed = spec.seed if spec.seed is not None else default_seed
        mask = basis.eigenvalues <= spec.max_shell
        if not np.any(mask):
            raise ValueError(f"no modes with |k|^2 <= {spec.max_shell} at cutoff {basis.cutoff}")
        rng = np.random.default_rng(seed)
        v = np.zeros(n)
        v[mask] = rng.standard_normal(int(np.count_nonzero(mask)))
        norm = np.linalg.norm(v)
        if norm > 0:
            v *= spec.amplitude / norm
        return CoefficientVector(v, basis)

    raise TypeError(f"unknown initial condition spec {spec!r}")


def _project_taylor_green(basis: BasisSet) -> CoefficientVector:
    # Product-to-sum expansion puts all content on the eight wavevectors
    # (+-1, +-1, +-1); for the representative k = (1, ky, kz) the complex
    # amplitude is U_k = (-i/8, i*ky/8, 0), conjugate on -k.
    v = np.zeros(basis.n)
    for ky in (-1, 1):
        for kz in (-1, 1):
            k = (1, ky, kz)
            u_k = np.array([-0.125j, 0.125j * ky, 0.0])
            _add_complex_amplitude(v, basis, k, u_k)
    return CoefficientVector(v, basis)


def _add_complex_amplitude(v, basis, k, u_k):
    """Accumulate the real-mode coefficients of U_k e^{ik.x} + conj. at -k."""
    from .basis import polarization_pair

    e1, e2 = polarization_pair(k)
    for pol, e in ((1, e1), (2, e2)):
        comp = complex(u_k @ e)
        c_cos = 2.0 * comp.real / MODE_AMPLITUDE
        c_sin = -2.0 * comp.imag / MODE_AMPLITUDE
        if c_cos != 0.0:
            v[basis.position(ModeIndex(k, pol, COSINE))] += c_cos
        if c_sin != 0.0:
            v[basis.position(ModeIndex(k, pol, SINE))] += c_sin


def _project_beltrami(basis, shell, seed, amplitude) -> CoefficientVector:
    shell = int(shell)
    reps = []
    seen = set()
    for mode in basis.modes:
        k = mode.index.k
        if k in seen or mode.lam != shell:
            continue
        seen.add(k)
        reps.append(k)
    if not reps:
        raise ValueError(f"no wavevectors with |k|^2 = {shell} at cutoff {basis.cutoff}")
    rng = np.random.default_rng(seed)
    v = np.zeros(basis.n)
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    for k in reps:
        w1, w2 = rng.standard_normal(2)
        # +sqrt(shell) curl eigenfields: (e1 cos - e2 sin)/sqrt2 and (e2 cos + e1 sin)/sqrt2
        v[basis.position(ModeIndex(k, 1, COSINE))] += w1 * inv_sqrt2
        v[basis.position(ModeIndex(k, 2, SINE))] -= w1 * inv_sqrt2
        v[basis.position(ModeIndex(k, 2, COSINE))] += w2 * inv_sqrt2
        v[basis.position(ModeIndex(k, 1, SINE))] += w2 * inv_sqrt2
    norm = np.linalg.norm(v)
    if norm > 0:
        v *= amplitude / norm
    return CoefficientVector(v, basis)


# ---------------------------------------------------------------------------
# norms


def l2_inner(a: CoefficientVector, b: CoefficientVector) -> float:
    """(u, v) in L2; by orthonormality just the coefficient dot product."""
    _check_same_basis(a, b)
    return float(a.values @ b.values)


def norm_l2(c: CoefficientVector) -> float:
    """||u||_L2 = sqrt(sum c_j^2) (Parseval, orthonormal basis)."""
    return float(np.linalg.norm(c.values))


def norm_h1(c: CoefficientVector) -> float:
    """||grad u||_L2 = sqrt(sum lambda_j c_j^2)."""
    return math.sqrt(float(c.basis.eigenvalues @ (c.values * c.values)))


def norm_l4(c: CoefficientVector, dealias_factor: float = 2.0) -> float:
    """||u||_L4 by exact quadrature of |u|^4 on an enlarged grid.

    |u|^4 is a trigonometric polynomial of per-axis degree 4*cutoff, so
    the rule is exact once the grid has at least 4*cutoff + 1 nodes per
    axis; the resolution used is max(ceil(dealias_factor * (2*cutoff+1)),
    4*cutoff + 1), hence always exact, and dealias_factor (>= 3/2) can
    only enlarge it.
    """
    if dealias_factor < 1.5:
        raise ValueError(f"dealias_factor must be >= 3/2, got {dealias_factor}")
    K = c.basis.cutoff
    M = max(math.ceil(dealias_factor * (2 * K + 1)), 4 * K + 1)
    grid = to_grid(c, M)
    speed2 = np.sum(grid.values * grid.values, axis=-1)
    integral = float(np.sum(speed2 * speed2)) * (BOX_LENGTH / M) ** 3
    return integral**0.25


# ---------------------------------------------------------------------------
# coefficient <-> grid transforms


def _wrapped_indices(basis: BasisSet, M: int):
    k = basis.wavevectors
    plus = np.ravel_multi_index(((k[:, 0]) % M, (k[:, 1]) % M, (k[:, 2]) % M), (M, M, M))
    minus = np.ravel_multi_index(((-k[:, 0]) % M, (-k[:, 1]) % M, (-k[:, 2]) % M), (M, M, M))
    return plus, minus


def _coeffs_to_spectrum(values: np.ndarray, basis: BasisSet, M: int) -> np.ndarray:
    """Complex lattice amplitudes U with u(x) = sum_k U_k e^{ik.x}, shape (M,M,M,3)."""
    U = np.zeros((M * M * M, 3), dtype=complex)
    plus, minus = _wrapped_indices(basis, M)
    phase = np.where(basis.parities == COSINE, 1.0 + 0.0j, -1.0j)
    w_plus = (0.5 * MODE_AMPLITUDE) * (values * phase)[:, None] * basis.pol_vectors
    np.add.at(U, plus, w_plus)
    np.add.at(U, minus, np.conj(w_plus))
    return U.reshape(M, M, M, 3)


def _spectrum_to_coeffs(U: np.ndarray, basis: BasisSet) -> np.ndarray:
    """Inverse of :func:`_coeffs_to_spectrum` restricted to the basis band."""
    M = U.shape[0]
    flat = U.reshape(-1, 3)
    plus, _ = _wrapped_indices(basis, M)
    comp = np.einsum("ja,ja->j", flat[plus], basis.pol_vectors.astype(complex))
    c_cos = 2.0 * comp.real / MODE_AMPLITUDE
    c_sin = -2.0 * comp.imag / MODE_AMPLITUDE
    return np.where(basis.parities == COSINE, c_cos, c_sin)


def to_grid(c: CoefficientVector, resolution: int) -> GridField:
    """Collocation samples of u = sum c_j phi_j on a resolution^3 grid.

    Requires resolution >= 2*cutoff + 1 so the band fits alias-free and
    the round trip through :func:`grid_to_coefficients` is exact.
    """
    M = int(resolution)
    K = c.basis.cutoff
    if M < 2 * K + 1:
        raise ResolutionError(
            f"grid resolution {M} under-resolves cutoff {K}: need at least {2 * K + 1}"
        )
    U = _coeffs_to_spectrum(c.values, c.basis, M)
    u = np.fft.ifftn(U, axes=(0, 1, 2)) * M**3
    return GridField(np.ascontiguousarray(u.real), M, K)


def grid_to_coefficients(grid: GridField, basis: BasisSet) -> CoefficientVector:
    """Project grid samples back onto the basis: c_j = (u, phi_j) by exact quadrature."""
    if grid.resolution < 2 * basis.cutoff + 1:
        raise ResolutionError(
            f"grid resolution {grid.resolution} under-resolves cutoff {basis.cutoff}"
        )
    U = np.fft.fftn(grid.values, axes=(0, 1, 2)) / grid.resolution**3
    return CoefficientVector(_spectrum_to_coeffs(U, basis), basis)


def spectral_divergence_max(grid: GridField) -> float:
    """Max modulus over the lattice of sum_a k_a U_a(k), the spectral divergence."""
    M = grid.resolution
    U = np.fft.fftn(grid.values, axes=(0, 1, 2)) / M**3
    freqs = np.fft.fftfreq(M, d=1.0 / M)
    kx, ky, kz = np.meshgrid(freqs, freqs, freqs, indexing="ij")
    div = kx * U[..., 0] + ky * U[..., 1] + kz * U[..., 2]
    return float(np.max(np.abs(div)))


# ---------------------------------------------------------------------------
# grid export (flat binary with a one-line header, CSV for small grids)


def write_grid_binary(grid: GridField, path) -> None:
    """Row-major float64 dump preceded by the header line ``M,cutoff``."""
    with open(path, "wb") as fh:
        fh.write(f"{grid.resolution},{grid.cutoff}\n".encode("ascii"))
        fh.write(np.ascontiguousarray(grid.values, dtype=np.float64).tobytes())


def read_grid_binary(path) -> GridField:
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").strip()
        M_s, cut_s = header.split(",")
        M, cutoff = int(M_s), int(cut_s)
        data = np.frombuffer(fh.read(), dtype=np.float64)
    return GridField(data.reshape(M, M, M, 3).copy(), M, cutoff)


def write_grid_csv(grid: GridField, path) -> None:
    """Node-per-row CSV ``i,j,k,ux,uy,uz`` (intended for small grids)."""
    M = grid.resolution
    with open(path, "w", encoding="ascii") as fh:
        fh.write("i,j,k,ux,uy,uz\n")
        for i in range(M):
            for j in range(M):
                for k in range(M):
                    ux, uy, uz = grid.values[i, j, k]
                    fh.write(f"{i},{j},{k},{ux:.17g},{uy:.17g},{uz:.17g}\n")


def _check_same_basis(a: CoefficientVector, b: CoefficientVector) -> None:
    if a.basis.basis_id != b.basis.basis_id:
        raise DimensionError(
            f"states live on different bases: {a.basis.basis_id} vs {b.basis.basis_id}"
        )
