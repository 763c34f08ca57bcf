"""Triadic interaction tensor and Galerkin nonlinearity.

The quadratic term of the momentum equation projects onto the basis as

    N_m(c) = sum_{i,j} B_{ijm} c_i c_j,
    B_{ijm} = (phi_i . grad phi_j, phi_m)
            = integral phi_{ia} d_a phi_{jb} phi_{mb} dx.

Entries are evaluated in closed form: each mode is a single plane wave,
so the triple product reduces to sums of exponentials and the integral
is nonzero only when the three wavevectors can cancel (k_i +- k_j -+ k_m
= 0).  Assembly therefore scans mode pairs and emits at most four
entries per pair (sum/difference target x two polarizations), giving
O(n^2) storage.

Because phi_i is divergence free, integration by parts yields the skew
symmetry B_{ijm} = -B_{imj}; consequently (N(c), c) = 0, the discrete
energy neutrality of the advection term.  The stored entries are the
raw integrals; the identity is asserted by :func:`skew_report`, never
imposed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import COSINE, MODE_AMPLITUDE, SINE, BasisSet
from .errors import DimensionError
from .field import CoefficientVector, _coeffs_to_spectrum, _spectrum_to_coeffs


@dataclass(frozen=True)
class TriadTensor:
    """Sparse B_{ijm} in coordinate form, sorted by (i, j, m)."""

    i: np.ndarray
    j: np.ndarray
    m: np.ndarray
    values: np.ndarray
    n: int
    basis_id: str

    @property
    def nnz(self) -> int:
        return self.values.size

    def as_dict(self) -> dict:
        """Mapping (i, j, m) -> value, for audits at small cutoffs."""
        return {
            (int(a), int(b), int(c)): float(v)
            for a, b, c, v in zip(self.i, self.j, self.m, self.values)
        }


def _lex_signs(w: np.ndarray) -> np.ndarray:
    """Sign of the first nonzero component per row (0 for zero rows)."""
    s = np.sign(w[:, 0])
    s = np.where(s != 0, s, np.sign(w[:, 1]))
    s = np.where(s != 0, s, np.sign(w[:, 2]))
    return s


def assemble_tensor(basis: BasisSet) -> TriadTensor:
    """Exact closed-form assembly of every triad-allowed entry.

    For the pair (i, j) the carrier-wave product lands on the two target
    wavevectors k_i + k_j and k_i - k_j; a target present in the basis
    contributes to the two polarizations of the matching parity.  Each
    entry value is

        amp^3 (e_i . k_j) (e_j . e_m) * sgn_j * I3,

    where sgn_j flips sign for cosine modes (derivative of the carrier)
    and I3 is the triple trigonometric integral, equal to +-(2 pi)^3 / 4
    on resonant sign combinations and zero otherwise.
    """
    if basis.n == 0:
        raise ValueError("cannot assemble a tensor over an empty basis")
    n = basis.n
    K = basis.cutoff
    kvecs = basis.wavevectors
    evecs = basis.pol_vectors
    parities = basis.parities
    pols = basis.pols

    side = 2 * K + 1
    lookup = -np.ones((side, side, side, 2, 2), dtype=np.int64)
    lookup[kvecs[:, 0] + K, kvecs[:, 1] + K, kvecs[:, 2] + K, pols - 1, parities] = np.arange(n)

    base = MODE_AMPLITUDE**3 * (2.0 * np.pi) ** 3 / 4.0
    sgn_deriv = np.where(parities == COSINE, -1.0, 1.0)  # d cos = -sin, d sin = +cos
    flipped = 1 - parities  # carrier parity after differentiation
    kf = kvecs.astype(float)

    out_i, out_j, out_m, out_v = [], [], [], []
    j_all = np.arange(n)
    flipped_is_sine = (flipped == SINE).astype(np.int64)
    for i in range(n):
        dot = kf @ evecs[i]  # (e_i . k_j) over all j
        sin_i = int(parities[i] == SINE)
        for t in (1, -1):
            w = kvecs[i][None, :] + t * kvecs
            sigma = _lex_signs(w)
            nonzero = sigma != 0
            rep = (w * sigma[:, None]).astype(np.int64)
            within = nonzero & np.all(np.abs(rep) <= K, axis=1)
            s2 = float(t)
            s3 = -sigma
            # parity of the receiving mode keeps the sine count even
            nsin_ij = sin_i + flipped_is_sine
            pm = np.where(nsin_ij % 2 == 1, SINE, COSINE)
            sprod = np.ones(n)
            # s1 = +1 contributes nothing even when mode i is a sine
            sprod = np.where(flipped_is_sine == 1, sprod * s2, sprod)
            sprod = np.where(pm == SINE, sprod * s3, sprod)
            nsin_total = nsin_ij + (pm == SINE).astype(np.int64)
            resonance = np.where(nsin_total == 0, 1.0, -sprod)
            rep_c = np.clip(rep, -K, K)
            for pol_m in (1, 2):
                m_idx = lookup[rep_c[:, 0] + K, rep_c[:, 1] + K, rep_c[:, 2] + K, pol_m - 1, pm]
                valid = within & (m_idx >= 0)
                if not np.any(valid):
                    continue
                jj = j_all[valid]
                mm = m_idx[valid]
                ee = np.einsum("ja,ja->j", evecs[jj], evecs[mm])
                val = base * dot[jj] * sgn_deriv[jj] * resonance[valid] * ee
                keep = val != 0.0
                if not np.any(keep):
                    continue
                out_i.append(np.full(int(np.count_nonzero(keep)), i, dtype=np.int64))
                out_j.append(jj[keep])
                out_m.append(mm[keep])
                out_v.append(val[keep])

    if out_i:
        ii = np.concatenate(out_i)
        jj = np.concatenate(out_j)
        mm = np.concatenate(out_m)
        vv = np.concatenate(out_v)
    else:
        ii = jj = mm = np.zeros(0, dtype=np.int64)
        vv = np.zeros(0)
    order = np.lexsort((mm, jj, ii))
    return TriadTensor(ii[order], jj[order], mm[order], vv[order], n, basis.basis_id)


def _check_state(tensor: TriadTensor, c: CoefficientVector) -> np.ndarray:
    if c.basis.basis_id != tensor.basis_id:
        raise DimensionError(
            f"state basis {c.basis.basis_id} does not match tensor basis {tensor.basis_id}"
        )
    return c.values


def nonlinear_term(tensor: TriadTensor, c: CoefficientVector) -> CoefficientVector:
    """N_m(c) = sum_{i,j} B_{ijm} c_i c_j."""
    v = _check_state(tensor, c)
    out = nonlinear_term_raw(tensor, v)
    return CoefficientVector(out, c.basis)


def nonlinear_term_raw(tensor: TriadTensor, values: np.ndarray) -> np.ndarray:
    """Contraction on a bare array; the hot path used by the integrator."""
    w = tensor.values * values[tensor.i] * values[tensor.j]
    return np.bincount(tensor.m, weights=w, minlength=tensor.n)


def transport_pairing(
    tensor: TriadTensor,
    c_advect: CoefficientVector,
    c_grad: CoefficientVector,
    c_test: CoefficientVector,
) -> float:
    """(a_p d_p b_q, v_q) = sum B_{ijm} a_i b_j v_m for states a, b, v."""
    a = _check_state(tensor, c_advect)
    b = _check_state(tensor, c_grad)
    v = _check_state(tensor, c_test)
    return float(np.sum(tensor.values * a[tensor.i] * b[tensor.j] * v[tensor.m]))


def weak_pairing(tensor: TriadTensor, c_u: CoefficientVector, c_v: CoefficientVector) -> float:
    """(u_a d_a u_b, v_b), the advection term tested against v."""
    return transport_pairing(tensor, c_u, c_u, c_v)


def skew_report(tensor: TriadTensor) -> float:
    """max_{i,j,m} |B_{ijm} + B_{imj}| over all populated index triples."""
    if tensor.nnz == 0:
        return 0.0
    n = tensor.n
    keys = (tensor.i * n + tensor.j) * n + tensor.m
    order = np.argsort(keys)
    keys_sorted = keys[order]
    vals_sorted = tensor.values[order]
    partner_keys = (tensor.i * n + tensor.m) * n + tensor.j
    pos = np.searchsorted(keys_sorted, partner_keys)
    pos_c = np.clip(pos, 0, keys_sorted.size - 1)
    found = keys_sorted[pos_c] == partner_keys
    partner_vals = np.where(found, vals_sorted[pos_c], 0.0)
    return float(np.max(np.abs(tensor.values + partner_vals)))


def nonlinear_term_pseudospectral(
    basis: BasisSet, c: CoefficientVector, resolution: int | None = None
) -> CoefficientVector:
    """Collocation evaluation of N(c); optional fast path.

    Synthesizes u and grad u on a grid of at least 3*cutoff + 1 nodes
    per axis, forms u_a d_a u_b pointwise, and projects back.  Every
    factor is band limited, so at that resolution the quadrature is
    exact and the result agrees with the tensor contraction to rounding.
    """
    K = basis.cutoff
    M = int(resolution) if resolution is not None else 3 * K + 1
    if M < 3 * K + 1:
        raise ValueError(f"pseudospectral resolution {M} must be >= {3 * K + 1}")
    U = _coeffs_to_spectrum(c.values, basis, M)
    u = np.fft.ifftn(U, axes=(0, 1, 2)).real * M**3
    freqs = np.fft.fftfreq(M, d=1.0 / M)
    kx, ky, kz = np.meshgrid(freqs, freqs, freqs, indexing="ij")
    advect = np.zeros_like(u)
    for axis, kcomp in enumerate((kx, ky, kz)):
        du = np.fft.ifftn(1j * kcomp[..., None] * U, axes=(0, 1, 2)).real * M**3
        advect += u[..., axis : axis + 1] * du
    W = np.fft.fftn(advect, axes=(0, 1, 2)) / M**3
    return CoefficientVector(_spectrum_to_coeffs(W, basis), basis)
