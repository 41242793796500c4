"""Lattice-reduction-aided equalization over the Eisenstein integers.

Zero-forcing route: the rows of the inverse channel matrix form a basis
of a rank-N lattice over Z[w]; LLL reduction factors

    H^-1 = Z F,    det(Z) a unit of Z[w],  F with short rows,

so F Y = Z^-1 X + F N.  Component-wise quantization to Z[w] then removes
the residual noise, the entry-wise field inverse of the lift maps the
result to F_q, and multiplying by Z_F = phi^-1(Z) leaves the additive
finite-field channel Y_bar = X_F + Z_F E_F.

MMSE route: the same reduction applied to the dual basis of the
noise-augmented channel [H; sqrt(zeta) I] with zeta = noise_var/E_s; the
first N columns of the reduced dual are the equalizer applied to Y.

The LLL size reduction quantizes Gram coefficients with the Eisenstein
quantizer (hexagonal covering radius 1/sqrt(3)), which is what makes the
reduction a Z[w]-lattice algorithm rather than one over Z[j].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eisenstein import (
    Constellation,
    EisensteinInt,
    LatticeError,
    eis_det_exact,
    phi_inv,
    quantize_lattice,
    quantize_matrix,
)
from .fields import DimensionMismatch, MatrixFq, fq_det

LLL_DELTA = 0.75
_MAX_SWAPS = 10_000


class SingularInput(Exception):
    pass


class NonConvergence(Exception):
    pass


class OutOfRange(Exception):
    pass


@dataclass
class FactorizationResult:
    """Unimodular/short-row factorization of an equalization matrix.
    `z` is exact (list of lists of Eisenstein integers); for the ZF
    criterion z @ f reproduces H^-1 to working precision."""

    z: list
    f: np.ndarray
    criterion: str
    row_norms: tuple
    f_augmented: np.ndarray | None = None


@dataclass
class TransformedReception:
    """Output of the receive-side channel transformation: the additive
    finite-field channel word y_bar = X_F + Z_F E_F, the lifted reduction
    matrix Z_F, and the row reliability ranking (descending equalizer row
    norm).  The original (H, Y) ride along for metric-based selection."""

    y_bar: MatrixFq
    z_f: MatrixFq
    reliability_order: tuple
    row_norms: tuple
    h: np.ndarray | None = None
    y: np.ndarray | None = None


def _eis_round(mu: complex) -> EisensteinInt:
    return quantize_lattice(mu)


def _gso(f):
    n = f.shape[0]
    bstar = np.zeros_like(f)
    mu = np.zeros((n, n), dtype=complex)
    norms = np.zeros(n)
    for i in range(n):
        b = f[i].copy()
        for j in range(i):
            m = np.vdot(bstar[j], f[i]) / norms[j]
            mu[i, j] = m
            b -= m * bstar[j]
        bstar[i] = b
        norms[i] = np.vdot(b, b).real
    return bstar, mu, norms


def _lll_rows(basis: np.ndarray, delta: float, max_swaps: int = _MAX_SWAPS):
    """Eisenstein-LLL on the rows of `basis`; returns (z, f) with
    basis = z @ f exactly (z tracked by exact column operations)."""
    f = np.array(basis, dtype=complex)
    n = f.shape[0]
    z = [[EisensteinInt(1 if i == j else 0, 0) for j in range(n)] for i in range(n)]

    def size_reduce(k, j, mu):
        c = _eis_round(mu[k, j])
        if not c.is_zero():
            f[k] -= c.to_complex() * f[j]
            cc = c
            for r in range(n):
                z[r][j] = z[r][j] + cc * z[r][k]
            # mu[j, j] is held at 1, so this also takes mu[k, j] down by c
            mu[k, : j + 1] -= cc.to_complex() * mu[j, : j + 1]
        return c

    bstar, mu, norms = _gso(f)
    # mu[i, i] used as 1 below
    for i in range(n):
        mu[i, i] = 1.0
    k = 1
    swaps = 0
    while k < n:
        size_reduce(k, k - 1, mu)
        if norms[k] < (delta - abs(mu[k, k - 1]) ** 2) * norms[k - 1]:
            f[[k, k - 1]] = f[[k - 1, k]]
            for r in range(n):
                z[r][k], z[r][k - 1] = z[r][k - 1], z[r][k]
            bstar, mu, norms = _gso(f)
            for i in range(n):
                mu[i, i] = 1.0
            swaps += 1
            if swaps > max_swaps:
                raise NonConvergence("LLL swap budget exhausted")
            k = max(k - 1, 1)
        else:
            for j in range(k - 2, -1, -1):
                size_reduce(k, j, mu)
            k += 1
    # final sweep: keep every |mu| within the hexagonal covering radius
    bstar, mu, norms = _gso(f)
    for i in range(1, n):
        for j in range(i - 1, -1, -1):
            size_reduce(i, j, mu)
    return z, f


def lll_reduce_eisenstein(basis: np.ndarray, delta: float = LLL_DELTA):
    """Reduce a square lattice basis (rows) over Z[w]; returns (z, f) with
    basis = z @ f, z unimodular, and f size-reduced satisfying the Lovasz
    condition with parameter delta."""
    basis = np.asarray(basis, dtype=complex)
    if basis.ndim != 2 or basis.shape[0] != basis.shape[1]:
        raise DimensionMismatch("expected a square basis matrix")
    if not 0.5 < delta < 1.0:
        raise ValueError("delta must lie in (0.5, 1)")
    if np.linalg.cond(basis) > 1e12:
        raise SingularInput("basis is numerically singular")
    return _lll_rows(basis, delta)


def eis_matmul(z, f: np.ndarray) -> np.ndarray:
    """Exact-Z times complex-F product as a complex array."""
    zc = np.array([[v.to_complex() for v in row] for row in z])
    return zc @ f


def factorize(
    h: np.ndarray,
    criterion: str = "zf",
    noise_var: float = 0.0,
    signal_energy: float = 1.0,
    delta: float = LLL_DELTA,
) -> FactorizationResult:
    """Factor the (square) channel for LRA equalization.

    zf:   reduce the rows of H^-1; F = Z^-1 H^-1 is the equalizer.
    mmse: reduce the rows of the pseudo-inverse of [H; sqrt(zeta) I],
          zeta = noise_var / signal_energy; the first N columns of the
          reduced dual form the equalizer applied to Y.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionMismatch("LRA path assumes a square channel")
    crit = criterion.lower()
    if crit == "zf":
        if np.linalg.cond(h) > 1e12:
            raise SingularInput("channel is numerically singular")
        z, f = _lll_rows(np.linalg.inv(h), delta)
        f_aug = None
    elif crit == "mmse":
        n = h.shape[0]
        zeta = noise_var / signal_energy
        aug = np.vstack([h, np.sqrt(zeta) * np.eye(n)])
        dual = np.linalg.pinv(aug)
        if not np.all(np.isfinite(dual)):
            raise SingularInput("augmented channel has no finite dual")
        z, f_aug = _lll_rows(dual, delta)
        f = f_aug[:, :n]
    else:
        raise ValueError("criterion must be 'zf' or 'mmse'")
    row_norms = tuple(float(np.linalg.norm(f[i])) for i in range(f.shape[0]))
    return FactorizationResult(z, f, crit, row_norms, f_aug)


def unimodular_det(fac: FactorizationResult) -> EisensteinInt:
    return eis_det_exact(fac.z)


def channel_transform(
    y: np.ndarray,
    fac: FactorizationResult,
    constellation: Constellation,
    h: np.ndarray | None = None,
) -> TransformedReception:
    """Run the receive chain: equalize, quantize to Z[w], drop to F_q,
    and multiply by Z_F, leaving y_bar = X_F + Z_F E_F."""
    y = np.asarray(y, dtype=complex)
    y_tilde = fac.f @ y
    qa, qb = quantize_matrix(y_tilde)
    y_hat = [
        [EisensteinInt(int(qa[i, j]), int(qb[i, j])) for j in range(y.shape[1])]
        for i in range(y.shape[0])
    ]
    y_hat_f = phi_inv(y_hat, constellation)
    z_f = phi_inv(fac.z, constellation)
    if fq_det(z_f.a, z_f.q) == 0:
        # cannot happen while det(Z) is a unit; fail loudly if it ever does
        raise LatticeError("lifted reduction matrix is singular over F_q")
    y_bar = z_f @ y_hat_f
    order = tuple(sorted(range(len(fac.row_norms)), key=lambda i: (-fac.row_norms[i], i)))
    return TransformedReception(
        y_bar=y_bar,
        z_f=z_f,
        reliability_order=order,
        row_norms=tuple(fac.row_norms),
        h=None if h is None else np.asarray(h, dtype=complex),
        y=y,
    )


def reliability_schedule(fac_or_tr, ell: int) -> tuple:
    """Indices of the `ell` least reliable rows (largest equalizer row
    norm), ties to the lower index; nested across ell."""
    if isinstance(fac_or_tr, TransformedReception):
        order = fac_or_tr.reliability_order
    else:
        norms = fac_or_tr.row_norms
        order = tuple(sorted(range(len(norms)), key=lambda i: (-norms[i], i)))
    if not 0 <= ell < len(order):
        raise OutOfRange("erasure count must satisfy 0 <= ell < N_tx")
    return tuple(sorted(order[:ell]))
