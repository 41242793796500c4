"""Space-time block codes lifted from rank-metric codes.

A codeword matrix is built in two steps: expand the rank-metric codeword
into its F_q coefficient matrix, then lift every entry to a lattice
constellation point.  Because the lift is a field isomorphism modulo the
scaled lattice, the minimum rank distance survives into the complex
domain, which lower-bounds the spatial diversity order.

Maximum-likelihood decoding is the exhaustive Frobenius-metric search

    argmin_X ||H X - Y||_F

over the full codebook of q^(m*k) matrices.  Codeword coefficients are
F_q-linear in the message digits, so the whole coefficient codebook is
one vectorized matrix product; the complex lift is applied in chunks so
large codebooks (q = 37: 1.87M matrices) stay within memory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eisenstein import NOT_PRIME, NotAField
from .fields import DimensionMismatch, ext_expand
from .gabidulin import GabidulinCode

EXHAUSTIVE_LIMIT = 1 << 25
_CHUNK = 1 << 13
# dense complex codebooks are cached only below this entry count
_DENSE_LIMIT = 1 << 20


class CodebookTooLarge(Exception):
    pass


class SpaceTimeCode:
    """Pairing of a rank-metric code with a lattice constellation of the
    same field size; codewords are m x n lattice matrices (transposed
    when the antenna/time geometry requires it)."""

    def __init__(self, gabidulin: GabidulinCode, constellation, orientation="direct"):
        if getattr(constellation, "prime_type", NOT_PRIME) == NOT_PRIME:
            raise NotAField("constellation carries no field structure")
        if constellation.q != gabidulin.field.q:
            raise DimensionMismatch(
                "constellation size must equal the rank-metric field size"
            )
        if orientation not in ("direct", "transposed"):
            raise ValueError("orientation must be 'direct' or 'transposed'")
        self.gabidulin = gabidulin
        self.constellation = constellation
        self.orientation = orientation
        self._coeff_cb = None
        self._complex_cb = None
        self._ml_flat = None

    @property
    def q(self):
        return self.gabidulin.field.q

    @property
    def shape(self):
        m, n = self.gabidulin.field.m, self.gabidulin.n
        return (n, m) if self.orientation == "transposed" else (m, n)

    @property
    def size(self) -> int:
        return self.gabidulin.field.order ** self.gabidulin.k

    def message_from_index(self, idx: int) -> tuple:
        order = self.gabidulin.field.order
        syms = []
        for _ in range(self.gabidulin.k):
            syms.append(idx % order)
            idx //= order
        return tuple(reversed(syms))

    def index_from_message(self, msg) -> int:
        order = self.gabidulin.field.order
        idx = 0
        for s in msg:
            idx = idx * order + int(s)
        return idx

    def coeff_matrix(self, msg) -> np.ndarray:
        """F_q coefficient matrix of one codeword (orientation applied)."""
        cw = self.gabidulin.encode(msg)
        mat = ext_expand(cw, self.gabidulin.field).a
        return mat.T if self.orientation == "transposed" else mat

    def encode(self, msg):
        """Exact lattice codeword matrix (list of lists of lattice ints)."""
        mat = self.coeff_matrix(msg)
        phi = self.constellation.phi
        return [[phi[int(v)] for v in row] for row in mat]

    def encode_complex(self, msg) -> np.ndarray:
        return self.constellation.phi_complex[self.coeff_matrix(msg)]

    def codebook(self) -> "CodebookHandle":
        if self.size > EXHAUSTIVE_LIMIT:
            raise CodebookTooLarge(
                f"codebook of {self.size} codewords exceeds the exhaustive limit"
            )
        return CodebookHandle(self)

    def coeff_codebook(self) -> np.ndarray:
        """All codeword coefficient matrices as an int8 (size, rows, cols)
        array in message-index order.

        Codeword symbol i is sum_j msg_j * g_i^(q^j), which is F_q-linear
        in the message coefficient digits, so the full codebook is a single
        digit-matrix product."""
        if self._coeff_cb is not None:
            return self._coeff_cb
        if self.size > EXHAUSTIVE_LIMIT:
            raise CodebookTooLarge(
                f"codebook of {self.size} codewords exceeds the exhaustive limit"
            )
        F = self.gabidulin.field
        q, m, k, n = F.q, F.m, self.gabidulin.k, self.gabidulin.n
        size = self.size
        idx = np.arange(size, dtype=np.int64)
        digits = np.empty((size, k * m), dtype=np.int64)
        for j in range(k):
            sym = (idx // F.order ** (k - 1 - j)) % F.order
            for t in range(m):
                digits[:, j * m + t] = (sym // q ** t) % q
        # column i of the codeword: coeffs(sum_j msg_j * gf[j][i])
        maps = np.empty((n, k * m, m), dtype=np.int64)
        for i in range(n):
            for j in range(k):
                gv = self.gabidulin._gf[j][i]
                for t in range(m):
                    maps[i, j * m + t] = F.coeffs(F.mul(F.basis[t], gv))
        cols = [(digits @ maps[i]) % q for i in range(n)]  # each (size, m)
        cb = np.stack(cols, axis=2)  # (size, m, n)
        if self.orientation == "transposed":
            cb = cb.transpose(0, 2, 1)
        self._coeff_cb = np.ascontiguousarray(cb, dtype=np.int8)
        return self._coeff_cb

    def codebook_array(self) -> np.ndarray:
        """Dense complex codebook (cached); available for small codebooks."""
        if self._complex_cb is None:
            if self.size > _DENSE_LIMIT:
                raise CodebookTooLarge(
                    "complex codebook too large to materialize; use chunks"
                )
            self._complex_cb = self.constellation.phi_complex[
                self.coeff_codebook().astype(np.int64)
            ]
        return self._complex_cb


class CodebookHandle:
    """Deterministic (message-index order) enumeration of all codewords."""

    def __init__(self, code: SpaceTimeCode):
        self.code = code
        self.size = code.size

    def __len__(self):
        return self.size

    def __iter__(self):
        cb = self.code.coeff_codebook().astype(np.int64)
        phi = self.code.constellation.phi_complex
        for i in range(self.size):
            yield phi[cb[i]]


@dataclass(frozen=True)
class MLResult:
    message: tuple
    index: int
    codeword: np.ndarray
    metric: float


def ml_decode(y: np.ndarray, h: np.ndarray, code: SpaceTimeCode) -> MLResult:
    """Exhaustive minimum-Frobenius-distance decoding; ties resolve to the
    smallest message index.

    The scan runs in single precision (metric gaps sit far above float32
    resolution); the reported metric of the winner is recomputed exactly."""
    y = np.asarray(y, dtype=complex)
    h = np.asarray(h, dtype=complex)
    rows, cols = code.shape
    if h.shape[1] != rows or y.shape[1] != cols or y.shape[0] != h.shape[0]:
        raise DimensionMismatch("inconsistent shapes for ML decoding")
    if code.size > EXHAUSTIVE_LIMIT:
        raise CodebookTooLarge(
            f"codebook of {code.size} codewords exceeds the exhaustive limit"
        )
    y32 = y.astype(np.complex64)
    h32 = h.astype(np.complex64)
    if code.size <= _DENSE_LIMIT:
        if code._ml_flat is None:
            cb = code.codebook_array()
            code._ml_flat = np.ascontiguousarray(
                cb.transpose(1, 0, 2).reshape(rows, code.size * cols)
            ).astype(np.complex64)
        best_idx, _ = _scan_flat(y32, h32, code._ml_flat, code.size, cols, 0)
    else:
        coeff = code.coeff_codebook()
        phi32 = code.constellation.phi_complex.astype(np.complex64)
        best_idx, best_metric = -1, np.inf
        for start in range(0, code.size, _CHUNK):
            block = phi32[coeff[start:start + _CHUNK].astype(np.int64)]
            flat = np.ascontiguousarray(
                block.transpose(1, 0, 2).reshape(rows, block.shape[0] * cols)
            )
            idx, metric = _scan_flat(y32, h32, flat, block.shape[0], cols, start)
            if metric < best_metric:
                best_idx, best_metric = idx, metric
    msg = code.message_from_index(best_idx)
    best = code.encode_complex(msg)
    return MLResult(msg, best_idx, best, float(np.linalg.norm(h @ best - y)))


def _scan_flat(y32, h32, flat, size, cols, start):
    hx = (h32 @ flat).reshape(h32.shape[0], size, cols)
    hx -= y32[:, None, :]
    r = hx.view(np.float32)
    metrics = np.einsum("rkc,rkc->k", r, r)
    k = int(np.argmin(metrics))
    return start + k, float(metrics[k])


def complex_rank(mat: np.ndarray, rel_tol: float = 1e-6) -> int:
    """Numerical rank: singular values above rel_tol times the largest."""
    s = np.linalg.svd(np.asarray(mat, dtype=complex), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))
