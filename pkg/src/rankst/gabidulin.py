"""Linearized polynomials and Gabidulin codes with error-and-erasure decoding.

A linearized polynomial f(X) = sum_i f_i X^(q^i) is an F_q-linear map on
F_{q^m}.  Evaluating one of q-degree < k at n F_q-linearly-independent
points g_1..g_n gives a code of length n whose codeword matrices (via the
basis expansion) have minimum rank distance d = n - k + 1.

The decoder recovers a codeword from

    y = c + e_rank + e_row + e_col

where e_rank expands to an F_q matrix of rank tau, e_row = A_R B_R with
the left factor A_R (m x rho) known, and e_col = A_C B_C with the right
factor B_C (delta x n) known, whenever 2*tau + rho + delta < d.  The two
erasure kinds are projected out first:

  * column erasures: an invertible position mix P sends the support of
    B_C into the last delta positions (codewords map to codewords with
    evaluation points g P), which are then punctured;
  * row erasures: the minimal linearized polynomial of the column span
    of A_R annihilates the erasure values, turning the remainder into an
    error-only instance for the code of dimension k + rho.

The residual error-only instance is solved by interpolation: any nonzero
pair (V, N) with q-degrees <= t and < k' + t satisfying V(y_i) = N(g_i)
for all i has N = V o f when the error rank is at most t, so f pops out
of an exact left division.  Decoding failure is a value, not an error:
candidate loops over erasure patterns treat it as a normal outcome.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import (
    DimensionMismatch,
    ExtField,
    ExtFieldElement,
    MatrixFq,
    ext_expand,
    fq_inv_matrix,
    fq_rank,
    fq_rref,
)


class LengthMismatch(Exception):
    pass


class CoverViolation(Exception):
    pass


# ---------------------------------------------------------------------------
# Linearized polynomials (coefficients as packed field integers)
# ---------------------------------------------------------------------------

class LinearizedPoly:
    """f(X) = sum_i coeffs[i] * X^(q^i); the zero polynomial has no
    coefficients and q-degree None (standing in for -infinity)."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: ExtField, coeffs):
        cs = [c.idx if isinstance(c, ExtFieldElement) else int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @property
    def q_degree(self):
        return len(self.coeffs) - 1 if self.coeffs else None

    def is_zero(self):
        return not self.coeffs

    def evaluate(self, x: int) -> int:
        f = self.field
        acc = 0
        for i, c in enumerate(self.coeffs):
            if c:
                acc = f.add(acc, f.mul(c, f.frob(x, i)))
        return acc

    def compose(self, other: "LinearizedPoly") -> "LinearizedPoly":
        """self o other, i.e. X -> self(other(X))."""
        f = self.field
        if self.is_zero() or other.is_zero():
            return LinearizedPoly(f, ())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[i + j] = f.add(out[i + j], f.mul(a, f.frob(b, i)))
        return LinearizedPoly(f, out)

    def __eq__(self, other):
        return (
            isinstance(other, LinearizedPoly)
            and self.field == other.field
            and self.coeffs == other.coeffs
        )

    def __repr__(self):
        return f"LinearizedPoly({self.coeffs})"


def lin_eval(f: LinearizedPoly, x) -> ExtFieldElement:
    xi = x.idx if isinstance(x, ExtFieldElement) else int(x)
    return ExtFieldElement(f.field, f.evaluate(xi))


def left_divide(numerator: LinearizedPoly, left: LinearizedPoly):
    """Solve left o f = numerator for f.  Returns (f, True) when the
    division is exact, (None, False) otherwise."""
    F = numerator.field
    if left.is_zero():
        return None, False
    if numerator.is_zero():
        return LinearizedPoly(F, ()), True
    s = left.q_degree
    vs_inv = F.inv(left.coeffs[s])
    rem = list(numerator.coeffs)
    quot = {}
    while rem:
        d = len(rem) - 1
        e = d - s
        if e < 0:
            return None, False
        # top coefficient: left_s * f_e^(q^s) = rem_d
        fe = F.frob(F.mul(rem[d], vs_inv), (F.m - s) % F.m)
        quot[e] = fe
        for i, vi in enumerate(left.coeffs):
            if vi:
                rem[i + e] = F.sub(rem[i + e], F.mul(vi, F.frob(fe, i)))
        while rem and rem[-1] == 0:
            rem.pop()
    out = [0] * (max(quot) + 1 if quot else 0)
    for e, c in quot.items():
        out[e] = c
    return LinearizedPoly(F, out), True


def min_annihilator(field: ExtField, values) -> LinearizedPoly:
    """Monic linearized polynomial of smallest q-degree vanishing on the
    F_q-span of the given values; its q-degree equals the span dimension."""
    L = LinearizedPoly(field, (1,))
    for v in values:
        vi = v.idx if isinstance(v, ExtFieldElement) else int(v)
        w = L.evaluate(vi)
        if w == 0:
            continue
        # (X^q - w^(q-1) X) o L kills w while keeping previous roots
        step = LinearizedPoly(field, (field.neg(field.pow(w, field.q - 1)), 1))
        L = step.compose(L)
    return L


# ---------------------------------------------------------------------------
# Gabidulin codes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ErasureInfo:
    """Known erasure factors: row_factor is the known m x rho left factor,
    col_factor the known delta x n right factor; either may be None."""

    row_factor: MatrixFq | None = None
    col_factor: MatrixFq | None = None


NO_ERASURES = ErasureInfo()


@dataclass(frozen=True)
class GabidulinDecodeResult:
    ok: bool
    message: tuple | None = None
    codeword: tuple | None = None

    FAILURE = None  # set below


GabidulinDecodeResult.FAILURE = GabidulinDecodeResult(False)


class GabidulinCode:
    """Evaluation code of linearized polynomials of q-degree < k at the
    points g_i = alpha^(i-1); minimum rank distance d = n - k + 1."""

    def __init__(self, field: ExtField, n: int, k: int, g=None):
        if not 1 <= k < n <= field.m:
            raise LengthMismatch("need 1 <= k < n <= m")
        self.field = field
        self.n = n
        self.k = k
        if g is None:
            g = tuple(field.basis[i] for i in range(n))
        else:
            g = tuple(x.idx if isinstance(x, ExtFieldElement) else int(x) for x in g)
        if fq_rank(ext_expand(g, field).a, field.q) != n:
            raise LengthMismatch("evaluation points must be F_q-independent")
        self.g = g
        # frobenius table: _gf[j][i] = g_i^(q^j)
        self._gf = [[field.frob(gi, j) for gi in g] for j in range(field.m)]

    @property
    def d(self) -> int:
        return self.n - self.k + 1

    def _as_idx_vec(self, vec, length, what):
        out = [v.idx if isinstance(v, ExtFieldElement) else int(v) for v in vec]
        if len(out) != length:
            raise LengthMismatch(f"{what} must have length {length}")
        return out

    def encode(self, msg) -> tuple:
        """Codeword (f(g_1), ..., f(g_n)) for f with coefficients msg."""
        msg = self._as_idx_vec(msg, self.k, "message")
        F = self.field
        out = []
        for i in range(self.n):
            acc = 0
            for j, c in enumerate(msg):
                if c:
                    acc = F.add(acc, F.mul(c, self._gf[j][i]))
            out.append(acc)
        return tuple(out)

    def random_message(self, rng) -> tuple:
        return tuple(int(rng.integers(self.field.order)) for _ in range(self.k))

    # -- decoding -----------------------------------------------------------

    def decode_error_erasure(self, y, erasures: ErasureInfo = NO_ERASURES) -> GabidulinDecodeResult:
        F = self.field
        q, m, n, k = F.q, F.m, self.n, self.k
        y = self._as_idx_vec(y, n, "received word")

        # -- project out column erasures by an invertible position mix
        g_work = list(self.g)
        y_work = list(y)
        delta = 0
        if erasures.col_factor is not None and erasures.col_factor.a.size:
            bc = erasures.col_factor
            if bc.q != q or bc.cols != n:
                raise DimensionMismatch("column erasure factor has wrong shape")
            red, pivots = fq_rref(bc.a, q)
            delta = len(pivots)
            if delta:
                if delta >= self.d:
                    return GabidulinDecodeResult.FAILURE
                mix = np.zeros((n, n), dtype=np.int64)
                nonpiv = [c for c in range(n) if c not in pivots]
                for i, c in enumerate(nonpiv):
                    mix[i, c] = 1
                mix[n - delta:, :] = red[:delta]
                pinv = fq_inv_matrix(mix, q)
                # received word and evaluation points transform with the
                # same position mix because f is F_q-linear
                y_work = _vec_times_fq(F, y_work, pinv)
                g_work = _vec_times_fq(F, g_work, pinv)
                y_work = y_work[: n - delta]
                g_work = g_work[: n - delta]

        # -- annihilate row erasures with the minimal linearized polynomial
        rho = 0
        lw = None
        if erasures.row_factor is not None and erasures.row_factor.a.size:
            ar = erasures.row_factor
            if ar.q != q or ar.rows != m:
                raise DimensionMismatch("row erasure factor has wrong shape")
            values = [
                F.from_coeffs(tuple(int(v) for v in ar.a[:, s]))
                for s in range(ar.cols)
            ]
            lw = min_annihilator(F, values)
            rho = lw.q_degree
            if rho >= self.d:
                return GabidulinDecodeResult.FAILURE
            if rho:
                y_work = [lw.evaluate(v) for v in y_work]

        n2 = len(y_work)
        k2 = k + rho
        d2 = n2 - k2 + 1
        if d2 < 1:
            return GabidulinDecodeResult.FAILURE
        t2 = (d2 - 1) // 2

        h = _solve_interpolation(F, y_work, g_work, k2, t2)
        if h is None:
            return GabidulinDecodeResult.FAILURE

        # peel the erasure annihilator off the left
        if rho:
            f_poly, exact = left_divide(h, lw)
            if not exact:
                return GabidulinDecodeResult.FAILURE
        else:
            f_poly = h
        if not f_poly.is_zero() and f_poly.q_degree >= k:
            return GabidulinDecodeResult.FAILURE

        # consistency: the residual in the reduced problem must fit the
        # claimed rank budget, otherwise report failure instead of garbage
        resid = [F.sub(yi, h.evaluate(gi)) for yi, gi in zip(y_work, g_work)]
        if fq_rank(ext_expand(resid, F).a, q) > t2:
            return GabidulinDecodeResult.FAILURE

        msg = list(f_poly.coeffs) + [0] * (k - len(f_poly.coeffs))
        return GabidulinDecodeResult(True, tuple(msg), self.encode(msg))


def _vec_times_fq(field: ExtField, vec, mat):
    """Row vector over F_{q^m} times an F_q matrix (scalars embedded)."""
    n_out = mat.shape[1]
    out = [0] * n_out
    for i, v in enumerate(vec):
        if not v:
            continue
        row = mat[i]
        for j in range(n_out):
            s = int(row[j])
            if s:
                out[j] = field.add(out[j], field.mul(v, s))
    return out


def _solve_interpolation(field: ExtField, y, g, k2, t2):
    """Nonzero (V, N) with deg_q V <= t2, deg_q N < k2 + t2 and
    V(y_i) = N(g_i) for all i; returns h = V \\ N or None."""
    n2 = len(y)
    ncols = (t2 + 1) + (k2 + t2)
    rows = []
    for i in range(n2):
        row = [field.frob(y[i], j) for j in range(t2 + 1)]
        row += [field.neg(field.frob(g[i], l)) for l in range(k2 + t2)]
        rows.append(row)
    sol = _kernel_vector(field, rows, ncols)
    if sol is None:
        return None
    v_poly = LinearizedPoly(field, sol[: t2 + 1])
    n_poly = LinearizedPoly(field, sol[t2 + 1:])
    if v_poly.is_zero():
        return None
    h, exact = left_divide(n_poly, v_poly)
    if not exact:
        return None
    return h


def _kernel_vector(field: ExtField, rows, ncols):
    """First kernel basis vector of a matrix over F_{q^m} (packed ints),
    or None when the kernel is trivial."""
    mat = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(mat):
            break
        sel = None
        for i in range(r, len(mat)):
            if mat[i][c]:
                sel = i
                break
        if sel is None:
            continue
        mat[r], mat[sel] = mat[sel], mat[r]
        inv = field.inv(mat[r][c])
        mat[r] = [field.mul(inv, v) for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [field.sub(a, field.mul(f, b)) for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    if not free:
        return None
    fc = free[0]
    vec = [0] * ncols
    vec[fc] = 1
    for i, pc in enumerate(pivots):
        vec[pc] = field.neg(mat[i][fc])
    return vec


# ---------------------------------------------------------------------------
# Rank metric utilities
# ---------------------------------------------------------------------------

def rank_distance(a: MatrixFq, b: MatrixFq) -> int:
    if a.q != b.q or a.a.shape != b.a.shape:
        raise DimensionMismatch("rank distance needs equal shapes over one field")
    return fq_rank(a.a - b.a, a.q)


def crisscross_rank_bound(rows, cols, e: MatrixFq) -> bool:
    """Check rank(E) <= |rows| + |cols| for a matrix supported on the
    given row/column cover; raises if the support leaks outside."""
    mask = np.ones(e.a.shape, dtype=bool)
    for r in rows:
        mask[r, :] = False
    for c in cols:
        mask[:, c] = False
    if np.any(e.a[mask]):
        raise CoverViolation("error support outside the declared cover")
    return fq_rank(e.a, e.q) <= len(rows) + len(cols)
