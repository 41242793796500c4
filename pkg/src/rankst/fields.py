"""Exact arithmetic in F_q (q prime) and its extensions F_{q^m}.

Elements of F_{q^m} are coefficient vectors over the polynomial basis
(1, alpha, ..., alpha^(m-1)), where alpha is a root of a fixed monic
irreducible modulus of degree m.  Internally an element is stored packed
as the integer sum_i c_i * q^i, which makes table-driven multiplication
(discrete exp/log) a cheap drop-in for small fields; the coefficient
view is always recoverable with `ExtField.coeffs`.

The module also provides the expansion between length-n vectors over
F_{q^m} and m x n matrices over F_q (one column per vector component)
and exact F_q matrix algebra (rank, inverse, nullspace) used by the
rank-metric machinery.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# Fields up to this order get exp/log tables (a few MB at the limit).
_LOG_TABLE_LIMIT = 1 << 17


class FieldError(Exception):
    pass


class NonPrimeModulus(FieldError):
    pass


class DimensionMismatch(FieldError):
    pass


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond the desk-scale range."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for p in small:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


# ---------------------------------------------------------------------------
# Dense polynomials over F_q (coefficient lists, low degree first).
# Only what the modulus search needs: mulmod, power of X, gcd.
# ---------------------------------------------------------------------------

def _poly_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mulmod(a, b, mod, q):
    if not a or not b:
        return []
    res = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                res[i + j] = (res[i + j] + ai * bj) % q
    return _poly_modred(res, mod, q)


def _poly_modred(a, mod, q):
    # mod is monic
    a = list(a)
    dm = len(mod) - 1
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i] % q
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * mod[j]) % q
    return _poly_trim(a[:dm])


def _poly_pow_x(e, mod, q):
    """X^e mod `mod` by square-and-multiply."""
    result = [1]
    base = _poly_modred([0, 1], mod, q)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, mod, q)
        base = _poly_mulmod(base, base, mod, q)
        e >>= 1
    return result


def _poly_gcd(a, b, q):
    a, b = list(a), list(b)
    while b:
        # a mod b with b made monic on the fly
        inv_lead = pow(b[-1], q - 2, q)
        bm = [(c * inv_lead) % q for c in b]
        r = list(a)
        for i in range(len(r) - 1, len(bm) - 2, -1):
            c = r[i]
            if c:
                for j in range(len(bm)):
                    r[i - len(bm) + 1 + j] = (r[i - len(bm) + 1 + j] - c * bm[j]) % q
        _poly_trim(r)
        del r[len(bm) - 1:]
        _poly_trim(r)
        a, b = b, r
    return a


def _is_irreducible(mod, q):
    """No factor of degree <= m/2: gcd(X^(q^j) - X, f) trivial for all j."""
    m = len(mod) - 1
    if m == 1:
        return True
    for j in range(1, m // 2 + 1):
        t = _poly_pow_x(q ** j, mod, q)
        t = list(t)
        while len(t) < 2:
            t.append(0)
        t[1] = (t[1] - 1) % q
        g = _poly_gcd(mod, _poly_trim(t), q)
        if len(g) > 1:
            return False
    return True


class ExtField:
    """F_{q^m} with a deterministically chosen modulus and polynomial basis.

    Elements are packed integers ``sum_i c_i q^i`` with digits c_i the
    coefficients over (1, alpha, ..., alpha^(m-1)).  All operations take
    and return packed integers; `element` wraps them for operator use.
    """

    def __init__(self, q: int, m: int, modulus=None):
        if not is_prime(q):
            raise NonPrimeModulus(f"q = {q} is not prime")
        if m < 1:
            raise FieldError("extension degree must be >= 1")
        if q ** m > 1 << 40:
            raise FieldError("field order above desk-scale limit 2^40")
        self.q = q
        self.m = m
        self.order = q ** m
        if modulus is None:
            modulus = self._smallest_irreducible(q, m)
        else:
            modulus = tuple(c % q for c in modulus)
            if len(modulus) != m + 1 or modulus[-1] != 1:
                raise FieldError("modulus must be monic of degree m")
            if not _is_irreducible(list(modulus), q):
                raise FieldError("modulus is reducible")
        self.modulus = tuple(modulus)
        # basis = (1, alpha, ..., alpha^(m-1)); alpha^i packs to q^i
        self.basis = tuple(q ** i for i in range(m))
        self._powers = [q ** i for i in range(m)]
        # reduction rows: coefficients of X^(m+i) mod modulus
        red = []
        cur = [(-c) % q for c in self.modulus[:m]]  # X^m
        red.append(tuple(cur))
        for _ in range(m - 2):
            cur = self._shift_reduce(cur)
            red.append(tuple(cur))
        self._red_rows = red
        self._exp = None
        self._log = None
        if self.order <= _LOG_TABLE_LIMIT:
            self._build_tables()

    @staticmethod
    def _smallest_irreducible(q, m):
        # scan monic degree-m polynomials by the base-q value of their
        # low coefficients; the first irreducible one is the modulus
        for t in range(q ** m):
            coeffs = []
            v = t
            for _ in range(m):
                coeffs.append(v % q)
                v //= q
            cand = coeffs + [1]
            if _is_irreducible(cand, q):
                return tuple(cand)
        raise FieldError("no irreducible modulus found")  # unreachable

    def _shift_reduce(self, row):
        # multiply a reduced coefficient row by X and reduce once
        q, m = self.q, self.m
        shifted = [0] + list(row)
        c = shifted[m]
        if c:
            for j in range(m):
                shifted[j] = (shifted[j] - c * self.modulus[j]) % q
        return shifted[:m]

    # -- packed representation helpers ------------------------------------

    def coeffs(self, a: int):
        q = self.q
        out = []
        for _ in range(self.m):
            out.append(a % q)
            a //= q
        return tuple(out)

    def from_coeffs(self, coeffs) -> int:
        if len(coeffs) != self.m:
            raise DimensionMismatch("coefficient vector has wrong length")
        acc = 0
        for c, p in zip(coeffs, self._powers):
            acc += (c % self.q) * p
        return acc

    def element(self, a: int) -> "ExtFieldElement":
        if not 0 <= a < self.order:
            raise FieldError("packed element index out of range")
        return ExtFieldElement(self, a)

    def elements(self):
        return range(self.order)

    # -- arithmetic on packed integers -------------------------------------

    def add(self, a: int, b: int) -> int:
        q = self.q
        if q == 2:
            return a ^ b
        acc = 0
        for p in self._powers:
            acc += ((a + b) % q) * p
            a //= q
            b //= q
        return acc

    def sub(self, a: int, b: int) -> int:
        q = self.q
        if q == 2:
            return a ^ b
        acc = 0
        for p in self._powers:
            acc += ((a - b) % q) * p
            a //= q
            b //= q
        return acc

    def neg(self, a: int) -> int:
        q = self.q
        if q == 2:
            return a
        acc = 0
        for p in self._powers:
            acc += (-a % q) * p
            a //= q
        return acc

    def mul(self, a: int, b: int) -> int:
        if self._log is not None:
            if a == 0 or b == 0:
                return 0
            return self._exp[(self._log[a] + self._log[b]) % (self.order - 1)]
        return self._mul_poly(a, b)

    def _mul_poly(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        q, m = self.q, self.m
        ca, cb = self.coeffs(a), self.coeffs(b)
        conv = [0] * (2 * m - 1)
        for i, ai in enumerate(ca):
            if ai:
                for j, bj in enumerate(cb):
                    conv[i + j] += ai * bj
        res = [c % q for c in conv[:m]]
        for i in range(m, 2 * m - 1):
            c = conv[i] % q
            if c:
                row = self._red_rows[i - m]
                for j in range(m):
                    res[j] = (res[j] + c * row[j]) % q
        acc = 0
        for c, p in zip(res, self._powers):
            acc += c * p
        return acc

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in F_{q^m}")
        if self._log is not None:
            return self._exp[(-self._log[a]) % (self.order - 1)]
        return self.pow(a, self.order - 2)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        if a == 0:
            return 0 if e else 1
        if self._log is not None:
            return self._exp[(self._log[a] * e) % (self.order - 1)]
        result, base = 1, a
        while e:
            if e & 1:
                result = self._mul_poly(result, base)
            base = self._mul_poly(base, base)
            e >>= 1
        return result

    def frob(self, a: int, j: int) -> int:
        """a^(q^j); an F_q-linear map for every j."""
        if a == 0:
            return 0
        j %= self.m
        if j == 0:
            return a
        if self._log is not None:
            return self._exp[(self._log[a] * pow(self.q, j, self.order - 1)) % (self.order - 1)]
        return self.pow(a, pow(self.q, j, self.order - 1))

    def _build_tables(self):
        n = self.order - 1
        factors = []
        t, f = n, 2
        while f * f <= t:
            if t % f == 0:
                factors.append(f)
                while t % f == 0:
                    t //= f
            f += 1
        if t > 1:
            factors.append(t)
        gen = None
        for cand in range(2, self.order):
            if all(self.pow(cand, n // p) != 1 for p in factors):
                gen = cand
                break
        if gen is None:  # m == 1, q == 2: the group is trivial
            gen = 1
        exp = [0] * n
        cur = 1
        for i in range(n):
            exp[i] = cur
            cur = self._mul_poly(cur, gen)
        log = [0] * self.order
        for i, v in enumerate(exp):
            log[v] = i
        self._exp = exp
        self._log = log
        self.generator = gen

    def __repr__(self):
        return f"ExtField(q={self.q}, m={self.m})"

    def __eq__(self, other):
        return (
            isinstance(other, ExtField)
            and self.q == other.q
            and self.m == other.m
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.q, self.m, self.modulus))


@dataclass(frozen=True)
class ExtFieldElement:
    """Element of F_{q^m}, operator sugar over the packed representation."""

    field: ExtField
    idx: int

    @property
    def coeffs(self):
        return self.field.coeffs(self.idx)

    def _check(self, other):
        if self.field != other.field:
            raise DimensionMismatch("elements of different fields")

    def __add__(self, other):
        self._check(other)
        return ExtFieldElement(self.field, self.field.add(self.idx, other.idx))

    def __sub__(self, other):
        self._check(other)
        return ExtFieldElement(self.field, self.field.sub(self.idx, other.idx))

    def __mul__(self, other):
        self._check(other)
        return ExtFieldElement(self.field, self.field.mul(self.idx, other.idx))

    def __truediv__(self, other):
        self._check(other)
        return ExtFieldElement(self.field, self.field.mul(self.idx, self.field.inv(other.idx)))

    def __neg__(self):
        return ExtFieldElement(self.field, self.field.neg(self.idx))

    def __pow__(self, e: int):
        return ExtFieldElement(self.field, self.field.pow(self.idx, e))

    def inverse(self):
        return ExtFieldElement(self.field, self.field.inv(self.idx))

    def __bool__(self):
        return self.idx != 0

    def __repr__(self):
        return f"Fqm({self.coeffs})"


@lru_cache(maxsize=None)
def make_field(q: int, m: int) -> ExtField:
    """F_{q^m} with the smallest monic irreducible modulus (scan order:
    base-q value of the non-leading coefficients) and polynomial basis."""
    return ExtField(q, m)


def frobenius_power(x: ExtFieldElement, i: int) -> ExtFieldElement:
    if i < 0:
        raise FieldError("Frobenius exponent must be >= 0")
    return ExtFieldElement(x.field, x.field.frob(x.idx, i))


# ---------------------------------------------------------------------------
# Matrices over F_q
# ---------------------------------------------------------------------------

class MatrixFq:
    """Dense matrix over F_q; entries held reduced in an int64 array."""

    def __init__(self, q: int, entries):
        a = np.asarray(entries, dtype=np.int64)
        if a.ndim != 2:
            raise DimensionMismatch("matrix entries must be 2-dimensional")
        self.q = q
        self.a = np.mod(a, q)

    @property
    def rows(self):
        return self.a.shape[0]

    @property
    def cols(self):
        return self.a.shape[1]

    def _check(self, other):
        if self.q != other.q:
            raise DimensionMismatch("matrices over different fields")

    def __add__(self, other):
        self._check(other)
        if self.a.shape != other.a.shape:
            raise DimensionMismatch("shape mismatch")
        return MatrixFq(self.q, self.a + other.a)

    def __sub__(self, other):
        self._check(other)
        if self.a.shape != other.a.shape:
            raise DimensionMismatch("shape mismatch")
        return MatrixFq(self.q, self.a - other.a)

    def __matmul__(self, other):
        self._check(other)
        if self.cols != other.rows:
            raise DimensionMismatch("inner dimensions differ")
        return MatrixFq(self.q, self.a @ other.a)

    def __eq__(self, other):
        return (
            isinstance(other, MatrixFq)
            and self.q == other.q
            and self.a.shape == other.a.shape
            and bool(np.all(self.a == other.a))
        )

    def __repr__(self):
        return f"MatrixFq(q={self.q},\n{self.a})"

    def rank(self):
        return fq_rank(self.a, self.q)

    def inverse(self):
        inv = fq_inv_matrix(self.a, self.q)
        if inv is None:
            raise FieldError("matrix is singular over F_q")
        return MatrixFq(self.q, inv)

    def det(self):
        return fq_det(self.a, self.q)


def matrix_rank_fq(mat: MatrixFq) -> int:
    return fq_rank(mat.a, mat.q)


def fq_rref(a, q):
    """Reduced row echelon form mod prime q; returns (rref, pivot cols)."""
    a = np.mod(np.asarray(a, dtype=np.int64), q).copy()
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        sel = None
        for i in range(r, rows):
            if a[i, c]:
                sel = i
                break
        if sel is None:
            continue
        if sel != r:
            a[[r, sel]] = a[[sel, r]]
        inv = pow(int(a[r, c]), q - 2, q)
        a[r] = a[r] * inv % q
        for i in range(rows):
            if i != r and a[i, c]:
                a[i] = (a[i] - a[i, c] * a[r]) % q
        pivots.append(c)
        r += 1
    return a, pivots


def fq_rank(a, q):
    a = np.asarray(a)
    if a.size == 0:
        return 0
    _, pivots = fq_rref(a, q)
    return len(pivots)


def fq_det(a, q):
    a = np.mod(np.asarray(a, dtype=np.int64), q).copy()
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch("determinant of non-square matrix")
    det = 1
    for c in range(n):
        sel = None
        for i in range(c, n):
            if a[i, c]:
                sel = i
                break
        if sel is None:
            return 0
        if sel != c:
            a[[c, sel]] = a[[sel, c]]
            det = -det % q
        det = det * int(a[c, c]) % q
        inv = pow(int(a[c, c]), q - 2, q)
        for i in range(c + 1, n):
            if a[i, c]:
                a[i] = (a[i] - a[i, c] * inv * a[c]) % q
    return det % q


def fq_inv_matrix(a, q):
    a = np.mod(np.asarray(a, dtype=np.int64), q)
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch("inverse of non-square matrix")
    aug = np.concatenate([a, np.eye(n, dtype=np.int64)], axis=1)
    red, pivots = fq_rref(aug, q)
    if pivots[:n] != list(range(n)):
        return None
    return red[:, n:]


def fq_nullspace(a, q):
    """Basis (as columns) of the right nullspace of a over F_q."""
    a = np.asarray(a, dtype=np.int64)
    rows, cols = a.shape
    red, pivots = fq_rref(a, q)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((cols, len(free)), dtype=np.int64)
    for k, fc in enumerate(free):
        basis[fc, k] = 1
        for r, pc in enumerate(pivots):
            basis[pc, k] = (-red[r, fc]) % q
    return basis


def ext_expand(vec, field: ExtField | None = None) -> MatrixFq:
    """Expand a vector over F_{q^m} into the m x n matrix of coefficient
    columns (component i becomes column i)."""
    items = list(vec)
    if not items:
        if field is None:
            raise DimensionMismatch("cannot expand an empty vector without a field")
        return MatrixFq(field.q, np.zeros((field.m, 0), dtype=np.int64))
    if isinstance(items[0], ExtFieldElement):
        f = items[0].field
        if any(e.field != f for e in items):
            raise DimensionMismatch("mixed fields in vector")
        if field is not None and field != f:
            raise DimensionMismatch("vector does not belong to the given field")
        field = f
        idxs = [e.idx for e in items]
    else:
        if field is None:
            raise DimensionMismatch("packed integers need an explicit field")
        idxs = [int(e) for e in items]
    cols = [field.coeffs(i) for i in idxs]
    return MatrixFq(field.q, np.array(cols, dtype=np.int64).T)


def ext_collapse(mat: MatrixFq, field: ExtField):
    """Inverse of `ext_expand`: columns back to field elements."""
    if mat.rows != field.m or mat.q != field.q:
        raise DimensionMismatch("matrix shape does not match the field")
    return [
        ExtFieldElement(field, field.from_coeffs(tuple(int(v) for v in mat.a[:, j])))
        for j in range(mat.cols)
    ]
