"""Exact arithmetic in the hexagonal lattice Z[w], w = exp(j*2*pi/3).

The ring Z[w] (elements a + w*b) is the densest lattice in the plane; its
units are the six elements of norm one.  For a nonzero theta, the scaled
lattice theta*Z[w] induces a quantizer (nearest lattice point), a modulo
map (residue in the Voronoi cell), and a finite constellation of
|theta|^2 residues.  When theta is prime in Z[w] the constellation with
modulo arithmetic is a finite field, and the residue map provides the
scalar isomorphism phi used to lift finite-field matrices into the
complex plane entry by entry.

Everything on exact integer inputs (membership tests, determinants,
the field tables) is computed with integer norms only; floating point
appears only where the input itself is floating point.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .fields import (
    DimensionMismatch,
    MatrixFq,
    make_field,
    is_prime,
)

OMEGA = complex(-0.5, math.sqrt(3.0) / 2.0)


class LatticeError(Exception):
    pass


class ZeroTheta(LatticeError):
    pass


class PointNotInConstellation(LatticeError):
    pass


class NotAField(LatticeError):
    pass


class NotSquare(LatticeError):
    pass


@dataclass(frozen=True)
class EisensteinInt:
    """a + w*b with integer a, b; w^2 = -1 - w."""

    a: int
    b: int

    def __add__(self, other):
        return EisensteinInt(self.a + other.a, self.b + other.b)

    def __sub__(self, other):
        return EisensteinInt(self.a - other.a, self.b - other.b)

    def __neg__(self):
        return EisensteinInt(-self.a, -self.b)

    def __mul__(self, other):
        # (a1 + w b1)(a2 + w b2) = a1 a2 - b1 b2 + w (a1 b2 + a2 b1 - b1 b2)
        a1, b1, a2, b2 = self.a, self.b, other.a, other.b
        return EisensteinInt(a1 * a2 - b1 * b2, a1 * b2 + a2 * b1 - b1 * b2)

    def conj(self):
        # complex conjugate: conj(w) = -1 - w
        return EisensteinInt(self.a - self.b, -self.b)

    def norm(self) -> int:
        return self.a * self.a - self.a * self.b + self.b * self.b

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_unit(self) -> bool:
        return self.norm() == 1

    def to_complex(self) -> complex:
        return complex(self.a) + OMEGA * self.b

    def __repr__(self):
        return f"E({self.a},{self.b})"


EIS_ZERO = EisensteinInt(0, 0)
EIS_ONE = EisensteinInt(1, 0)

# the six units: exp(j*pi*k/3) for k = 0..5
EIS_UNITS = (
    EisensteinInt(1, 0),
    EisensteinInt(1, 1),
    EisensteinInt(0, 1),
    EisensteinInt(-1, 0),
    EisensteinInt(-1, -1),
    EisensteinInt(0, -1),
)


def eis_exact_div(num: EisensteinInt, den: EisensteinInt) -> EisensteinInt:
    """num / den when den divides num in Z[w]; raises otherwise."""
    if den.is_zero():
        raise ZeroDivisionError("division by zero in Z[w]")
    t = num * den.conj()
    n = den.norm()
    if t.a % n or t.b % n:
        raise ArithmeticError(f"{num} not divisible by {den} in Z[w]")
    return EisensteinInt(t.a // n, t.b // n)


def _angle_key(p: EisensteinInt) -> float:
    # angle in [0, 2*pi); distinct small lattice points never collide in float
    ang = math.atan2(p.b * math.sqrt(3.0) / 2.0, p.a - p.b / 2.0)
    return ang if ang >= 0.0 else ang + 2.0 * math.pi


def _residue_angle(c: complex) -> float:
    ang = cmath.phase(c)
    return ang if ang >= 0.0 else ang + 2.0 * math.pi


def _candidate_grid(ar: float, br: float):
    a0, b0 = round(ar), round(br)
    return [
        EisensteinInt(a0 + da, b0 + db)
        for da in (-1, 0, 1)
        for db in (-1, 0, 1)
    ]


def quantize_lattice(z: complex, theta: EisensteinInt = EIS_ONE) -> EisensteinInt:
    """Nearest point of theta*Z[w] to z, returned as an exact Eisenstein
    integer.

    On Voronoi boundaries the argmin is ambiguous; ties are broken by the
    smallest angle of the residue z - y.  The set of tied residues is
    invariant under lattice translates of z, so the induced modulo map is
    constant on cosets even when lattice points sit exactly on the cell
    boundary (which happens, e.g., for norm-3 and norm-4 theta)."""
    if theta.is_zero():
        raise ZeroTheta("theta must be nonzero")
    w = complex(z) / theta.to_complex()
    # skewed coordinates of w in the basis (1, omega)
    br = w.imag / OMEGA.imag
    ar = w.real - br * OMEGA.real
    tc = theta.to_complex()
    scale = max(1.0, abs(z) ** 2, abs(tc) ** 2)
    cands = []
    for cand in _candidate_grid(ar, br):
        y = theta * cand
        d = abs(complex(z) - y.to_complex()) ** 2
        cands.append((d, y))
    dmin = min(d for d, _ in cands)
    tied = [y for d, y in cands if d <= dmin + 1e-12 * scale]
    if len(tied) == 1:
        return tied[0]
    return min(tied, key=lambda y: _residue_angle(complex(z) - y.to_complex()))


def mod_lattice(z: complex, theta: EisensteinInt = EIS_ONE) -> complex:
    """z reduced into the Voronoi cell of theta*Z[w]."""
    return complex(z) - quantize_lattice(z, theta).to_complex()


def eis_mod_exact(z: EisensteinInt, theta: EisensteinInt) -> EisensteinInt:
    """Residue of a lattice point modulo theta*Z[w]; distances compared as
    exact integer norms, ties by the smallest residue angle (the same rule
    as the float quantizer, so both paths agree on boundary points)."""
    if theta.is_zero():
        raise ZeroTheta("theta must be nonzero")
    w = z.to_complex() / theta.to_complex()
    br = w.imag / OMEGA.imag
    ar = w.real - br * OMEGA.real
    best_r = None
    best_key = None
    for cand in _candidate_grid(ar, br):
        r = z - theta * cand
        key = (r.norm(), _angle_key(r))
        if best_key is None or key < best_key:
            best_key = key
            best_r = r
    return best_r


def quantize_matrix(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Entry-wise nearest point of the unit lattice Z[w] for a complex
    array; returns the (a, b) integer coordinate arrays."""
    z = np.asarray(z, dtype=complex)
    br = z.imag / OMEGA.imag
    ar = z.real - br * OMEGA.real
    a0 = np.rint(ar).astype(np.int64)
    b0 = np.rint(br).astype(np.int64)
    offsets = [(da, db) for da in (-1, 0, 1) for db in (-1, 0, 1)]
    dists = np.empty((len(offsets),) + z.shape)
    for k, (da, db) in enumerate(offsets):
        cand = (a0 + da) + OMEGA * (b0 + db)
        dists[k] = np.abs(z - cand) ** 2
    pick = np.argmin(dists, axis=0)
    da = np.array([o[0] for o in offsets], dtype=np.int64)[pick]
    db = np.array([o[1] for o in offsets], dtype=np.int64)[pick]
    return a0 + da, b0 + db


# ---------------------------------------------------------------------------
# Constellations
# ---------------------------------------------------------------------------

TYPE_I = "type_i"
TYPE_II = "type_ii"
NOT_PRIME = "not_prime"


class Constellation:
    """The |theta|^2 residues of Z[w] modulo theta*Z[w], with modulo
    addition/multiplication and, when theta is prime, the scalar field
    isomorphism phi (residue index -> lattice point)."""

    def __init__(self, theta: EisensteinInt):
        if theta.is_zero():
            raise ZeroTheta("theta must be nonzero")
        self.theta = theta
        self.q = theta.norm()
        self.points = self._enumerate()
        self._point_set = set((p.a, p.b) for p in self.points)
        self.energy = sum(p.norm() for p in self.points) / len(self.points)
        self.prime_type = self._classify()
        self.ext_field = None
        self.phi = None
        self._phi_inv = None
        if self.prime_type == TYPE_II:
            self._build_phi_type_ii()
        elif self.prime_type == TYPE_I:
            self._build_phi_type_i()
        if self.phi is not None:
            self.phi_complex = np.array([p.to_complex() for p in self.phi])
            self._phi_inv = {(p.a, p.b): i for i, p in enumerate(self.phi)}

    def _enumerate(self):
        radius = math.isqrt(self.q) + 2
        pts = []
        for a in range(-2 * radius, 2 * radius + 1):
            for b in range(-2 * radius, 2 * radius + 1):
                p = EisensteinInt(a, b)
                if p.norm() > 4 * self.q:
                    continue
                if eis_mod_exact(p, self.theta) == p:
                    pts.append(p)
        if len(pts) != self.q:
            raise LatticeError(
                f"enumeration found {len(pts)} residues, expected {self.q}"
            )
        return tuple(sorted(pts, key=lambda p: (p.norm(), _angle_key(p), p.a, p.b)))

    def _classify(self):
        if is_prime(self.q) and (self.q % 3 == 1 or self.q == 3):
            return TYPE_II
        # unit multiple of a rational prime p = 2 mod 3 (norm is then p^2)
        for u in EIS_UNITS:
            # theta / u has b == 0 iff theta is associate to an integer
            w = self.theta * _unit_inverse(u)
            if w.b == 0:
                p = abs(w.a)
                if is_prime(p) and p % 3 == 2:
                    return TYPE_I
        return NOT_PRIME

    # -- modulo field arithmetic ------------------------------------------

    def contains(self, p: EisensteinInt) -> bool:
        return (p.a, p.b) in self._point_set

    def _require_point(self, p):
        if not self.contains(p):
            raise PointNotInConstellation(f"{p} is not a constellation point")

    def add(self, x: EisensteinInt, y: EisensteinInt) -> EisensteinInt:
        self._require_point(x)
        self._require_point(y)
        return eis_mod_exact(x + y, self.theta)

    def mul(self, x: EisensteinInt, y: EisensteinInt) -> EisensteinInt:
        self._require_point(x)
        self._require_point(y)
        return eis_mod_exact(x * y, self.theta)

    # -- the isomorphism phi ------------------------------------------------

    def _build_phi_type_ii(self):
        # residues of the rational integers 0..q-1 enumerate the field
        phi = [eis_mod_exact(EisensteinInt(x, 0), self.theta) for x in range(self.q)]
        if len(set((p.a, p.b) for p in phi)) != self.q:
            raise LatticeError("integer residues do not cover the constellation")
        self.phi = tuple(phi)

    def _build_phi_type_i(self):
        # constellation is a field with q = p^2 elements; match a primitive
        # element of F_{p^2} with a multiplicative generator of the points
        p = math.isqrt(self.q)
        field = make_field(p, 2)
        self.ext_field = field
        pi = None
        for cand in range(1, field.order):
            if _field_mult_order(field, cand) == self.q - 1:
                pi = cand
                break
        nonzero = sorted(
            (pt for pt in self.points if not pt.is_zero()),
            key=lambda t: (t.a, t.b),
        )
        for gen in nonzero:
            if self._point_mult_order(gen) != self.q - 1:
                continue
            phi = [EIS_ZERO] * self.q
            cur_f, cur_p = 1, EIS_ONE
            ok = True
            for _ in range(self.q - 1):
                phi[cur_f] = cur_p
                cur_f = field.mul(cur_f, pi)
                cur_p = eis_mod_exact(cur_p * gen, self.theta)
            # additivity makes the multiplicative match a field isomorphism
            for x in range(self.q):
                for y in range(x, self.q):
                    s = field.add(x, y)
                    if eis_mod_exact(phi[x] + phi[y], self.theta) != phi[s]:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                self.phi = tuple(phi)
                return
        raise LatticeError("no Type I isomorphism found")  # unreachable for primes

    def _point_mult_order(self, pt: EisensteinInt) -> int:
        cur = pt
        for k in range(1, self.q):
            if cur == EIS_ONE:
                return k
            cur = eis_mod_exact(cur * pt, self.theta)
        return 0

    def phi_scalar(self, x: int) -> EisensteinInt:
        if self.phi is None:
            raise NotAField("theta is not prime in Z[w]")
        return self.phi[x % self.q]

    def phi_inv_scalar(self, z: EisensteinInt) -> int:
        if self.phi is None:
            raise NotAField("theta is not prime in Z[w]")
        r = eis_mod_exact(z, self.theta)
        return self._phi_inv[(r.a, r.b)]

    def __repr__(self):
        return f"Constellation(theta={self.theta}, q={self.q}, {self.prime_type})"


def _unit_inverse(u: EisensteinInt) -> EisensteinInt:
    for v in EIS_UNITS:
        if (u * v) == EIS_ONE:
            return v
    raise LatticeError("not a unit")


def _field_mult_order(field, a: int) -> int:
    cur = a
    for k in range(1, field.order):
        if cur == 1:
            return k
        cur = field.mul(cur, a)
    return 0


def build_constellation(theta: EisensteinInt) -> Constellation:
    return Constellation(theta)


def phi_map(mat: MatrixFq, c: Constellation):
    """Entry-wise lift of an F_q matrix to constellation points."""
    if c.phi is None:
        raise NotAField("theta is not prime in Z[w]")
    if c.prime_type == TYPE_II and mat.q != c.q:
        raise DimensionMismatch("matrix field does not match the constellation")
    return [[c.phi[int(v)] for v in row] for row in mat.a]


def phi_inv(mat, c: Constellation) -> MatrixFq:
    """Entry-wise inverse of `phi_map`; reduces each Eisenstein entry
    modulo theta first, so lattice offsets theta*K vanish."""
    if c.phi is None:
        raise NotAField("theta is not prime in Z[w]")
    entries = [[c.phi_inv_scalar(v) for v in row] for row in mat]
    # Type I entries are element indexes of F_{p^2}; the alphabet size is
    # c.q either way, but mod-q integer arithmetic is only meaningful for
    # the prime (Type II) case
    return MatrixFq(c.q, entries)


def eis_matrix_to_complex(mat) -> np.ndarray:
    return np.array([[v.to_complex() for v in row] for row in mat])


def eis_det_exact(mat) -> EisensteinInt:
    """Exact determinant of a square Eisenstein-integer matrix (size <= 8);
    cofactor expansion for small sizes, fraction-free elimination above."""
    rows = [list(r) for r in mat]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise NotSquare("matrix is not square")
    if n == 0:
        return EIS_ONE
    if n > 8:
        raise NotSquare("exact determinant supported up to size 8")
    if n <= 4:
        return _det_cofactor(rows)
    return _det_bareiss(rows)


def _det_cofactor(rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    acc = EIS_ZERO
    for j in range(n):
        if rows[0][j].is_zero():
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * _det_cofactor(minor)
        acc = acc + term if j % 2 == 0 else acc - term
    return acc


def _det_bareiss(rows):
    n = len(rows)
    m = [row[:] for row in rows]
    sign = 1
    prev = EIS_ONE
    for k in range(n - 1):
        if m[k][k].is_zero():
            for i in range(k + 1, n):
                if not m[i][k].is_zero():
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return EIS_ZERO
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = eis_exact_div(num, prev)
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return det if sign == 1 else -det


# ---------------------------------------------------------------------------
# Gaussian-integer mirror (square lattice), just enough for the ML
# comparison arm: quantizer, modulo, prime constellation with phi.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaussianInt:
    a: int
    b: int

    def __add__(self, other):
        return GaussianInt(self.a + other.a, self.b + other.b)

    def __sub__(self, other):
        return GaussianInt(self.a - other.a, self.b - other.b)

    def __neg__(self):
        return GaussianInt(-self.a, -self.b)

    def __mul__(self, other):
        a1, b1, a2, b2 = self.a, self.b, other.a, other.b
        return GaussianInt(a1 * a2 - b1 * b2, a1 * b2 + a2 * b1)

    def norm(self) -> int:
        return self.a * self.a + self.b * self.b

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def to_complex(self) -> complex:
        return complex(self.a, self.b)

    def __repr__(self):
        return f"G({self.a},{self.b})"


GAUSS_ZERO = GaussianInt(0, 0)


def gauss_mod_exact(z: GaussianInt, theta: GaussianInt) -> GaussianInt:
    if theta.is_zero():
        raise ZeroTheta("theta must be nonzero")
    w = z.to_complex() / theta.to_complex()
    a0, b0 = round(w.real), round(w.imag)
    best_r, best_key = None, None
    for da in (-1, 0, 1):
        for db in (-1, 0, 1):
            y = theta * GaussianInt(a0 + da, b0 + db)
            r = z - y
            key = (r.norm(), math.atan2(r.b, r.a) % (2.0 * math.pi))
            if best_key is None or key < best_key:
                best_key, best_r = key, r
    return best_r


class GaussianConstellation:
    """Residues of Z[j] modulo a Gaussian prime of prime norm; minimal
    interface (points, phi, energy) for the modulation comparison."""

    def __init__(self, theta: GaussianInt):
        if theta.is_zero():
            raise ZeroTheta("theta must be nonzero")
        self.theta = theta
        self.q = theta.norm()
        if not is_prime(self.q):
            raise NotAField("Gaussian constellation needs a prime-norm theta")
        radius = math.isqrt(self.q) + 2
        pts = [
            p
            for a in range(-2 * radius, 2 * radius + 1)
            for b in range(-2 * radius, 2 * radius + 1)
            if (p := GaussianInt(a, b)).norm() <= 4 * self.q
            and gauss_mod_exact(p, theta) == p
        ]
        if len(pts) != self.q:
            raise LatticeError(
                f"enumeration found {len(pts)} residues, expected {self.q}"
            )
        self.points = tuple(
            sorted(pts, key=lambda p: (p.norm(), math.atan2(p.b, p.a) % (2 * math.pi)))
        )
        self.energy = sum(p.norm() for p in self.points) / len(self.points)
        self.prime_type = TYPE_II
        phi = [gauss_mod_exact(GaussianInt(x, 0), theta) for x in range(self.q)]
        if len(set((p.a, p.b) for p in phi)) != self.q:
            raise LatticeError("integer residues do not cover the constellation")
        self.phi = tuple(phi)
        self.phi_complex = np.array([p.to_complex() for p in phi])
        self._phi_inv = {(p.a, p.b): i for i, p in enumerate(phi)}

    def phi_scalar(self, x: int) -> GaussianInt:
        return self.phi[x % self.q]

    def phi_inv_scalar(self, z: GaussianInt) -> int:
        r = gauss_mod_exact(z, self.theta)
        return self._phi_inv[(r.a, r.b)]

    def __repr__(self):
        return f"GaussianConstellation(theta={self.theta}, q={self.q})"
