"""
Exact arithmetic over Z_p and the symplectic geometry of 2-dimensional
subspaces of V = Z_p^4.

Values are immutable; every binary operation checks that both operands share
one modulus.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .errors import (
    DependentVectors,
    ModulusMismatch,
    NoNonresidue,
    NotCanonical,
    NotPrime,
    SingularMatrix,
    ZeroInverse,
)

# --- CONFIGURATION ---
MAX_MODULUS = 1 << 16


@lru_cache(maxsize=1024)
def is_prime(n):
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


def check_modulus(p):
    if isinstance(p, bool) or not isinstance(p, int):
        raise NotPrime(f"Modulus must be an int, got {type(p).__name__}")
    if not (2 <= p < MAX_MODULUS) or not is_prime(p):
        raise NotPrime(f"Modulus {p} is not a prime below {MAX_MODULUS}")
    return p


def _same_modulus(a, b):
    if a != b:
        raise ModulusMismatch(f"Operands live mod {a} and mod {b}")
    return a


@dataclass(frozen=True)
class ResidueScalar:
    value: int
    modulus: int

    def __post_init__(self):
        check_modulus(self.modulus)
        object.__setattr__(self, "value", int(self.value) % self.modulus)

    def _coerce(self, other):
        if isinstance(other, ResidueScalar):
            _same_modulus(self.modulus, other.modulus)
            return other.value
        if isinstance(other, int) and not isinstance(other, bool):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ResidueScalar(self.value + o, self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ResidueScalar(self.value - o, self.modulus)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ResidueScalar(o - self.value, self.modulus)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ResidueScalar(self.value * o, self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return ResidueScalar(-self.value, self.modulus)

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.value} (mod {self.modulus})"


def mod_inv(a: ResidueScalar) -> ResidueScalar:
    if a.value == 0:
        raise ZeroInverse(f"0 has no inverse mod {a.modulus}")
    return ResidueScalar(pow(a.value, -1, a.modulus), a.modulus)


def is_quadratic_residue(a: ResidueScalar) -> bool:
    """Euler's criterion; 0 counts as a square."""
    p = a.modulus
    if a.value == 0 or p == 2:
        return True
    return pow(a.value, (p - 1) // 2, p) == 1


def smallest_nonresidue(p) -> ResidueScalar:
    check_modulus(p)
    if p == 2:
        raise NoNonresidue("Every element of Z_2 is a square")
    squares = {(x * x) % p for x in range(p)}
    for candidate in range(2, p):
        if candidate not in squares:
            return ResidueScalar(candidate, p)
    raise NoNonresidue(f"No quadratic non-residue mod {p}")


def sqrt_mod(a: ResidueScalar):
    """
    Both square roots (q, p - q) with q the smaller representative, or None for
    a non-residue. Exhaustive search; p < 2^16 keeps this instant.
    """
    p = a.modulus
    for q in range(p // 2 + 1):
        if (q * q) % p == a.value:
            return ResidueScalar(q, p), ResidueScalar(-q, p)
    return None


# --- VECTORS OF V = Z_p^4 ---

@dataclass(frozen=True)
class Vec4:
    values: tuple
    modulus: int

    def __post_init__(self):
        check_modulus(self.modulus)
        values = tuple(int(x) % self.modulus for x in self.values)
        if len(values) != 4:
            raise ValueError(f"Vec4 needs 4 coordinates, got {len(values)}")
        object.__setattr__(self, "values", values)

    @property
    def coordinates(self):
        return tuple(ResidueScalar(v, self.modulus) for v in self.values)

    def __getitem__(self, item):
        return self.values[item]

    def __iter__(self):
        return iter(self.values)


def symplectic_form(u: Vec4, v: Vec4) -> ResidueScalar:
    """c(u, v) = u1 v2 - u2 v1 + u3 v4 - u4 v3."""
    p = _same_modulus(u.modulus, v.modulus)
    return ResidueScalar(_symplectic_raw(u.values, v.values), p)


def _symplectic_raw(u, v):
    return u[0] * v[1] - u[1] * v[0] + u[2] * v[3] - u[3] * v[2]


# --- LINEAR ALGEBRA MOD p ---

def row_reduce(rows, p):
    """
    Reduced row echelon form over Z_p. Returns the nonzero rows (leading entry 1,
    zeros above and below every pivot) and the pivot columns.
    """
    matrix = [[int(x) % p for x in row] for row in rows]
    if not matrix:
        return [], []
    n_cols = len(matrix[0])
    pivots = []
    r = 0
    for col in range(n_cols):
        pivot = next((i for i in range(r, len(matrix)) if matrix[i][col]), None)
        if pivot is None:
            continue
        matrix[r], matrix[pivot] = matrix[pivot], matrix[r]
        inv = pow(matrix[r][col], -1, p)
        matrix[r] = [(x * inv) % p for x in matrix[r]]
        for i in range(len(matrix)):
            if i != r and matrix[i][col]:
                factor = matrix[i][col]
                matrix[i] = [(a - factor * b) % p for a, b in zip(matrix[i], matrix[r])]
        pivots.append(col)
        r += 1
        if r == len(matrix):
            break
    return [tuple(row) for row in matrix[:r]], pivots


def rank_mod_p(rows, p):
    return len(row_reduce(rows, p)[1])


def nullspace_mod_p(rows, p, n_cols):
    """Basis of {x : rows . x = 0} over Z_p."""
    reduced, pivots = row_reduce(rows, p) if rows else ([], [])
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        x = [0] * n_cols
        x[f] = 1
        for row, pc in zip(reduced, pivots):
            x[pc] = (-row[f]) % p
        basis.append(tuple(x))
    return basis


# --- 2-DIMENSIONAL SUBSPACES ---

@dataclass(frozen=True)
class Subspace2:
    """A 2-dimensional subspace of Z_p^4 held by its canonical echelon basis."""
    basis: tuple
    modulus: int

    def __post_init__(self):
        check_modulus(self.modulus)
        rows = tuple(tuple(int(x) % self.modulus for x in row) for row in self.basis)
        if len(rows) != 2 or any(len(row) != 4 for row in rows):
            raise ValueError("Subspace2 needs a 2x4 basis")
        reduced, _ = row_reduce(rows, self.modulus)
        if len(reduced) != 2:
            raise DependentVectors(f"Basis rows {rows} are dependent mod {self.modulus}")
        if tuple(reduced) != rows:
            raise NotCanonical(f"Basis {rows} is not in reduced row echelon form (expected {tuple(reduced)})")
        object.__setattr__(self, "basis", rows)

    def vectors(self):
        return Vec4(self.basis[0], self.modulus), Vec4(self.basis[1], self.modulus)

    def points(self):
        """All p^2 points, the zero vector first."""
        p = self.modulus
        b1, b2 = self.basis
        return [tuple((k * x + l * y) % p for x, y in zip(b1, b2))
                for k in range(p) for l in range(p)]

    def contains(self, point):
        return rank_mod_p([*self.basis, tuple(point)], self.modulus) == 2

    def __repr__(self):
        return f"Sp{{{self.basis[0]}, {self.basis[1]}}} (mod {self.modulus})"


def subspace_from_basis(v1: Vec4, v2: Vec4) -> Subspace2:
    p = _same_modulus(v1.modulus, v2.modulus)
    return subspace_from_rows([v1.values, v2.values], p)


def subspace_from_rows(rows, p) -> Subspace2:
    reduced, _ = row_reduce(rows, p)
    if len(reduced) != 2:
        raise DependentVectors(f"Vectors {list(rows)} do not span a plane mod {p}")
    return Subspace2(tuple(reduced), p)


def intersect_trivially(S: Subspace2, T: Subspace2) -> bool:
    p = _same_modulus(S.modulus, T.modulus)
    return rank_mod_p([*S.basis, *T.basis], p) == 4


def symplectic_complement(S: Subspace2) -> Subspace2:
    """{x : c(s, x) = 0 for all s in S}; c(u, x) has coefficient vector (-u2, u1, -u4, u3)."""
    p = S.modulus
    forms = [(-u[1], u[0], -u[3], u[2]) for u in S.basis]
    return subspace_from_rows(nullspace_mod_p(forms, p, 4), p)


def enumerate_subspaces(p):
    """Every 2-dimensional subspace of Z_p^4. Exhaustive, meant for p <= 3."""
    check_modulus(p)
    found = set()
    vectors = [v for v in itertools.product(range(p), repeat=4) if any(v)]
    for i, v1 in enumerate(vectors):
        for v2 in vectors[i + 1:]:
            if rank_mod_p([v1, v2], p) == 2:
                found.add(subspace_from_rows([v1, v2], p))
    return sorted(found, key=lambda s: s.basis)


# --- GL2(p) ---

def _det2(e, p):
    a, b, c, d = e
    return (a * d - b * c) % p


@dataclass(frozen=True)
class Gl2Matrix:
    """Invertible 2x2 matrix over Z_p, entries row-major (a, b, c, d) = [[a, b], [c, d]]."""
    entries: tuple
    modulus: int

    def __post_init__(self):
        check_modulus(self.modulus)
        entries = tuple(int(x) % self.modulus for x in self.entries)
        if len(entries) != 4:
            raise ValueError("Gl2Matrix needs 4 entries")
        if _det2(entries, self.modulus) == 0:
            raise SingularMatrix(f"{entries} is singular mod {self.modulus}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_rows(cls, rows, p):
        (a, b), (c, d) = rows
        return cls((int(a), int(b), int(c), int(d)), p)

    @property
    def rows(self):
        a, b, c, d = self.entries
        return (a, b), (c, d)

    @property
    def det(self):
        return gl2_det(self)

    def trace(self):
        return gl2_trace(self)

    def is_identity(self):
        return self.entries == (1, 0, 0, 1)

    def scaled(self, k):
        k = int(k)
        return Gl2Matrix(tuple(k * x for x in self.entries), self.modulus)

    def __matmul__(self, other):
        return gl2_mul(self, other)

    def __repr__(self):
        return f"[[{self.entries[0]}, {self.entries[1]}], [{self.entries[2]}, {self.entries[3]}]] (mod {self.modulus})"


def gl2_identity(p) -> Gl2Matrix:
    return Gl2Matrix((1, 0, 0, 1), p)


def gl2_det(M: Gl2Matrix) -> ResidueScalar:
    return ResidueScalar(_det2(M.entries, M.modulus), M.modulus)


def gl2_trace(M: Gl2Matrix) -> ResidueScalar:
    return ResidueScalar(M.entries[0] + M.entries[3], M.modulus)


def _mul2(x, y, p):
    a, b, c, d = x
    e, f, g, h = y
    return ((a * e + b * g) % p, (a * f + b * h) % p, (c * e + d * g) % p, (c * f + d * h) % p)


def gl2_mul(A: Gl2Matrix, B: Gl2Matrix) -> Gl2Matrix:
    p = _same_modulus(A.modulus, B.modulus)
    return Gl2Matrix(_mul2(A.entries, B.entries, p), p)


def gl2_inv(M: Gl2Matrix) -> Gl2Matrix:
    p = M.modulus
    a, b, c, d = M.entries
    inv = pow(_det2(M.entries, p), -1, p)
    return Gl2Matrix((d * inv, -b * inv, -c * inv, a * inv), p)


def det_difference(A: Gl2Matrix, B: Gl2Matrix) -> ResidueScalar:
    """det(A - B); the difference itself may be singular, so it is never built as a Gl2Matrix."""
    p = _same_modulus(A.modulus, B.modulus)
    diff = tuple(x - y for x, y in zip(A.entries, B.entries))
    return ResidueScalar(_det2(diff, p), p)


def enumerate_gl2(p):
    check_modulus(p)
    return [Gl2Matrix(e, p) for e in itertools.product(range(p), repeat=4) if _det2(e, p)]


def enumerate_sl2(p):
    check_modulus(p)
    return [Gl2Matrix(e, p) for e in itertools.product(range(p), repeat=4) if _det2(e, p) == 1]
