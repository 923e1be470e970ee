"""
Dictionary between GL2(p) matrices, 2-dimensional subspaces of Z_p^4 and the
subalgebras of M_p (x) M_p they label.

A subspace U labels pi(U) = Alg{X^u1 Z^u2 (x) X^u3 Z^u4 : u in U}. The matrix
M = [[x1, y1], [x2, y2]] labels phi(M) = Sp{(0, 1, x1, x2), (1, 0, y1, y2)}.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .errors import NotInS, NotSL2
from .residue import (
    Gl2Matrix,
    Subspace2,
    _det2,
    _mul2,
    check_modulus,
    det_difference,
    gl2_det,
    intersect_trivially,
    mod_inv,
    subspace_from_rows,
    symplectic_complement,
    symplectic_form,
)


class SubalgebraKind(str, Enum):
    MASA = "masa"
    FACTOR = "factor"
    PRODUCT_FACTOR_0 = "product_factor_0"
    PRODUCT_FACTOR_1 = "product_factor_1"

    @property
    def is_factor(self):
        return self is not SubalgebraKind.MASA


def product_factor_subspace(p, which):
    """F0 = Sp{e1, e2} labels M_p (x) CI, F1 = Sp{e3, e4} labels CI (x) M_p."""
    check_modulus(p)
    if which == 0:
        return Subspace2(((1, 0, 0, 0), (0, 1, 0, 0)), p)
    if which == 1:
        return Subspace2(((0, 0, 1, 0), (0, 0, 0, 1)), p)
    raise ValueError(f"Product factor index must be 0 or 1, got {which}")


@dataclass(frozen=True)
class SubalgebraDesc:
    kind: SubalgebraKind
    subspace: Subspace2
    gl2_rep: Optional[Gl2Matrix] = None

    @property
    def p(self):
        return self.subspace.modulus

    def problems(self):
        """Inconsistencies between the stored tags and what the subspace says."""
        issues = []
        actual = classify(self.subspace)
        if actual is not self.kind:
            issues.append(f"tagged {self.kind.value} but classifies as {actual.value}")
        if self.gl2_rep is not None and phi(self.gl2_rep) != self.subspace:
            issues.append(f"GL2 representative {self.gl2_rep!r} does not map to {self.subspace!r}")
        return issues


def describe(S: Subspace2) -> SubalgebraDesc:
    return SubalgebraDesc(classify(S), S, phi_inverse(S) if is_in_s(S) else None)


def describe_matrix(M: Gl2Matrix) -> SubalgebraDesc:
    S = phi(M)
    return SubalgebraDesc(classify(S), S, M)


def phi(M: Gl2Matrix) -> Subspace2:
    a, b, c, d = M.entries
    return subspace_from_rows([(0, 1, a, c), (1, 0, b, d)], M.modulus)


def is_in_s(S: Subspace2) -> bool:
    p = S.modulus
    return (intersect_trivially(S, product_factor_subspace(p, 0))
            and intersect_trivially(S, product_factor_subspace(p, 1)))


def phi_inverse(S: Subspace2) -> Gl2Matrix:
    if not is_in_s(S):
        raise NotInS(f"{S!r} meets M_p (x) CI or CI (x) M_p nontrivially")
    # Canonical form inside S is (1, 0, y1, y2), (0, 1, x1, x2).
    (_, _, y1, y2), (_, _, x1, x2) = S.basis
    return Gl2Matrix((x1, y1, x2, y2), S.modulus)


def classify(S: Subspace2) -> SubalgebraKind:
    p = S.modulus
    if S == product_factor_subspace(p, 0):
        return SubalgebraKind.PRODUCT_FACTOR_0
    if S == product_factor_subspace(p, 1):
        return SubalgebraKind.PRODUCT_FACTOR_1
    u, v = S.vectors()
    # c is bilinear and antisymmetric, so the two basis vectors decide it.
    if symplectic_form(u, v).value == 0:
        return SubalgebraKind.MASA
    return SubalgebraKind.FACTOR


def commutant(M: Gl2Matrix) -> Gl2Matrix:
    """pi(M)' = pi(M / det M); the result has determinant 1 / det M."""
    return M.scaled(mod_inv(gl2_det(M)).value)


def commutant_subspace(S: Subspace2) -> Subspace2:
    p = S.modulus
    f0, f1 = product_factor_subspace(p, 0), product_factor_subspace(p, 1)
    if S == f0:
        return f1
    if S == f1:
        return f0
    if is_in_s(S):
        return phi(commutant(phi_inverse(S)))
    return symplectic_complement(S)


def _require_sl2(*matrices):
    for M in matrices:
        if gl2_det(M).value != 1:
            raise NotSL2(f"{M!r} has determinant {gl2_det(M).value}, expected 1")


def sl2_pair_complementary(A: Gl2Matrix, B: Gl2Matrix) -> bool:
    _require_sl2(A, B)
    return det_difference(A, B).value != 0


def _has_order_p_raw(e, p):
    a, b, c, d = e
    if e == (1, 0, 0, 1):
        return False
    return _det2((a - 1, b, c, d - 1), p) == 0


def has_order_p(M: Gl2Matrix) -> bool:
    _require_sl2(M)
    return _has_order_p_raw(M.entries, M.modulus)


def element_order(M: Gl2Matrix) -> int:
    """Order by explicit repeated multiplication, bounded by |GL2(p)|."""
    p = M.modulus
    bound = (p * p - 1) * (p * p - p)
    current = M.entries
    for k in range(1, bound + 1):
        if current == (1, 0, 0, 1):
            return k
        current = _mul2(current, M.entries, p)
    raise ArithmeticError(f"{M!r} has no finite order below {bound}")
