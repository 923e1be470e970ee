import itertools

import numpy as np
import pytest

from complementary_mubs.errors import NotInS, NotSL2
from complementary_mubs.residue import (
    Gl2Matrix,
    enumerate_gl2,
    enumerate_sl2,
    gl2_det,
    gl2_identity,
    gl2_inv,
    intersect_trivially,
    mod_inv,
    subspace_from_rows,
    symplectic_complement,
)
from complementary_mubs.subalgebra import (
    SubalgebraDesc,
    SubalgebraKind,
    classify,
    commutant,
    commutant_subspace,
    describe,
    describe_matrix,
    element_order,
    has_order_p,
    is_in_s,
    phi,
    phi_inverse,
    product_factor_subspace,
    sl2_pair_complementary,
)
from complementary_mubs.weyl import basis_stack


def test_phi_of_identity_is_a_masa():
    S = phi(gl2_identity(3))
    assert S.basis == ((1, 0, 0, 1), (0, 1, 1, 0))
    assert classify(S) is SubalgebraKind.MASA


@pytest.mark.parametrize("p", [2, 3])
def test_phi_round_trip(p):
    for M in enumerate_gl2(p):
        S = phi(M)
        assert is_in_s(S)
        assert phi_inverse(S) == M


@pytest.mark.parametrize("p", [2, 3, 5])
def test_masa_exactly_when_determinant_is_one(p):
    for M in enumerate_gl2(p):
        expected = SubalgebraKind.MASA if gl2_det(M).value == 1 else SubalgebraKind.FACTOR
        assert classify(phi(M)) is expected


def test_product_factors():
    assert classify(product_factor_subspace(5, 0)) is SubalgebraKind.PRODUCT_FACTOR_0
    assert classify(product_factor_subspace(5, 1)) is SubalgebraKind.PRODUCT_FACTOR_1
    assert SubalgebraKind.PRODUCT_FACTOR_0.is_factor
    assert not SubalgebraKind.MASA.is_factor
    with pytest.raises(ValueError):
        product_factor_subspace(5, 2)


def test_outside_s():
    S = subspace_from_rows([(1, 0, 0, 0), (0, 0, 1, 0)], 3)
    assert not is_in_s(S)
    assert classify(S) is SubalgebraKind.MASA
    with pytest.raises(NotInS):
        phi_inverse(S)
    assert describe(S).gl2_rep is None


@pytest.mark.parametrize("p", [2, 3])
def test_commutant_is_the_symplectic_complement(p):
    for M in enumerate_gl2(p):
        C = commutant(M)
        assert commutant(C) == M
        assert (gl2_det(C) * gl2_det(M)).value == 1
        assert phi(C) == symplectic_complement(phi(M))
        assert commutant_subspace(phi(M)) == phi(C)


@pytest.mark.parametrize("p", [2, 3])
def test_commutant_operators_commute(p):
    for M in enumerate_gl2(p):
        A = basis_stack(phi(M))
        B = basis_stack(phi(commutant(M)))
        forward = np.einsum("aij,bjk->abik", A, B)
        backward = np.einsum("bij,ajk->abik", B, A)
        np.testing.assert_allclose(forward, backward, atol=1e-10)


def test_commutant_of_masa_is_itself():
    M = Gl2Matrix((2, 1, 1, 1), 5)
    assert gl2_det(M).value == 1
    assert commutant(M) == M


def test_commutant_of_product_factors():
    assert commutant_subspace(product_factor_subspace(3, 0)) == product_factor_subspace(3, 1)
    assert commutant_subspace(product_factor_subspace(3, 1)) == product_factor_subspace(3, 0)


def test_commutant_worked_example():
    # [[1, 2], [3, 4]] mod 5 has determinant 3, inverse 2.
    M = Gl2Matrix((1, 2, 3, 4), 5)
    assert mod_inv(gl2_det(M)).value == 2
    assert commutant(M) == Gl2Matrix((2, 4, 1, 3), 5)


@pytest.mark.parametrize("p", [3, 5])
def test_factor_and_its_commutant_are_complementary(p):
    for M in enumerate_gl2(p):
        if gl2_det(M).value != 1:
            assert intersect_trivially(phi(M), phi(commutant(M)))


@pytest.mark.parametrize("p", [2, 3])
def test_sl2_complementarity_equivalences(p):
    group = enumerate_sl2(p)
    for A, B in itertools.combinations(group, 2):
        disjoint = intersect_trivially(phi(A), phi(B))
        assert sl2_pair_complementary(A, B) == disjoint
        assert has_order_p(gl2_inv(A) @ B) == (not disjoint)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_has_order_p_matches_explicit_order(p):
    for M in enumerate_sl2(p):
        assert has_order_p(M) == (element_order(M) == p)


def test_order_p_needs_sl2():
    with pytest.raises(NotSL2):
        has_order_p(Gl2Matrix((2, 0, 0, 1), 5))
    with pytest.raises(NotSL2):
        sl2_pair_complementary(Gl2Matrix((2, 0, 0, 1), 5), gl2_identity(5))


def test_element_order():
    assert element_order(gl2_identity(7)) == 1
    assert element_order(Gl2Matrix((1, 1, 0, 1), 7)) == 7
    assert element_order(Gl2Matrix((0, 1, 6, 0), 7)) == 4


def test_descriptor_problems():
    M = Gl2Matrix((1, 2, 3, 4), 5)
    good = describe_matrix(M)
    assert good.kind is SubalgebraKind.FACTOR
    assert good.problems() == []

    mislabeled = SubalgebraDesc(SubalgebraKind.MASA, good.subspace, M)
    assert mislabeled.problems() == ["tagged masa but classifies as factor"]

    wrong_rep = SubalgebraDesc(SubalgebraKind.FACTOR, good.subspace, gl2_identity(5))
    assert len(wrong_rep.problems()) == 1
