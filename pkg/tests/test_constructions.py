import itertools

import pytest

from complementary_mubs import constructions
from complementary_mubs.constructions import (
    KNOWN_GENERATORS,
    Family,
    SubgroupSearchResult,
    ab_matrix_A,
    ab_matrix_B,
    b_family_masa_indices,
    build_ab_decomposition,
    build_galois_decomposition,
    custom_decomposition,
    decomposition_pair_failures,
    find_galois_subgroup,
    printed_recombination,
    product_factor_subspace,
    recombine_extension,
    subgroup_closure,
    union_points,
)
from complementary_mubs.errors import (
    InvalidSubgroup,
    NotNonresidue,
    NotOddPrime,
    SearchExhausted,
    WrongResidueClass,
    ZeroI,
    ZeroJ,
)
from complementary_mubs.residue import Gl2Matrix, ResidueScalar, det_difference, gl2_det, intersect_trivially, smallest_nonresidue
from complementary_mubs.subalgebra import SubalgebraKind, classify, commutant, element_order, has_order_p, phi


def r(value, p):
    return ResidueScalar(value, p)


# --- AB family ---

@pytest.mark.parametrize("p, factors", [(3, 2), (5, 6), (7, 6), (11, 10), (13, 14)])
def test_ab_factor_counts(ab, p, factors):
    decomposition = ab(p)
    assert decomposition.family is Family.AB
    assert len(decomposition.subalgebras) == p * p + 1
    assert decomposition.factor_count() == factors
    assert len(decomposition.masas()) == p * p + 1 - factors


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_ab_pairwise_complementary(ab, p):
    assert decomposition_pair_failures(ab(p).subalgebras) == []


def test_ab_kind_counts(ab):
    counts = ab(3).kind_counts()
    assert counts == {"masa": 8, "factor": 0, "product_factor_0": 1, "product_factor_1": 1}


def test_ab_matrices():
    D = r(2, 5)
    for i in range(5):
        for j in range(1, 5):
            assert gl2_det(ab_matrix_A(r(i, 5), r(j, 5), D)).value == 1
    B = ab_matrix_B(r(2, 5), D)
    assert B.entries == (2, 0, 0, (-4) % 5)
    assert gl2_det(B).value == (-2 * 4) % 5


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_a_matrices_are_pairwise_distinct(p):
    D = smallest_nonresidue(p)
    matrices = [ab_matrix_A(r(i, p), r(j, p), D) for i in range(p) for j in range(1, p)]
    assert len(set(matrices)) == p * (p - 1)
    for A, A2 in itertools.combinations(matrices, 2):
        assert det_difference(A, A2).value != 0


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_a_minus_b_determinant(p):
    D = smallest_nonresidue(p)
    for i, j, x in itertools.product(range(p), range(1, p), range(1, p)):
        value = det_difference(ab_matrix_A(r(i, p), r(j, p), D), ab_matrix_B(r(x, p), D))
        assert value == 1 - D * x * x
        assert value.value != 0


def test_ab_matrix_errors():
    with pytest.raises(ZeroJ):
        ab_matrix_A(r(1, 5), r(0, 5), r(2, 5))
    with pytest.raises(NotNonresidue):
        ab_matrix_A(r(1, 5), r(1, 5), r(4, 5))
    with pytest.raises(ZeroI):
        ab_matrix_B(r(0, 5), r(2, 5))
    with pytest.raises(NotOddPrime):
        build_ab_decomposition(2)
    with pytest.raises(NotNonresidue):
        build_ab_decomposition(7, D=2)


def test_explicit_nonresidue():
    decomposition = build_ab_decomposition(7, D=5)
    assert decomposition.nonresidue == r(5, 7)
    assert decomposition.factor_count() == 6


def test_b_family_masas():
    assert b_family_masa_indices(3, 2) == [1, 2]
    assert b_family_masa_indices(5, 2) == []


def test_b_commutant_stays_in_the_family():
    p, D = 7, r(3, 7)
    members = {ab_matrix_B(r(i, p), D) for i in range(1, p)}
    for B in members:
        assert commutant(B) in members


# --- Recombination for p = 1 (mod 4) ---

@pytest.mark.parametrize("p", [5, 13])
def test_recombination_covers_the_replaced_points(ab, p):
    D = ab(p).nonresidue
    subspaces = recombine_extension(p, D)
    assert len(subspaces) == p + 1
    assert all(classify(S) is SubalgebraKind.MASA for S in subspaces)
    for S, T in itertools.combinations(subspaces, 2):
        assert intersect_trivially(S, T)

    replaced = [product_factor_subspace(p, 0), product_factor_subspace(p, 1)]
    replaced += [phi(ab_matrix_B(r(i, p), D)) for i in range(1, p)]
    assert union_points(subspaces) == union_points(replaced)
    assert len(union_points(subspaces)) == (p + 1) * (p * p - 1)


def test_recombination_with_a_family_has_no_factors(ab):
    p = 5
    a_family = [s.subspace for s in ab(p).subalgebras
                if s.gl2_rep is not None and s.gl2_rep.entries[1] != 0]
    assert len(a_family) == p * (p - 1)
    decomposition = custom_decomposition(p, recombine_extension(p) + a_family)
    assert decomposition.factor_count() == 0
    assert decomposition_pair_failures(decomposition.subalgebras) == []


def test_printed_recombination_misses_points():
    p = 5
    replaced = [product_factor_subspace(p, 0), product_factor_subspace(p, 1)]
    replaced += [phi(ab_matrix_B(r(i, p), r(2, p))) for i in range(1, p)]
    printed = union_points(printed_recombination(p))
    assert printed != union_points(replaced)
    assert (0, 1, 1, 0) in union_points(replaced)
    assert (0, 1, 1, 0) not in printed


def test_recombination_needs_p_1_mod_4():
    with pytest.raises(WrongResidueClass):
        recombine_extension(7)


# --- Galois family ---

@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_galois_subgroup(p):
    result = find_galois_subgroup(p)
    assert result.order == p * p - 1
    assert len(set(result.elements)) == p * p - 1
    assert not any(has_order_p(M) for M in result.elements if not M.is_identity())
    assert set(subgroup_closure(result.generators)) == set(result.elements)


@pytest.mark.slow
def test_galois_subgroup_p11():
    result = find_galois_subgroup(11)
    assert result.order == 120


def test_p3_subgroup_is_quaternionic():
    result = find_galois_subgroup(3)
    assert result.attempts == 0
    orders = sorted(element_order(M) for M in result.elements)
    assert orders == [1, 2, 4, 4, 4, 4, 4, 4]


def test_p2_printed_hint_is_rejected():
    result = find_galois_subgroup(2)
    assert any("rejected" in note for note in result.notes)
    assert len(subgroup_closure([Gl2Matrix.from_rows(rows, 2) for rows in KNOWN_GENERATORS[2]])) == 6
    assert result.order == 3


def test_explicit_hint_is_used():
    hint = [Gl2Matrix.from_rows(rows, 3) for rows in KNOWN_GENERATORS[3]]
    result = find_galois_subgroup(3, hint_generators=hint)
    assert result.attempts == 0
    assert result.generators == hint


def test_search_exhausts_for_p13():
    with pytest.raises(SearchExhausted) as info:
        find_galois_subgroup(13, attempt_budget=200)
    assert info.value.p == 13
    assert info.value.attempts == 200


def test_search_is_deterministic_across_workers():
    constructions._SUBGROUP_CACHE.clear()
    first = find_galois_subgroup(5, seed=7, workers=3)
    constructions._SUBGROUP_CACHE.clear()
    second = find_galois_subgroup(5, seed=7, workers=3)
    assert first.generators == second.generators
    assert first.attempts == second.attempts
    assert first.order == 24


def test_galois_decomposition(galois):
    decomposition = galois(3)
    assert decomposition.family is Family.GALOIS
    assert len(decomposition.subalgebras) == 10
    assert decomposition.factor_count() == 2
    assert decomposition_pair_failures(decomposition.subalgebras) == []


def test_galois_decomposition_rejects_bad_subgroups():
    good = find_galois_subgroup(3)
    truncated = SubgroupSearchResult(3, good.generators, good.elements[:-1], 7, 0, 0)
    with pytest.raises(InvalidSubgroup):
        build_galois_decomposition(3, truncated)
    with pytest.raises(InvalidSubgroup):
        build_galois_decomposition(5, good)


def test_custom_decomposition_recomputes_kinds():
    S = phi(Gl2Matrix((1, 2, 3, 4), 5))
    decomposition = custom_decomposition(5, [S])
    assert decomposition.subalgebras[0].kind is SubalgebraKind.FACTOR
