"""
The two families of complementary decompositions of M_p (x) M_p:

* Galois: the product factors plus phi(H) for a subgroup H <= SL2(p) of order
  p^2 - 1 without elements of order p (exists for p = 2, 3, 5, 7, 11).
* AB: the product factors plus phi(A_{i,j}) and phi(B_i) built from a
  quadratic non-residue D; p - 1 factors for p = 3 (mod 4), p + 1 otherwise.
"""
from __future__ import annotations

import concurrent.futures
import itertools
import logging
import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np

from .errors import (
    InvalidDecomposition,
    InvalidSubgroup,
    NotNonresidue,
    NotOddPrime,
    SearchExhausted,
    WrongResidueClass,
    ZeroI,
    ZeroJ,
)
from .residue import (
    Gl2Matrix,
    ResidueScalar,
    Subspace2,
    _det2,
    _mul2,
    check_modulus,
    intersect_trivially,
    is_quadratic_residue,
    mod_inv,
    smallest_nonresidue,
    subspace_from_rows,
)
from .subalgebra import (
    SubalgebraDesc,
    SubalgebraKind,
    _has_order_p_raw,
    classify,
    describe,
    describe_matrix,
    product_factor_subspace,
    sl2_pair_complementary,
)
from .utils import PerformanceTimer, derive_seeds

logger = logging.getLogger(__name__)

# --- CONFIGURATION ---
DEFAULT_ATTEMPT_BUDGET = 10 ** 6

# Generator sets printed in the literature. They are hints only: every set is
# revalidated by closure before use (the p = 2 set generates all of SL2(2)).
KNOWN_GENERATORS = {
    2: (((1, 1), (0, 1)), ((1, 0), (1, 1))),
    3: (((0, 1), (2, 0)), ((2, 2), (2, 1))),
}

_SUBGROUP_CACHE = {}
_CACHE_LOCK = threading.Lock()


class Family(str, Enum):
    GALOIS = "galois"
    AB = "ab"
    CUSTOM = "custom"


@dataclass
class Decomposition:
    p: int
    family: Family
    subalgebras: List[SubalgebraDesc]
    nonresidue: Optional[ResidueScalar] = None
    generators: Optional[List[Gl2Matrix]] = None
    notes: List[str] = field(default_factory=list, compare=False)

    def factor_count(self):
        return sum(1 for s in self.subalgebras if classify(s.subspace).is_factor)

    def masas(self):
        return [s for s in self.subalgebras if classify(s.subspace) is SubalgebraKind.MASA]

    def kind_counts(self):
        counts = {kind.value: 0 for kind in SubalgebraKind}
        for s in self.subalgebras:
            counts[classify(s.subspace).value] += 1
        return counts


@dataclass
class SubgroupSearchResult:
    p: int
    generators: List[Gl2Matrix]
    elements: List[Gl2Matrix]
    order: int
    attempts: int
    seed: int
    notes: List[str] = field(default_factory=list)


def product_factors(p):
    return [
        SubalgebraDesc(SubalgebraKind.PRODUCT_FACTOR_0, product_factor_subspace(p, 0)),
        SubalgebraDesc(SubalgebraKind.PRODUCT_FACTOR_1, product_factor_subspace(p, 1)),
    ]


def decomposition_pair_failures(subalgebras, limit=None):
    """Index pairs whose subspaces intersect nontrivially."""
    failures = []
    for (i, s), (j, t) in itertools.combinations(enumerate(subalgebras), 2):
        if s.subspace.modulus != t.subspace.modulus or not intersect_trivially(s.subspace, t.subspace):
            failures.append((i, j))
            if limit is not None and len(failures) >= limit:
                break
    return failures


# --- AB FAMILY ---

def _require_odd_prime(p):
    check_modulus(p)
    if p == 2:
        raise NotOddPrime("The AB family needs an odd prime")


def _require_nonresidue(D: ResidueScalar):
    if is_quadratic_residue(D):
        raise NotNonresidue(f"D = {D.value} is a square mod {D.modulus}")


def ab_matrix_A(i: ResidueScalar, j: ResidueScalar, D: ResidueScalar) -> Gl2Matrix:
    """A_{i,j} = [[i, -j], [j^-1 (1 - D i^2), D i]]; determinant 1 for every i and j != 0."""
    _require_nonresidue(D)
    if j.value == 0:
        raise ZeroJ("A_{i,j} needs j != 0")
    lower_left = mod_inv(j) * (1 - D * i * i)
    return Gl2Matrix((i.value, (-j).value, lower_left.value, (D * i).value), D.modulus)


def ab_matrix_B(i: ResidueScalar, D: ResidueScalar) -> Gl2Matrix:
    """B_i = diag(i, -i D); determinant -D i^2."""
    if i.value == 0:
        raise ZeroI("B_i needs i != 0")
    return Gl2Matrix((i.value, 0, 0, (-(i * D)).value), D.modulus)


def _resolve_nonresidue(p, D):
    if D is None:
        return smallest_nonresidue(p)
    if not isinstance(D, ResidueScalar):
        D = ResidueScalar(int(D), p)
    if D.modulus != p:
        raise NotNonresidue(f"D lives mod {D.modulus}, expected mod {p}")
    _require_nonresidue(D)
    return D


def build_ab_decomposition(p, D=None) -> Decomposition:
    _require_odd_prime(p)
    D = _resolve_nonresidue(p, D)

    with PerformanceTimer(f"Build AB decomposition (p={p})", logger):
        subalgebras = product_factors(p)
        for i in range(p):
            for j in range(1, p):
                A = ab_matrix_A(ResidueScalar(i, p), ResidueScalar(j, p), D)
                subalgebras.append(describe_matrix(A))
        for i in range(1, p):
            subalgebras.append(describe_matrix(ab_matrix_B(ResidueScalar(i, p), D)))

    decomposition = Decomposition(p, Family.AB, subalgebras, nonresidue=D)
    logger.info(f"AB decomposition p={p} D={D.value}: {len(subalgebras)} subalgebras, "
                f"{decomposition.factor_count()} factors")
    return decomposition


def b_family_masa_indices(p, D):
    """Indices i with det B_i = -D i^2 = 1, i.e. i^2 = -D^-1."""
    D = _resolve_nonresidue(p, D)
    target = (-mod_inv(D)).value
    return [i for i in range(1, p) if (i * i) % p == target]


# --- p = 1 (mod 4) RECOMBINATION ---

def recombine_extension(p, D=None) -> List[Subspace2]:
    """
    p + 1 pairwise complementary MASA subspaces covering exactly the points of
    F0, F1 and every phi(B_i); together with the phi(A_{i,j}) they form a
    decomposition without factors, so the A-family MUBs extend.
    """
    check_modulus(p)
    if p % 4 != 1:
        raise WrongResidueClass(f"Recombination needs p = 1 (mod 4), got p = {p}")
    D = _resolve_nonresidue(p, D)

    subspaces = [
        subspace_from_rows([(1, 0, 0, 0), (0, 0, 0, 1)], p),
        subspace_from_rows([(0, 1, 0, 0), (0, 0, 1, 0)], p),
    ]
    for i in range(1, p):
        slope = (-(D * mod_inv(ResidueScalar(i, p)))).value
        subspaces.append(subspace_from_rows([(1, i, 0, 0), (0, 0, 1, slope)], p))

    replaced = [product_factor_subspace(p, 0), product_factor_subspace(p, 1)]
    replaced += [describe_matrix(ab_matrix_B(ResidueScalar(i, p), D)).subspace for i in range(1, p)]
    if union_points(subspaces) != union_points(replaced):
        raise InvalidDecomposition(f"Recombined subspaces do not cover the product and B-family points (p={p})")
    return subspaces


def printed_recombination(p, D=None) -> List[Subspace2]:
    """
    The recombination as printed: Sp{(1,0,0,0),(0,0,1,0)}, Sp{(0,1,0,0),(0,0,0,1)},
    Sp{(1,i,0,0),(0,0,1,-iD)}. Kept to report that its union differs from the
    product and B-family points; recombine_extension is the corrected set.
    """
    check_modulus(p)
    D = _resolve_nonresidue(p, D)
    subspaces = [
        subspace_from_rows([(1, 0, 0, 0), (0, 0, 1, 0)], p),
        subspace_from_rows([(0, 1, 0, 0), (0, 0, 0, 1)], p),
    ]
    for i in range(1, p):
        subspaces.append(subspace_from_rows([(1, i, 0, 0), (0, 0, 1, (-i * D.value) % p)], p))
    return subspaces


def union_points(subspaces):
    points = set()
    for S in subspaces:
        points.update(pt for pt in S.points() if any(pt))
    return points


# --- GALOIS FAMILY ---

_IDENTITY = (1, 0, 0, 1)


def subgroup_closure(generators) -> List[Gl2Matrix]:
    """Breadth-first closure under right multiplication, identity first."""
    if not generators:
        raise ValueError("subgroup_closure needs at least one generator")
    p = generators[0].modulus
    gens = [g.entries for g in generators]
    elements = _bounded_closure(gens, p, limit=p * (p * p - 1), reject_order_p=False)
    return [Gl2Matrix(e, p) for e in elements]


def _bounded_closure(gens, p, limit, reject_order_p=True):
    """
    Closure as an insertion-ordered dict, or None once it grows past `limit`
    or (with reject_order_p) reaches an element of order p.
    """
    seen = {_IDENTITY: None}
    frontier = [_IDENTITY]
    while frontier:
        next_frontier = []
        for g in frontier:
            for h in gens:
                m = _mul2(g, h, p)
                if m in seen:
                    continue
                if reject_order_p and _has_order_p_raw(m, p):
                    return None
                seen[m] = None
                if len(seen) > limit:
                    return None
                next_frontier.append(m)
        frontier = next_frontier
    return list(seen)


def _random_sl2(rng, p):
    while True:
        a, b, c = (int(x) for x in rng.integers(0, p, size=3))
        if a:
            d = ((1 + b * c) * pow(a, -1, p)) % p
        elif (b * c) % p == p - 1:
            d = int(rng.integers(0, p))
        else:
            continue
        return a, b, c, d


def _random_candidate(rng, p):
    while True:
        e = _random_sl2(rng, p)
        if e != _IDENTITY and not _has_order_p_raw(e, p):
            return e


def _check_hint(rows_list, p):
    """Closure of a hinted generator set, or a reason for rejecting it."""
    try:
        gens = [Gl2Matrix.from_rows(rows, p) for rows in rows_list]
    except ValueError as e:
        return None, f"hint generators invalid: {e}"
    if any(_det2(g.entries, p) != 1 for g in gens):
        return None, "hint generators are not all in SL2"
    elements = _bounded_closure([g.entries for g in gens], p, limit=p * (p * p - 1), reject_order_p=False)
    order_p = [e for e in elements if _has_order_p_raw(e, p)]
    if len(elements) != p * p - 1 or order_p:
        return None, (f"hint generators {[g.rows for g in gens]} rejected: closure has order {len(elements)} "
                      f"and {len(order_p)} elements of order {p}")
    return (gens, elements), f"hint generators {[g.rows for g in gens]} accepted: closure has order {len(elements)}"


def _search_stream(p, seed, budget, stop_event=None):
    """One seeded stream of random generator pairs. Returns (generators, elements, attempts)."""
    rng = np.random.default_rng(seed)
    target = p * p - 1
    for attempt in range(1, budget + 1):
        if stop_event is not None and stop_event.is_set():
            return None, None, attempt - 1
        g = _random_candidate(rng, p)
        h = _random_candidate(rng, p)
        elements = _bounded_closure([g, h], p, limit=target)
        if elements is not None and len(elements) == target:
            return [g, h], elements, attempt
    return None, None, budget


def find_galois_subgroup(p, seed=0, hint_generators=None, attempt_budget=DEFAULT_ATTEMPT_BUDGET,
                         workers=1) -> SubgroupSearchResult:
    """
    Subgroup of SL2(p) of order p^2 - 1 with no element of order p. Hints are
    tried first (explicit ones, else the printed sets); then `workers` seeded
    streams share the attempt budget and the lowest-index successful stream wins.
    """
    check_modulus(p)
    cache_key = (p, int(seed), int(attempt_budget), int(workers))
    if hint_generators is None:
        with _CACHE_LOCK:
            cached = _SUBGROUP_CACHE.get(cache_key)
        if cached is not None:
            return cached

    notes = []
    hints = []
    if hint_generators is not None:
        hints.append([g.rows if isinstance(g, Gl2Matrix) else g for g in hint_generators])
    elif p in KNOWN_GENERATORS:
        hints.append(list(KNOWN_GENERATORS[p]))

    with PerformanceTimer(f"Galois subgroup search (p={p})", logger):
        for rows_list in hints:
            found, message = _check_hint(rows_list, p)
            notes.append(message)
            logger.info(message)
            if found is not None:
                gens, elements = found
                return _finish(cache_key, hint_generators, SubgroupSearchResult(
                    p, gens, [Gl2Matrix(e, p) for e in elements], len(elements), 0, int(seed), notes))

        result = _random_search(p, int(seed), int(attempt_budget), max(1, int(workers)))

    if result is None:
        logger.warning(f"Subgroup search for p={p} exhausted {attempt_budget} attempts")
        raise SearchExhausted(p, attempt_budget)

    gens, elements, attempts, stream_seed = result
    notes.append(f"random search found generators {[Gl2Matrix(g, p).rows for g in gens]} "
                 f"after {attempts} attempts (stream seed {stream_seed})")
    logger.info(notes[-1])
    return _finish(cache_key, hint_generators, SubgroupSearchResult(
        p, [Gl2Matrix(g, p) for g in gens], [Gl2Matrix(e, p) for e in elements], len(elements),
        attempts, int(seed), notes))


def _finish(cache_key, hint_generators, result):
    if hint_generators is None:
        with _CACHE_LOCK:
            _SUBGROUP_CACHE[cache_key] = result
    return result


def _random_search(p, seed, budget, workers):
    if workers == 1:
        gens, elements, attempts = _search_stream(p, seed, budget)
        return None if gens is None else (gens, elements, attempts, seed)

    stream_seeds = derive_seeds(seed, workers)
    share = [budget // workers + (1 if k < budget % workers else 0) for k in range(workers)]
    stop_events = [threading.Event() for _ in range(workers)]
    outcomes = [None] * workers

    def run(k):
        outcomes[k] = _search_stream(p, stream_seeds[k], share[k], stop_events[k])
        if outcomes[k][0] is not None:
            # Streams after a success can no longer win.
            for later in stop_events[k + 1:]:
                later.set()

    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
        list(executor.map(run, range(workers)))

    for k, (gens, elements, attempts) in enumerate(outcomes):
        if gens is not None:
            total = sum(o[2] for o in outcomes[:k]) + attempts
            return gens, elements, total, stream_seeds[k]
    return None


def build_galois_decomposition(p, subgroup: SubgroupSearchResult) -> Decomposition:
    check_modulus(p)
    if subgroup.p != p:
        raise InvalidSubgroup(f"Subgroup lives in SL2({subgroup.p}), expected SL2({p})")
    elements = subgroup.elements
    if len(elements) != p * p - 1 or len(set(elements)) != len(elements):
        raise InvalidSubgroup(f"Subgroup has {len(set(elements))} distinct elements, expected {p * p - 1}")

    with PerformanceTimer(f"Build Galois decomposition (p={p})", logger):
        for a, b in itertools.combinations(range(len(elements)), 2):
            try:
                ok = sl2_pair_complementary(elements[a], elements[b])
            except ValueError as e:
                raise InvalidSubgroup(str(e)) from e
            if not ok:
                raise InvalidSubgroup(f"Elements {elements[a]!r} and {elements[b]!r} give intersecting subspaces")
        subalgebras = product_factors(p) + [describe_matrix(M) for M in elements]

    return Decomposition(p, Family.GALOIS, subalgebras, generators=list(subgroup.generators),
                         notes=list(subgroup.notes))


def custom_decomposition(p, subspaces, notes=None) -> Decomposition:
    """Wraps arbitrary subspaces; kinds are recomputed, never trusted."""
    check_modulus(p)
    return Decomposition(p, Family.CUSTOM, [describe(S) for S in subspaces], notes=list(notes or []))
