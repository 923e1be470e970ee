"""
From decompositions to bases: MASA eigenbases, unbiasedness, the pure-state
overlap bound, span bounds, strong-unextendibility certificates and the
numerical search for a vector unbiased to a whole family.

Certificate verdicts come from the exact layer only. Everything computed in
floating point here is reported as a residual next to the verdict.
"""
from __future__ import annotations

import concurrent.futures
import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List

import numpy as np
from scipy.optimize import least_squares
from scipy.stats import unitary_group

from .constructions import Decomposition, decomposition_pair_failures, recombine_extension
from .errors import DegenerateSplit, DimensionMismatch, NotAFactor, NotAMasa, SearchDiverged
from .subalgebra import SubalgebraDesc, SubalgebraKind, classify, describe
from .utils import PerformanceTimer, derive_seeds
from .weyl import (
    DEFAULT_TOLERANCE,
    PureState,
    basis_stack,
    pairwise_complementarity,
    partial_trace_1,
    partial_trace_2,
    weyl_single,
    weyl_tensor,
)

logger = logging.getLogger(__name__)

# --- CONFIGURATION ---
UNBIASED_TOLERANCE = 1e-9
EIGENVECTOR_TOLERANCE = 1e-8
MAX_SPLIT_ATTEMPTS = 8
SEARCH_RESTARTS = 200
SEARCH_ITERATIONS = 500
WITNESS_THRESHOLD = 1e-6
MAX_LISTED_FAILURES = 20


class Verdict(str, Enum):
    STRONGLY_UNEXTENDIBLE = "StronglyUnextendible"
    BOUND_NOT_MET = "BoundNotMet"
    INVALID = "Invalid"


@dataclass(eq=False)
class MubFamily:
    p: int
    bases: List[np.ndarray]
    source_masas: List[SubalgebraDesc]
    seed: int = 0
    eigen_residuals: List[float] = field(default_factory=list)

    @property
    def dimension(self):
        return self.p * self.p

    def __len__(self):
        return len(self.bases)


@dataclass
class CertificateReport:
    p: int
    family: str
    subalgebra_count: int
    factor_count: int
    bound_required: int
    verdict: Verdict
    residuals: Dict[str, float] = field(default_factory=dict)
    provenance: Dict[str, object] = field(default_factory=dict)
    failures: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)


@dataclass(eq=False)
class SearchResult:
    best_vector: PureState
    best_residual: float
    restarts: int
    seed: int
    evaluated: int = 0
    iterations: int = SEARCH_ITERATIONS

    @property
    def witness_found(self):
        return self.best_residual < WITNESS_THRESHOLD


# --- EIGENBASES ---

def _eigen_exponents(values, p):
    """Eigenvalue angles in units of pi / p, reduced mod 2p (covers the +-i of XZ at p = 2)."""
    return np.mod(np.rint(np.angle(values) * p / np.pi).astype(int), 2 * p)


def _split_once(W1, W2, rng):
    c = rng.standard_normal(4)
    H = (c[0] * (W1 + W1.conj().T) / 2 + c[1] * (W1 - W1.conj().T) / 2j
         + c[2] * (W2 + W2.conj().T) / 2 + c[3] * (W2 - W2.conj().T) / 2j)
    _, U = np.linalg.eigh(H)
    residual = 0.0
    joint = []
    for W in (W1, W2):
        eigenvalues = np.einsum("ij,ik,kj->j", U.conj(), W, U)
        residual = max(residual, float(np.max(np.abs(W @ U - U * eigenvalues))))
        joint.append(eigenvalues)
    return U, joint, residual


def _masa_eigenbasis(S: SubalgebraDesc, seed):
    if classify(S.subspace) is not SubalgebraKind.MASA:
        raise NotAMasa(f"{S.subspace!r} is not a MASA")
    p = S.p
    u, v = S.subspace.vectors()
    W1, W2 = weyl_tensor(u), weyl_tensor(v)
    rng = np.random.default_rng(seed)

    residual = np.inf
    for _ in range(MAX_SPLIT_ATTEMPTS):
        U, joint, residual = _split_once(W1, W2, rng)
        if residual <= EIGENVECTOR_TOLERANCE:
            break
    else:
        raise DegenerateSplit(f"No splitting of {S.subspace!r} verified below {EIGENVECTOR_TOLERANCE} "
                              f"after {MAX_SPLIT_ATTEMPTS} attempts (last residual {residual:.3e})")

    e1, e2 = (_eigen_exponents(values, p) for values in joint)
    U = U[:, np.lexsort((e2, e1))]

    # First amplitude above noise made real positive.
    leading = np.argmax(np.abs(U) > 1e-8, axis=0)
    phases = U[leading, np.arange(U.shape[1])]
    U = U * (np.abs(phases) / phases)
    return U, residual


def masa_eigenbasis(S: SubalgebraDesc, seed=0) -> np.ndarray:
    """
    Orthonormal common eigenbasis (columns) of the Weyl operators of a MASA,
    columns ordered by joint eigenvalue exponents.
    """
    return _masa_eigenbasis(S, seed)[0]


def extract_mub_family(decomposition: Decomposition, seed=0, workers=1) -> MubFamily:
    """Eigenbases of every MASA member; kinds are recomputed and seeds derived per MASA."""
    masas = [describe(s.subspace) for s in decomposition.subalgebras
             if classify(s.subspace) is SubalgebraKind.MASA]
    seeds = derive_seeds(seed, len(masas))

    with PerformanceTimer(f"Extract {len(masas)} MASA eigenbases", logger):
        if workers > 1:
            with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
                results = list(executor.map(_masa_eigenbasis, masas, seeds))
        else:
            results = [_masa_eigenbasis(S, s) for S, s in zip(masas, seeds)]

    return MubFamily(decomposition.p, [U for U, _ in results], masas, int(seed),
                     [r for _, r in results])


# --- UNBIASEDNESS ---

def unbiasedness_check(B1, B2, tol=UNBIASED_TOLERANCE):
    """max over i, j of | |<f_i|g_j>|^2 - 1/d |, with the verdict at tol."""
    B1 = np.asarray(B1)
    B2 = np.asarray(B2)
    if B1.shape != B2.shape or B1.shape[0] != B1.shape[1]:
        raise DimensionMismatch(f"Bases of shapes {B1.shape} and {B2.shape}")
    overlaps = np.abs(B1.conj().T @ B2) ** 2
    deviation = float(np.max(np.abs(overlaps - 1.0 / B1.shape[0])))
    return deviation <= tol, deviation


def family_unbiasedness(family: MubFamily, tol=UNBIASED_TOLERANCE):
    """Worst deviation over all pairs of bases of the family."""
    worst = 0.0
    for B1, B2 in itertools.combinations(family.bases, 2):
        worst = max(worst, unbiasedness_check(B1, B2, tol)[1])
    return worst <= tol, worst


def unitarity_deviation(U):
    U = np.asarray(U)
    return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[1]))))


# --- OVERLAP BOUNDS ---

def pure_overlap(h, S: SubalgebraDesc) -> float:
    """<h| E_F(|h><h|) |h> for a factor F; at most 1/p, with equality exactly on separable states."""
    kind = classify(S.subspace)
    if not kind.is_factor:
        raise NotAFactor(f"{S.subspace!r} is a MASA, not a factor")
    p = S.p
    amplitudes = h.amplitudes if isinstance(h, PureState) else np.asarray(h, dtype=complex).reshape(-1)
    if amplitudes.shape[0] != p * p:
        raise DimensionMismatch(f"State of dimension {amplitudes.shape[0]}, expected {p * p}")

    if kind is SubalgebraKind.PRODUCT_FACTOR_0 or kind is SubalgebraKind.PRODUCT_FACTOR_1:
        projector = np.outer(amplitudes, amplitudes.conj())
        reduced = (partial_trace_2 if kind is SubalgebraKind.PRODUCT_FACTOR_0 else partial_trace_1)(projector, p, p)
        return float(np.real(np.trace(reduced @ reduced))) / p

    stack = basis_stack(S.subspace)
    expectations = np.einsum("i,kij,j->k", amplitudes.conj(), stack, amplitudes)
    return float(np.sum(np.abs(expectations) ** 2)) / (p * p)


def factor_span_bound(d, n) -> int:
    """Fewest pairwise complementary M_n factors of M_d (x) M_n whose span can hold a pure state."""
    if d < 2 or n < 2:
        raise ValueError(f"Dimensions must be at least 2, got d={d}, n={n}")
    return d + -(-(d - 1) // (n - 1))


def masa_span_bound(n) -> int:
    """Fewest pairwise complementary MASAs whose span can contain an M_n factor."""
    if n < 2:
        raise ValueError(f"Dimension must be at least 2, got n={n}")
    return n + 1


def trace_overlap(basis_a, basis_c) -> float:
    """Tr(E_A E_C) = sum |tau(a* c)|^2 for tau-orthonormal bases of A and C."""
    A = np.asarray(basis_a)
    C = np.asarray(basis_c)
    n = A.shape[-1]
    gram = A.reshape(len(A), -1).conj() @ C.reshape(len(C), -1).T / n
    return float(np.sum(np.abs(gram) ** 2))


def subalgebra_trace_overlap(S: SubalgebraDesc, T: SubalgebraDesc) -> float:
    return trace_overlap(basis_stack(S.subspace), basis_stack(T.subspace))


def haar_unitary(n, rng) -> np.ndarray:
    return unitary_group.rvs(n, random_state=rng)


def random_factor_basis(p, rng):
    """tau-orthonormal basis of U (CI (x) M_p) U* for a Haar-random U."""
    U = haar_unitary(p * p, rng)
    identity = np.eye(p)
    return np.stack([U @ np.kron(identity, weyl_single(a, b, p)) @ U.conj().T
                     for a in range(p) for b in range(p)])


def random_masa_basis(p, rng):
    """tau-orthonormal basis p |u_k><u_k| of the MASA diagonal in a Haar-random basis."""
    U = haar_unitary(p * p, rng)
    return np.stack([p * np.outer(U[:, k], U[:, k].conj()) for k in range(p * p)])


# --- CERTIFICATES ---

def certify_strong_unextendibility(decomposition: Decomposition, numeric=False, tol=DEFAULT_TOLERANCE,
                                   workers=1, provenance=None) -> CertificateReport:
    """
    Completeness (p^2 + 1 pairwise complementary members, tags consistent) and
    the factor count k decide the verdict: StronglyUnextendible iff complete and
    k < p + 1. Never raises on bad input; problems land in `failures`.
    """
    p = decomposition.p
    subalgebras = decomposition.subalgebras
    failures = []
    notes = list(decomposition.notes)

    with PerformanceTimer(f"Symbolic certificate (p={p})", logger):
        expected = p * p + 1
        if len(subalgebras) != expected:
            failures.append(f"decomposition has {len(subalgebras)} subalgebras, expected {expected}")

        moduli = {s.p for s in subalgebras}
        if moduli - {p}:
            failures.append(f"subalgebras live mod {sorted(moduli)}, expected mod {p}")

        for index, s in enumerate(subalgebras):
            for problem in s.problems():
                failures.append(f"subalgebra {index}: {problem}")

        pair_failures = decomposition_pair_failures(subalgebras)
        for i, j in pair_failures[:MAX_LISTED_FAILURES]:
            failures.append(f"subalgebras {i} and {j} intersect nontrivially")
        if len(pair_failures) > MAX_LISTED_FAILURES:
            failures.append(f"... {len(pair_failures) - MAX_LISTED_FAILURES} more intersecting pairs")

        factor_count = sum(1 for s in subalgebras if classify(s.subspace).is_factor)

    bound = factor_span_bound(p, p)
    if failures:
        verdict = Verdict.INVALID
    elif factor_count < bound:
        verdict = Verdict.STRONGLY_UNEXTENDIBLE
    else:
        verdict = Verdict.BOUND_NOT_MET

    residuals = {}
    if numeric:
        if moduli - {p}:
            notes.append("numeric layer skipped: mixed moduli")
        else:
            residuals.update(_numeric_residuals(subalgebras, set(pair_failures), tol, workers))

    report = CertificateReport(
        p=p,
        family=decomposition.family.value,
        subalgebra_count=len(subalgebras),
        factor_count=factor_count,
        bound_required=bound,
        verdict=verdict,
        residuals=residuals,
        provenance=dict(provenance or {}),
        failures=failures,
        notes=notes,
    )
    logger.info(f"Certificate p={p} {report.family}: {factor_count} factors, bound {bound}, "
                f"verdict {verdict.value}")
    return report


def _numeric_residuals(subalgebras, symbolic_failures, tol, workers):
    with PerformanceTimer("Numeric pairwise complementarity", logger):
        outcomes = pairwise_complementarity(subalgebras, tol, workers)
    worst = 0.0
    disagreements = 0
    for i, j, ok, residual in outcomes:
        symbolic_ok = (i, j) not in symbolic_failures
        if symbolic_ok:
            worst = max(worst, residual)
        if ok != symbolic_ok:
            disagreements += 1
            logger.warning(f"Oracle disagreement on pair ({i}, {j}): symbolic {symbolic_ok}, "
                           f"numeric {ok} (residual {residual:.3e})")
    return {"numeric_complementarity": worst, "oracle_disagreements": float(disagreements)}


def extension_witness_deviation(family: MubFamily, D=None, seed=0) -> float:
    """
    Worst unbiasedness deviation between the eigenbases of the recombined
    MASAs (p = 1 mod 4) and every basis of the family. Near zero means the
    family extends.
    """
    p = family.p
    recombined = [describe(S) for S in recombine_extension(p, D)]
    seeds = derive_seeds(seed, len(recombined))
    worst = 0.0
    for S, s in zip(recombined, seeds):
        U = masa_eigenbasis(S, s)
        for B in family.bases:
            worst = max(worst, unbiasedness_check(U, B)[1])
    return worst


# --- FALSIFICATION SEARCH ---

def _split(x, n):
    return x[:n] + 1j * x[n:]


def _search_value(stacked, v, target):
    r = np.abs(stacked @ v) ** 2 - target
    return float(r @ r)


def _descend(stacked, target, rng, iterations):
    """
    One restart: scipy least squares on the stacked residuals |<b|v>|^2 - 1/N
    over (Re v, Im v), renormalized onto the unit sphere afterwards.
    Levenberg-Marquardt needs at least as many residuals as unknowns; a
    single basis falls back to the trust-region solver.
    """
    m, n = stacked.shape
    start = rng.standard_normal(2 * n)
    start /= np.linalg.norm(start)

    def residuals(x):
        return np.abs(stacked @ _split(x, n)) ** 2 - target

    def jacobian(x):
        weighted = (stacked @ _split(x, n)).conj()[:, None] * stacked
        return np.hstack([2 * weighted.real, -2 * weighted.imag])

    if not np.all(np.isfinite(residuals(start))):
        return None, np.inf
    method = "lm" if m >= 2 * n else "trf"
    fit = least_squares(residuals, start, jac=jacobian, method=method, max_nfev=iterations,
                        xtol=1e-15, ftol=1e-15, gtol=1e-15)
    v = _split(fit.x, n)
    norm = np.linalg.norm(v)
    if not np.isfinite(norm) or norm == 0:
        return None, np.inf
    v = v / norm
    return v, _search_value(stacked, v, target)


def unbiased_vector_search(family: MubFamily, restarts=SEARCH_RESTARTS, seed=0, iterations=SEARCH_ITERATIONS,
                           stop_below=None, workers=1) -> SearchResult:
    """
    Minimizes R(v) = sum over bases and vectors of (|<b|v>|^2 - 1/N)^2 over unit
    vectors from seeded random starts. The outcome depends only on (seed,
    restarts, iterations, stop_below). A small residual is a witness; a large
    one proves nothing. Restarts that end non-finite are skipped.
    """
    if not family.bases:
        raise ValueError("Search needs at least one basis")
    if restarts < 1:
        raise ValueError(f"restarts must be positive, got {restarts}")
    N = family.bases[0].shape[0]
    stacked = np.concatenate([np.asarray(B).conj().T for B in family.bases])
    target = 1.0 / N
    seeds = derive_seeds(seed, restarts)

    def run(k):
        return _descend(stacked, target, np.random.default_rng(seeds[k]), iterations)

    best_vector, best_value = None, np.inf
    evaluated = 0
    with PerformanceTimer(f"Unbiased vector search ({restarts} restarts)", logger):
        if workers > 1:
            executor = concurrent.futures.ThreadPoolExecutor(max_workers=workers)
            outcomes = (f.result() for f in [executor.submit(run, k) for k in range(restarts)])
        else:
            executor = None
            outcomes = (run(k) for k in range(restarts))
        try:
            for v, value in outcomes:
                evaluated += 1
                if v is not None and np.isfinite(value) and value < best_value:
                    best_vector, best_value = v, value
                if stop_below is not None and best_value < stop_below:
                    break
        finally:
            if executor is not None:
                executor.shutdown(wait=True, cancel_futures=True)

    if best_vector is None:
        raise SearchDiverged(f"All {evaluated} restarts ended with a non-finite residual")
    logger.info(f"Search floor {best_value:.3e} after {evaluated} of {restarts} restarts (seed {seed})")
    return SearchResult(PureState.normalized(best_vector), best_value, restarts, int(seed), evaluated, iterations)
