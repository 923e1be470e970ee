"""
Dense complex realization of M_p (x) M_p: clock and shift matrices, tensor Weyl
operators, Hilbert-Schmidt geometry, partial traces and conditional
expectations. This is the numeric oracle for the exact layer.

Conventions: storage index k = 0..p-1 stands for e_{k+1}, so Z = diag(w^1, ..., w^p)
(Z = -sigma_3 at p = 2); X e_i = e_{i+1}; tensor products are row-major
Kronecker products with labels (u1, u2) on the first system.
"""
from __future__ import annotations

import concurrent.futures
import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, ModulusMismatch
from .residue import Subspace2, Vec4, check_modulus, symplectic_form
from .subalgebra import SubalgebraDesc

logger = logging.getLogger(__name__)

# --- CONFIGURATION ---
DEFAULT_TOLERANCE = 1e-10
STATE_NORM_TOLERANCE = 1e-12
# A p = 11 stack is about 28 MB.
BASIS_STACK_CACHE = 4


class InnerProduct(NamedTuple):
    raw: complex
    normalized: complex


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amplitudes)
        if abs(norm - 1.0) > STATE_NORM_TOLERANCE:
            raise ValueError(f"State has norm {norm!r}, expected 1")
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def dimension(self):
        return self.amplitudes.shape[0]

    @classmethod
    def random(cls, dimension, rng):
        v = rng.standard_normal(dimension) + 1j * rng.standard_normal(dimension)
        return cls(v / np.linalg.norm(v))

    @classmethod
    def normalized(cls, amplitudes):
        v = np.asarray(amplitudes, dtype=complex).reshape(-1)
        return cls(v / np.linalg.norm(v))


def _readonly(m):
    m.setflags(write=False)
    return m


@lru_cache(maxsize=32)
def clock_shift(p):
    """(Z, X) with Z = sum w^i |e_i><e_i|, X = sum |e_{i+1}><e_i|, w = exp(2 pi i / p)."""
    check_modulus(p)
    Z = np.diag(np.exp(2j * np.pi * np.arange(1, p + 1) / p))
    X = np.roll(np.eye(p, dtype=complex), 1, axis=0)
    return _readonly(Z), _readonly(X)


@lru_cache(maxsize=1024)
def weyl_single(a, b, p):
    """X^a Z^b on C^p."""
    Z, X = clock_shift(p)
    return _readonly(np.linalg.matrix_power(X, a % p) @ np.linalg.matrix_power(Z, b % p))


def _weyl_tensor(values, p):
    u1, u2, u3, u4 = values
    return _readonly(np.kron(weyl_single(u1, u2, p), weyl_single(u3, u4, p)))


def weyl_tensor(v) -> np.ndarray:
    """W_v = X^v1 Z^v2 (x) X^v3 Z^v4; accepts a Vec4 or a (values, p) pair."""
    if isinstance(v, Vec4):
        return _weyl_tensor(v.values, v.modulus)
    values, p = v
    return _weyl_tensor(tuple(int(x) % p for x in values), p)


def commutation_phase(u: Vec4, v: Vec4) -> complex:
    """The phase q with W_u W_v = q W_v W_u, namely w^(-c(u, v))."""
    c = symplectic_form(u, v).value
    return complex(np.exp(-2j * np.pi * c / u.modulus))


def hs_inner(A, B) -> InnerProduct:
    """<A, B> = Tr(A* B), together with tau(A* B) = Tr(A* B) / dim."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape or A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"Cannot pair matrices of shapes {A.shape} and {B.shape}")
    raw = complex(np.vdot(A, B))
    return InnerProduct(raw, raw / A.shape[0])


@lru_cache(maxsize=BASIS_STACK_CACHE)
def basis_stack(subspace: Subspace2):
    """Read-only (p^2, p^2, p^2) stack of the Weyl operators on the points of the subspace."""
    p = subspace.modulus
    stack = np.stack([_weyl_tensor(pt, p) for pt in subspace.points()])
    return _readonly(stack)


def materialize(S: SubalgebraDesc):
    """The p^2 Weyl operators labeled by the points of S: a tau-orthonormal basis of pi(S)."""
    return list(basis_stack(S.subspace))


def numeric_complementary(S: SubalgebraDesc, T: SubalgebraDesc, tol=DEFAULT_TOLERANCE):
    """
    Checks tau(A* B) = tau(A*) tau(B) over all basis pairs. Returns (verdict,
    worst residual).
    """
    if S.p != T.p:
        raise ModulusMismatch(f"Subalgebras of M_{S.p} (x) M_{S.p} and M_{T.p} (x) M_{T.p}")
    A = basis_stack(S.subspace)
    B = basis_stack(T.subspace)
    n = A.shape[1]
    gram = A.reshape(len(A), -1).conj() @ B.reshape(len(B), -1).T / n
    tau_a = np.trace(A, axis1=1, axis2=2).conj() / n
    tau_b = np.trace(B, axis1=1, axis2=2) / n
    residual = float(np.max(np.abs(gram - np.outer(tau_a, tau_b))))
    return residual <= tol, residual


def _check_bipartite(M, d, n):
    M = np.asarray(M)
    if M.shape != (d * n, d * n):
        raise DimensionMismatch(f"Expected a {d * n}x{d * n} matrix, got {M.shape}")
    return M


def partial_trace_1(M, d, n):
    """Tr_1 : M_d (x) M_n -> M_n, Tr_1(A (x) B) = Tr(A) B."""
    M = _check_bipartite(M, d, n)
    return np.einsum("ijik->jk", M.reshape(d, n, d, n))


def partial_trace_2(M, d, n):
    """Tr_2 : M_d (x) M_n -> M_d, Tr_2(A (x) B) = Tr(B) A."""
    M = _check_bipartite(M, d, n)
    return np.einsum("ijkj->ik", M.reshape(d, n, d, n))


def conditional_expectation_second_factor(M, d, n):
    """E onto CI (x) M_n: (1/d) I (x) Tr_1(M)."""
    return np.kron(np.eye(d), partial_trace_1(M, d, n)) / d


def conditional_expectation_first_factor(M, d, n):
    """E onto M_d (x) CI: Tr_2(M) (x) I / n."""
    return np.kron(partial_trace_2(M, d, n), np.eye(n)) / n


def conditional_expectation_subalgebra(M, S: SubalgebraDesc):
    """Trace preserving orthogonal projection onto pi(S): sum_B tau(B* M) B."""
    stack = basis_stack(S.subspace)
    n = stack.shape[1]
    M = np.asarray(M)
    if M.shape != (n, n):
        raise DimensionMismatch(f"Expected a {n}x{n} matrix, got {M.shape}")
    coefficients = stack.reshape(len(stack), -1).conj() @ M.reshape(-1) / n
    return np.tensordot(coefficients, stack, axes=1)


# --- VECTORS ---

def vector_from_matrix(A):
    """|v_A> = sum A_ij e_i (x) f_j."""
    return np.asarray(A, dtype=complex).reshape(-1)


def vector_complementarity(v, d, n, factor=0, tol=DEFAULT_TOLERANCE):
    """
    Complementarity of the projection |v><v| to M_d (x) CI (factor 0), which
    holds iff A A* = I/d, or to CI (x) M_n (factor 1), iff A* A = I/n.
    Returns (verdict, worst residual); the reduced density is compared to
    the normalized identity.
    """
    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.shape[0] != d * n:
        raise DimensionMismatch(f"Vector of length {v.shape[0]} is not in C^{d} (x) C^{n}")
    projector = np.outer(v, v.conj())
    if factor == 0:
        reduced, size = partial_trace_2(projector, d, n), d
    elif factor == 1:
        reduced, size = partial_trace_1(projector, d, n), n
    else:
        raise ValueError(f"factor must be 0 or 1, got {factor}")
    residual = float(np.max(np.abs(reduced - np.eye(size) / size)))
    return residual <= tol, residual


def is_maximally_entangled(v, d, tol=DEFAULT_TOLERANCE):
    first, _ = vector_complementarity(v, d, d, factor=0, tol=tol)
    second, _ = vector_complementarity(v, d, d, factor=1, tol=tol)
    return first and second


def pairwise_complementarity(subalgebras, tol=DEFAULT_TOLERANCE, workers=1):
    """numeric_complementary over every pair, as (i, j, verdict, residual) in index order."""
    pairs = list(itertools.combinations(range(len(subalgebras)), 2))
    logger.debug(f"Numeric complementarity over {len(pairs)} pairs, {workers} worker(s)")

    def check(pair):
        i, j = pair
        ok, residual = numeric_complementary(subalgebras[i], subalgebras[j], tol)
        return i, j, ok, residual

    try:
        if workers <= 1:
            return [check(pair) for pair in pairs]
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(check, pairs))
    finally:
        basis_stack.cache_clear()
