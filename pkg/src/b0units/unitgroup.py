"""The algebra group 1+J: canonical forms, a pc presentation, abelianization.

Generators are ``1 + u_g`` with ``u_g = x^t * a_i`` where ``a_i`` runs over
the adapted filtration basis and ``x^t`` over the power basis of F_q, so
``g = i*n + t``.  Internally an element ``1+y`` is stored by the F_p
coordinates of ``y`` with respect to the ``u_g`` ("adapted coordinates").
Left multiplication by a generator, or by its inverse, is an affine map of
those coordinates; the hot loops that chain these maps live in ``kernels``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .abelian import AbelianGroup, local_cokernel
from .errors import CollectionDiverged, FieldMismatch, GeneratorGuardExceeded
from .linalg import fp_inverse
from .nilalgebra import Filtration, NilpotentAlgebra
from .pcgroup import PcPresentation
from .smallfield import Embedding

MAX_GENERATORS = 512
TABLE_CHUNK = 32
PAIR_CHUNK = 4096


def _fp_matmul(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """Exact product mod p through float32 BLAS (entries stay below 2^24)."""
    C = np.matmul(A.astype(np.float32, copy=False), B.astype(np.float32, copy=False))
    C -= p * np.floor(C / p)
    return C.astype(np.int64)


class UnitPcp:
    """Polycyclic presentation of 1+J read off from the algebra itself."""

    def __init__(self, algebra: NilpotentAlgebra, max_generators: int = MAX_GENERATORS):
        field = algebra.field
        p, n, d = field.p, field.n, algebra.dim
        N = n * d
        if N > max_generators:
            raise GeneratorGuardExceeded(f"{N} generators exceed guard {max_generators}")
        self.algebra = algebra
        self.p, self.N = p, N
        filt: Filtration = algebra.filtration
        self.filtration = filt
        xpow = np.zeros((n, n), dtype=np.int64)
        xpow[np.arange(n), np.arange(n)] = 1
        # u_g as F_q arrays (N, d, n) and their natural F_p rows
        adapted = filt.adapted_basis
        gens = field.mul_arrays(adapted[:, None, :, :], xpow[None, :, None, :]).reshape(N, d, n)
        self.gens = gens % p
        self.level_of = np.repeat(np.asarray(filt.level_of, dtype=np.int64), n)
        self.B = self.gens.reshape(N, N)
        self.Binv = fp_inverse(self.B, p)
        self._BT32 = np.ascontiguousarray(self.B.T, dtype=np.float32)
        self._BinvT32 = np.ascontiguousarray(self.Binv.T, dtype=np.float32)
        self.tables = kernels.make_tables(p, self._table_chunks())

    # -- coordinates ---------------------------------------------------------

    def to_adapted(self, U: np.ndarray) -> np.ndarray:
        """Adapted coordinates of algebra elements (shape (..., d, n))."""
        U = np.asarray(U, dtype=np.int64)
        flat = U.reshape(-1, self.N)
        return _fp_matmul(flat, self.Binv, self.p).reshape(U.shape[:-2] + (self.N,))

    def from_adapted(self, C: np.ndarray) -> np.ndarray:
        C = np.asarray(C, dtype=np.int64)
        flat = _fp_matmul(C.reshape(-1, self.N), self.B, self.p)
        return flat.reshape(C.shape[:-1] + (self.algebra.dim, self.algebra.field.n))

    def _adapted_left(self, elems: np.ndarray) -> np.ndarray:
        """Left multiplication matrices of ``elems`` in adapted coordinates."""
        A, p = self.algebra, self.p
        nat = np.stack([A.field.expand(A.left_matrix(w)) for w in elems]).astype(np.float32)
        # c' = Binv^T L B^T c
        return _fp_matmul(self._BinvT32, _fp_matmul(nat, self._BT32, p), p)

    def _table_chunks(self):
        """Tables 0..N-1 multiply by 1+u_g; tables N..2N-1 by its inverse."""
        A, N = self.algebra, self.N
        for inverse in (False, True):
            for s in range(0, N, TABLE_CHUNK):
                block = self.gens[s: s + TABLE_CHUNK]
                if inverse:
                    block = np.stack([A.unit_inverse(u) for u in block])
                yield self._adapted_left(block), self.to_adapted(block)

    # -- sifting ----------------------------------------------------------------

    def sift_adapted(self, C: np.ndarray) -> np.ndarray:
        C = np.ascontiguousarray(np.asarray(C, dtype=np.uint8).reshape(-1, self.N))
        if C.shape[0] == 0:
            return np.zeros((0, self.N), dtype=np.uint8)
        E, bad = kernels.sift(self.tables, C, self.N)
        if bad.any():
            raise CollectionDiverged("sifting left a nonzero remainder")
        return E

    def sift(self, u: np.ndarray) -> np.ndarray:
        """Exponents e with prod_g (1+u_g)^e_g = 1+u (generator order)."""
        u = np.asarray(u)
        single = u.ndim == 2
        E = self.sift_adapted(self.to_adapted(u.reshape(-1, *u.shape[-2:])))
        return E[0] if single else E

    def rebuild_adapted(self, E: np.ndarray) -> np.ndarray:
        E = np.asarray(E, dtype=np.int64).reshape(-1, self.N)
        width = max(int(E.sum(axis=1).max()) if E.size else 0, 1)
        seq = np.full((E.shape[0], width), -1, dtype=np.int64)
        for b, row in enumerate(E):
            # apply the last factor first
            order = np.repeat(np.arange(self.N)[::-1], row[::-1])
            seq[b, : order.size] = order
        return kernels.affine_chain(self.tables, np.zeros(E.shape, dtype=np.uint8), seq)

    def rebuild(self, e: np.ndarray) -> np.ndarray:
        """The algebra element u with 1+u = prod_g (1+u_g)^e_g."""
        e = np.asarray(e)
        out = self.from_adapted(self.rebuild_adapted(e))
        return out[0] if e.ndim == 1 else out

    # -- relations ---------------------------------------------------------------

    @cached_property
    def power_words(self) -> np.ndarray:
        """Row g: exponents of (1+u_g)^p."""
        N, p = self.N, self.p
        seq = np.repeat(np.arange(N)[:, None], p - 1, axis=1)
        Y = kernels.affine_chain(self.tables, np.eye(N, dtype=np.uint8), seq)
        return self.sift_adapted(Y)

    def pair_index(self, j: int, i: int) -> int:
        return j * (j - 1) // 2 + i

    @property
    def pair_count(self) -> int:
        return self.N * (self.N - 1) // 2

    def iter_pairs(self, chunk: int = PAIR_CHUNK):
        """Yield ``(pairs, words)`` blocks with pairs (j, i), j > i, in pair order."""
        N = self.N
        jj, ii = np.tril_indices(N, -1)
        for s in range(0, jj.size, chunk):
            j, i = jj[s: s + chunk], ii[s: s + chunk]
            yield np.stack([j, i], axis=1), self.comm_words_for(j, i)

    def comm_words_for(self, j: np.ndarray, i: np.ndarray) -> np.ndarray:
        """Exponents of [1+u_j, 1+u_i] = (1+u_j)^-1 (1+u_i)^-1 (1+u_j)(1+u_i)."""
        j, i = np.atleast_1d(j), np.atleast_1d(i)
        Y0 = np.zeros((j.size, self.N), dtype=np.uint8)
        Y0[np.arange(j.size), i] = 1
        seq = np.stack([j, self.N + i, self.N + j], axis=1)
        return self.sift_adapted(kernels.affine_chain(self.tables, Y0, seq))

    def comm_word(self, j: int, i: int) -> np.ndarray:
        if not j > i:
            raise ValueError("commutator words are stored for j > i")
        return self.comm_words_for(np.array([j]), np.array([i]))[0]

    @cached_property
    def comm_words(self) -> np.ndarray:
        """All commutator words, row ``pair_index(j, i)``."""
        return np.concatenate([w for _, w in self.iter_pairs()]) if self.N > 1 \
            else np.zeros((0, self.N), dtype=np.uint8)

    def to_presentation(self, name: str = "") -> PcPresentation:
        """The abstract pc presentation (for small cases and testing)."""
        def word(row):
            return tuple((g, int(e)) for g, e in enumerate(row) if e)
        comm = {}
        for pairs, words in self.iter_pairs():
            for (j, i), w in zip(pairs, words):
                if w.any():
                    comm[(int(j), int(i))] = word(w)
        return PcPresentation(self.p, self.N, tuple(word(r) for r in self.power_words), comm, name)


def unit_pcp(A: NilpotentAlgebra, max_generators: int = MAX_GENERATORS) -> UnitPcp:
    return UnitPcp(A, max_generators)


def sift(A: NilpotentAlgebra, pcp: UnitPcp, u: np.ndarray) -> np.ndarray:
    if pcp.algebra is not A:
        raise ValueError("pcp was built for a different algebra")
    return pcp.sift(u)


def rebuild(pcp: UnitPcp, e: np.ndarray) -> np.ndarray:
    return pcp.rebuild(e)


@dataclass
class AbelianizationData:
    group: AbelianGroup
    projection: np.ndarray  # N x r, generator g -> invariant-factor coordinates
    lift: np.ndarray  # r x N
    pcp: UnitPcp
    K: int  # p^K kills 1+J

    def project_exponents(self, E: np.ndarray) -> np.ndarray:
        f = np.asarray(self.group.factors, dtype=np.int64)
        E = np.asarray(E, dtype=np.int64)
        if not f.size:
            return np.zeros(E.shape[:-1] + (0,), dtype=np.int64)
        return (E @ self.projection) % f


def exponent_bound(A: NilpotentAlgebra) -> int:
    """Least K with p^K >= nil_index, so (1+u)^(p^K) = 1 + u^(p^K) = 1."""
    return max(1, math.ceil(math.log(A.nil_index, A.p) - 1e-12))


def unit_abelianization(A: NilpotentAlgebra, pcp: UnitPcp | None = None,
                        max_generators: int = MAX_GENERATORS) -> AbelianizationData:
    pcp = pcp if pcp is not None else unit_pcp(A, max_generators)
    p, N = pcp.p, pcp.N
    K = exponent_bound(A)
    H = np.zeros((N, N), dtype=np.int64)
    kernels.echelon_insert(H, p * np.eye(N, dtype=np.int64) - pcp.power_words.astype(np.int64), p, K)
    for _, words in pcp.iter_pairs():
        kernels.echelon_insert(H, words.astype(np.int64), p, K)
    group = local_cokernel(H, N, p, K)
    r = group.rank
    proj = np.array(group.projection, dtype=np.int64).reshape(N, r)
    lift = np.array(group.lift, dtype=np.int64).reshape(r, N)
    return AbelianizationData(group, proj, lift, pcp, K)


def project_unit(A: NilpotentAlgebra, abdata: AbelianizationData, u: np.ndarray) -> np.ndarray:
    """Invariant-factor coordinates of the class of 1+u."""
    return abdata.project_exponents(abdata.pcp.sift(u))


def inclusion_ab_map(A_q: NilpotentAlgebra, A_l: NilpotentAlgebra, ab_q: AbelianizationData,
                     ab_l: AbelianizationData, emb: Embedding) -> np.ndarray:
    """Matrix (rank l x rank q) of the map induced by 1+J_q -> 1+J_l."""
    if emb.src != A_q.field or emb.dst != A_l.field or A_q.dim != A_l.dim:
        raise FieldMismatch("target algebra is not a scalar extension of the source")
    images = emb.apply(ab_q.pcp.gens)
    G = ab_l.project_exponents(ab_l.pcp.sift(images)) if images.shape[0] else \
        np.zeros((0, ab_l.group.rank), dtype=np.int64)
    f = np.asarray(ab_l.group.factors, dtype=np.int64)
    T = ab_q.lift @ G
    if f.size:
        T %= f
    return T.T
