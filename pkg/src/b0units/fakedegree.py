"""Coadjoint orbits of algebra groups, and a brute-force oracle for 1+J.

The orbit of a functional lambda on J has size q^rank(B_lambda), where
B_lambda(u, v) = lambda(uv - vu); its stabilizer is 1 + rad(B_lambda).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import OracleGuardExceeded, ProfileGuardExceeded
from .nilalgebra import NilpotentAlgebra, lie_commutator_dim
from .smallfield import FieldDesc
from .unitgroup import unit_abelianization

PROFILE_GUARD = 2 ** 24
ORACLE_GUARD = 2 ** 20
PROFILE_CHUNK = 4096


@dataclass
class OrbitProfile:
    q: int
    counts: dict[int, int]  # orbit size s -> number of functionals N_s

    @property
    def orbit_counts(self) -> dict[int, int]:
        return {s: n // s for s, n in self.counts.items()}

    @property
    def fake_degrees(self) -> dict[int, int]:
        return {math.isqrt(s): n // s for s, n in self.counts.items()}

    @property
    def orbit_total(self) -> int:
        return sum(self.orbit_counts.values())

    @property
    def fixed_points(self) -> int:
        return self.counts.get(1, 0)

    def violations(self, dim: int) -> list[str]:
        bad = []
        for s, n in self.counts.items():
            w = round(math.log(s, self.q)) if s > 1 else 0
            if self.q ** w != s or w % 2:
                bad.append(f"orbit size {s} is not an even power of q")
            if n % s:
                bad.append(f"{s} does not divide N_s = {n}")
        if sum(self.counts.values()) != self.q ** dim:
            bad.append("functional counts do not sum to q^d")
        return bad


def _batched_rank(F: FieldDesc, M: np.ndarray) -> np.ndarray:
    """Ranks over F_q of a batch of matrices (B, r, c, n)."""
    M = np.array(M, dtype=np.int64) % F.p
    B, r, c, n = M.shape
    ranks = np.zeros(B, dtype=np.int64)
    ar = np.arange(B)
    for col in range(c):
        nz = M[:, :, col].any(axis=-1)
        nz &= np.arange(r)[None, :] >= ranks[:, None]
        has = nz.any(axis=1) & (ranks < r)
        if not has.any():
            continue
        b = ar[has]
        piv = np.argmax(nz[b], axis=1)
        rk = ranks[b]
        tmp = M[b, rk].copy()
        M[b, rk] = M[b, piv]
        M[b, piv] = tmp
        lead_inv = F.inv_array(M[b, rk, col])
        M[b, rk] = F.mul_arrays(M[b, rk], lead_inv[:, None, :])
        factors = M[b, :, col].copy()  # (k, r, n)
        factors[np.arange(b.size), rk] = 0
        M[b] = (M[b] - F.mul_arrays(factors[:, :, None, :], M[b, rk][:, None, :, :])) % F.p
        ranks[b] += 1
    return ranks


def _enumerate(F: FieldDesc, d: int, start: int, stop: int) -> np.ndarray:
    """Functionals with codes in [start, stop): shape (k, d, n)."""
    codes = np.arange(start, stop, dtype=np.int64)
    digits = (codes[:, None] // F.p ** np.arange(d * F.n, dtype=np.int64)[None, :]) % F.p
    return digits.reshape(-1, d, F.n)


def coadjoint_profile(A: NilpotentAlgebra, guard: int = PROFILE_GUARD) -> OrbitProfile:
    F, d = A.field, A.dim
    total = F.q ** d
    if total > guard:
        raise ProfileGuardExceeded(f"q^d = {total} functionals exceed guard {guard}")
    C = (A.sc - A.sc.transpose(1, 0, 2, 3)) % F.p  # (i, j, k, n)
    Cflat = C.reshape(d * d, d, F.n)
    counts: Counter[int] = Counter()
    for start in range(0, total, PROFILE_CHUNK):
        lam = _enumerate(F, d, start, min(total, start + PROFILE_CHUNK))
        # G[b, i, j] = sum_k lam[b, k] * C[i, j, k]
        gram = F.matmul(lam, np.ascontiguousarray(Cflat.transpose(1, 0, 2))).reshape(-1, d, d, F.n)
        for rk, cnt in zip(*np.unique(_batched_rank(F, gram), return_counts=True)):
            counts[F.q ** int(rk)] += int(cnt)
    return OrbitProfile(F.q, dict(sorted(counts.items())))


def fixed_point_count(A: NilpotentAlgebra) -> int:
    """q^(dim J - dim [J, J]_L): functionals fixed by the coadjoint action."""
    return A.field.q ** (A.dim - lie_commutator_dim(A)[0])


@dataclass
class FakeDegreeReport:
    fixed_points: int
    ab_order: int
    verdict: str
    ratio: int
    orbit_total: int | None = None
    class_count: int | None = None
    notes: list[str] = field(default_factory=list)


def fake_degree_report(A: NilpotentAlgebra, compare_orbits: bool = False,
                       oracle_guard: int = ORACLE_GUARD) -> FakeDegreeReport:
    fixed = fixed_point_count(A)
    ab = unit_abelianization(A).group.order()
    verdict = "CONSISTENT" if fixed == ab else "VIOLATED"
    rep = FakeDegreeReport(fixed, ab, verdict, max(fixed, ab) // min(fixed, ab))
    rep.notes.append("only the degree-1 stratum is compared with the abelianization")
    if compare_orbits and A.field.q ** A.dim <= oracle_guard:
        rep.orbit_total = coadjoint_profile(A).orbit_total
        rep.class_count = brute_force_units(A, oracle_guard).class_count
    return rep


# -- brute force oracle -------------------------------------------------------------

@dataclass
class BruteForceResult:
    group_order: int
    derived_order: int
    ab_order: int
    class_count: int


class _Enumerated:
    """All of 1+J as F_p coordinate rows, addressed by base-p codes."""

    def __init__(self, A: NilpotentAlgebra):
        F = A.field
        self.A, self.p = A, F.p
        self.N = A.dim * F.n
        self.size = self.p ** self.N
        self.weights = self.p ** np.arange(self.N, dtype=np.int64)
        codes = np.arange(self.size, dtype=np.int64)
        self.X = (codes[:, None] // self.weights[None, :]) % self.p

    def encode(self, Y: np.ndarray) -> np.ndarray:
        return (np.asarray(Y) % self.p) @ self.weights

    def element(self, code: int) -> np.ndarray:
        return self.X[code].reshape(self.A.dim, self.A.field.n)

    def left(self, u) -> np.ndarray:
        return self.A.field.expand(self.A.left_matrix(u))

    def right(self, u) -> np.ndarray:
        return self.A.field.expand(self.A.right_matrix(u))

    def conj_matrix(self, h) -> np.ndarray:
        """y -> coordinates of (1+h)^-1 (1+y) (1+h) - 1, a linear map."""
        hinv = self.A.unit_inverse(h)
        eye = np.eye(self.N, dtype=np.int64)
        return ((eye + self.left(hinv)) @ (eye + self.right(h))) % self.p

    def right_mult(self, codes: np.ndarray, h) -> np.ndarray:
        """Codes of (1+x)(1+h) for x in codes."""
        Xs = self.X[codes]
        hv = np.asarray(h, dtype=np.int64).reshape(-1)
        R = self.right(h)
        return self.encode(Xs + hv[None, :] + Xs @ R.T)


def _closure(E: _Enumerated, gens: list[np.ndarray], conj: list[np.ndarray]) -> np.ndarray:
    """Subgroup generated by ``gens`` and closed under the linear maps ``conj``."""
    seen = np.zeros(E.size, dtype=bool)
    seen[0] = True
    frontier = np.array([0], dtype=np.int64)
    gens = list(gens)
    while frontier.size:
        new = []
        for g in gens:
            new.append(E.right_mult(frontier, g))
        for C in conj:
            new.append(E.encode(E.X[frontier] @ C.T))
        cand = np.unique(np.concatenate(new)) if new else np.zeros(0, dtype=np.int64)
        cand = cand[~seen[cand]]
        seen[cand] = True
        frontier = cand
    return seen


def brute_force_units(A: NilpotentAlgebra, guard: int = ORACLE_GUARD) -> BruteForceResult:
    F = A.field
    size = F.q ** A.dim
    if size > guard:
        raise OracleGuardExceeded(f"|1+J| = {size} exceeds oracle guard {guard}")
    E = _Enumerated(A)
    # generating set: 1 + (F_p basis vector), enlarged until it generates
    gens = [E.element(int(E.weights[k])) for k in range(E.N)]
    reached = _closure(E, gens, [])
    while not reached.all():
        gens.append(E.element(int(np.flatnonzero(~reached)[0])))
        reached = _closure(E, gens, [])
    conj = [E.conj_matrix(g) for g in gens]
    comms = []
    for a, b in product(range(len(gens)), repeat=2):
        if a < b:
            c = A.unit_commutator(gens[a], gens[b])
            if c.any():
                comms.append(c)
    derived = int(_closure(E, comms, conj).sum())
    labels_src = np.concatenate([np.arange(E.size)] * len(conj)) if conj else np.arange(0)
    labels_dst = np.concatenate([E.encode(E.X @ C.T) for C in conj]) if conj else np.arange(0)
    graph = coo_matrix((np.ones(labels_src.size), (labels_src, labels_dst)), shape=(E.size, E.size))
    k, _ = connected_components(graph, directed=True, connection="weak")
    return BruteForceResult(E.size, derived, E.size // derived, int(k))
