"""Finitely generated abelian groups via Smith normal form.

Two elimination engines live here.  ``smith_normal_form`` works with Python
integers on arbitrary matrices and tracks both transforms.  ``snf_mod_prime_power``
is the p-local variant used for unit-group abelianizations: it assumes the
cokernel is killed by ``p**K`` and works in ``Z/p^K`` with numpy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, prod
from typing import Sequence

import numpy as np

from .errors import IllDefinedMap, InfiniteGroup

Matrix = list[list[int]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: Matrix, B: Matrix) -> Matrix:
    if not A:
        return []
    cols = len(B[0]) if B else 0
    Bt = list(zip(*B)) if B else [()] * cols
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def integer_det(M: Sequence[Sequence[int]]) -> int:
    """Determinant of a square integer matrix (fraction-free Bareiss)."""
    A = [[int(x) for x in row] for row in M]
    n = len(A)
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[-1][-1] if n else 1


def smith_normal_form(M: Sequence[Sequence[int]], ncols: int | None = None):
    """Return ``(S, U, V, Vinv)`` with ``U @ M @ V == S`` diagonal.

    The diagonal is nonnegative with ``S[i][i] | S[i+1][i+1]`` (zeros last).
    U and V are unimodular; ``Vinv`` is the inverse of V, kept because
    cokernels need it to express invariant-factor generators.
    """
    A = [[int(x) for x in row] for row in M]
    r = len(A)
    c = ncols if ncols is not None else (len(A[0]) if A else 0)
    if any(len(row) != c for row in A):
        raise ValueError("ragged matrix")
    U, V, Vinv = identity(r), identity(c), identity(c)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]
        Vinv[i], Vinv[j] = Vinv[j], Vinv[i]

    def add_row(dst, src, k):  # row_dst += k * row_src
        A[dst] = [a + k * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + k * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, k):  # col_dst += k * col_src
        for row in A:
            row[dst] += k * row[src]
        for row in V:
            row[dst] += k * row[src]
        Vinv[src] = [a - k * b for a, b in zip(Vinv[src], Vinv[dst])]

    for t in range(min(r, c)):
        while True:
            best = None
            for i in range(t, r):
                row = A[i]
                for j in range(t, c):
                    x = row[j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, j)
                        if best[0] == 1:
                            break
                if best and best[0] == 1:
                    break
            if best is None:
                break
            _, i, j = best
            swap_rows(t, i)
            swap_cols(t, j)
            piv = A[t][t]
            done = True
            for i in range(t + 1, r):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // piv))
                    if A[i][t]:
                        done = False
            for j in range(t + 1, c):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // piv))
                    if A[t][j]:
                        done = False
            if not done:
                continue
            # pivot must divide the remaining block for the divisibility chain
            bad = next(((i, j) for i in range(t + 1, r) for j in range(t + 1, c)
                        if A[i][j] % piv), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
    return A, U, V, Vinv


@dataclass
class AbelianGroup:
    """Finite (or finitely generated) abelian group by invariant factors.

    ``projection`` maps original generators to invariant-factor coordinates
    (row g = image of generator g); ``lift`` expresses each invariant-factor
    generator as an integer combination of the original generators.  For
    subgroups, ``generators`` lists the invariant-factor generators in the
    ambient coordinates.
    """

    factors: tuple[int, ...]
    projection: list[list[int]] | None = field(default=None, repr=False)
    lift: list[list[int]] | None = field(default=None, repr=False)
    generators: list[list[int]] | None = field(default=None, repr=False)

    def __post_init__(self):
        self.factors = tuple(int(d) for d in self.factors)
        finite = [d for d in self.factors if d]
        if any(d == 1 for d in self.factors):
            raise ValueError("factors of 1 must be dropped")
        if any(b % a for a, b in zip(finite, finite[1:])):
            raise ValueError(f"not a divisibility chain: {self.factors}")

    @property
    def rank(self) -> int:
        return len(self.factors)

    def is_finite(self) -> bool:
        return all(self.factors)

    def order(self) -> int:
        if not self.is_finite():
            raise InfiniteGroup("group has a free part")
        return prod(self.factors)

    def exponent(self) -> int:
        if not self.is_finite():
            raise InfiniteGroup("group has a free part")
        return self.factors[-1] if self.factors else 1

    def m_torsion_order(self, m: int) -> int:
        return prod(gcd(d, m) for d in self.factors)

    def is_isomorphic(self, other: "AbelianGroup") -> bool:
        return self.factors == other.factors

    def reduce(self, coords: Sequence[int]) -> list[int]:
        return [int(x) % d if d else int(x) for x, d in zip(coords, self.factors)]

    def project(self, exps: Sequence[int]) -> list[int]:
        """Coordinates of sum(exps[g] * generator_g) in the invariant basis."""
        if self.projection is None:
            raise ValueError("group carries no projection data")
        out = [0] * self.rank
        for g, e in enumerate(exps):
            if e:
                row = self.projection[g]
                for k in range(self.rank):
                    out[k] += e * row[k]
        return self.reduce(out)

    def __str__(self) -> str:
        return format_factors(self.factors)


def format_factors(factors: Sequence[int]) -> str:
    if not factors:
        return "1"
    parts = []
    for d in sorted(set(factors), key=lambda d: (d == 0, d)):
        k = list(factors).count(d)
        name = "Z" if d == 0 else f"C{d}"
        parts.append(name if k == 1 else f"{name}^{k}")
    return " x ".join(parts)


def cokernel(M: Sequence[Sequence[int]], ncols: int | None = None) -> AbelianGroup:
    """The group Z^ncols / (row span of M)."""
    rows = [list(r) for r in M]
    c = ncols if ncols is not None else (len(rows[0]) if rows else 0)
    S, _, V, Vinv = smith_normal_form(rows, c)
    diag = [S[i][i] if i < len(S) else 0 for i in range(c)]
    keep = [i for i, d in enumerate(diag) if d != 1]
    factors = [diag[i] for i in keep]
    projection = [[V[g][i] % diag[i] if diag[i] else V[g][i] for i in keep] for g in range(c)]
    lift = [list(Vinv[i]) for i in keep]
    return AbelianGroup(tuple(factors), projection, lift)


def integer_kernel(M: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Basis of {x in Z^ncols : M x = 0} (M acting on column vectors)."""
    rows = [list(r) for r in M]
    if not rows:
        return identity(ncols)
    S, _, V, _ = smith_normal_form(rows, ncols)
    rank = sum(1 for i in range(min(len(S), ncols)) if S[i][i])
    return [[V[g][j] for g in range(ncols)] for j in range(rank, ncols)]


def subgroup_structure(A: AbelianGroup, gens: Sequence[Sequence[int]]) -> AbelianGroup:
    """Structure of the subgroup of A generated by ``gens`` (A-coordinates)."""
    r, s = A.rank, len(gens)
    if s == 0:
        return AbelianGroup((), generators=[])
    # relations among the generators: z with sum z_k gens_k in diag(A) Z^r
    big = [[gens[k][i] for k in range(s)] + [A.factors[i] * int(i == j) for j in range(r)]
           for i in range(r)]
    rel = [v[:s] for v in integer_kernel(big, s + r)]
    sub = cokernel(rel, s)
    generators = []
    for coeffs in sub.lift:
        vec = [sum(c * gens[k][i] for k, c in enumerate(coeffs)) for i in range(r)]
        generators.append(A.reduce(vec))
    return AbelianGroup(sub.factors, generators=generators)


def check_hom(A: AbelianGroup, B: AbelianGroup, T: Sequence[Sequence[int]]) -> None:
    """Raise IllDefinedMap unless T kills every relation of A."""
    for i, d in enumerate(A.factors):
        img = [d * T[k][i] for k in range(B.rank)]
        if any(b and x % b or (not b and x) for x, b in zip(img, B.factors)):
            raise IllDefinedMap(f"generator {i} of order {d} does not map to an element of order dividing {d}")


def hom_kernel(A: AbelianGroup, B: AbelianGroup, T: Sequence[Sequence[int]]) -> AbelianGroup:
    """Kernel of the homomorphism A -> B whose i-th column is T[:, i]."""
    T = [list(row) for row in T]
    if len(T) != B.rank or any(len(row) != A.rank for row in T):
        raise ValueError("T must have shape (rank B, rank A)")
    check_hom(A, B, T)
    r = A.rank
    if r == 0:
        return AbelianGroup((), generators=[])
    big = [T[k] + [B.factors[k] * int(k == j) for j in range(B.rank)] for k in range(B.rank)]
    gens = [v[:r] for v in integer_kernel(big, r + B.rank)] if B.rank else identity(r)
    gens = [A.reduce(g) for g in gens]
    return subgroup_structure(A, [g for g in gens if any(g)])


def apply_hom(T: Sequence[Sequence[int]], B: AbelianGroup, x: Sequence[int]) -> list[int]:
    return B.reduce([sum(t * xi for t, xi in zip(row, x)) for row in T])


# -- p-local elimination -------------------------------------------------------

def snf_mod_prime_power(H: np.ndarray, ncols: int, p: int, K: int):
    """Smith form of a relation matrix over Z/p^K.

    Returns ``(valuations, V, Vinv)``: the cokernel of H (rows are relations
    on (Z/p^K)^ncols) is the sum of Z/p^v over ``valuations``, listed in
    ascending order and including zeros; ``x @ V`` gives coordinates.
    """
    mod = p ** K
    M = np.zeros((max(H.shape[0], 1), ncols), dtype=np.int64)
    M[: H.shape[0]] = np.asarray(H, dtype=np.int64) % mod
    V = np.eye(ncols, dtype=np.int64)
    Vinv = np.eye(ncols, dtype=np.int64)
    vals = [K] * ncols
    rows = M.shape[0]
    for k in range(min(rows, ncols)):
        sub = M[k:, k:]
        nz = sub != 0
        if not nz.any():
            break
        for v in range(K):
            hit = np.argwhere(sub % p ** (v + 1) != 0)
            if len(hit):
                break
        i, j = int(hit[0, 0]) + k, int(hit[0, 1]) + k
        if i != k:
            M[[k, i]] = M[[i, k]]
        if j != k:
            M[:, [k, j]] = M[:, [j, k]]
            V[:, [k, j]] = V[:, [j, k]]
            Vinv[[k, j]] = Vinv[[j, k]]
        pv = p ** v
        unit = int(M[k, k]) // pv
        M[k] = (M[k] * pow(unit, -1, mod)) % mod
        below = M[k + 1:, k] // pv
        if below.any():
            M[k + 1:] = (M[k + 1:] - np.outer(below, M[k])) % mod
        right = M[k, k + 1:] // pv
        if right.any():
            V[:, k + 1:] = (V[:, k + 1:] - np.outer(V[:, k], right)) % mod
            Vinv[k] = (Vinv[k] + right @ Vinv[k + 1:]) % mod
            M[k, k + 1:] = 0
        vals[k] = v
    order = sorted(range(ncols), key=lambda i: vals[i])
    return [vals[i] for i in order], V[:, order], Vinv[order]


def local_cokernel(H: np.ndarray, ncols: int, p: int, K: int) -> AbelianGroup:
    """Cokernel of H, assuming p^K kills it (exact, p-local)."""
    vals, V, Vinv = snf_mod_prime_power(H, ncols, p, K)
    keep = [i for i, v in enumerate(vals) if v > 0]
    factors = tuple(p ** vals[i] for i in keep)
    projection = [[int(V[g, i]) % (p ** vals[i]) for i in keep] for g in range(ncols)]
    lift = [[int(x) for x in Vinv[i]] for i in keep]
    return AbelianGroup(factors, projection, lift)
