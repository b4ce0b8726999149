"""Finite-dimensional nilpotent algebras over F_q given by structure constants.

An element is an integer array of shape ``(d, n)``: one field element per
basis vector.  ``sc[i, j]`` holds the coordinates of ``b_i * b_j``.
Augmentation ideals of group algebras get a subclass that multiplies through
the group table instead of the dense structure constants.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (FieldMismatch, InputSyntaxError, NotAssociative, NotNilpotent,
                     OrderGuardExceeded)
from .linalg import Span, rref, span_of
from .pcgroup import PcPresentation
from .smallfield import Embedding, FieldDesc, is_prime, make_field

MAX_DIM = 256
MAX_GROUP_ALGEBRA = 2 ** 14  # |pi| * n


@dataclass
class Filtration:
    """Powers J, J^2, ... and a basis adapted to them.

    ``levels[k]`` is the reduced echelon basis of J^(k+1).  The adapted basis
    lists level-1 vectors first; the vectors from index ``offsets[k]`` on
    span J^(k+1).
    """

    levels: list[np.ndarray]
    adapted_basis: np.ndarray
    level_of: list[int]

    @property
    def dims(self) -> list[int]:
        return [lv.shape[0] for lv in self.levels]

    @property
    def offsets(self) -> list[int]:
        d = self.adapted_basis.shape[0]
        return [d - k for k in self.dims]


class NilpotentAlgebra:
    def __init__(self, field: FieldDesc, sc: np.ndarray | None, labels=None, dim: int | None = None):
        self.field = field
        if sc is not None:
            sc = np.asarray(sc, dtype=np.int64) % field.p
            if sc.ndim != 4 or sc.shape[-1] != field.n:
                raise ValueError("structure constants must have shape (d, d, d, n)")
            dim = sc.shape[0]
        if dim is None:
            raise ValueError("dimension unknown")
        if dim > MAX_DIM:
            raise OrderGuardExceeded(f"algebra dimension {dim} exceeds guard {MAX_DIM}")
        self.dim = dim
        self._sc = sc
        self.labels = list(labels) if labels else [f"b{i + 1}" for i in range(dim)]

    # -- basic arithmetic ----------------------------------------------------------

    @property
    def sc(self) -> np.ndarray:
        return self._sc

    @property
    def p(self) -> int:
        return self.field.p

    def zero(self) -> np.ndarray:
        return np.zeros((self.dim, self.field.n), dtype=np.int64)

    def basis_element(self, i: int, scalar=None) -> np.ndarray:
        v = self.zero()
        v[i] = scalar if scalar is not None else self.field.one()
        return v

    def random_element(self, rng: np.random.Generator) -> np.ndarray:
        return rng.integers(0, self.p, size=(self.dim, self.field.n))

    def left_matrix(self, a: np.ndarray) -> np.ndarray:
        """F_q matrix of v -> a v acting on column coordinate vectors."""
        d, n = self.dim, self.field.n
        prod = self.field.matmul(np.asarray(a)[None], self.sc.reshape(d, d * d, n))
        return prod.reshape(d, d, n).transpose(1, 0, 2)

    def right_matrix(self, a: np.ndarray) -> np.ndarray:
        """F_q matrix of v -> v a."""
        d, n = self.dim, self.field.n
        sct = self.sc.transpose(1, 0, 2, 3).reshape(d, d * d, n)
        prod = self.field.matmul(np.asarray(a)[None], sct)
        return prod.reshape(d, d, n).transpose(1, 0, 2)

    def apply(self, M: np.ndarray, v: np.ndarray) -> np.ndarray:
        return self.field.matmul(M, np.asarray(v)[:, None, :])[:, 0, :]

    def multiply(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.apply(self.left_matrix(a), b)

    def add(self, a, b) -> np.ndarray:
        return (np.asarray(a) + np.asarray(b)) % self.p

    def sub(self, a, b) -> np.ndarray:
        return (np.asarray(a) - np.asarray(b)) % self.p

    def scale(self, s, a) -> np.ndarray:
        return self.field.mul_arrays(np.asarray(a), np.asarray(s))

    def unit_multiply(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """(1+u)(1+v) = 1 + w; returns w."""
        return (u + v + self.multiply(u, v)) % self.p

    def unit_inverse(self, u: np.ndarray) -> np.ndarray:
        """v with (1+u)(1+v) = 1, as the truncated series sum (-u)^k."""
        L = self.left_matrix(u)
        term = (-np.asarray(u)) % self.p
        total = term.copy()
        for _ in range(self.dim + 1):
            term = (-self.apply(L, term)) % self.p
            if not term.any():
                return total
            total = (total + term) % self.p
        raise NotNilpotent("element is not nilpotent")

    def unit_power(self, u: np.ndarray, e: int) -> np.ndarray:
        result = self.zero()
        for _ in range(e):
            result = self.unit_multiply(result, u)
        return result

    def unit_commutator(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """[1+a, 1+b] - 1 with [x, y] = x^-1 y^-1 x y."""
        ai, bi = self.unit_inverse(a), self.unit_inverse(b)
        return self.unit_multiply(self.unit_multiply(ai, bi), self.unit_multiply(a, b))

    # -- structure ---------------------------------------------------------------------

    def algebra_generators(self) -> list[np.ndarray]:
        """Elements generating J as an algebra (all basis vectors by default)."""
        return [self.basis_element(i) for i in range(self.dim)]

    @cached_property
    def filtration(self) -> Filtration:
        return power_filtration(self)

    @property
    def nil_index(self) -> int:
        return len(self.filtration.levels) + 1

    def check_associative(self, triples=None) -> tuple[int, int, int] | None:
        """Return a basis triple violating associativity, or None."""
        d = self.dim
        idx = triples if triples is not None else [(i, j, k) for i in range(d) for j in range(d) for k in range(d)]
        sc = self.sc
        cache: dict[int, np.ndarray] = {}

        def L(i):
            if i not in cache:
                cache[i] = self.left_matrix(self.basis_element(i))
            return cache[i]

        for i, j, k in idx:
            lhs = self.apply(self.right_matrix(self.basis_element(k)), sc[i, j])
            rhs = self.apply(L(i), sc[j, k])
            if not np.array_equal(lhs, rhs):
                return (i, j, k)
        return None

    def lie_commutator_span(self) -> Span:
        d, n = self.dim, self.field.n
        span = Span(self.field, d)
        for i in range(d):
            rows = (self.sc[i, i + 1:] - self.sc[i + 1:, i]) % self.p
            if rows.shape[0]:
                span.add(rows)
            if len(span) == d:
                break
        return span

    def extend_scalars(self, emb: Embedding) -> "NilpotentAlgebra":
        if emb.src != self.field:
            raise FieldMismatch(f"embedding source {emb.src} is not {self.field}")
        return NilpotentAlgebra(emb.dst, emb.apply(self.sc), self.labels)


class AugmentationIdeal(NilpotentAlgebra):
    """The augmentation ideal of F_q[pi] with basis g - 1 (g != 1)."""

    def __init__(self, pres: PcPresentation, field: FieldDesc,
                 max_size: int = MAX_GROUP_ALGEBRA):
        if field.p != pres.p:
            raise FieldMismatch(f"group is a {pres.p}-group but the field is {field}")
        if pres.order * field.n > max_size:
            raise OrderGuardExceeded(f"|pi| * n = {pres.order * field.n} exceeds guard {max_size}")
        self.pres = pres
        elems = pres.elements()
        self.elements = elems
        N = len(elems)
        table = np.zeros((N, N), dtype=np.int64)
        for a, x in enumerate(elems):
            for b, y in enumerate(elems):
                table[a, b] = pres.index(pres.multiply(x, y))
        self.table = table
        self.inverse = np.argmax(table == 0, axis=1)
        super().__init__(field, None, labels=[_elem_label(x) for x in elems[1:]], dim=N - 1)

    @cached_property
    def sc(self) -> np.ndarray:
        d, n = self.dim, self.field.n
        sc = np.zeros((d, d, d, n), dtype=np.int64)
        i = np.arange(d)
        prod = self.table[1:, 1:] - 1  # basis index of g_i g_j, -1 for identity
        I, J = np.meshgrid(i, i, indexing="ij")
        mask = prod >= 0
        sc[I[mask], J[mask], prod[mask], 0] += 1
        sc[I, J, I, 0] -= 1
        sc[I, J, J, 0] -= 1
        return sc % self.p

    def _full(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        head = (-a.sum(axis=0)) % self.p
        return np.concatenate([head[None], a])

    def left_matrix(self, a: np.ndarray) -> np.ndarray:
        A = self._full(a)
        X = np.arange(1, self.dim + 1)
        idx = self.table[X[:, None], self.inverse[X][None, :]]  # x h^-1
        return (A[idx] - A[X][:, None, :]) % self.p

    def right_matrix(self, a: np.ndarray) -> np.ndarray:
        A = self._full(a)
        X = np.arange(1, self.dim + 1)
        idx = self.table[self.inverse[X][None, :], X[:, None]]  # h^-1 x
        return (A[idx] - A[X][:, None, :]) % self.p

    def algebra_generators(self) -> list[np.ndarray]:
        gens = []
        for i in range(self.pres.m):
            gens.append(self.basis_element(self.pres.index(self.pres.generator(i)) - 1))
        return gens

    def group_element(self, x) -> np.ndarray:
        """The element x - 1 of the ideal."""
        k = self.pres.index(x)
        return self.zero() if k == 0 else self.basis_element(k - 1)

    def lie_commutator_span(self) -> Span:
        # [g-1, h-1] = gh - hg
        d, n = self.dim, self.field.n
        span = Span(self.field, d)
        G = np.arange(1, d + 1)
        for g in G:
            rows = np.zeros((d, d, n), dtype=np.int64)
            gh = self.table[g, G] - 1
            hg = self.table[G, g] - 1
            r = np.arange(d)
            ok = gh >= 0
            rows[r[ok], gh[ok], 0] += 1
            ok = hg >= 0
            rows[r[ok], hg[ok], 0] -= 1
            span.add(rows % self.p)
            if len(span) == d:
                break
        return span

    def extend_scalars(self, emb: Embedding) -> "AugmentationIdeal":
        if emb.src != self.field:
            raise FieldMismatch(f"embedding source {emb.src} is not {self.field}")
        return AugmentationIdeal(self.pres, emb.dst)


def _elem_label(x) -> str:
    parts = [f"g{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(x) if e]
    return "*".join(parts) + "-1"


def augmentation_ideal(pres: PcPresentation, field: FieldDesc,
                       max_size: int = MAX_GROUP_ALGEBRA) -> AugmentationIdeal:
    return AugmentationIdeal(pres, field, max_size)


def alg_multiply(A: NilpotentAlgebra, a, b) -> np.ndarray:
    return A.multiply(a, b)


def unit_inverse(A: NilpotentAlgebra, u) -> np.ndarray:
    return A.unit_inverse(u)


def extend_scalars(A: NilpotentAlgebra, emb: Embedding) -> NilpotentAlgebra:
    return A.extend_scalars(emb)


def power_filtration(A: NilpotentAlgebra) -> Filtration:
    field, d = A.field, A.dim
    n = field.n
    current, piv = np.eye(d, dtype=np.int64)[:, :, None] * np.array(field.one())[None, None, :], list(range(d))
    levels = []
    gens_right = [A.right_matrix(s) for s in A.algebra_generators()]
    while current.shape[0]:
        levels.append(current)
        if len(levels) > d + 1:
            raise NotNilpotent("power filtration does not reach zero")
        # J^(k+1) = J^k * span(generators)
        prods = [field.matmul(current, R.transpose(1, 0, 2)) for R in gens_right]
        nxt = span_of(field, np.concatenate(prods) if prods else np.zeros((0, d, n), dtype=np.int64), d)
        if len(nxt) == current.shape[0]:
            raise NotNilpotent("J^k = J^(k+1) != 0")
        current = nxt.basis
    pivots = [rref(field, lv)[1] for lv in levels] + [[]]
    adapted, level_of = [], []
    for k, lv in enumerate(levels):
        deeper = set(pivots[k + 1])
        for row, col in zip(lv, pivots[k]):
            if col not in deeper:
                adapted.append(row)
                level_of.append(k + 1)
    basis = np.array(adapted, dtype=np.int64).reshape(len(adapted), d, n)
    return Filtration(levels, basis, level_of)


def lie_commutator_dim(A: NilpotentAlgebra) -> tuple[int, np.ndarray]:
    span = A.lie_commutator_span()
    return len(span), span.basis


# -- text format -------------------------------------------------------------------------

_PRODUCT = re.compile(r"b(\d+)\s*\*\s*b(\d+)$")
_TERM = re.compile(r"(?:\[([0-9,\s]*)\]\s*\*\s*)?b(\d+)$")


def parse_algebra(text: str, check: bool = True) -> NilpotentAlgebra:
    """Parse the ``algebra`` format; validate associativity and nilpotency."""
    lines = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        for piece in raw.split(";"):
            piece = piece.split("#", 1)[0].strip()
            if piece:
                lines.append((ln, piece))
    if lines and lines[0][1] == "algebra":
        lines = lines[1:]
    header: dict[str, int] = {}
    body = []
    for ln, s in lines:
        head, _, rest = s.partition(" ")
        if head in ("p", "n", "dim") and "=" not in s:
            if head in header or not rest.strip().isdigit():
                raise InputSyntaxError(f"bad or repeated '{head}' line", ln, 1)
            header[head] = int(rest.strip())
        else:
            body.append((ln, s))
    for key in ("p", "dim"):
        if key not in header:
            raise InputSyntaxError(f"missing '{key}' line", 1, 1)
    p, n, d = header["p"], header.get("n", 1), header["dim"]
    if not is_prime(p):
        raise InputSyntaxError(f"{p} is not prime", 1, 1)
    field = make_field(p, n)
    if d > MAX_DIM:
        raise OrderGuardExceeded(f"algebra dimension {d} exceeds guard {MAX_DIM}")
    sc = np.zeros((d, d, d, n), dtype=np.int64)
    seen = set()
    for ln, s in body:
        lhs, eq, rhs = s.partition("=")
        if not eq:
            raise InputSyntaxError("expected 'b<i>*b<j> = <combination>'", ln, 1)
        mt = _PRODUCT.match(lhs.strip())
        if not mt:
            raise InputSyntaxError(f"bad product {lhs.strip()!r}", ln, 1)
        i, j = int(mt.group(1)) - 1, int(mt.group(2)) - 1
        if not (0 <= i < d and 0 <= j < d):
            raise InputSyntaxError("basis index out of range", ln, 1)
        if (i, j) in seen:
            raise InputSyntaxError(f"duplicate product b{i + 1}*b{j + 1}", ln, 1)
        seen.add((i, j))
        col = s.index("=") + 2
        rhs = rhs.strip()
        if rhs == "0":
            continue
        for term in rhs.split("+"):
            tm = _TERM.match(term.strip())
            if not tm:
                raise InputSyntaxError(f"bad term {term.strip()!r}", ln, col)
            k = int(tm.group(2)) - 1
            if not 0 <= k < d:
                raise InputSyntaxError("basis index out of range", ln, col)
            coeffs = [int(c) for c in tm.group(1).split(",")] if tm.group(1) is not None else [1]
            if len(coeffs) > n or any(not 0 <= c < p for c in coeffs):
                raise InputSyntaxError(f"bad coefficient list {coeffs}", ln, col)
            sc[i, j, k, : len(coeffs)] += coeffs
    A = NilpotentAlgebra(field, sc % p)
    if check:
        bad = A.check_associative()
        if bad is not None:
            i, j, k = bad
            raise NotAssociative(f"(b{i + 1} b{j + 1}) b{k + 1} != b{i + 1} (b{j + 1} b{k + 1})")
        A.filtration  # raises NotNilpotent
    return A


def format_algebra(A: NilpotentAlgebra) -> str:
    out = ["algebra", f"p {A.p}", f"n {A.field.n}", f"dim {A.dim}"]
    for i in range(A.dim):
        for j in range(A.dim):
            terms = []
            for k in range(A.dim):
                c = [int(x) for x in A.sc[i, j, k]]
                if any(c):
                    while len(c) > 1 and c[-1] == 0:
                        c.pop()
                    terms.append(("" if c == [1] else "[" + ",".join(map(str, c)) + "]*") + f"b{k + 1}")
            if terms:
                out.append(f"b{i + 1}*b{j + 1} = " + " + ".join(terms))
    return "\n".join(out) + "\n"


def heisenberg_algebra(field: FieldDesc) -> NilpotentAlgebra:
    """Strictly upper triangular 3x3 matrices: e12 e23 = e13."""
    sc = np.zeros((3, 3, 3, field.n), dtype=np.int64)
    sc[0, 1, 2, 0] = 1
    return NilpotentAlgebra(field, sc, labels=["e12", "e23", "e13"])


def zero_algebra(field: FieldDesc, d: int) -> NilpotentAlgebra:
    return NilpotentAlgebra(field, np.zeros((d, d, d, field.n), dtype=np.int64))
