"""Finite p-groups given by power-commutator presentations.

Generators are 0-based internally (``g1`` in files is index 0).  A word is a
tuple of ``(generator, exponent)`` pairs; a normal word has strictly
increasing generators and exponents in ``[1, p)``.  Elements are exponent
vectors.  The commutator convention is ``[a, b] = a^-1 b^-1 a b`` so that
``g_j g_i = g_i g_j [g_j, g_i]``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .abelian import AbelianGroup, cokernel
from .errors import (CollectionDiverged, InconsistentPresentation, InputSyntaxError,
                     OrderGuardExceeded, UnknownBuiltin)
from .smallfield import is_prime

Word = tuple[tuple[int, int], ...]

MAX_ORDER = 2 ** 20
COLLECTION_CAP = 10 ** 9


@dataclass(frozen=True)
class PcPresentation:
    p: int
    m: int
    power_words: tuple[Word, ...]
    comm_words: dict = field(default_factory=dict, compare=False, hash=False)
    name: str = ""

    @property
    def order(self) -> int:
        return self.p ** self.m

    def word_to_exps(self, word: Word) -> list[int]:
        v = [0] * self.m
        for g, e in word:
            v[g] = e
        return v

    @cached_property
    def _expanded(self):
        pw = [[g for g, e in w for _ in range(e)] for w in self.power_words]
        cw = {k: [g for g, e in w for _ in range(e)] for k, w in self.comm_words.items()}
        return pw, cw

    # -- collection ----------------------------------------------------------

    def collect(self, word: Iterable[tuple[int, int]], start: Sequence[int] | None = None) -> tuple[int, ...]:
        """Normal form of ``start * word`` (start defaults to the identity)."""
        p, m = self.p, self.m
        pw, cw = self._expanded
        exps = list(start) if start is not None else [0] * m
        stack: list[int] = []
        for g, e in reversed(list(word)):
            if not 0 <= g < m:
                raise IndexError(f"generator index {g} out of range")
            if e < 0:
                raise ValueError("negative exponents are not supported; use inverse()")
            stack.extend([g] * e)
        steps = 0
        while stack:
            g = stack.pop()
            steps += 1
            if steps > COLLECTION_CAP:
                raise CollectionDiverged("collection exceeded the step cap")
            tail: list[int] = []
            for k in range(m - 1, g, -1):
                e = exps[k]
                if e:
                    exps[k] = 0
                    piece = [k] + cw.get((k, g), [])
                    tail = piece * e + tail
            exps[g] += 1
            if exps[g] == p:
                exps[g] = 0
                tail = pw[g] + tail
            stack.extend(reversed(tail))
        return tuple(exps)

    def multiply(self, x: Sequence[int], y: Sequence[int]) -> tuple[int, ...]:
        return self.collect([(g, e) for g, e in enumerate(y) if e], start=x)

    def identity(self) -> tuple[int, ...]:
        return (0,) * self.m

    def generator(self, i: int) -> tuple[int, ...]:
        v = [0] * self.m
        v[i] = 1
        return tuple(v)

    def inverse(self, x: Sequence[int]) -> tuple[int, ...]:
        """Solve x * y = 1 one generator at a time."""
        w = list(x)
        y = [0] * self.m
        for i in range(self.m):
            e = w[i]
            if e:
                y[i] = self.p - e
                w = list(self.collect([(i, self.p - e)], start=w))
        return tuple(y)

    def power(self, x: Sequence[int], e: int) -> tuple[int, ...]:
        if e < 0:
            return self.power(self.inverse(x), -e)
        result, base = self.identity(), tuple(x)
        while e:
            if e & 1:
                result = self.multiply(result, base)
            base = self.multiply(base, base)
            e >>= 1
        return result

    def conjugate(self, x: Sequence[int], g: Sequence[int]) -> tuple[int, ...]:
        """x^g = g^-1 x g."""
        return self.multiply(self.multiply(self.inverse(g), x), g)

    def commutator(self, x: Sequence[int], y: Sequence[int]) -> tuple[int, ...]:
        return self.multiply(self.multiply(self.inverse(x), self.inverse(y)), self.multiply(x, y))

    # -- enumeration ------------------------------------------------------------

    def check_guard(self, max_order: int = MAX_ORDER) -> None:
        if self.order > max_order:
            raise OrderGuardExceeded(f"group order {self.order} exceeds guard {max_order}")

    def elements(self) -> list[tuple[int, ...]]:
        """All elements in lexicographic exponent order."""
        idx = np.arange(self.order)
        digits = [(idx // self.p ** (self.m - 1 - i)) % self.p for i in range(self.m)]
        return [tuple(int(d) for d in col) for col in np.stack(digits, axis=1)] if self.m else [()]

    def index(self, x: Sequence[int]) -> int:
        r = 0
        for e in x:
            r = r * self.p + e
        return r


# -- parsing ------------------------------------------------------------------------

_WORD_TERM = re.compile(r"g(\d+)(?:\^(\d+))?$")


def _parse_word(text: str, p: int, m: int, line: int, col: int) -> Word:
    text = text.strip()
    if text == "1":
        return ()
    out = []
    for part in text.split("*"):
        part = part.strip()
        mt = _WORD_TERM.match(part)
        if not mt:
            raise InputSyntaxError(f"bad word term {part!r}", line, col)
        g = int(mt.group(1)) - 1
        e = int(mt.group(2)) if mt.group(2) else 1
        if not 0 <= g < m:
            raise InputSyntaxError(f"generator g{g + 1} out of range", line, col)
        if not 1 <= e < p:
            raise InputSyntaxError(f"exponent {e} outside [1, {p})", line, col)
        if out and g <= out[-1][0]:
            raise InputSyntaxError("generators in a word must strictly increase", line, col)
        out.append((g, e))
    return tuple(out)


def _split_lines(text: str) -> list[tuple[int, str]]:
    lines = []
    for n, raw in enumerate(text.splitlines(), start=1):
        for piece in raw.split(";"):
            piece = piece.split("#", 1)[0].strip()
            if piece:
                lines.append((n, piece))
    return lines


def parse_presentation(text: str, name: str = "", check: bool = True) -> PcPresentation:
    """Parse the line-oriented ``pgroup`` format and verify consistency."""
    lines = _split_lines(text)
    if lines and lines[0][1] == "pgroup":
        lines = lines[1:]
    p = m = None
    power: dict[int, Word] = {}
    comm: dict[tuple[int, int], Word] = {}
    for ln, body in lines:
        head, _, rest = body.partition(" ")
        rest = rest.strip()
        if head == "p":
            if p is not None or not rest.isdigit() or not is_prime(int(rest)):
                raise InputSyntaxError("expected 'p <prime>' once", ln, 1)
            p = int(rest)
        elif head == "gens":
            if p is None or m is not None or not rest.isdigit():
                raise InputSyntaxError("expected 'gens <m>' after p", ln, 1)
            m = int(rest)
        elif head in ("pow", "comm"):
            if p is None or m is None:
                raise InputSyntaxError("relations must follow p and gens", ln, 1)
            lhs, eq, rhs = rest.partition("=")
            if not eq:
                raise InputSyntaxError("missing '='", ln, len(head) + 2)
            col = body.index("=") + 2
            gens = lhs.split()
            try:
                idx = [int(re.fullmatch(r"g(\d+)", s).group(1)) - 1 for s in gens]
            except AttributeError:
                raise InputSyntaxError(f"bad generator list {lhs.strip()!r}", ln, len(head) + 2)
            if any(not 0 <= i < m for i in idx):
                raise InputSyntaxError("generator out of range", ln, len(head) + 2)
            word = _parse_word(rhs, p, m, ln, col)
            if head == "pow":
                if len(idx) != 1:
                    raise InputSyntaxError("pow takes one generator", ln, len(head) + 2)
                i = idx[0]
                if word and word[0][0] <= i:
                    raise InputSyntaxError(f"power word of g{i + 1} must use generators after g{i + 1}", ln, col)
                if i in power:
                    raise InputSyntaxError(f"duplicate pow line for g{i + 1}", ln, 1)
                power[i] = word
            else:
                if len(idx) != 2 or idx[0] <= idx[1]:
                    raise InputSyntaxError("comm takes g<j> g<i> with j > i", ln, len(head) + 2)
                key = (idx[0], idx[1])
                if key in comm:
                    raise InputSyntaxError("duplicate comm line", ln, 1)
                if word:
                    comm[key] = word
        else:
            raise InputSyntaxError(f"unknown directive {head!r}", ln, 1)
    if p is None or m is None:
        raise InputSyntaxError("missing p or gens line", 1, 1)
    pres = PcPresentation(p, m, tuple(power.get(i, ()) for i in range(m)), comm, name)
    if check:
        violation = consistency_check(pres)
        if violation is not None:
            raise InconsistentPresentation(violation)
    return pres


def format_presentation(pres: PcPresentation) -> str:
    def word(w: Word) -> str:
        return "*".join(f"g{g + 1}" + (f"^{e}" if e > 1 else "") for g, e in w) or "1"

    lines = ["pgroup", f"p {pres.p}", f"gens {pres.m}"]
    lines += [f"pow g{i + 1} = {word(w)}" for i, w in enumerate(pres.power_words) if w]
    lines += [f"comm g{j + 1} g{i + 1} = {word(w)}" for (j, i), w in sorted(pres.comm_words.items()) if w]
    return "\n".join(lines) + "\n"


def consistency_check(pres: PcPresentation) -> str | None:
    """Return a description of the first failed consistency test, or None."""
    p, m = pres.p, pres.m
    for i, w in enumerate(pres.power_words):
        if any(g <= i for g, _ in w):
            return f"power word of g{i + 1} involves a generator not after g{i + 1}"
    for (j, i), w in pres.comm_words.items():
        if any(g <= j for g, _ in w):
            return f"commutator [g{j + 1}, g{i + 1}] involves a generator not after g{j + 1}"
    gen = pres.generator
    mul = pres.multiply

    def pw(x, e):
        r = pres.identity()
        for _ in range(e):
            r = mul(r, x)
        return r

    try:
        for k in range(m):
            for j in range(k):
                for i in range(j):
                    lhs = mul(mul(gen(k), gen(j)), gen(i))
                    rhs = mul(gen(k), mul(gen(j), gen(i)))
                    if lhs != rhs:
                        return f"associativity fails for (g{k + 1} g{j + 1}) g{i + 1}"
        for j in range(m):
            for i in range(j):
                if mul(pw(gen(j), p), gen(i)) != mul(pw(gen(j), p - 1), mul(gen(j), gen(i))):
                    return f"g{j + 1}^{p} g{i + 1} test fails"
                if mul(gen(j), pw(gen(i), p)) != mul(mul(gen(j), gen(i)), pw(gen(i), p - 1)):
                    return f"g{j + 1} g{i + 1}^{p} test fails"
        for i in range(m):
            if mul(pw(gen(i), p), gen(i)) != mul(gen(i), pw(gen(i), p)):
                return f"g{i + 1}^{p + 1} test fails"
    except CollectionDiverged:
        return "collection diverged"
    return None


# -- classes --------------------------------------------------------------------------

@dataclass
class ConjugacyClass:
    rep: tuple[int, ...]
    size: int
    power: int | None  # index of the class of rep^p, None when rep^p = 1
    height: int | None  # None for the trivial class


@dataclass
class ClassData:
    classes: list[ConjugacyClass]
    labels: np.ndarray = field(repr=False)  # element index -> class index

    def __len__(self) -> int:
        return len(self.classes)

    @property
    def power_map(self) -> list[int | None]:
        return [c.power for c in self.classes]

    @property
    def heights(self) -> list[int | None]:
        return [c.height for c in self.classes]


def _permutations(pres: PcPresentation, elems, maps) -> list[np.ndarray]:
    return [np.array([pres.index(f(x)) for x in elems], dtype=np.int64) for f in maps]


def _orbits(n: int, perms: list[np.ndarray]) -> np.ndarray:
    src = np.concatenate([np.arange(n)] * len(perms)) if perms else np.arange(0)
    dst = np.concatenate(perms) if perms else np.arange(0)
    graph = coo_matrix((np.ones(len(src)), (src, dst)), shape=(n, n))
    _, labels = connected_components(graph, directed=True, connection="weak")
    return labels


def conjugacy_classes(pres: PcPresentation, max_order: int = MAX_ORDER) -> ClassData:
    pres.check_guard(max_order)
    elems = pres.elements()
    n = len(elems)
    gens = [pres.generator(i) for i in range(pres.m)]
    perms = _permutations(pres, elems, [lambda x, g=g: pres.conjugate(x, g) for g in gens])
    raw = _orbits(n, perms)
    # relabel classes by their minimal member (= representative)
    first = {}
    for idx, lab in enumerate(raw):
        first.setdefault(int(lab), idx)
    order = sorted(first, key=first.get)
    relabel = {lab: k for k, lab in enumerate(order)}
    labels = np.array([relabel[int(lab)] for lab in raw], dtype=np.int64)
    sizes = np.bincount(labels, minlength=len(order))
    power_perm = _permutations(pres, elems, [lambda x: pres.power(x, pres.p)])[0]
    # layers pi_i = {x^(p^i)}
    layer = np.ones(n, dtype=bool)
    height = np.full(n, -1, dtype=np.int64)
    i = 0
    while True:
        height[layer] = i
        nxt = np.zeros(n, dtype=bool)
        nxt[power_perm[layer]] = True
        if nxt.sum() == layer.sum():
            break
        layer = nxt
        i += 1
    classes = []
    for k, lab in enumerate(order):
        rep_idx = first[lab]
        rep = elems[rep_idx]
        if rep_idx == 0:
            classes.append(ConjugacyClass(rep, int(sizes[k]), None, None))
            continue
        pw = int(power_perm[rep_idx])
        classes.append(ConjugacyClass(rep, int(sizes[k]), None if pw == 0 else int(labels[pw]),
                                      int(height[rep_idx])))
    return ClassData(classes, labels)


def element_order(pres: PcPresentation, x: Sequence[int]) -> int:
    order, y = 1, tuple(x)
    while any(y):
        y = pres.power(y, pres.p)
        order *= pres.p
    return order


def group_exponent(pres: PcPresentation, classes: ClassData | None = None,
                   max_order: int = MAX_ORDER) -> int:
    classes = classes or conjugacy_classes(pres, max_order)
    return max(element_order(pres, c.rep) for c in classes.classes)


def abelianization_of_group(pres: PcPresentation) -> AbelianGroup:
    rows = []
    for i, w in enumerate(pres.power_words):
        row = [-e for e in pres.word_to_exps(w)]
        row[i] += pres.p
        rows.append(row)
    for w in pres.comm_words.values():
        if w:
            rows.append(pres.word_to_exps(w))
    return cokernel(rows, pres.m)


# -- built-in library -----------------------------------------------------------

BUILTIN_SOURCES = {
    "c2": "pgroup\np 2\ngens 1\n",
    "c4": "pgroup\np 2\ngens 2\npow g1 = g2\n",
    "c2xc2": "pgroup\np 2\ngens 2\n",
    "c8": "pgroup\np 2\ngens 3\npow g1 = g2\npow g2 = g3\n",
    "d8": "pgroup\np 2\ngens 3\npow g2 = g3\ncomm g2 g1 = g3\n",
    "q8": "pgroup\np 2\ngens 3\npow g1 = g3\npow g2 = g3\ncomm g2 g1 = g3\n",
    "heis3": "pgroup\np 3\ngens 3\ncomm g2 g1 = g3\n",
    "jm14_f39": (
        "pgroup\np 2\ngens 7\n"
        "pow g1 = g4\npow g2 = g5\n"
        "comm g2 g1 = g3\ncomm g3 g1 = g6\ncomm g3 g2 = g7\n"
        "comm g4 g2 = g6\ncomm g5 g1 = g7\n"
    ),
}


def builtin(name: str) -> PcPresentation:
    try:
        src = BUILTIN_SOURCES[name]
    except KeyError:
        raise UnknownBuiltin(f"unknown builtin group {name!r}; choose from {sorted(BUILTIN_SOURCES)}")
    return parse_presentation(src, name=name)
