"""Deterministic property suites behind ``b0units selftest``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .abelian import integer_det, matmul, smith_normal_form
from .fakedegree import coadjoint_profile
from .invariants import Session, kernel_f
from .nilalgebra import augmentation_ideal, heisenberg_algebra, zero_algebra
from .pcgroup import PcPresentation, builtin
from .smallfield import make_field
from .unitgroup import unit_pcp


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def check_snf(rng: np.random.Generator, count: int = 1000) -> CheckResult:
    for t in range(count):
        r, c = (int(x) for x in rng.integers(1, 6, size=2))
        M = rng.integers(-6, 7, size=(r, c)).tolist()
        S, U, V, Vinv = smith_normal_form(M)
        if matmul(matmul(U, M), V) != S:
            return CheckResult("snf", False, f"U M V != S for matrix {t}")
        diag = [S[i][i] for i in range(min(r, c))]
        if any(S[i][j] for i in range(r) for j in range(c) if i != j):
            return CheckResult("snf", False, f"off-diagonal entry in matrix {t}")
        nz = [d for d in diag if d]
        if any(d < 0 for d in diag) or any(b % a for a, b in zip(nz, nz[1:])) \
                or diag != nz + [0] * (len(diag) - len(nz)):
            return CheckResult("snf", False, f"divisibility chain broken in matrix {t}")
        if abs(integer_det(U)) != 1 or abs(integer_det(V)) != 1:
            return CheckResult("snf", False, f"transform not unimodular in matrix {t}")
        if matmul(V, Vinv) != [[int(i == j) for j in range(c)] for i in range(c)]:
            return CheckResult("snf", False, f"Vinv is not the inverse of V in matrix {t}")
    return CheckResult("snf", True, f"{count} random matrices")


def _random_element(pres: PcPresentation, rng) -> tuple[int, ...]:
    return tuple(int(x) for x in rng.integers(0, pres.p, size=pres.m))


def check_collection(rng, names, max_order: int, trials: int = 30) -> CheckResult:
    for name in names:
        pres = builtin(name)
        pres.check_guard(max_order)
        for _ in range(trials):
            x, y, z = (_random_element(pres, rng) for _ in range(3))
            if pres.multiply(x, pres.inverse(x)) != pres.identity():
                return CheckResult("collection", False, f"{name}: x * x^-1 != 1")
            if pres.multiply(pres.multiply(x, y), z) != pres.multiply(x, pres.multiply(y, z)):
                return CheckResult("collection", False, f"{name}: associativity fails")
            word = [(g, e) for g, e in enumerate(x) if e]
            if pres.collect(word) != x:
                return CheckResult("collection", False, f"{name}: normal word does not round-trip")
    return CheckResult("collection", True, f"{len(names)} presentations, {trials} triples each")


def _small_algebras(max_order: int):
    F2, F3, F4 = make_field(2, 1), make_field(3, 1), make_field(2, 2)
    for name, F in [("c4", F2), ("d8", F2), ("q8", F2), ("d8", F4), ("heis3", F3)]:
        pres = builtin(name)
        pres.check_guard(max_order)
        yield f"I({name}, F{F.q})", augmentation_ideal(pres, F)
    yield "heisenberg/F3", heisenberg_algebra(F3)
    yield "zero(3)/F4", zero_algebra(F4, 3)


def check_sift(rng, max_order: int, max_gens: int, trials: int = 200) -> CheckResult:
    for label, A in _small_algebras(max_order):
        pcp = unit_pcp(A, max_gens)
        E = rng.integers(0, A.p, size=(trials, pcp.N))
        if not np.array_equal(pcp.sift(pcp.rebuild(E)), E):
            return CheckResult("sift_rebuild", False, f"{label}: sift(rebuild(e)) != e")
        pres = pcp.to_presentation()
        for _ in range(20):
            a, b = rng.integers(0, A.p, size=(2, pcp.N))
            prod = A.unit_multiply(pcp.rebuild(a), pcp.rebuild(b))
            if tuple(int(x) for x in pcp.sift(prod)) != pres.multiply(tuple(a), tuple(b)):
                return CheckResult("sift_rebuild", False, f"{label}: collection disagrees with the algebra")
    return CheckResult("sift_rebuild", True, "round trips and collection agree")


def check_embedding_choice(max_order: int, max_gens: int, names) -> CheckResult:
    for name, q, m in names:
        pres = builtin(name)
        pres.check_guard(max_order)
        s = Session(pres, max_order=max_order, max_generators=max_gens)
        k0 = kernel_f(pres, q, m, choice=0, session=s).kernel
        k1 = kernel_f(pres, q, m, choice=1, session=s).kernel
        if not k0.is_isomorphic(k1):
            return CheckResult("embedding_choice", False, f"{name}: {k0} vs {k1}")
    return CheckResult("embedding_choice", True, ", ".join(f"{n} q={q} m={m}" for n, q, m in names))


def check_orbits(max_order: int) -> CheckResult:
    F2, F3, F9 = make_field(2, 1), make_field(3, 1), make_field(3, 2)
    cases = [("heisenberg/F2", heisenberg_algebra(F2)), ("heisenberg/F3", heisenberg_algebra(F3)),
             ("heisenberg/F9", heisenberg_algebra(F9)), ("zero(4)/F3", zero_algebra(F3, 4))]
    for name in ("c4", "d8", "q8"):
        pres = builtin(name)
        pres.check_guard(max_order)
        cases.append((f"I({name}, F2)", augmentation_ideal(pres, F2)))
    for label, A in cases:
        bad = coadjoint_profile(A).violations(A.dim)
        if bad:
            return CheckResult("orbit_invariants", False, f"{label}: {bad[0]}")
    return CheckResult("orbit_invariants", True, f"{len(cases)} algebras")


def run_selftest(seed: int = 0, max_order: int = 2 ** 20, max_gens: int = 512,
                 quick: bool = False) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    names = ["c2", "c4", "c2xc2", "c8", "d8", "q8", "heis3", "jm14_f39"]
    # embeddings out of a prime field are unique, so only q = p^n with n > 1 counts
    emb_cases = [("d8", 4, 2), ("q8", 4, 2), ("heis3", 9, 2)] + ([] if quick else [("jm14_f39", 4, 2)])
    suites: list[Callable[[], CheckResult]] = [
        lambda: check_snf(rng),
        lambda: check_collection(rng, names, max_order),
        lambda: check_sift(rng, max_order, max_gens),
        lambda: check_embedding_choice(max_order, max_gens, emb_cases),
        lambda: check_orbits(max_order),
    ]
    return [suite() for suite in suites]
