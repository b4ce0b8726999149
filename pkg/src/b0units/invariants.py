"""Group invariants read off the unit group of F_q[pi].

``M_q`` is presented by class generators; the inclusion kernels ``ker f_m``
come from comparing the abelianized unit groups over F_q and F_{q^m}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .abelian import AbelianGroup, cokernel, hom_kernel
from .errors import FieldMismatch, InternalInconsistency, NonIntegralRatio
from .nilalgebra import AugmentationIdeal, augmentation_ideal
from .pcgroup import (ClassData, PcPresentation, abelianization_of_group, conjugacy_classes,
                      group_exponent)
from .smallfield import FieldDesc, field_for_q, find_embedding, make_field, make_galois_ring
from .unitgroup import (AbelianizationData, inclusion_ab_map, project_unit,
                        unit_abelianization)


class Session:
    """Caches classes, algebras and abelianizations for one group."""

    def __init__(self, pres: PcPresentation, max_order: int | None = None,
                 max_generators: int | None = None):
        self.pres = pres
        self.max_order = max_order
        self.max_generators = max_generators
        self._classes: ClassData | None = None
        self._algebras: dict[FieldDesc, AugmentationIdeal] = {}
        self._abs: dict[FieldDesc, AbelianizationData] = {}

    @property
    def classes(self) -> ClassData:
        if self._classes is None:
            kw = {"max_order": self.max_order} if self.max_order else {}
            self._classes = conjugacy_classes(self.pres, **kw)
        return self._classes

    @property
    def k(self) -> int:
        return len(self.classes)

    def algebra(self, F: FieldDesc) -> AugmentationIdeal:
        if F not in self._algebras:
            if self.max_order:
                self.pres.check_guard(self.max_order)
            self._algebras[F] = augmentation_ideal(self.pres, F)
        return self._algebras[F]

    def abelianization(self, F: FieldDesc) -> AbelianizationData:
        if F not in self._abs:
            kw = {"max_generators": self.max_generators} if self.max_generators else {}
            self._abs[F] = unit_abelianization(self.algebra(F), **kw)
        return self._abs[F]


def _session(pres, session):
    return session if session is not None else Session(pres)


# -- M_q --------------------------------------------------------------------------

def mq_structure(pres: PcPresentation, q: int, session: Session | None = None) -> AbelianGroup:
    s = _session(pres, session)
    F = field_for_q(q)
    if F.p != pres.p:
        raise FieldMismatch(f"q = {q} is not a power of {pres.p}")
    n = F.n
    nontrivial = [c for c, cl in enumerate(s.classes.classes) if cl.height is not None]
    if not nontrivial:
        return AbelianGroup(())
    pos = {c: k for k, c in enumerate(nontrivial)}
    E = round(math.log(group_exponent(pres, s.classes), pres.p))
    a = make_galois_ring(pres.p, n, E).frob_matrix
    mod = pres.p ** E
    ncols = n * len(nontrivial)
    rows = []
    for c in nontrivial:
        t = s.classes.classes[c].power
        for j in range(n):
            row = [0] * ncols
            row[pos[c] * n + j] += pres.p
            if t is not None:
                for jp in range(n):
                    row[pos[t] * n + jp] -= int(a[j][jp]) % mod
            rows.append(row)
            bound = [0] * ncols
            bound[pos[c] * n + j] = mod
            rows.append(bound)
    return cokernel(rows, ncols)


def layer_sizes(group: AbelianGroup, p: int) -> list[int]:
    """|p^i M / p^(i+1) M| for i = 0, 1, ... while nonzero."""
    vals = [round(math.log(d, p)) for d in group.factors]
    top = max(vals, default=0)
    return [p ** sum(1 for v in vals if v > i) for i in range(top)]


def class_layers(classes: ClassData) -> list[int]:
    """|C_i|: number of nontrivial classes of height exactly i."""
    hs = [h for h in classes.heights if h is not None]
    return [hs.count(i) for i in range(max(hs) + 1)] if hs else []


def mq_layer_check(pres: PcPresentation, q: int, session: Session | None = None):
    """Pairs (observed layer size, q^|C_i|) for every i."""
    s = _session(pres, session)
    M = mq_structure(pres, q, s)
    obs = layer_sizes(M, pres.p)
    want = [q ** c for c in class_layers(s.classes)]
    width = max(len(obs), len(want))
    obs += [1] * (width - len(obs))
    want += [1] * (width - len(want))
    return list(zip(obs, want))


# -- main identity ----------------------------------------------------------------

@dataclass
class MainTheoremReport:
    k: int
    unit_ab: AbelianGroup
    unit_ab_order: int
    q_pow_k_minus_1: int
    inferred_b0_order: int


def _is_power_of(x: int, p: int) -> bool:
    while x > 1 and x % p == 0:
        x //= p
    return x == 1


def main_theorem_report(pres: PcPresentation, q: int, session: Session | None = None) -> MainTheoremReport:
    s = _session(pres, session)
    F = field_for_q(q)
    ab = s.abelianization(F).group
    order = ab.order()
    base = q ** (s.k - 1)
    if order % base or not _is_power_of(order // base, pres.p):
        raise NonIntegralRatio(f"|(1+I)_ab| = {order} is not q^(k-1) = {base} times a power of {pres.p}")
    return MainTheoremReport(s.k, ab, order, base, order // base)


# -- inclusion kernels --------------------------------------------------------------

@dataclass
class KernelResult:
    m: int
    kernel: AbelianGroup
    source: AbelianizationData
    target: AbelianizationData
    T: np.ndarray

    def contains(self, coords) -> bool:
        img = self.T @ np.asarray(coords, dtype=np.int64)
        f = np.asarray(self.target.group.factors, dtype=np.int64)
        return not np.any(img % f) if f.size else True


def kernel_f(pres: PcPresentation, q: int, m: int, choice: int = 0,
             session: Session | None = None) -> KernelResult:
    """Kernel of (1+I_{F_q})_ab -> (1+I_{F_{q^m}})_ab."""
    if m < 1:
        raise ValueError("extension degree m must be >= 1")
    s = _session(pres, session)
    Fq = field_for_q(q)
    Fl = make_field(Fq.p, Fq.n * m)
    emb = find_embedding(Fq, Fl, choice)
    ab_q = s.abelianization(Fq)
    A_q = s.algebra(Fq)
    A_l = s.algebra(Fl)
    ab_l = s.abelianization(Fl)
    T = inclusion_ab_map(A_q, A_l, ab_q, ab_l, emb)
    K = hom_kernel(ab_q.group, ab_l.group, T.tolist())
    return KernelResult(m, K, ab_q, ab_l, T)


def kernel_sweep(pres: PcPresentation, q: int, ms, choice: int = 0,
                 session: Session | None = None) -> dict[int, int]:
    """|ker f_m| for arbitrary degrees m (debug path; not only p-powers)."""
    s = _session(pres, session)
    return {m: kernel_f(pres, q, m, choice, s).kernel.order() for m in ms}


@dataclass
class BogomolovReport:
    group_name: str
    q: int
    k: int
    unit_ab: AbelianGroup
    mq: AbelianGroup
    b0_order: int
    b0_structure: AbelianGroup
    b0_exponent: int
    kernel_orders: dict[int, int] = field(default_factory=dict)
    pi_ab: AbelianGroup | None = None

    def check(self) -> list[str]:
        """Failed consistency statements (empty when all hold)."""
        bad = []
        if self.unit_ab.order() != self.b0_order * self.mq.order():
            bad.append("|unit_ab| != |B0| * |M_q|")
        if self.unit_ab.order() // self.b0_order != self.q ** (self.k - 1):
            bad.append("|unit_ab| / |B0| != q^(k-1)")
        if self.b0_structure.order() != self.b0_order:
            bad.append("B0 structure order mismatch")
        if self.b0_structure.exponent() != self.b0_exponent:
            bad.append("B0 exponent mismatch")
        if self.pi_ab is not None and (self.unit_ab.order() // self.b0_order) % self.pi_ab.order():
            bad.append("|pi_ab| does not divide |unit_ab| / |B0|")
        orders = [self.kernel_orders[m] for m in sorted(self.kernel_orders)]
        if any(b < a for a, b in zip(orders, orders[1:])):
            bad.append("kernel orders are not monotone")
        return bad


def bogomolov(pres: PcPresentation, q: int, choice: int = 0,
              session: Session | None = None) -> BogomolovReport:
    s = _session(pres, session)
    main = main_theorem_report(pres, q, s)
    b0 = main.inferred_b0_order
    p = pres.p
    cap = round(math.log(b0, p)) + 2
    kernel_orders: dict[int, int] = {}
    for t in range(cap + 1):
        m = p ** t
        res = kernel_f(pres, q, m, choice, s)
        order = res.kernel.order()
        kernel_orders[m] = order
        if order > b0:
            raise InternalInconsistency(f"|ker f_{m}| = {order} exceeds |B0| = {b0}")
        if order == b0:
            rep = BogomolovReport(pres.name, q, s.k, main.unit_ab, mq_structure(pres, q, s), b0,
                                  res.kernel, res.kernel.exponent(), kernel_orders,
                                  abelianization_of_group(pres))
            bad = rep.check()
            if bad:
                raise InternalInconsistency("; ".join(bad))
            return rep
    raise InternalInconsistency(f"kernel orders {kernel_orders} never reach |B0| = {b0}")


# -- the split-failure probe ----------------------------------------------------------

def group_ring_element(A: AugmentationIdeal, terms: dict[tuple[int, ...], int]) -> np.ndarray:
    """Coordinates of sum c_x x (augmentation must vanish) in the g-1 basis."""
    if sum(terms.values()) % A.p:
        raise ValueError("element does not lie in the augmentation ideal")
    u = A.zero()
    for x, c in terms.items():
        u = (u + c * A.group_element(x)) % A.p
    return u


def is_kth_power(group: AbelianGroup, coords, k: int) -> bool:
    """Whether the element lies in k*group (coordinatewise gcd test)."""
    return all(int(x) % gcd(k, d) == 0 for x, d in zip(coords, group.factors))


@dataclass
class ProbeResult:
    coords: list[int]
    nonzero: bool
    fourth_power: bool
    in_kernel: bool
    square_zero: bool


def split_failure_probe(pres: PcPresentation, q: int, m: int = 2, a=(6, 2, 4),
                        session: Session | None = None) -> ProbeResult:
    """Class of 1 + (1 - g_a)(g_b - g_c) (0-based generator indices a, b, c)."""
    s = _session(pres, session)
    F = field_for_q(q)
    A = s.algebra(F)
    ga, gb, gc = (pres.generator(i) for i in a)
    left = group_ring_element(A, {ga: -1, pres.identity(): 1})
    right = group_ring_element(A, {gb: 1, gc: -1})
    u = A.multiply(left, right)
    ab = s.abelianization(F)
    coords = [int(x) for x in project_unit(A, ab, u)]
    res = kernel_f(pres, q, m, session=s)
    return ProbeResult(coords, any(coords), is_kth_power(ab.group, coords, 4),
                       res.contains(coords), not A.multiply(u, u).any())
