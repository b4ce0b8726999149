"""Acceptance criteria, one test per criterion.

Run with ``pytest tests/test_acceptance.py``; the terminal summary lists a
PASS/FAIL line per criterion.  ``python3 tests/test_acceptance.py`` does the same.
"""

import functools
import sys

import numpy as np
import pytest

from b0units.fakedegree import brute_force_units, coadjoint_profile, fake_degree_report, fixed_point_count
from b0units.invariants import (bogomolov, kernel_f, main_theorem_report, mq_layer_check, mq_structure,
                                split_failure_probe)
from b0units.nilalgebra import heisenberg_algebra, lie_commutator_dim
from b0units.pcgroup import BUILTIN_SOURCES, abelianization_of_group, builtin, conjugacy_classes
from b0units.selftest import run_selftest
from b0units.smallfield import field_for_q, make_field
from b0units.unitgroup import unit_pcp

from conftest import ACCEPTANCE, shared_session

F2 = make_field(2, 1)
ALL = sorted(BUILTIN_SOURCES, key=lambda n: builtin(n).order)


def _fields(name):
    return (3, 9) if builtin(name).p == 3 else (2, 4)


def criterion(num, label):
    def wrap(fn):
        @functools.wraps(fn)
        def inner(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                ACCEPTANCE[num] = (False, label)
                raise
            ACCEPTANCE[num] = (True, label)
        return inner
    return wrap


@criterion(1, "jm14_f39 over F_2: k, pi_ab, (1+I)_ab, M_2, B0")
def test_c01_jm14_regression():
    s = shared_session("jm14_f39")
    assert s.k == 26
    assert abelianization_of_group(s.pres).factors == (4, 4)
    assert s.abelianization(F2).group.factors == (2,) * 13 + (4,) * 5 + (8,)
    assert mq_structure(s.pres, 2, s).factors == (2,) * 13 + (4,) * 6
    rep = bogomolov(s.pres, 2, session=s)
    assert rep.b0_order == 2 and rep.b0_structure.factors == (2,)


@criterion(2, "|(1+I)_ab| = q^(k-1) |B0| with B0 from kernel stabilization")
def test_c02_main_identity():
    for name in ALL:
        s = shared_session(name)
        assert s.pres.order <= 2 ** 7
        for q in _fields(name):
            main = main_theorem_report(s.pres, q, s)
            rep = bogomolov(s.pres, q, session=s)
            assert rep.b0_structure.order() == main.inferred_b0_order
            assert main.unit_ab_order == q ** (s.k - 1) * rep.b0_order
            expected = 2 if name == "jm14_f39" else 1
            assert rep.b0_order == expected, (name, q)


@criterion(3, "brute-force oracle agrees on ab orders and class counts (order <= 16)")
def test_c03_oracle():
    checked = 0
    for name in ALL:
        s = shared_session(name)
        if s.pres.order > 16 or s.pres.p != 2:
            continue
        A = s.algebra(F2)
        oracle = brute_force_units(A)
        assert oracle.ab_order == s.abelianization(F2).group.order()
        # classes of pi: orbit refinement vs direct conjugation of every element
        elems = s.pres.elements()
        seen, count = set(), 0
        for x in elems:
            if x not in seen:
                count += 1
                seen |= {s.pres.conjugate(x, g) for g in elems}
        assert s.k == count
        # classes of 1+I: pcgroup on the unit presentation vs brute-force orbits
        assert len(conjugacy_classes(unit_pcp(A).to_presentation())) == oracle.class_count
        checked += 1
    assert checked == 6


@criterion(4, "exponent criterion via ker f_m")
def test_c04_exponent():
    s = shared_session("jm14_f39")
    assert kernel_f(s.pres, 2, 1, session=s).kernel.order() == 1
    assert kernel_f(s.pres, 2, 2, session=s).kernel.order() == 2
    assert bogomolov(s.pres, 2, session=s).b0_exponent == 2
    for name in ALL:
        if name == "jm14_f39":
            continue
        t = shared_session(name)
        q = t.pres.p
        assert main_theorem_report(t.pres, q, t).inferred_b0_order == 1
        for m in (1, 2):
            assert kernel_f(t.pres, q, m, session=t).kernel.order() == 1, (name, m)


@criterion(5, "codim of [I, I]_L equals k - 1")
def test_c05_lie_codim():
    for name in ALL:
        s = shared_session(name)
        for q in _fields(name):
            A = s.algebra(field_for_q(q))
            dim, _ = lie_commutator_dim(A)
            assert A.dim - dim == s.k - 1, (name, q)


@criterion(6, "fake-degree report for I_F2(jm14_f39) is VIOLATED, 2^25 vs 2^26")
def test_c06_fake_degree_violation():
    s = shared_session("jm14_f39")
    rep = fake_degree_report(s.algebra(F2))
    assert rep.verdict == "VIOLATED"
    assert rep.fixed_points == 2 ** 25 and rep.ab_order == 2 ** 26


@criterion(7, "Heisenberg over F_3: profile, orbit count, fixed points")
def test_c07_heisenberg():
    A = heisenberg_algebra(make_field(3, 1))
    # J^3 = 0 = J^p
    assert A.nil_index == 3
    prof = coadjoint_profile(A)
    assert prof.fake_degrees == {1: 9, 3: 2}
    oracle = brute_force_units(A)
    assert oracle.group_order == 27
    assert prof.orbit_total == 11 == oracle.class_count
    assert fixed_point_count(A) == 9 == oracle.ab_order
    rep = fake_degree_report(A)
    assert rep.ab_order == 9 and rep.verdict == "CONSISTENT"


@criterion(8, "split-failure probe: nonzero 4th power in ker f_2")
def test_c08_split_probe():
    s = shared_session("jm14_f39")
    res = split_failure_probe(s.pres, 2, m=2, session=s)
    assert res.square_zero  # so exp(u) = 1 + u
    assert res.nonzero
    assert res.fourth_power
    assert res.in_kernel


@criterion(9, "M_q layer sizes equal q^|C_i| and |M_q| = q^(k-1)")
def test_c09_mq_layers():
    for name in ALL:
        s = shared_session(name)
        for q in _fields(name):
            assert mq_structure(s.pres, q, s).order() == q ** (s.k - 1)
            for observed, expected in mq_layer_check(s.pres, q, s):
                assert observed == expected, (name, q)


@criterion(10, "property suites pass under a fixed seed")
def test_c10_selftest():
    first = run_selftest(seed=0)
    assert [c.name for c in first] == ["snf", "collection", "sift_rebuild", "embedding_choice",
                                       "orbit_invariants"]
    for c in first:
        assert c.passed, f"{c.name}: {c.detail}"
    again = run_selftest(seed=0, quick=True)
    assert [(c.name, c.passed, c.detail) for c in again if c.name != "embedding_choice"] == \
        [(c.name, c.passed, c.detail) for c in first if c.name != "embedding_choice"]


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
