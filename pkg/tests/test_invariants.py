import pytest

from b0units.abelian import AbelianGroup
from b0units.invariants import (Session, bogomolov, class_layers, is_kth_power, kernel_f,
                                layer_sizes, main_theorem_report, mq_layer_check, mq_structure)
from b0units.pcgroup import builtin, conjugacy_classes

from conftest import shared_session

SMALL = ["c2", "c4", "c2xc2", "c8", "d8", "q8"]


@pytest.mark.parametrize("name,factors", [("c4", (2, 4)), ("c2xc2", (2, 2, 2)), ("c2", (2,)),
                                          ("c8", (2, 2, 4, 8))])
def test_mq_examples(name, factors):
    assert mq_structure(builtin(name), 2).factors == factors


def test_mq_c4_by_hand():
    # classes a=[g], b=[g^3], c=[g^2]: 2a = c, 2b = c, 2c = 0, giving C4 x C2
    assert mq_structure(builtin("c4"), 2).is_isomorphic(AbelianGroup((2, 4)))


def test_mq_jm14(jm14):
    assert mq_structure(jm14.pres, 2, jm14).factors == (2,) * 13 + (4,) * 6


@pytest.mark.parametrize("name", SMALL + ["heis3"])
def test_mq_order_and_layers(name):
    s = shared_session(name)
    p = s.pres.p
    for q in (p, p * p):
        M = mq_structure(s.pres, q, s)
        assert M.order() == q ** (s.k - 1)
        for observed, expected in mq_layer_check(s.pres, q, s):
            assert observed == expected


def test_layer_helpers():
    assert layer_sizes(AbelianGroup((2, 4, 8)), 2) == [8, 4, 2]
    cls = conjugacy_classes(builtin("c8"))
    assert class_layers(cls) == [4, 2, 1]


@pytest.mark.parametrize("name,q,b0", [("c2", 2, 1), ("q8", 2, 1), ("d8", 2, 1), ("c4", 4, 1)])
def test_main_theorem_small(name, q, b0):
    s = shared_session(name)
    rep = main_theorem_report(s.pres, q, s)
    assert rep.inferred_b0_order == b0
    assert rep.unit_ab_order == q ** (s.k - 1) * b0


def test_main_theorem_jm14(jm14):
    rep = main_theorem_report(jm14.pres, 2, jm14)
    assert (rep.k, rep.unit_ab_order, rep.q_pow_k_minus_1, rep.inferred_b0_order) == (26, 2 ** 26, 2 ** 25, 2)


def test_kernel_examples(jm14):
    c4 = shared_session("c4")
    assert kernel_f(c4.pres, 2, 1, session=c4).kernel.order() == 1
    assert kernel_f(c4.pres, 2, 2, session=c4).kernel.order() == 1
    assert kernel_f(jm14.pres, 2, 1, session=jm14).kernel.order() == 1
    assert kernel_f(jm14.pres, 2, 2, session=jm14).kernel.factors == (2,)


def test_kernel_m_must_be_positive():
    with pytest.raises(ValueError):
        kernel_f(builtin("c2"), 2, 0)


@pytest.mark.parametrize("name,q", [("d8", 2), ("heis3", 3), ("q8", 2)])
def test_bogomolov_trivial(name, q):
    s = shared_session(name)
    rep = bogomolov(s.pres, q, session=s)
    assert rep.b0_order == 1 and rep.b0_exponent == 1
    assert rep.check() == []


def test_bogomolov_jm14(jm14):
    rep = bogomolov(jm14.pres, 2, session=jm14)
    assert rep.b0_order == 2 and rep.b0_structure.factors == (2,) and rep.b0_exponent == 2
    assert rep.kernel_orders == {1: 1, 2: 2}
    assert rep.pi_ab.factors == (4, 4)
    assert rep.check() == []


def test_is_kth_power():
    G = AbelianGroup((2, 4, 8))
    assert is_kth_power(G, [0, 0, 4], 4)
    assert not is_kth_power(G, [0, 0, 2], 4)
    assert is_kth_power(G, [0, 0, 0], 4)
    assert not is_kth_power(G, [1, 0, 0], 2)


def test_session_caches():
    s = Session(builtin("d8"))
    from b0units.smallfield import make_field
    F = make_field(2, 1)
    assert s.algebra(F) is s.algebra(F)
    assert s.abelianization(F) is s.abelianization(F)
    assert s.k == 5
