import itertools
from collections import Counter

import numpy as np
import pytest

from b0units.errors import InconsistentPresentation, InputSyntaxError, OrderGuardExceeded, UnknownBuiltin
from b0units.pcgroup import (BUILTIN_SOURCES, abelianization_of_group, builtin, conjugacy_classes,
                             consistency_check, element_order, format_presentation, group_exponent,
                             parse_presentation)

D8_SRC = "pgroup\np 2\ngens 3\npow g2 = g3\ncomm g2 g1 = g3\n"


def _brute_classes(pres):
    elems = pres.elements()
    seen, count = set(), 0
    for x in elems:
        if x in seen:
            continue
        count += 1
        seen |= {pres.conjugate(x, g) for g in elems}
    return count


def _brute_orders(pres):
    return Counter(element_order(pres, x) for x in pres.elements())


def test_parse_examples():
    c4 = parse_presentation("p 2\ngens 2\npow g1 = g2\n")
    assert c4.m == 2 and c4.order == 4
    assert builtin("jm14_f39").order == 128
    with pytest.raises(InputSyntaxError):
        parse_presentation("p 2\ngens 2\npow g1 = g1\n")


@pytest.mark.parametrize("text", [
    "gens 2\n",
    "p 4\ngens 1\n",
    "p 2\ngens 2\npow g3 = g1\n",
    "p 2\ngens 2\ncomm g1 g2 = g1\n",
    "p 2\ngens 2\nfoo g1\n",
    "p 2\ngens 2\npow g1 g2\n",
])
def test_parse_errors(text):
    with pytest.raises(InputSyntaxError):
        parse_presentation(text)


def test_syntax_error_position():
    with pytest.raises(InputSyntaxError) as exc:
        parse_presentation("p 2\ngens 2\n\npow g1 = g1\n")
    assert exc.value.line == 4


def test_inconsistent_presentation():
    bad = "pgroup\np 2\ngens 3\npow g2 = g3\ncomm g2 g1 = g2\n"
    with pytest.raises(InconsistentPresentation):
        parse_presentation(bad)
    assert consistency_check(parse_presentation(bad, check=False)) is not None


@pytest.mark.parametrize("name", sorted(BUILTIN_SOURCES))
def test_builtins_consistent_and_round_trip(name):
    pres = builtin(name)
    assert consistency_check(pres) is None
    again = parse_presentation(format_presentation(pres))
    assert again.power_words == pres.power_words and again.comm_words == pres.comm_words


def test_collect_examples():
    d8 = builtin("d8")
    assert d8.collect([(1, 1), (0, 1)]) == (1, 1, 1)
    assert d8.collect([]) == (0, 0, 0)
    assert builtin("c4").collect([(0, 1), (0, 1)]) == (0, 1)


def test_d8_against_permutation_model():
    # g1 = reflection, g2 = rotation of a square; g3 = g2^2
    rot, ref = (1, 2, 3, 0), (0, 3, 2, 1)

    def mul(a, b):  # apply a then b, matching left-to-right words
        return tuple(b[a[i]] for i in range(4))

    def ident():
        return (0, 1, 2, 3)

    def realize(e):
        out = ident()
        for g, k in zip([ref, rot, mul(rot, rot)], e):
            for _ in range(k):
                out = mul(out, g)
        return out

    d8 = builtin("d8")
    elems = d8.elements()
    images = {realize(x) for x in elems}
    assert len(images) == 8
    for x, y in itertools.product(elems, repeat=2):
        assert realize(d8.multiply(x, y)) == mul(realize(x), realize(y))


def test_associativity_exhaustive_d8():
    d8 = builtin("d8")
    E = d8.elements()
    for x, y, z in itertools.product(E, repeat=3):
        assert d8.multiply(d8.multiply(x, y), z) == d8.multiply(x, d8.multiply(y, z))


@pytest.mark.parametrize("name,k", [("c8", 8), ("d8", 5), ("q8", 5), ("c2xc2", 4), ("heis3", 11),
                                    ("jm14_f39", 26)])
def test_class_counts(name, k):
    pres = builtin(name)
    cls = conjugacy_classes(pres)
    assert len(cls) == k
    assert len(cls) == _brute_classes(pres)
    assert sum(c.size for c in cls.classes) == pres.order


def test_power_map_and_heights():
    pres = builtin("c8")
    cls = conjugacy_classes(pres)
    elems = pres.elements()
    for c in cls.classes:
        sq = pres.power(c.rep, 2)
        if c.power is None:
            assert sq == pres.identity()
        else:
            assert cls.labels[pres.index(sq)] == c.power
    # heights in C8: generator has height 0, its square 1, the involution 2
    assert sorted(h for h in cls.heights if h is not None) == [0, 0, 0, 0, 1, 1, 2]


def test_orders_and_exponent():
    assert element_order(builtin("c4"), (1, 0)) == 4
    assert group_exponent(builtin("d8")) == 4
    # brute-force orders over all 128 elements: exponent 4
    orders = _brute_orders(builtin("jm14_f39"))
    assert max(orders) == 4
    assert group_exponent(builtin("jm14_f39")) == 4


def test_q8_has_one_involution():
    assert _brute_orders(builtin("q8"))[2] == 1


@pytest.mark.parametrize("name,factors", [("jm14_f39", (4, 4)), ("q8", (2, 2)), ("c4", (4,)),
                                          ("d8", (2, 2)), ("heis3", (3, 3))])
def test_abelianization(name, factors):
    pres = builtin(name)
    assert abelianization_of_group(pres).factors == factors
    # oracle: |pi_ab| = |pi| / |[pi, pi]|
    E = pres.elements()
    derived = {pres.identity()}
    frontier = {pres.commutator(x, y) for x in E for y in E}
    while frontier - derived:
        derived |= frontier
        frontier = {pres.multiply(a, b) for a in derived for b in derived}
    assert pres.order // len(derived) == abelianization_of_group(pres).order()


def test_builtin_examples():
    jm = builtin("jm14_f39")
    assert (jm.p, jm.m) == (2, 7)
    assert jm.power_words[0] == ((3, 1),)
    assert builtin("c2").m == 1
    with pytest.raises(UnknownBuiltin):
        builtin("nope")


def test_order_guard():
    with pytest.raises(OrderGuardExceeded):
        conjugacy_classes(builtin("jm14_f39"), max_order=64)


def test_inverse_and_power():
    pres = builtin("heis3")
    rng = np.random.default_rng(0)
    for _ in range(50):
        x = tuple(int(v) for v in rng.integers(0, 3, size=3))
        assert pres.multiply(x, pres.inverse(x)) == pres.identity()
        assert pres.power(x, 3) == pres.identity()
