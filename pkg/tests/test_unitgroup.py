import itertools

import numpy as np
import pytest

from b0units.errors import FieldMismatch, GeneratorGuardExceeded
from b0units.nilalgebra import augmentation_ideal, extend_scalars, heisenberg_algebra, zero_algebra
from b0units.pcgroup import abelianization_of_group, builtin, consistency_check
from b0units.smallfield import find_embedding, identity_embedding, make_field
from b0units.unitgroup import (inclusion_ab_map, project_unit, rebuild, sift, unit_abelianization,
                               unit_pcp)

F2, F3, F4, F9 = make_field(2, 1), make_field(3, 1), make_field(2, 2), make_field(3, 2)

CASES = [("c4", F2), ("d8", F2), ("q8", F4), ("heis3", F3), ("d8", F4)]


def _algebra(name, F):
    return augmentation_ideal(builtin(name), F)


@pytest.mark.parametrize("name,F", CASES)
def test_sift_rebuild_round_trip(name, F):
    A = _algebra(name, F)
    pcp = unit_pcp(A)
    rng = np.random.default_rng(0)
    E = rng.integers(0, F.p, size=(200, pcp.N))
    assert np.array_equal(pcp.sift(pcp.rebuild(E)), E)
    assert not sift(A, pcp, A.zero()).any()


@pytest.mark.parametrize("name,F", CASES)
def test_rebuild_is_ordered_product(name, F):
    A = _algebra(name, F)
    pcp = unit_pcp(A)
    rng = np.random.default_rng(1)
    for _ in range(20):
        e = rng.integers(0, F.p, size=pcp.N)
        acc = A.zero()
        for g, k in enumerate(e):
            for _ in range(int(k)):
                acc = A.unit_multiply(acc, pcp.gens[g])
        assert np.array_equal(rebuild(pcp, e), acc % F.p)


def test_c4_pcp():
    A = _algebra("c4", F2)
    pcp = unit_pcp(A)
    assert pcp.N == 3
    pres = pcp.to_presentation()
    assert pres.order == 8
    assert pres.comm_words == {}
    # x1^2 is a nontrivial word, x2 and x3 square to 1
    assert pcp.power_words[0].any() and not pcp.power_words[1:].any()
    assert abelianization_of_group(pres).factors == (2, 4)


def test_sift_example_c4():
    pres = builtin("c4")
    A = augmentation_ideal(pres, F2)
    pcp = unit_pcp(A)
    g = A.group_element(pres.generator(0))
    u = (g + A.multiply(g, g)) % 2
    e = pcp.sift(u)
    assert np.array_equal(pcp.rebuild(e), u)


@pytest.mark.parametrize("name,F", [("d8", F2), ("heis3", F3), ("q8", F4)])
def test_collection_agrees_with_algebra(name, F):
    A = _algebra(name, F)
    pcp = unit_pcp(A)
    pres = pcp.to_presentation()
    assert pres.order == F.q ** A.dim
    rng = np.random.default_rng(2)
    for _ in range(500 if F.q ** A.dim <= 2 ** 14 else 100):
        a, b = rng.integers(0, F.p, size=(2, pcp.N))
        prod = A.unit_multiply(pcp.rebuild(a), pcp.rebuild(b))
        assert tuple(int(x) for x in pcp.sift(prod)) == pres.multiply(tuple(a), tuple(b))


def test_pcp_consistency_small():
    pres = unit_pcp(_algebra("d8", F2)).to_presentation()
    assert consistency_check(pres) is None


@pytest.mark.parametrize("name,F", [("d8", F2), ("heis3", F3), ("q8", F4)])
def test_commutator_depth(name, F):
    pcp = unit_pcp(_algebra(name, F))
    lv = pcp.level_of
    for pairs, words in pcp.iter_pairs():
        for (j, i), w in zip(pairs, words):
            support = np.flatnonzero(w)
            assert (lv[support] >= lv[j] + lv[i]).all()
    for g, w in enumerate(pcp.power_words):
        # relation words only involve later generators
        assert not w[: g + 1].any()


@pytest.mark.parametrize("name,factors", [("c2", (2,)), ("c4", (2, 4)), ("c2xc2", (2, 2, 2))])
def test_unit_abelianization_small(name, factors):
    assert unit_abelianization(_algebra(name, F2)).group.factors == factors


def test_abelianization_of_abelian_unit_group_is_whole_group():
    A = zero_algebra(F9, 3)
    ab = unit_abelianization(A)
    assert ab.group.order() == 9 ** 3


def test_project_unit():
    A = _algebra("q8", F4)
    ab = unit_abelianization(A)
    assert not project_unit(A, ab, A.zero()).any()
    rng = np.random.default_rng(3)
    for _ in range(20):
        a, b = A.random_element(rng), A.random_element(rng)
        assert not project_unit(A, ab, A.unit_commutator(a, b)).any()
    # projection is a homomorphism
    f = np.array(ab.group.factors)
    for _ in range(20):
        a, b = A.random_element(rng), A.random_element(rng)
        lhs = project_unit(A, ab, A.unit_multiply(a, b))
        rhs = (project_unit(A, ab, a) + project_unit(A, ab, b)) % f
        assert np.array_equal(lhs, rhs)


def test_inclusion_identity():
    A = _algebra("d8", F2)
    ab = unit_abelianization(A)
    T = inclusion_ab_map(A, A, ab, ab, identity_embedding(F2))
    f = np.array(ab.group.factors)
    assert np.array_equal(T % f[:, None], np.eye(len(f), dtype=np.int64))


def test_inclusion_c2_injective():
    pres = builtin("c2")
    A2, A4 = augmentation_ideal(pres, F2), augmentation_ideal(pres, F4)
    ab2, ab4 = unit_abelianization(A2), unit_abelianization(A4)
    T = inclusion_ab_map(A2, A4, ab2, ab4, find_embedding(F2, F4))
    img = T[:, 0] % np.array(ab4.group.factors)
    assert img.any()
    # oracle: g = 1 + (g-1) is not a square among the 4 units of 1 + I over F_4
    g = A4.group_element(pres.generator(0))
    squares = {tuple(A4.unit_multiply(np.array([c]), np.array([c])).ravel())
               for c in itertools.product(range(2), repeat=2)}
    assert tuple(g.ravel()) not in squares


def test_inclusion_field_mismatch():
    A = _algebra("c4", F2)
    ab = unit_abelianization(A)
    with pytest.raises(FieldMismatch):
        inclusion_ab_map(A, A, ab, ab, find_embedding(F2, F4))


def test_generator_guard():
    with pytest.raises(GeneratorGuardExceeded):
        unit_pcp(_algebra("d8", F4), max_generators=10)


def test_heisenberg_unit_group():
    A = heisenberg_algebra(F3)
    pcp = unit_pcp(A)
    assert pcp.N == 3
    assert unit_abelianization(A).group.factors == (3, 3)


def test_jm14_unit_abelianization(jm14):
    ab = jm14.abelianization(F2)
    assert ab.pcp.N == 127
    assert ab.group.factors == (2,) * 13 + (4,) * 5 + (8,)
