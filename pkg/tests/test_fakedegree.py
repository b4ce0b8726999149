import itertools
from collections import Counter

import numpy as np
import pytest

from b0units.errors import OracleGuardExceeded, ProfileGuardExceeded
from b0units.fakedegree import brute_force_units, coadjoint_profile, fake_degree_report, fixed_point_count
from b0units.nilalgebra import augmentation_ideal, heisenberg_algebra, zero_algebra
from b0units.pcgroup import builtin, conjugacy_classes
from b0units.smallfield import make_field

F2, F3, F4 = make_field(2, 1), make_field(3, 1), make_field(2, 2)


def _naive_orbits(A):
    """Coadjoint orbit sizes by acting with every unit on every functional (prime fields)."""
    p, d = A.field.p, A.dim
    units = [np.array(c).reshape(d, 1) for c in itertools.product(range(p), repeat=d)]
    funcs = list(itertools.product(range(p), repeat=d))
    conj = []
    for h in units:
        hinv = A.unit_inverse(h)
        cols = []
        for k in range(d):
            e = A.basis_element(k)
            # (1+h)^-1 (1+e) (1+h) - 1
            y = A.unit_multiply(A.unit_multiply(hinv, e), h)
            cols.append(np.asarray(y).reshape(d))
        conj.append(np.array(cols).T % p)
    sizes = Counter()
    for lam in funcs:
        orbit = {tuple(int(x) for x in (np.array(lam) @ C) % p) for C in conj}
        sizes[len(orbit)] += 1
    return dict(sizes)


def test_zero_algebra_profile():
    prof = coadjoint_profile(zero_algebra(F3, 2))
    assert prof.counts == {1: 9}
    assert prof.fake_degrees == {1: 9}
    assert fixed_point_count(zero_algebra(F3, 2)) == 9


def test_heisenberg_profiles():
    prof3 = coadjoint_profile(heisenberg_algebra(F3))
    assert prof3.fake_degrees == {1: 9, 3: 2}
    assert prof3.orbit_total == 11
    assert prof3.violations(3) == []
    assert coadjoint_profile(heisenberg_algebra(F2)).fake_degrees == {1: 4, 2: 1}
    assert fixed_point_count(heisenberg_algebra(F3)) == 9


@pytest.mark.parametrize("A", [heisenberg_algebra(F3), heisenberg_algebra(F2),
                               augmentation_ideal(builtin("d8"), F2),
                               augmentation_ideal(builtin("c4"), F2)], ids=["heis-F3", "heis-F2", "d8", "c4"])
def test_profile_matches_naive_orbits(A):
    assert coadjoint_profile(A).counts == _naive_orbits(A)


def test_profile_over_extension_field():
    prof = coadjoint_profile(heisenberg_algebra(make_field(3, 2)))
    assert prof.fake_degrees == {1: 81, 9: 8}
    assert prof.violations(3) == []


def test_profile_guard():
    with pytest.raises(ProfileGuardExceeded):
        coadjoint_profile(zero_algebra(F2, 30))


@pytest.mark.parametrize("name,F,order,ab,classes", [
    ("c2", F2, 2, 2, 2),
    ("c4", F2, 8, 8, 8),
    ("d8", F2, 2 ** 7, 2 ** 4, None),
    ("q8", F2, 2 ** 7, 2 ** 4, None),
])
def test_brute_force_examples(name, F, order, ab, classes):
    r = brute_force_units(augmentation_ideal(builtin(name), F))
    assert (r.group_order, r.ab_order) == (order, ab)
    assert r.group_order == r.ab_order * r.derived_order
    if classes is not None:
        assert r.class_count == classes


def test_brute_force_heisenberg_classes():
    r = brute_force_units(heisenberg_algebra(F3))
    assert (r.group_order, r.ab_order, r.class_count) == (27, 9, 11)


def test_brute_force_classes_match_pcgroup():
    # the unit group of I(C4, F2) is presented by its own pcp; compare class counts
    from b0units.unitgroup import unit_pcp
    A = augmentation_ideal(builtin("d8"), F2)
    pres = unit_pcp(A).to_presentation()
    assert brute_force_units(A).class_count == len(conjugacy_classes(pres))


def test_oracle_guard():
    with pytest.raises(OracleGuardExceeded):
        brute_force_units(augmentation_ideal(builtin("d8"), F4), guard=2 ** 10)


def test_reports():
    rep = fake_degree_report(augmentation_ideal(builtin("q8"), F2))
    assert rep.verdict == "CONSISTENT" and rep.fixed_points == rep.ab_order == 16
    rep = fake_degree_report(zero_algebra(F4, 2), compare_orbits=True)
    assert rep.verdict == "CONSISTENT" and rep.ratio == 1
    assert rep.orbit_total == rep.class_count == 16
    rep = fake_degree_report(heisenberg_algebra(F3), compare_orbits=True)
    assert (rep.orbit_total, rep.class_count) == (11, 11)


def test_report_jm14(jm14):
    rep = fake_degree_report(jm14.algebra(F2))
    assert rep.verdict == "VIOLATED"
    assert (rep.fixed_points, rep.ab_order, rep.ratio) == (2 ** 25, 2 ** 26, 2)
