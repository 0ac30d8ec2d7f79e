import random

import pytest

from tidyscale import engine, groups, oracle, padic, shift, suites, tree
from tidyscale.core import TooLarge


@pytest.mark.parametrize("table,count", [(groups.cyclic(2), 2), (groups.symmetric(3), 6),
                                         (groups.sl2_fp(2), 6), (groups.cyclic(6), 4),
                                         (groups.sl2_fp(3), 15)])
def test_subgroup_counts(table, count):
    subs = oracle.enumerate_subgroups(table)
    assert len(subs) == count
    assert all(table.is_subgroup(H) for H in subs)


def test_enumeration_cap():
    with pytest.raises(TooLarge):
        oracle.enumerate_subgroups(groups.cyclic(600))


def test_family_rejects_duplicates():
    U = padic.whole(2)
    with pytest.raises(ValueError):
        oracle.SubgroupFamily("padic", (U, U), ("exhaustive-within", {}))
    assert len(oracle.make_family([U, U], ("exhaustive-within", {}))) == 1


def test_padic_level_one_sweep():
    fam = oracle.padic_level_family(2)
    best, argmin = oracle.brute_min_relative_index(padic.diag_conj(1), fam)
    assert len(fam) == 6 and best == 2
    assert padic.upper_congruence(2) in argmin
    assert padic.lower_congruence(2) in argmin and padic.principal(2, 1) in argmin


def test_tree_ball_sweep():
    phi = tree.translation(3, 1)
    fam = oracle.tree_ball_family(3, 1)
    best, argmin = oracle.brute_min_relative_index(phi, fam)
    assert best == 2
    ax = tree.classify(phi)
    be = tree.TreeBackend(3)
    for U in argmin:
        seg = be.axis_segment_of(ax, U)
        assert seg is not None and seg[1] > seg[0]


def test_identity_minimum_is_whole_family():
    fam = oracle.shift_window_family(groups.cyclic(2), 0, 2)
    best, argmin = oracle.brute_min_relative_index(shift.shift_by(groups.cyclic(2), 0), fam)
    assert best == 1 and len(argmin) == len(fam) == 8


def test_argmin_same_for_inverse():
    for alpha, fam in ((padic.diag_conj(1), oracle.padic_level_family(2)),
                       (tree.translation(3, 1), oracle.tree_ball_family(3, 1))):
        be = engine.backend_of(fam.members[0])
        a = oracle.brute_min_relative_index(alpha, fam)[1]
        b = oracle.brute_min_relative_index(be.inverse(alpha), fam)[1]
        assert set(a) == set(b)


def test_sampled_family_is_reproducible():
    table = groups.symmetric(3)
    draw = lambda rng: suites.random_shift_subgroup(rng, table)
    a = oracle.sampled(2 ** 63 + 11, 30, draw)
    b = oracle.sampled(2 ** 63 + 11, 30, draw)
    assert a == b and a.exhaustiveness == ("sampled", 2 ** 63 + 11, 30)


def test_minimising_agrees_with_tidy_on_shift_windows():
    table = groups.cyclic(2)
    fam = oracle.shift_window_family(table, -2, 2)
    ok, info = suites.minimising_case("shift windows", shift.shift_by(table, 1), fam)
    assert ok, info
