import random

import pytest
from hypothesis import given, settings, strategies as st

from tidyscale import engine, groups, shift
from tidyscale.core import InfiniteIndex, NotASubgroup, NotClosed, NotRepresentable

Z2 = groups.cyclic(2)
S3 = groups.symmetric(3)
BE = shift.ShiftBackend(Z2)
BE3 = shift.ShiftBackend(S3)
A3 = S3.closure([3])
T12 = S3.closure([2])   # transposition (12)
ONE = frozenset({0})


def E(*coords, table=Z2):
    return shift.E(table, coords)


def Ei(a, b, table=Z2):
    return shift.E(table, range(a, b + 1))


def test_index_examples():
    assert BE.index(Ei(-1, 1), Ei(-1, 2)) == 2
    assert BE.index(Ei(-1, 1), Ei(-1, 1)) == 1
    with pytest.raises(NotASubgroup):
        BE.index(Ei(-1, 2), Ei(-1, 1))


def test_index_of_non_open_subgroup_is_infinite():
    plus = BE.plus_minus(shift.shift_by(Z2, 1), Ei(-5, 3)).plus
    with pytest.raises(InfiniteIndex):
        BE.index(shift.whole(Z2), plus)


def test_intersect_and_apply_examples():
    assert BE.intersect(Ei(0, 2), Ei(-1, 1)) == Ei(-1, 2)
    alpha = shift.shift_by(Z2, 1)
    assert BE.apply(alpha, Ei(0, 2)) == Ei(-1, 1)
    assert BE.apply(alpha, shift.whole(Z2)) == shift.whole(Z2)


def test_equal_and_normalises():
    assert BE.equal(Ei(0, 2), E(0, 1, 2))
    assert not BE.equal(Ei(0, 2), Ei(0, 1))
    alpha = shift.shift_by(Z2, 1)
    assert BE.normalises(alpha, shift.whole(Z2))
    assert not BE.normalises(alpha, Ei(0, 2))


def test_member():
    U = Ei(0, 2)
    assert BE.member(shift.FiniteSupportElement.make(Z2, {}), U)
    assert not BE.member(shift.FiniteSupportElement.make(Z2, {1: 1}), U)
    assert BE.member(shift.FiniteSupportElement.make(Z2, {5: 1}), U)


def test_make_windowed_examples():
    assert shift.describe(Ei(-5, 3)) == "E[-5,3]"
    assert shift.make_windowed(Z2, {}) == shift.whole(Z2)
    U = shift.make_windowed(S3, {0: A3})
    assert BE3.index(shift.whole(S3), U) == 2
    with pytest.raises(NotClosed):
        shift.make_windowed(S3, {0: {0, 1, 3}})


def test_plus_minus_of_interval():
    parts = BE.plus_minus(shift.shift_by(Z2, 1), Ei(-5, 3))
    assert parts.exact
    assert shift.describe(parts.plus) == "E]-inf,3]"
    assert shift.describe(parts.minus) == "E[-5,inf["


def test_plus_part_coordinate_rule_in_s3():
    U = shift.make_windowed(S3, {0: A3, 2: ONE})
    plus = BE3.plus_minus(shift.shift_by(S3, 1), U).plus
    # coordinate k of U+ is the intersection of H_m over m >= k
    for k in range(-4, 6):
        want = frozenset(S3.elements())
        for m in range(k, 8):
            want &= U.at(m)
        assert plus.at(k) == want


def test_product_set_equality_examples():
    full = shift.whole(S3)
    t = shift.make_windowed(S3, {0: T12})
    a = shift.make_windowed(S3, {0: A3})
    assert BE3.product_set_equality(t, a, full)
    assert BE3.product_set_equality(full, full, full)
    assert not BE3.product_set_equality(t, t, full)


def _is_interval(coords):
    return not coords or max(coords) - min(coords) + 1 == len(coords)


@settings(max_examples=200, deadline=None)
@given(st.sets(st.integers(-6, 6), max_size=8))
def test_tidy_above_iff_interval(coords):
    alpha = shift.shift_by(Z2, 1)
    v = engine.is_tidy_above(alpha, shift.E(Z2, coords))
    assert v.is_yes == _is_interval(coords)


@settings(max_examples=100, deadline=None)
@given(st.sets(st.integers(-5, 5), min_size=1, max_size=6), st.sampled_from([-1, 1]))
def test_shift_moves_window(coords, s):
    alpha = shift.shift_by(Z2, s)
    assert BE.apply(alpha, shift.E(Z2, coords)) == shift.E(Z2, [c - s for c in coords])


def test_tidying_above_fills_gap():
    V, n = engine.tidying_above(shift.shift_by(Z2, 1), E(0, 2))
    assert V == Ei(-1, 2) and n == 1


def test_tidy_below_and_l_criterion():
    alpha = shift.shift_by(Z2, 1)
    assert engine.tidy_below_verdict(alpha, Ei(-5, 3)).is_no
    assert engine.tidy_below_verdict(alpha, shift.whole(Z2)).is_yes
    lc = engine.l_criterion(alpha, Ei(-5, 3))
    assert lc.verdict.is_no and "finite-support" in lc.description
    assert BE.check_l_certificate(alpha, Ei(-5, 3), lc.verdict.certificate)
    assert engine.l_criterion(alpha, shift.whole(Z2)).verdict.is_yes


@settings(max_examples=50, deadline=None)
@given(st.sets(st.integers(-6, 6), min_size=1, max_size=6))
def test_tidying_full_reaches_whole_group(coords):
    V, report = engine.tidying_full(shift.shift_by(Z2, 1), shift.E(Z2, coords))
    assert V == shift.whole(Z2) and report.tidy.is_yes


def test_large_shift_is_not_representable():
    with pytest.raises(NotRepresentable):
        BE.plus_minus(shift.shift_by(Z2, 2), Ei(0, 1))


def test_inverse_and_compose_of_twisted_shift():
    g = shift.FiniteSupportElement.make(S3, {0: 1, 1: 3})
    alpha = shift.ShiftAutomorphism(S3, 1, g)
    inv = BE3.inverse(alpha)
    x = shift.FiniteSupportElement.make(S3, {-1: 2, 2: 4})
    assert inv(alpha(x)) == x and alpha(inv(x)) == x
    both = BE3.compose(alpha, alpha)
    assert both(x) == alpha(alpha(x))


@pytest.mark.parametrize("n", [2, 3])
def test_double_coset_power_example(n):
    U = shift.make_windowed(S3, {0: A3})
    g = shift.FiniteSupportElement.make(S3, {0: 1})
    assert BE3.double_coset_power(U, g, n)


def test_double_coset_power_abelian_and_full():
    g = shift.FiniteSupportElement.make(Z2, {0: 1, 3: 1})
    for n in range(1, 5):
        assert BE.double_coset_power(Ei(-1, 4), g, n)
        assert BE3.double_coset_power(shift.whole(S3), shift.FiniteSupportElement.make(S3, {0: 3}), n)


def test_ustar_examples():
    alpha = shift.shift_by(Z2, 1)
    assert engine.ustar_clopen_check(alpha, shift.whole(Z2)).is_yes
    v = engine.ustar_clopen_check(alpha, Ei(0, 2))
    assert v.is_no and BE.check_ustar_certificate(alpha, Ei(0, 2), v.certificate)


def test_dense_orbit_examples():
    assert engine.dense_orbit_demo(3, Z2).certificate["period"] == 24
    assert engine.dense_orbit_demo(1, S3).is_yes
    assert engine.dense_orbit_demo(3, Z2, shift=0).is_no


def test_cylinder_word_contains_every_word():
    word = shift.cylinder_word(3, 2)
    n = len(word)
    seen = {(word[i], word[(i + 1) % n]) for i in range(n)}
    assert len(seen) == 9


def test_periodic_and_normaliser_in_compact_ambient():
    rng = random.Random(3)
    g = shift.FiniteSupportElement.make(S3, {rng.randint(-2, 2): rng.randrange(1, 6) for _ in range(3)})
    U = shift.make_windowed(S3, {0: A3, 1: T12})
    assert engine.periodic_witness(shift.inner(g), U, 6).is_yes
    fam = [Ei(0, 1), shift.whole(Z2)]
    v = engine.normaliser_witness(shift.shift_by(Z2, 1), fam)
    assert v.is_yes and v.certificate == shift.whole(Z2)
