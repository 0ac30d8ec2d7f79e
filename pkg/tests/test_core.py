import pytest
from hypothesis import given, strategies as st

from tidyscale import groups
from tidyscale.core import (Answer, Budgets, FiniteGroupTable, NotASubgroup, NotNested,
                            ScaleResult, TooLarge, Verdict, conj)


def test_verdict_is_three_valued():
    v = Verdict.yes({"w": 1})
    assert v.is_yes and v.decided and not v.is_no
    assert Verdict.undecided(5).answer is Answer.UNDECIDED
    with pytest.raises(TypeError):
        bool(v)


@pytest.mark.parametrize("a,b,want", [
    (Answer.YES, Answer.YES, Answer.YES),
    (Answer.YES, Answer.NO, Answer.NO),
    (Answer.UNDECIDED, Answer.NO, Answer.NO),
    (Answer.YES, Answer.UNDECIDED, Answer.UNDECIDED),
])
def test_three_valued_and(a, b, want):
    assert conj(Verdict(a), Verdict(b)).answer is want


def test_not_nested_is_a_containment_error():
    assert issubclass(NotNested, NotASubgroup)


@pytest.mark.parametrize("table,order", [(groups.cyclic(2), 2), (groups.cyclic(5), 5),
                                         (groups.symmetric(3), 6), (groups.sl2_fp(2), 6),
                                         (groups.sl2_fp(3), 24)])
def test_presets_are_groups(table, order):
    assert table.order == order
    assert table.is_associative()
    for a in table.elements():
        assert table.mul(a, table.inv(a)) == table.identity == table.mul(table.inv(a), a)


def test_preset_parsing():
    assert groups.preset("C4").order == 4
    assert groups.preset("S3").names[0] == "e"
    with pytest.raises(ValueError):
        groups.preset("Q8")


def test_from_table_rejects_non_groups():
    with pytest.raises(ValueError):
        FiniteGroupTable.from_table([[0, 1], [1, 1]])
    with pytest.raises(ValueError):
        FiniteGroupTable.from_table([[0, 1]])


def test_associativity_check_has_a_cap():
    big = groups.cyclic(513)
    with pytest.raises(TooLarge):
        big.is_associative()


def test_symmetric_subgroup_helpers():
    s3 = groups.symmetric(3)
    a3 = s3.closure([3])  # a 3-cycle in lexicographic order
    assert len(a3) == 3 and s3.is_subgroup(a3)
    t = s3.closure([1])
    assert len(t) == 2
    assert s3.set_product(t, a3) == frozenset(s3.elements())
    assert s3.element_order(3) == 3 and s3.power(3, 3) == s3.identity


@given(st.integers(0, 5), st.integers(0, 5))
def test_conjugation_is_an_automorphism(g, x):
    s3 = groups.symmetric(3)
    y = (x + 1) % 6
    assert s3.conjugate(g, s3.mul(x, y)) == s3.mul(s3.conjugate(g, x), s3.conjugate(g, y))


def test_scale_result_invariants():
    ScaleResult(2, None, ((0, 3), (1, 2)), True)
    with pytest.raises(ValueError):
        ScaleResult(0, None, (), True)
    with pytest.raises(ValueError):
        ScaleResult(2, None, ((0, 3),), True)


def test_budgets_scale():
    b = Budgets().scaled(2)
    assert b.max_depth == 64 and b.search_radius == 128 and b.max_level == 4
    with pytest.raises(ValueError):
        Budgets().scaled(0)
