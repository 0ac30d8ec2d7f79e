"""Acceptance criteria 1-10.  Each test prints one PASS/FAIL line; the
terminal summary repeats them all in order."""

import itertools
import random

import pytest

from tidyscale import engine, groups, padic, shift, suites, tree
from tidyscale.core import Budgets

Z2, S3 = groups.cyclic(2), groups.symmetric(3)


def _is_interval(coords) -> bool:
    c = sorted(coords)
    return not c or c[-1] - c[0] + 1 == len(c)


@pytest.mark.criterion(1, "p-adic scale equals p at level cap 3", limit=5)
def test_padic_scale(criterion):
    budgets = Budgets(max_level=3)
    for p in (2, 3, 5):
        r = engine.scale(padic.diag_conj(1), padic.whole(p), budgets)
        assert r.certified
        assert r.scale == p
        assert r.witness == padic.upper_congruence(p)
        assert engine.relative_index(padic.diag_conj(1), r.witness) == p
    criterion.check_runtime()


@pytest.mark.criterion(2, "Borel counting and SL2(Z_p) not tidy above", limit=5)
def test_borel_counting(criterion):
    for p in (2, 3, 5, 7):
        G = padic.enumerate_group(p, 1, "SL")
        assert len(G) == (p - 1) * p * (p + 1)
        lower = [x for x in G if x[1] == 0]
        upper = [x for x in G if x[2] == 0]
        products = {padic.mat_mul(x, y, p) for x in lower for y in upper}
        assert len(products) == (p - 1) * p * p
        assert padic.borel_counting_check(p).is_yes
        assert engine.is_tidy_above(padic.diag_conj(1), padic.whole(p)).is_no
    criterion.check_runtime()


@pytest.mark.criterion(3, "tree scale (d-1)^l and elliptic scale 1", limit=10)
def test_tree_scale(criterion):
    for d, ell in itertools.product((3, 4), (1, 2, 3)):
        r = engine.scale(tree.translation(d, ell), tree.fix(d, [()]))
        assert r.certified and r.scale == (d - 1) ** ell, (d, ell, r.scale)
    for d in (3, 4):
        for phi in (tree.swap(d), tree.inversion(d)):
            r = engine.scale(phi, tree.fix(d, [()]))
            assert r.certified and r.scale == 1
    criterion.check_runtime()


@pytest.mark.criterion(4, "shift E_I tidy above iff interval, tidying and L_U", limit=30)
def test_shift_example(criterion):
    alpha_z2 = shift.shift_by(Z2, 1)
    window = range(-6, 7)
    count = 0
    for mask in range(1 << len(window)):
        I = [k for i, k in enumerate(window) if mask >> i & 1]
        assert engine.is_tidy_above(alpha_z2, shift.E(Z2, I)).is_yes == _is_interval(I), I
        count += 1
    assert count == 2 ** 13

    alpha_s3 = shift.shift_by(S3, 1)
    rng = random.Random(suites.DEFAULT_SEED)
    interval_cases = 0
    for _ in range(500):
        I = sorted(rng.sample(list(window), rng.randint(1, 6)))
        U = shift.E(S3, I)
        assert engine.is_tidy_above(alpha_s3, U).is_yes == _is_interval(I), I
        interval_cases += _is_interval(I)
        V, report = engine.tidying_full(alpha_s3, U)
        assert V == shift.whole(S3) and report.tidy.is_yes
        lc = engine.l_criterion(alpha_s3, U)
        assert lc.verdict.is_no and "finite-support" in lc.description
    criterion.note(f"{interval_cases}/500 S3 cases were intervals")
    criterion.check_runtime()


@pytest.mark.criterion(5, "tidy-above criteria agree on 500 seeded cases", limit=20)
def test_tidy_above_equivalence(criterion):
    res = suites.tachar(500, suites.DEFAULT_SEED)
    assert res.ok, res.failures[:3]
    # both outcomes must actually occur
    assert 0 < res.details["tidy"] < 500
    criterion.note(f"{res.details['tidy']} tidy above")
    criterion.check_runtime()


@pytest.mark.criterion(6, "oracle argmin equals decided-tidy set, min = scale", limit=20)
def test_minimising_iff_tidy(criterion):
    res = suites.minimising()
    assert res.total == 2
    assert res.ok, res.failures
    criterion.check_runtime()


@pytest.mark.criterion(7, "modular identity s(g)/s(g^-1) = Delta(g)", limit=10)
def test_modular_identity(criterion):
    res = suites.modular()
    assert res.ok, res.failures
    for name, alpha, U, V, _ in suites.modular_examples():
        if name.startswith(("tree", "padic")):
            assert engine.modular(alpha, U, V) == 1, name
    criterion.note(f"{res.total} examples")
    criterion.check_runtime()


@pytest.mark.criterion(8, "power cosets (UgU)^n = Ug^nU and tree index law", limit=10)
def test_power_cosets(criterion):
    res = suites.powerprop(50, suites.DEFAULT_SEED)
    assert res.ok, res.failures[:3]
    for d, ell in itertools.product((3, 4), (1, 2, 3)):
        ok, info = suites.tree_power_index(d, ell, 3)
        assert ok, info
    criterion.check_runtime()


@pytest.mark.criterion(9, "tidy implies U* clopen; E[0,2] counterexample", limit=10)
def test_ustar_clopen(criterion):
    res = suites.ustar(200, suites.DEFAULT_SEED)
    assert res.ok, res.failures[:3]
    ok, info = suites.ustar_counterexample()
    assert ok, info
    criterion.check_runtime()


@pytest.mark.criterion(10, "dense orbit meets all cylinders of width <= 8", limit=5)
def test_dense_orbit(criterion):
    v = engine.dense_orbit_demo(8, Z2)
    assert v.is_yes
    # independent recount of the windows seen along the orbit
    block = shift.cylinder_word(2, 8)
    n = len(block)
    for w in range(1, 9):
        seen = {tuple(block[(o + j) % n] for j in range(w)) for o in range(n)}
        assert len(seen) == 2 ** w
    criterion.check_runtime()
