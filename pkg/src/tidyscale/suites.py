"""Verification suites shared by the command line and the test-suite.

Every suite takes a case count, a 64-bit seed and budgets, and returns a
:class:`SuiteResult` whose failures carry enough data to reproduce the case.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable

from . import engine, groups, oracle, padic, shift, tree
from .core import Budgets, FiniteGroupTable

DEFAULT_SEED = 0x5EED_7D1C_0000_0001


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    total: int = 0
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.total > 0 and self.passed == self.total

    def record(self, ok: bool, case: Any) -> None:
        self.total += 1
        if ok:
            self.passed += 1
        else:
            self.failures.append(case)


# --- random shift cases -------------------------------------------------------------------

@lru_cache(maxsize=None)
def _subgroups(table: FiniteGroupTable) -> tuple:
    return tuple(oracle.enumerate_subgroups(table))


def random_shift_subgroup(rng: random.Random, table: FiniteGroupTable,
                          lo: int = -4, hi: int = 4) -> shift.TailedProductSubgroup:
    subs = _subgroups(table)
    a = rng.randint(lo, hi)
    b = rng.randint(a, hi)
    return shift.make_windowed(table, {k: rng.choice(subs) for k in range(a, b + 1)})


def random_element(rng: random.Random, table: FiniteGroupTable, lo: int = -3, hi: int = 3,
                   count: int = 3) -> shift.FiniteSupportElement:
    coords = {rng.randint(lo, hi): rng.randrange(table.order) for _ in range(count)}
    return shift.FiniteSupportElement.make(table, coords)


def random_shift_automorphism(rng: random.Random, table: FiniteGroupTable,
                              shifts=(-1, 0, 1)) -> shift.ShiftAutomorphism:
    return shift.ShiftAutomorphism(table, rng.choice(shifts), random_element(rng, table))


def _case(i, alpha, U) -> dict:
    return {"case": i, "shift": alpha.shift, "conj": dict(zip(alpha.conj.coords(),
                                                              (alpha.conj.at(k) for k in alpha.conj.coords()))),
            "U": shift.describe(U)}


# --- suites ----------------------------------------------------------------------------------

def tachar(cases: int = 500, seed: int = DEFAULT_SEED, budgets: Budgets = Budgets(),
           group: str = "S3") -> SuiteResult:
    """The three tidy-above criteria agree."""
    table = groups.preset(group)
    be = shift.ShiftBackend(table)
    rng = random.Random(seed)
    res = SuiteResult("tachar", details={"seed": seed, "group": group, "tidy": 0})
    for i in range(cases):
        alpha = random_shift_automorphism(rng, table)
        U = random_shift_subgroup(rng, table)
        crit = be.tidy_above_criteria(alpha, U)
        res.record(len(set(crit.values())) == 1, dict(_case(i, alpha, U), criteria=crit))
        res.details["tidy"] += crit["U=U+U-"]
    return res


def minimising(cases: int = 0, seed: int = DEFAULT_SEED, budgets: Budgets = Budgets()) -> SuiteResult:
    """Oracle argmin equals the decided-tidy set and the minimum equals the scale."""
    res = SuiteResult("minimising")
    setups = [
        ("padic p=2 level 1", padic.diag_conj(1), oracle.padic_level_family(2)),
        ("tree d=3 l=1 radius 2", tree.translation(3, 1), oracle.tree_ball_family(3, 1)),
    ]
    for name, alpha, fam in setups:
        res.record(*minimising_case(name, alpha, fam, budgets))
    return res


def minimising_case(name: str, alpha, fam: oracle.SubgroupFamily,
                    budgets: Budgets = Budgets()) -> tuple[bool, dict]:
    best, argmin = oracle.brute_min_relative_index(alpha, fam)
    reports = [engine.tidiness_report(alpha, U, budgets=budgets) for U in fam]
    tidy = [U for U, r in zip(fam, reports) if r.tidy.is_yes]
    undecided = sum(1 for r in reports if not r.tidy.decided)
    sc = engine.scale(alpha, fam.members[0], budgets)
    ok = set(tidy) == set(argmin) and best == sc.scale and sc.certified
    return ok, {"family": name, "size": len(fam), "min": best, "argmin": len(argmin),
                "tidy": len(tidy), "undecided": undecided, "scale": sc.scale}


def modular_examples() -> list[tuple[str, Any, Any, Any, bool]]:
    """(name, alpha, seed subgroup, second subgroup, unimodular expected)."""
    out = []
    for p in (2, 3, 5):
        out.append((f"padic p={p}", padic.diag_conj(1), padic.whole(p),
                    padic.upper_congruence(p), True))
    for d in (3, 4):
        for ell in (1, 2, 3):
            out.append((f"tree d={d} l={ell}", tree.translation(d, ell), tree.fix(d, [()]),
                        tree.fix(d, [(3,), (3, 1)]), True))
        out.append((f"tree d={d} swap", tree.swap(d), tree.fix(d, [()]), tree.fix(d, [(1,), (1, 3)]), True))
        out.append((f"tree d={d} inversion", tree.inversion(d), tree.fix(d, [()]),
                    tree.fix(d, [(3,)]), True))
    z2, s3 = groups.cyclic(2), groups.symmetric(3)
    out.append(("shift Z2 by 1", shift.shift_by(z2, 1), shift.E(z2, [0, 1, 2]), shift.E(z2, [0, 5]), True))
    out.append(("shift S3 by -1", shift.shift_by(s3, -1), shift.E(s3, [0, 3]), shift.E(s3, [-2]), True))
    g = shift.FiniteSupportElement.make(s3, {0: 1, 2: 3})
    out.append(("shift S3 inner", shift.inner(g), shift.E(s3, [0, 1, 2]), shift.E(s3, [1]), True))
    out.append(("shift S3 twisted", shift.ShiftAutomorphism(s3, 1, g), shift.E(s3, [0, 4]),
                shift.E(s3, [-1, 1]), True))
    return out


def modular(cases: int = 0, seed: int = DEFAULT_SEED, budgets: Budgets = Budgets()) -> SuiteResult:
    """s(g)/s(g^-1) = Delta(g), Delta from two subgroups; Delta = 1 where expected."""
    res = SuiteResult("modular")
    for name, alpha, U, V, unimodular in modular_examples():
        delta = engine.modular(alpha, U, V, budgets)
        ident = engine.scale_modular_identity(alpha, U, V, budgets)
        ok = ident.is_yes and (delta == 1 or not unimodular)
        res.record(ok, {"example": name, "delta": str(delta), "identity": ident.answer.value})
    return res


def powerprop(cases: int = 50, seed: int = DEFAULT_SEED, budgets: Budgets = Budgets()) -> SuiteResult:
    """(UgU)^n = Ug^nU in the shift backend and the tree index law."""
    table = groups.symmetric(3)
    rng = random.Random(seed)
    res = SuiteResult("powerprop", details={"seed": seed})
    for i in range(cases):
        g = random_element(rng, table)
        alpha = shift.inner(g)
        V, _ = engine.tidying_above(alpha, random_shift_subgroup(rng, table), budgets.max_depth)
        for n in range(1, 6):
            v = engine.power_coset_check(alpha, V, n, budgets)
            res.record(v.is_yes, {"case": i, "n": n, "U": shift.describe(V)})
    for d in (3, 4):
        for ell in (1, 2, 3):
            ok, info = tree_power_index(d, ell)
            res.record(ok, info)
    return res


def tree_power_index(d: int, ell: int, max_n: int = 3) -> tuple[bool, dict]:
    phi = tree.translation(d, ell)
    be = tree.TreeBackend(d)
    U = be.axis_segment_stabilizer(tree.classify(phi), 0, 1)
    got = []
    for n in range(1, max_n + 1):
        U_n = be.apply(be.power(phi, n), U)
        got.append(be.index(U, be.intersect(U, U_n)))
    want = [(d - 1) ** (n * ell) for n in range(1, max_n + 1)]
    return got == want, {"degree": d, "length": ell, "indices": got, "expected": want}


def periodic(cases: int = 50, seed: int = DEFAULT_SEED, budgets: Budgets = Budgets()) -> SuiteResult:
    """periodic_witness agrees with the known answer."""
    table = groups.symmetric(3)
    rng = random.Random(seed)
    res = SuiteResult("periodic", details={"seed": seed})
    for i in range(cases):
        g = random_element(rng, table)
        U = random_shift_subgroup(rng, table)
        v = engine.periodic_witness(shift.inner(g), U, 6, budgets)
        res.record(v.is_yes, {"case": i, "U": shift.describe(U)})
    for d in (3, 4):
        for name, phi, expect in (("swap", tree.swap(d), "Yes"), ("inversion", tree.inversion(d), "Yes"),
                                  ("rotation", tree.rotation(d), "Yes"),
                                  ("translation", tree.translation(d, 1), "No")):
            v = engine.periodic_witness(phi, tree.fix(d, [(), (1,)]), 2 * d, budgets)
            res.record(v.answer.value == expect, {"degree": d, "preset": name, "got": v.answer.value})
    return res


def ustar(cases: int = 200, seed: int = DEFAULT_SEED, budgets: Budgets = Budgets()) -> SuiteResult:
    """Tidy U has closed U*; E_[0,2] under the shift does not."""
    table = groups.cyclic(2)
    rng = random.Random(seed)
    be = shift.ShiftBackend(table)
    res = SuiteResult("ustar", details={"seed": seed, "yes": 0})
    for i in range(cases):
        alpha = random_shift_automorphism(rng, table)
        V, report = engine.tidying_full(alpha, random_shift_subgroup(rng, table), budgets)
        v = engine.ustar_clopen_check(alpha, V, budgets)
        res.record(report.tidy.is_yes and not v.is_no, dict(_case(i, alpha, V), answer=v.answer.value))
        res.details["yes"] += v.is_yes
    ok, info = ustar_counterexample()
    res.record(ok, info)
    return res


def ustar_counterexample() -> tuple[bool, dict]:
    table = groups.cyclic(2)
    be = shift.ShiftBackend(table)
    alpha, U = shift.shift_by(table, 1), shift.E(table, [0, 1, 2])
    v = engine.ustar_clopen_check(alpha, U)
    tidy = engine.tidiness_report(alpha, U).tidy
    ok = v.is_no and be.check_ustar_certificate(alpha, U, v.certificate) and not tidy.is_yes
    return ok, {"U": "E[0,2]", "answer": v.answer.value, "certificate": v.certificate}


def borel(cases: int = 3, seed: int = DEFAULT_SEED, budgets: Budgets = Budgets()) -> SuiteResult:
    primes = [2, 3, 5, 7, 11, 13][:max(cases, 1)]
    res = SuiteResult("borel")
    for p in primes:
        v = padic.borel_counting_check(p)
        res.record(v.is_yes, v.certificate)
    return res


def example_table(budgets: Budgets = Budgets()) -> list[dict]:
    """Scales of the standard examples, with the expected closed forms."""
    rows = []

    def add(family, name, alpha, seed, expected):
        r = engine.scale(alpha, seed, budgets)
        rows.append({"family": family, "example": name, "scale": r.scale, "expected": expected,
                     "certified": r.certified})

    z2 = groups.cyclic(2)
    add("shift", "shift by 1 on (Z/2)^Z", shift.shift_by(z2, 1), shift.E(z2, [0, 1, 2]), 1)
    for d in (3, 4):
        add("tree", f"swap at a vertex, d={d}", tree.swap(d), tree.fix(d, [(), (1,)]), 1)
        add("tree", f"edge inversion, d={d}", tree.inversion(d), tree.fix(d, [()]), 1)
        for ell in (1, 2, 3):
            add("tree", f"translation d={d} length={ell}", tree.translation(d, ell),
                tree.fix(d, [()]), (d - 1) ** ell)
    for p in (2, 3, 5):
        add("padic", f"diag(p,1) on SL2(Q_{p})", padic.diag_conj(1), padic.whole(p), p)
    return rows


def standard_examples(cases: int = 0, seed: int = DEFAULT_SEED, budgets: Budgets = Budgets()) -> SuiteResult:
    res = SuiteResult("paper-table")
    rows = example_table(budgets)
    for row in rows:
        res.record(row["certified"] and row["scale"] == row["expected"], row)
    res.details["rows"] = rows
    return res


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "tachar": tachar,
    "minimising": minimising,
    "modular": modular,
    "powerprop": powerprop,
    "periodic": periodic,
    "ustar": ustar,
    "borel": borel,
    "paper-table": standard_examples,
}

DEFAULT_CASES = {"tachar": 500, "minimising": 0, "modular": 0, "powerprop": 50,
                 "periodic": 50, "ustar": 200, "borel": 3, "paper-table": 0}
