"""G = F^Z with shift and inner automorphisms.

Subgroups are coordinate-wise products of subgroups of F that are constant
off a finite window (tailed products).  Coordinate convention: the shift by
``s`` sends a sequence x to the sequence n -> x[n + s], so shifting by 1 maps
E_I to E_{I-1}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .engine import LCriterionResult, PlusMinusParts
from .core import (Backend, FiniteGroupTable, InfiniteIndex, NotASubgroup,
                   NotClosed, NotRepresentable, Verdict)


@dataclass(frozen=True)
class TailedProductSubgroup:
    """Product of subgroups H_k of F.

    ``entries[i]`` is H at coordinate ``start + i``; coordinates before the
    window carry ``left_tail``, after it ``right_tail``.  Canonical: the first
    entry differs from ``left_tail`` and the last from ``right_tail``.  With
    no entries and different tails, ``start`` is the first right-tail
    coordinate; with no entries and equal tails, ``start`` is 0.
    """

    group: FiniteGroupTable
    left_tail: frozenset
    start: int
    entries: tuple
    right_tail: frozenset

    backend_tag = "shift"

    def at(self, k: int) -> frozenset:
        if k < self.start:
            return self.left_tail
        i = k - self.start
        if i < len(self.entries):
            return self.entries[i]
        return self.right_tail

    @property
    def end(self) -> int:
        """Last window coordinate (start - 1 when the window is empty)."""
        return self.start + len(self.entries) - 1

    @property
    def full(self) -> frozenset:
        return frozenset(self.group.elements())

    @property
    def compact(self) -> bool:
        return True

    @property
    def open(self) -> bool:
        return self.left_tail == self.right_tail == self.full

    def is_whole(self) -> bool:
        return self.open and not self.entries

    def __repr__(self) -> str:
        return f"TailedProductSubgroup({describe(self)})"


def _canon(group: FiniteGroupTable, left: frozenset, right: frozenset, lo: int, hi: int,
           value: Callable[[int], frozenset]) -> TailedProductSubgroup:
    """Build the canonical subgroup whose coordinate k is ``left`` below lo,
    ``right`` above hi and ``value(k)`` in between."""
    vals = [frozenset(value(k)) for k in range(lo, hi + 1)]
    i = 0
    while i < len(vals) and vals[i] == left:
        i += 1
    j = len(vals) - 1
    while j >= 0 and vals[j] == right:
        j -= 1
    if i <= j:
        return TailedProductSubgroup(group, left, lo + i, tuple(vals[i:j + 1]), right)
    if left == right:
        return TailedProductSubgroup(group, left, 0, (), right)
    return TailedProductSubgroup(group, left, lo + i, (), right)


@dataclass(frozen=True)
class FiniteSupportElement:
    group: FiniteGroupTable
    support: tuple  # sorted ((coordinate, element), ...), no identity values

    @classmethod
    def make(cls, group: FiniteGroupTable, values: Mapping[int, int]) -> "FiniteSupportElement":
        for v in values.values():
            if not 0 <= v < group.order:
                raise ValueError(f"element index {v} out of range")
        return cls(group, tuple(sorted((int(k), int(v)) for k, v in values.items()
                                       if v != group.identity)))

    def at(self, k: int) -> int:
        return dict(self.support).get(k, self.group.identity)

    def coords(self) -> list[int]:
        return [k for k, _ in self.support]

    def mul(self, other: "FiniteSupportElement") -> "FiniteSupportElement":
        ks = set(self.coords()) | set(other.coords())
        return FiniteSupportElement.make(self.group, {k: self.group.mul(self.at(k), other.at(k))
                                                      for k in ks})

    def inv(self) -> "FiniteSupportElement":
        return FiniteSupportElement.make(self.group, {k: self.group.inv(v) for k, v in self.support})

    def power(self, n: int) -> "FiniteSupportElement":
        return FiniteSupportElement.make(self.group, {k: self.group.power(v, n)
                                                      for k, v in self.support})

    def shifted(self, s: int) -> "FiniteSupportElement":
        """n -> x[n + s]"""
        return FiniteSupportElement(self.group, tuple((k - s, v) for k, v in self.support))

    def is_identity(self) -> bool:
        return not self.support


@dataclass(frozen=True)
class ShiftAutomorphism:
    """x -> g * shift_s(x) * g^-1 with g of finite support."""

    group: FiniteGroupTable
    shift: int
    conj: FiniteSupportElement

    backend_tag = "shift"

    @property
    def is_inner(self) -> bool:
        return self.shift == 0

    def __call__(self, x: FiniteSupportElement) -> FiniteSupportElement:
        y = x.shifted(self.shift)
        return self.conj.mul(y).mul(self.conj.inv())


def shift_by(group: FiniteGroupTable, s: int) -> ShiftAutomorphism:
    return ShiftAutomorphism(group, s, FiniteSupportElement(group, ()))


def inner(g: FiniteSupportElement) -> ShiftAutomorphism:
    return ShiftAutomorphism(g.group, 0, g)


def whole(group: FiniteGroupTable) -> TailedProductSubgroup:
    full = frozenset(group.elements())
    return TailedProductSubgroup(group, full, 0, (), full)


def make_windowed(group: FiniteGroupTable, assignments: Mapping[int, Iterable[int]],
                  left_tail: Iterable[int] | None = None,
                  right_tail: Iterable[int] | None = None) -> TailedProductSubgroup:
    """Product subgroup with the given subgroups of F at finitely many
    coordinates; tails default to F."""
    full = frozenset(group.elements())
    lt = full if left_tail is None else frozenset(left_tail)
    rt = full if right_tail is None else frozenset(right_tail)
    table = {int(k): frozenset(v) for k, v in assignments.items()}
    for k, h in list(table.items()) + [("left", lt), ("right", rt)]:
        if not group.is_subgroup(h):
            raise NotClosed(f"coordinate {k}: {sorted(h)} is not a subgroup of {group.label}")
    if not table:
        return _canon(group, lt, rt, 0, -1, lambda k: full)
    lo, hi = min(table), max(table)
    return _canon(group, lt, rt, lo, hi, lambda k: table.get(k, full))


def make_generated(group: FiniteGroupTable,
                   assignments: Mapping[int, Iterable[int]]) -> TailedProductSubgroup:
    """Like make_windowed but each coordinate is given by generators."""
    return make_windowed(group, {k: group.closure(g) for k, g in assignments.items()})


def E(group: FiniteGroupTable, coords: Iterable[int]) -> TailedProductSubgroup:
    """Sequences that are trivial on ``coords``."""
    triv = frozenset([group.identity])
    return make_windowed(group, {k: triv for k in coords})


def describe(U: TailedProductSubgroup) -> str:
    """E-notation when every coordinate is trivial or F, else a window dump."""
    g = U.group
    full, triv = U.full, frozenset([g.identity])

    def name(h):
        if h == full:
            return "F"
        if h == triv:
            return "1"
        return "<" + ",".join(g.name(x) for x in sorted(h)) + ">"

    values = (U.left_tail, U.right_tail) + U.entries
    if all(h in (full, triv) for h in values):
        lo, hi = U.start - 1, U.end + 1
        ks = [k for k in range(lo + 1, hi) if U.at(k) == triv]
        left = U.left_tail == triv
        right = U.right_tail == triv
        if not ks and not left and not right:
            return "G"
        if left and right and not ks and not U.entries:
            return "E]-inf,inf["
        if left:
            ks = list(range(lo, hi)) if not U.entries else [lo] + ks
        if right:
            ks = ks + [hi]
        ks = sorted(set(ks))
        if ks == list(range(ks[0], ks[-1] + 1)):
            a = "]-inf" if left else f"[{ks[0]}"
            b = "inf[" if right else f"{ks[-1]}]"
            return f"E{a},{b}"
        inner = ",".join(map(str, ks))
        return "E{" + ("...," if left else "") + inner + (",..." if right else "") + "}"
    body = ", ".join(f"{U.start + i}:{name(h)}" for i, h in enumerate(U.entries))
    return f"[...{name(U.left_tail)} | {body} | {name(U.right_tail)}... @{U.start}]"


class ShiftBackend(Backend):
    tag = "shift"

    def __init__(self, group: FiniteGroupTable):
        self.group = group
        self.full = frozenset(group.elements())
        self.trivial = frozenset([group.identity])

    # --- helpers ---------------------------------------------------------------
    def _span(self, *subgroups: TailedProductSubgroup, extra: Iterable[int] = ()) -> tuple[int, int]:
        pts = list(extra)
        for U in subgroups:
            pts += [U.start, U.end]
        if not pts:
            return 0, 0
        return min(pts) - 1, max(pts) + 1

    def _check(self, *objs) -> None:
        for o in objs:
            if o.group != self.group:
                raise ValueError("objects belong to a different finite group")

    # --- contract ----------------------------------------------------------------
    def index(self, U: TailedProductSubgroup, V: TailedProductSubgroup) -> int:
        self._check(U, V)
        lo, hi = self._span(U, V)
        for k in range(lo, hi + 1):
            if not V.at(k) <= U.at(k):
                raise NotASubgroup(f"coordinate {k}: V is not contained in U")
        if not (V.left_tail <= U.left_tail and V.right_tail <= U.right_tail):
            raise NotASubgroup("tails of V are not contained in tails of U")
        if V.left_tail != U.left_tail or V.right_tail != U.right_tail:
            raise InfiniteIndex("V differs from U at infinitely many coordinates")
        num = den = 1
        for k in range(lo, hi + 1):
            num *= len(U.at(k))
            den *= len(V.at(k))
        return num // den

    def intersect(self, U: TailedProductSubgroup, V: TailedProductSubgroup) -> TailedProductSubgroup:
        self._check(U, V)
        lo, hi = self._span(U, V)
        return _canon(self.group, U.left_tail & V.left_tail, U.right_tail & V.right_tail,
                      lo, hi, lambda k: U.at(k) & V.at(k))

    def apply(self, alpha: ShiftAutomorphism, U: TailedProductSubgroup) -> TailedProductSubgroup:
        self._check(alpha, U)
        s, g = alpha.shift, alpha.conj
        lo, hi = self._span(U, extra=g.coords())
        lo, hi = min(lo, lo - s), max(hi, hi - s)
        return _canon(self.group, U.left_tail, U.right_tail, lo, hi,
                      lambda k: self.group.conjugate_set(g.at(k), U.at(k + s)))

    def member(self, x: FiniteSupportElement, U: TailedProductSubgroup) -> bool:
        self._check(x, U)
        return all(v in U.at(k) for k, v in x.support)

    def equal(self, U, V) -> bool:
        return U == V

    def inverse(self, alpha: ShiftAutomorphism) -> ShiftAutomorphism:
        return ShiftAutomorphism(self.group, -alpha.shift, alpha.conj.shifted(-alpha.shift).inv())

    def compose(self, alpha: ShiftAutomorphism, beta: ShiftAutomorphism) -> ShiftAutomorphism:
        g = alpha.conj.mul(beta.conj.shifted(alpha.shift))
        return ShiftAutomorphism(self.group, alpha.shift + beta.shift, g)

    def identity(self) -> ShiftAutomorphism:
        return shift_by(self.group, 0)

    def whole(self) -> TailedProductSubgroup:
        return whole(self.group)

    def describe(self, U) -> str:
        return describe(U)

    # --- plus / minus parts ---------------------------------------------------------
    def forward_intersection(self, alpha: ShiftAutomorphism,
                             U: TailedProductSubgroup) -> TailedProductSubgroup:
        """Exact intersection of alpha^n(U) over n >= 0."""
        s, g, G = alpha.shift, alpha.conj, self.group
        if abs(s) > 1:
            raise NotRepresentable("plus/minus parts of shifts by |s| > 1 are periodic, "
                                   "not tailed products")
        if s == 0:
            def coord(k):
                gk, h = g.at(k), U.at(k)
                out, c = h, gk
                for _ in range(G.element_order(gk) - 1):
                    out = out & G.conjugate_set(c, h)
                    c = G.mul(c, gk)
                return out
            lo, hi = self._span(U, extra=g.coords())
            return _canon(G, U.left_tail, U.right_tail, lo, hi, coord)
        lo, hi = self._span(U, extra=g.coords())
        lo, hi = lo - 1, hi + 1

        def coord(k):
            out, c, m = U.at(k), G.identity, k
            while lo <= m <= hi:
                c = G.mul(c, g.at(m))
                m += s
                out = out & G.conjugate_set(c, U.at(m))
            return out

        return _canon(G, coord(lo), coord(hi), lo, hi, coord)

    def plus_minus(self, alpha, U, depth: int = 0):
        plus = self.forward_intersection(alpha, U)
        minus = self.forward_intersection(self.inverse(alpha), U)
        return PlusMinusParts(plus, minus, True, 0)

    def product_set_equality(self, A: TailedProductSubgroup, B: TailedProductSubgroup,
                             C: TailedProductSubgroup) -> bool:
        """A·B == C, decided coordinate-wise."""
        G = self.group
        if G.set_product(A.left_tail, B.left_tail) != C.left_tail:
            return False
        if G.set_product(A.right_tail, B.right_tail) != C.right_tail:
            return False
        lo, hi = self._span(A, B, C)
        return all(G.set_product(A.at(k), B.at(k)) == C.at(k) for k in range(lo, hi + 1))

    def tidy_above_criteria(self, alpha, U) -> dict[str, bool]:
        """All three equivalent tidy-above criteria, evaluated independently."""
        parts = self.plus_minus(alpha, U)
        plus, minus = parts.plus, parts.minus
        c1 = self.product_set_equality(plus, minus, U)
        c2 = self.index(self.apply(alpha, plus), plus) == self.relative_index(alpha, U)
        back = self.intersect(U, self.apply(self.inverse(alpha), U))
        c3 = self.product_set_equality(plus, back, U)
        return {"U=U+U-": c1, "index": c2, "U=U+(U∩α^-1U)": c3}

    def tidy_above(self, alpha, U) -> Verdict:
        crit = self.tidy_above_criteria(alpha, U)
        if len(set(crit.values())) != 1:
            raise AssertionError(f"tidy-above criteria disagree: {crit}")
        return Verdict.of(crit["U=U+U-"], crit, "coordinate-wise product criterion")

    def tidy_below(self, alpha, U) -> Verdict:
        """U++ and U-- are closed iff alpha(U+) = U+ and alpha^-1(U-) = U-."""
        parts = self.plus_minus(alpha, U)
        inv = self.inverse(alpha)
        a = self.apply(alpha, parts.plus) == parts.plus
        b = self.apply(inv, parts.minus) == parts.minus
        return Verdict.of(a and b, {"plus_stable": a, "minus_stable": b},
                          "stabilisation of U+ and U- chains")

    def l_criterion(self, alpha, U):
        if not U.open:
            raise NotRepresentable("L-criterion needs a compact open subgroup")
        if alpha.shift == 0:
            lt = self.forward_intersection(alpha, U)
            return LCriterionResult(
                Verdict.yes({"L": describe(lt)}, "inner automorphism: conjugates of U are periodic"),
                f"closed subgroup {describe(lt)} (intersection of a period of conjugates)")
        if self.apply(alpha, U) == U:
            return LCriterionResult(Verdict.yes({"L": describe(U)}, "U is alpha-invariant"),
                                    f"L = {describe(U)}")
        k = next(U.start + i for i, h in enumerate(U.entries) if h != self.full)
        f = min(self.full - U.at(k))
        x = FiniteSupportElement.make(self.group, {k: f})
        core = self.full
        for h in U.entries:
            core = core & h
        n0 = len(U.entries) + len(alpha.conj.support) + 2
        cert = {"element": x, "n0": n0, "D": sorted(core)}
        desc = ("finite-support sequences (dense, closure is G); "
                f"cofinitely in D={sorted(core)}")
        return LCriterionResult(Verdict.no(cert, "L_U = G is not contained in U"), desc)

    def check_l_certificate(self, alpha, U, cert, horizon: int = 6) -> bool:
        x, n0 = cert["element"], cert["n0"]
        if self.member(x, U):
            return False
        inv = self.inverse(alpha)
        fwd, bwd = U, U
        for n in range(1, n0 + horizon):
            fwd, bwd = self.apply(alpha, fwd), self.apply(inv, bwd)
            if n >= n0 and not (self.member(x, fwd) and self.member(x, bwd)):
                return False
        return True

    def step2(self, alpha, U) -> TailedProductSubgroup:
        return self.whole()

    # --- elements -----------------------------------------------------------------
    def power_member(self, alpha, n: int, U) -> bool | None:
        if not alpha.is_inner:
            return None
        return self.member(alpha.conj.power(n), U)

    def double_coset_power(self, U: TailedProductSubgroup, g: FiniteSupportElement, n: int) -> bool:
        """(U g U)^n == U g^n U, checked coordinate-wise."""
        G = self.group
        lo, hi = self._span(U, extra=g.coords())
        for k in range(lo, hi + 1):
            h, gk = U.at(k), g.at(k)
            dc = G.set_product(G.set_product(h, [gk]), h)
            lhs = dc
            for _ in range(n - 1):
                lhs = G.set_product(lhs, dc)
            rhs = G.set_product(G.set_product(h, [G.power(gk, n)]), h)
            if lhs != rhs:
                return False
        return True

    def power_coset(self, alpha, U, n: int) -> Verdict:
        if not alpha.is_inner:
            return Verdict.undecided({"n": n}, "shift automorphisms are not elements of G")
        ok = self.double_coset_power(U, alpha.conj, n)
        return Verdict.of(ok, {"n": n}, "coordinate-wise double coset enumeration")

    # --- U* -------------------------------------------------------------------------
    def ustar(self, alpha, U) -> Verdict:
        if self.apply(alpha, U) == U:
            return Verdict.yes({"U*": describe(U)}, "U is alpha-invariant, U* = U")
        if alpha.shift == 0:
            return Verdict.yes({"period": "finite"},
                               "inner automorphism: U* is a finite union of compact subgroups")
        if not alpha.conj.is_identity() or not U.open:
            return Verdict.undecided(None, "no closure rule for twisted shifts")
        k = next(U.start + i for i, h in enumerate(U.entries) if h != self.full)
        f = min(self.full - U.at(k))
        return Verdict.no({"constant": f, "coordinate": k, "shift": alpha.shift},
                          "constant sequence is a limit of alpha^i(U)-points but lies in no alpha^i(U)")

    def check_ustar_certificate(self, alpha, U, cert, horizon: int = 12) -> bool:
        """Validate the limit-point certificate on finite windows.

        The constant sequence c avoids coordinate k of U, so it lies in no
        alpha^i(U); the approximants agree with c on [-r, r] and lie in
        alpha^i(U) once its window has left [-r, r]."""
        f, k, s = cert["constant"], cert["coordinate"], cert["shift"]
        V = U
        for i in range(horizon):
            if f in V.at(k - i * s):
                return False
            V = self.apply(alpha, V)
        for r in range(1, 4):
            V, found = U, False
            for _ in range(horizon + 2 * r + len(U.entries)):
                if V.end < -r or V.start > r:
                    x = FiniteSupportElement.make(self.group, {j: f for j in range(-r, r + 1)})
                    found = self.member(x, V)
                    break
                V = self.apply(alpha, V)
            if not found:
                return False
        return True


def cylinder_word(order: int, width: int) -> list[int]:
    """Concatenation of all words of length ``width`` over range(order)."""
    out: list[int] = []
    word = [0] * width
    for _ in range(order ** width):
        out.extend(word)
        for i in reversed(range(width)):
            word[i] += 1
            if word[i] < order:
                break
            word[i] = 0
    return out
