"""Congruence subgroups of SL_2(Z_p) (or GL_2(Z_p)) under conjugation by
diag(p^a1, p^a2), computed exactly on finite quotients SL_2(Z/p^k).

Elements of Q_p-matrices are never stored.  A compact open subgroup is the
full preimage of a subgroup H of SL_2(Z/p^k); the automorphism scales the
upper-right entry by p^(a1-a2) and the lower-left entry by p^(a2-a1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .core import (Backend, LevelExceeded, NotNested,
                   NotRepresentable, TooLarge, Verdict)
from .engine import LCriterionResult, PlusMinusParts

Mat = tuple  # (a, b, c, d) residues

DEFAULT_CAP = 100_000
AMBIENTS = ("SL", "GL")


def _kernel_size(p: int, ambient: str) -> int:
    return p ** 3 if ambient == "SL" else p ** 4


def group_order(p: int, k: int, ambient: str = "SL") -> int:
    """|SL_2(Z/p^k)| or |GL_2(Z/p^k)| by formula."""
    if ambient == "SL":
        return p ** (3 * (k - 1)) * (p - 1) * p * (p + 1)
    return p ** (4 * (k - 1)) * (p * p - 1) * (p * p - p)


@lru_cache(maxsize=None)
def enumerate_group(p: int, k: int, ambient: str = "SL", cap: int = DEFAULT_CAP) -> tuple:
    """All matrices of SL_2(Z/p^k) (resp. GL_2), sorted."""
    if ambient not in AMBIENTS:
        raise ValueError(f"ambient must be one of {AMBIENTS}")
    if group_order(p, k, ambient) > cap:
        raise TooLarge(f"{ambient}_2(Z/{p}^{k}) has more than {cap} elements")
    q = p ** k
    out = []
    if ambient == "SL":
        for a in range(q):
            if a % p:
                ai = pow(a, -1, q)
                out.extend((a, b, c, (1 + b * c) * ai % q) for b in range(q) for c in range(q))
            else:
                for b in range(q):
                    if b % p == 0:
                        continue
                    bi = pow(b, -1, q)
                    out.extend((a, b, (a * d - 1) * bi % q, d) for d in range(q))
    else:
        out = [(a, b, c, d) for a in range(q) for b in range(q) for c in range(q)
               for d in range(q) if (a * d - b * c) % p]
    out.sort()
    return tuple(out)


def mat_mul(x: Mat, y: Mat, q: int) -> Mat:
    a, b, c, d = x
    e, f, g, h = y
    return ((a * e + b * g) % q, (a * f + b * h) % q, (c * e + d * g) % q, (c * f + d * h) % q)


def reduce(x: Mat, q: int) -> Mat:
    return tuple(v % q for v in x)


@dataclass(frozen=True)
class CongruenceSubgroup:
    """Full preimage of ``elements`` ⊆ SL_2(Z/p^level); canonical minimal level."""

    p: int
    ambient: str
    level: int
    elements: frozenset

    backend_tag = "padic"

    @property
    def modulus(self) -> int:
        return self.p ** self.level

    @property
    def density(self) -> Fraction:
        return Fraction(len(self.elements), group_order(self.p, self.level, self.ambient))

    def __repr__(self) -> str:
        return (f"CongruenceSubgroup(p={self.p}, {self.ambient}, level={self.level}, "
                f"order={len(self.elements)})")


def _canonical(p: int, ambient: str, level: int, elements: Iterable[Mat]) -> CongruenceSubgroup:
    elems = frozenset(elements)
    kernel = _kernel_size(p, ambient)
    while level > 1:
        q = p ** (level - 1)
        image = {reduce(x, q) for x in elems}
        if len(elems) != len(image) * kernel:
            break
        elems, level = frozenset(image), level - 1
    return CongruenceSubgroup(p, ambient, level, elems)


def closure(p: int, k: int, generators: Iterable[Sequence[int]], ambient: str = "SL",
            cap: int = DEFAULT_CAP) -> CongruenceSubgroup:
    """Preimage of the subgroup of SL_2(Z/p^k) generated by ``generators``."""
    q = p ** k
    gens = [reduce(tuple(int(v) for v in g), q) for g in generators]
    for g in gens:
        if len(g) != 4:
            raise ValueError("generators are 4-tuples (a, b, c, d)")
        det = (g[0] * g[3] - g[1] * g[2]) % q
        if ambient == "SL" and det != 1:
            raise ValueError(f"generator {g} does not have determinant 1 mod {q}")
        if ambient == "GL" and det % p == 0:
            raise ValueError(f"generator {g} is not invertible mod {q}")
    ident = (1, 0, 0, 1)
    elems = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = mat_mul(x, g, q)
                if y not in elems:
                    elems.add(y)
                    nxt.append(y)
                    if len(elems) > cap:
                        raise TooLarge(f"generated subgroup exceeds {cap} elements")
        frontier = nxt
    return _canonical(p, ambient, k, elems)


def from_predicate(p: int, k: int, predicate, ambient: str = "SL") -> CongruenceSubgroup:
    """Preimage of {x in SL_2(Z/p^k) : predicate(x)}; the caller guarantees it is a subgroup."""
    return _canonical(p, ambient, k, (x for x in enumerate_group(p, k, ambient) if predicate(x)))


def whole(p: int, ambient: str = "SL") -> CongruenceSubgroup:
    return CongruenceSubgroup(p, ambient, 1, frozenset(enumerate_group(p, 1, ambient)))


def upper_congruence(p: int, m: int = 1, ambient: str = "SL") -> CongruenceSubgroup:
    """{upper-right entry ≡ 0 mod p^m}; m = 1 is the tidy subgroup for diag(p, 1)."""
    q = p ** m
    return from_predicate(p, m, lambda x: x[1] % q == 0, ambient)


def lower_congruence(p: int, m: int = 1, ambient: str = "SL") -> CongruenceSubgroup:
    q = p ** m
    return from_predicate(p, m, lambda x: x[2] % q == 0, ambient)


def principal(p: int, k: int, ambient: str = "SL") -> CongruenceSubgroup:
    """Principal congruence subgroup Γ(p^k)."""
    return closure(p, k, [], ambient)


@dataclass(frozen=True)
class DiagConjAutomorphism:
    """x ↦ g x g⁻¹ for g = diag(p^a1, p^a2)."""

    exponents: tuple

    def __post_init__(self):
        if len(self.exponents) != 2:
            raise ValueError("only 2x2 matrices are supported")

    @property
    def shift(self) -> int:
        """Exponent applied to the upper-right entry."""
        return self.exponents[0] - self.exponents[1]

    @property
    def spread(self) -> int:
        return abs(self.shift)

    def inverse(self) -> "DiagConjAutomorphism":
        return DiagConjAutomorphism(tuple(-a for a in self.exponents))

    def compose(self, other: "DiagConjAutomorphism") -> "DiagConjAutomorphism":
        return DiagConjAutomorphism(tuple(a + b for a, b in zip(self.exponents, other.exponents)))


def diag_conj(a1: int, a2: int = 0) -> DiagConjAutomorphism:
    return DiagConjAutomorphism((a1, a2))


def valuation(x: Fraction, p: int) -> float:
    if x == 0:
        return math.inf
    v, num, den = 0, x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def residue(x: Fraction, p: int, q: int) -> int:
    """Image of a p-integral rational in Z/q."""
    x = Fraction(x)
    if x.denominator % p == 0:
        raise ValueError(f"{x} is not p-integral")
    return x.numerator * pow(x.denominator, -1, q) % q


@dataclass(frozen=True)
class PatternSubgroup:
    """Triangular closed subgroup described by residues.

    ``side`` "lower" means upper-right entry 0 and the free entry is the
    lower-left one; "upper" the reverse.  Membership: the residues
    (a, d, free) mod p^level lie in ``residues``.  When ``rational`` the free
    entry ranges over all of Q_p and only (a, d) is constrained.
    """

    p: int
    side: str
    level: int
    residues: frozenset
    rational: bool = False

    def contains(self, x: Sequence) -> bool:
        x = [Fraction(v) for v in x]
        zero, free = (1, 2) if self.side == "lower" else (2, 1)
        if x[zero] != 0:
            return False
        q = self.p ** self.level
        try:
            a, d = residue(x[0], self.p, q), residue(x[3], self.p, q)
        except ValueError:
            return False
        if self.rational:
            return (a, d) in {(r[0], r[1]) for r in self.residues}
        if valuation(x[free], self.p) < 0:
            return False
        return (a, d, residue(x[free], self.p, q)) in self.residues

    def free_valuation(self) -> int | None:
        """m when the pattern is exactly {diag in D, free ∈ p^m Z_p}, else None."""
        if self.rational:
            return None
        q = self.p ** self.level
        diag = {(a, d) for a, d, _ in self.residues}
        for m in range(self.level + 1):
            step = self.p ** m
            full = {(a, d, x) for a, d in diag for x in range(0, q, step)}
            if full == set(self.residues):
                return m
        return None

    def describe(self) -> str:
        if self.rational:
            free = "Q_p"
        else:
            m = self.free_valuation()
            free = ("Z_p" if m == 0 else f"p^{m}Z_p") if m is not None else \
                f"<{len(self.residues)} residues mod p^{self.level}>"
        if self.side == "lower":
            return f"[[*, 0], [{free}, *]]"
        return f"[[*, {free}], [0, *]]"

    def __repr__(self) -> str:
        return f"PatternSubgroup({self.describe()}, p={self.p})"


def borel_counting_check(p: int) -> Verdict:
    """|lower·upper| = (p-1)p^2 against |SL_2(F_p)| = (p-1)p(p+1) by enumeration."""
    if p > 13:
        raise TooLarge("borel counting is limited to p <= 13")
    G = enumerate_group(p, 1, "SL")
    lower = [x for x in G if x[1] == 0]
    upper = [x for x in G if x[2] == 0]
    prod = {mat_mul(x, y, p) for x in lower for y in upper}
    cert = {"p": p, "products": len(prod), "group": len(G),
            "expected_products": (p - 1) * p * p, "expected_group": (p - 1) * p * (p + 1)}
    ok = len(prod) == cert["expected_products"] and len(G) == cert["expected_group"] \
        and len(prod) < len(G)
    return Verdict.of(ok, cert, "lower·upper is a proper subset of SL_2(F_p)")


class PadicBackend(Backend):
    tag = "padic"

    def __init__(self, p: int, ambient: str = "SL", max_level: int = 4, cap: int = DEFAULT_CAP):
        if p < 2 or any(p % r == 0 for r in range(2, int(p ** 0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        if ambient not in AMBIENTS:
            raise ValueError(f"ambient must be one of {AMBIENTS}")
        self.p, self.ambient, self.max_level, self.cap = p, ambient, max_level, cap

    # --- levels --------------------------------------------------------------------
    def _level(self, k: int) -> None:
        if k > self.max_level:
            raise LevelExceeded(f"level {k} exceeds the cap {self.max_level}")

    def _group(self, k: int) -> tuple:
        self._level(k)
        return enumerate_group(self.p, k, self.ambient, self.cap)

    def lift(self, U: CongruenceSubgroup, k: int) -> frozenset:
        """Element set of U at level k >= U.level."""
        if k < U.level:
            raise ValueError("cannot lift to a lower level")
        if k == U.level:
            return U.elements
        q = U.modulus
        return frozenset(x for x in self._group(k) if reduce(x, q) in U.elements)

    def _check(self, U: CongruenceSubgroup) -> None:
        if U.p != self.p or U.ambient != self.ambient:
            raise ValueError("subgroup belongs to a different p or ambient group")

    def make(self, k: int, elements: Iterable[Mat]) -> CongruenceSubgroup:
        return _canonical(self.p, self.ambient, k, elements)

    # --- contract ------------------------------------------------------------------------
    def index(self, U: CongruenceSubgroup, V: CongruenceSubgroup) -> int:
        """|U : V| as an exact ratio of densities at a common level."""
        self._check(U)
        self._check(V)
        k = max(U.level, V.level)
        A, B = self.lift(U, k), self.lift(V, k)
        if not B <= A:
            raise NotNested("V is not contained in U")
        return len(A) // len(B)

    density_index = index

    def intersect(self, U, V) -> CongruenceSubgroup:
        k = max(U.level, V.level)
        return self.make(k, self.lift(U, k) & self.lift(V, k))

    def conj_intersect(self, alpha: DiagConjAutomorphism, U: CongruenceSubgroup) -> CongruenceSubgroup:
        """alpha(U) ∩ ambient integral group, exact at level U.level + spread."""
        self._check(U)
        e, k = alpha.shift, U.level
        if e == 0:
            return U
        K = k + abs(e)
        Q, q, pe = self.p ** K, U.modulus, self.p ** abs(e)
        out = []
        for x in self._divisible_entry(K, 1 if e > 0 else 2, pe):
            a, b, c, d = x
            # preimage under alpha: upper-right times p^-e, lower-left times p^e
            y = (a, b // pe, c * pe, d) if e > 0 else (a, b * pe, c // pe, d)
            if reduce(y, q) in U.elements:
                out.append(x)
        return self.make(K, out)

    def _divisible_entry(self, K: int, i: int, pe: int):
        """Level-K matrices whose off-diagonal entry ``i`` is divisible by pe
        (a multiple of p, so both diagonal entries are units)."""
        self._level(K)
        Q, p = self.p ** K, self.p
        if group_order(p, K, self.ambient) // pe > self.cap * p:
            raise TooLarge(f"level {K} slice exceeds the enumeration cap")
        units = [a for a in range(Q) if a % p]
        j = 3 - i
        for a in units:
            for m in range(0, Q, pe):
                for f in range(Q):
                    if self.ambient == "SL":
                        # a*d - m*f = 1 regardless of which corner holds m
                        x = [a, 0, 0, (1 + m * f) * pow(a, -1, Q) % Q]
                        x[i], x[j] = m, f
                        yield tuple(x)
                    else:
                        for d in units:
                            x = [a, 0, 0, d]
                            x[i], x[j] = m, f
                            if (a * d - m * f) % p:
                                yield tuple(x)

    def apply(self, alpha, U) -> CongruenceSubgroup:
        img = self.conj_intersect(alpha, U)
        if img.density != U.density:
            raise NotRepresentable("alpha(U) is not contained in the integral group")
        return img

    def normalises(self, alpha, U) -> bool:
        try:
            return self.apply(alpha, U) == U
        except NotRepresentable:
            return False

    def member(self, g: Sequence, U: CongruenceSubgroup) -> bool:
        x = [Fraction(v) for v in g]
        det = x[0] * x[3] - x[1] * x[2]
        if self.ambient == "SL" and det != 1:
            return False
        if self.ambient == "GL" and valuation(det, self.p) != 0:
            return False
        if any(valuation(v, self.p) < 0 for v in x):
            return False
        return tuple(residue(v, self.p, U.modulus) for v in x) in U.elements

    def equal(self, U, V) -> bool:
        return U == V

    def inverse(self, alpha):
        return alpha.inverse()

    def compose(self, alpha, beta):
        return alpha.compose(beta)

    def identity(self):
        return DiagConjAutomorphism((0, 0))

    def relative_index(self, alpha, U) -> int:
        """|alpha(U) : alpha(U) ∩ U| = |U : U ∩ alpha⁻¹(U)| since alpha preserves Haar measure."""
        return self.index(U, self.intersect(U, self.conj_intersect(alpha.inverse(), U)))

    def intersect_with_image(self, alpha, V, U):
        return self.intersect(U, self.conj_intersect(alpha, V))

    def describe(self, U) -> str:
        q = U.modulus
        named = {
            "whole": frozenset(self._group(U.level)),
            f"{{upper-right ≡ 0 mod {q}}}": frozenset(x for x in self._group(U.level) if x[1] == 0),
            f"{{lower-left ≡ 0 mod {q}}}": frozenset(x for x in self._group(U.level) if x[2] == 0),
            f"Γ({q})": frozenset({(1, 0, 0, 1)}),
        }
        for name, elems in named.items():
            if elems == U.elements:
                return name if name != "whole" else f"{self.ambient}2(Z_{self.p})"
        return f"<level {U.level}, index {self.index(self.ambient_whole(), U)} in {self.ambient}2(Z_{self.p})>"

    # --- plus and minus parts --------------------------------------------------------------
    def _triangular_image(self, alpha, U, forward: bool) -> frozenset:
        """Residues mod p^k of U+ (forward) or U- as a subset of U's element set.

        x ∈ U+ iff alpha^-n(x) ∈ U for all n >= 0; this forces one
        off-diagonal entry to vanish and multiplies the other by p^(n|e|),
        which is eventually 0 mod p^k.
        """
        e, k, q = alpha.shift, U.level, U.modulus
        if e == 0:
            return U.elements
        lower = (e > 0) == forward  # U+ for e > 0 is lower triangular
        zero, free = (1, 2) if lower else (2, 1)
        steps = -(-k // abs(e))
        out = []
        for x in U.elements:
            if x[zero] != 0:
                continue
            ok = True
            for n in range(1, steps + 1):
                y = list(x)
                y[free] = x[free] * self.p ** (n * abs(e)) % q
                if tuple(y) not in U.elements:
                    ok = False
                    break
            if ok:
                out.append(x)
        return frozenset(out)

    def pattern_parts(self, alpha, U) -> tuple[PatternSubgroup, PatternSubgroup, Verdict]:
        e, k = alpha.shift, U.level
        if e == 0:
            return None, None, Verdict.yes(None, "alpha is trivial: U+ = U- = U")
        plus = self._pattern(self._triangular_image(alpha, U, True), "lower" if e > 0 else "upper", k)
        minus = self._pattern(self._triangular_image(alpha, U, False), "upper" if e > 0 else "lower", k)
        pp = PatternSubgroup(self.p, plus.side, k, self._diag_residues(U), True)
        mm = PatternSubgroup(self.p, minus.side, k, self._diag_residues(U), True)
        return plus, minus, Verdict.yes({"plus_plus": pp, "minus_minus": mm},
                                        "U++ and U-- are triangular patterns, hence closed")

    def _pattern(self, elems: frozenset, side: str, k: int) -> PatternSubgroup:
        free = 2 if side == "lower" else 1
        return PatternSubgroup(self.p, side, k, frozenset((x[0], x[3], x[free]) for x in elems))

    def _diag_residues(self, U) -> frozenset:
        return frozenset((x[0], x[3], 0) for x in U.elements if x[1] == 0 and x[2] == 0)

    def plus_minus(self, alpha, U, depth: int = 0) -> PlusMinusParts:
        if alpha.shift == 0:
            return PlusMinusParts(U, U, True, 0)
        plus, minus, _ = self.pattern_parts(alpha, U)
        return PlusMinusParts(plus, minus, True, 0)

    def plus_index(self, alpha, U) -> int:
        """|alpha(U+) : U+| = |U+ : alpha⁻¹(U+)|, counted at level k + |e|."""
        e, k = alpha.shift, U.level
        if e == 0:
            return 1
        plus = self._triangular_image(alpha, U, True)
        free = 2 if e > 0 else 1
        K, q = k + abs(e), U.modulus
        pe = self.p ** abs(e)
        # U+ at level K: residues lift freely; alpha⁻¹(U+) divides the free entry's range by p^|e|
        tri = self._triangular(K, free)
        big = sum(1 for x in tri if reduce(x, q) in plus)
        small = sum(1 for x in tri if x[free] % pe == 0
                    and reduce(_set(x, free, x[free] // pe), q) in plus)
        if small == 0 or big % small:
            raise AssertionError("alpha⁻¹(U+) is not a finite-index subgroup of U+")
        return big // small

    def _triangular(self, K: int, free: int) -> list:
        """Level-K matrices whose only nonzero off-diagonal entry is ``free``."""
        self._level(K)
        Q, p = self.p ** K, self.p
        units = [a for a in range(Q) if a % p]
        diag = [(a, pow(a, -1, Q)) for a in units] if self.ambient == "SL" else \
            [(a, d) for a in units for d in units]
        return [_set((a, 0, 0, d), free, f) for a, d in diag for f in range(Q)]

    # --- tidiness -------------------------------------------------------------------------
    def tidy_above_criteria(self, alpha, U) -> dict:
        e, k = alpha.shift, U.level
        if e == 0:
            return {"U=U+U-": True, "index": True, "U=U+(U∩α^-1U)": True}
        plus = self._triangular_image(alpha, U, True)
        minus = self._triangular_image(alpha, U, False)
        q = U.modulus
        both = plus & minus
        factor = len(plus) * len(minus) // len(both) == len(U.elements)
        index = self.plus_index(alpha, U) == self.relative_index(alpha, U)
        W = self.intersect(U, self.conj_intersect(alpha.inverse(), U))
        # |P W| = |P| |W| / |P ∩ W| at level K, where P is the preimage of U+ mod q;
        # only the intersection is enumerated
        K = max(W.level, k)
        Wk = self.lift(W, K)
        g = lambda lvl: group_order(self.p, lvl, self.ambient)
        P_size = len(plus) * g(K) // g(k)
        meet = sum(1 for x in Wk if reduce(x, q) in plus)
        descent = P_size * len(Wk) // meet == len(U.elements) * g(K) // g(k)
        return {"U=U+U-": factor, "index": index, "U=U+(U∩α^-1U)": descent}

    def tidy_above(self, alpha, U) -> Verdict:
        crit = self.tidy_above_criteria(alpha, U)
        if len(set(crit.values())) != 1:
            raise AssertionError(f"tidy-above criteria disagree: {crit}")
        return Verdict.of(crit["U=U+U-"], crit, "U = U+U- on the level-k quotient")

    def tidy_below(self, alpha, U) -> Verdict:
        return self.pattern_parts(alpha, U)[2]

    def l_criterion(self, alpha, U) -> LCriterionResult:
        diag = self._diag_residues(U)
        return LCriterionResult(
            Verdict.yes({"diagonal_residues": len(diag)},
                        "every diagonal matrix with residue in U lies in U"),
            "L_U = diagonal matrices in U: off-diagonal entries of elements in "
            "all but finitely many conjugates are forced to 0")

    def step2(self, alpha, U):
        return U

    def power_member(self, alpha, n: int, U) -> bool | None:
        if self.ambient == "SL":
            return None
        return alpha.exponents == (0, 0) or n == 0

    def ambient_whole(self) -> CongruenceSubgroup:
        return whole(self.p, self.ambient)


def _set(x: Mat, i: int, v: int) -> Mat:
    y = list(x)
    y[i] = v
    return tuple(y)
