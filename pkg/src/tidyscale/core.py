"""Shared domain types and the backend contract.

Every concrete group family (shift, tree, padic) provides a backend object
implementing :class:`Backend`.  Subgroups and automorphisms are immutable
backend-tagged values; all indices are Python ints (arbitrary precision).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence


class TidyError(Exception):
    """Base class for all library errors."""


class NotASubgroup(TidyError):
    pass


class InfiniteIndex(TidyError):
    pass


class LevelExceeded(TidyError):
    pass


class NotRepresentable(TidyError):
    pass


class NotClosed(TidyError):
    pass


class TooLarge(TidyError):
    pass


class RadiusExceeded(TidyError):
    pass


class NotNested(NotASubgroup):
    pass


class SegmentUnavailable(TidyError):
    pass


class BackendUnsupported(TidyError):
    pass


class DepthExceeded(TidyError):
    """Raised when no certificate is found within the depth budget; carries
    the Undecided verdict and the index chain computed so far."""

    def __init__(self, message: str, verdict: "Verdict", chain: tuple = ()):
        super().__init__(message)
        self.verdict = verdict
        self.chain = chain


class Answer(enum.Enum):
    YES = "Yes"
    NO = "No"
    UNDECIDED = "Undecided"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Verdict:
    """Three-valued decision.  Yes/No carry a certificate; Undecided carries
    the exhausted resource bound in ``certificate``."""

    answer: Answer
    certificate: Any = None
    reason: str = ""

    @classmethod
    def yes(cls, certificate: Any, reason: str = "") -> "Verdict":
        return cls(Answer.YES, certificate, reason)

    @classmethod
    def no(cls, certificate: Any, reason: str = "") -> "Verdict":
        return cls(Answer.NO, certificate, reason)

    @classmethod
    def undecided(cls, bound: Any, reason: str = "") -> "Verdict":
        return cls(Answer.UNDECIDED, bound, reason)

    @classmethod
    def of(cls, flag: bool, certificate: Any, reason: str = "") -> "Verdict":
        return cls(Answer.YES if flag else Answer.NO, certificate, reason)

    @property
    def is_yes(self) -> bool:
        return self.answer is Answer.YES

    @property
    def is_no(self) -> bool:
        return self.answer is Answer.NO

    @property
    def decided(self) -> bool:
        return self.answer is not Answer.UNDECIDED

    def __bool__(self) -> bool:
        raise TypeError("Verdict is three-valued; test .is_yes / .is_no")


def conj(a: Verdict, b: Verdict, certificate: Any = None, reason: str = "") -> Verdict:
    """Three-valued AND."""
    if a.is_no or b.is_no:
        return Verdict.no(certificate if certificate is not None else (a, b), reason)
    if a.is_yes and b.is_yes:
        return Verdict.yes(certificate if certificate is not None else (a, b), reason)
    return Verdict.undecided(certificate if certificate is not None else (a, b), reason)


@dataclass(frozen=True)
class FiniteGroupTable:
    """Finite group given by a multiplication table on indices 0..order-1."""

    order: int
    product: tuple[tuple[int, ...], ...]
    identity: int
    inverse: tuple[int, ...]
    label: str = ""
    names: tuple[str, ...] | None = field(default=None, compare=False)

    @classmethod
    def from_table(cls, table: Sequence[Sequence[int]], label: str = "",
                   names: Sequence[str] | None = None) -> "FiniteGroupTable":
        n = len(table)
        product = tuple(tuple(int(x) for x in row) for row in table)
        if any(len(row) != n for row in product):
            raise ValueError("multiplication table must be square")
        if any(not 0 <= x < n for row in product for x in row):
            raise ValueError("table entries out of range")
        ident = next((e for e in range(n)
                      if all(product[e][i] == i == product[i][e] for i in range(n))), None)
        if ident is None:
            raise ValueError("table has no two-sided identity")
        inverse = []
        for i in range(n):
            inv = [j for j in range(n) if product[i][j] == ident]
            if len(inv) != 1 or product[inv[0]][i] != ident:
                raise ValueError(f"element {i} has no two-sided inverse")
            inverse.append(inv[0])
        return cls(n, product, ident, tuple(inverse), label,
                   tuple(names) if names is not None else None)

    def mul(self, a: int, b: int) -> int:
        return self.product[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def power(self, a: int, n: int) -> int:
        if n < 0:
            a, n = self.inverse[a], -n
        r = self.identity
        for _ in range(n):
            r = self.product[r][a]
        return r

    def conjugate(self, g: int, x: int) -> int:
        """g x g^-1"""
        return self.product[self.product[g][x]][self.inverse[g]]

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.product[x][a]
            k += 1
        return k

    def elements(self) -> range:
        return range(self.order)

    def is_associative(self) -> bool:
        if self.order > 512:
            raise TooLarge("associativity check is exhaustive; order must be <= 512")
        p = self.product
        return all(p[p[a][b]][c] == p[a][p[b][c]]
                   for a in range(self.order) for b in range(self.order)
                   for c in range(self.order))

    def closure(self, generators: Iterable[int]) -> frozenset[int]:
        """Subgroup generated by ``generators``."""
        elems = {self.identity}
        frontier = [self.identity]
        gens = list(dict.fromkeys(generators))
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.product[x][g]
                    if y not in elems:
                        elems.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(elems)

    def is_subgroup(self, elems: Iterable[int]) -> bool:
        s = set(elems)
        if self.identity not in s:
            return False
        return all(self.product[a][b] in s for a in s for b in s)

    def set_product(self, a: Iterable[int], b: Iterable[int]) -> frozenset[int]:
        b = list(b)
        return frozenset(self.product[x][y] for x in a for y in b)

    def conjugate_set(self, g: int, s: Iterable[int]) -> frozenset[int]:
        return frozenset(self.conjugate(g, x) for x in s)

    def name(self, a: int) -> str:
        return self.names[a] if self.names else str(a)


@dataclass(frozen=True)
class ScaleResult:
    scale: int
    witness: Any
    index_chain: tuple[tuple[int, int], ...]
    certified: bool
    report: Any = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.scale < 1:
            raise ValueError("scale must be >= 1")
        if self.index_chain and self.index_chain[-1][1] != self.scale:
            raise ValueError("scale must equal the last entry of index_chain")


@dataclass(frozen=True)
class Budgets:
    """Resource bounds for semi-decisions.  Plain values, never globals."""

    max_depth: int = 32
    window: int = 3
    max_level: int = 4
    search_radius: int = 64
    periodic_bound: int = 64

    def scaled(self, factor: int) -> "Budgets":
        if factor < 1:
            raise ValueError("budget multiplier must be positive")
        return Budgets(self.max_depth * factor, self.window, self.max_level,
                       self.search_radius * factor, self.periodic_bound * factor)


class Backend:
    """Contract each group family implements.

    Subclasses override the six contract operations plus the tidiness hooks
    used by :mod:`tidyscale.engine`.  ``relative_index`` and
    ``intersect_with_image`` have generic defaults built on the contract.
    """

    tag: str = ""

    # --- contract -------------------------------------------------------
    def index(self, U, V) -> int:
        raise NotImplementedError

    def intersect(self, U, V):
        raise NotImplementedError

    def apply(self, alpha, U):
        raise NotImplementedError

    def member(self, g, U) -> bool:
        raise NotImplementedError

    def equal(self, U, V) -> bool:
        return U == V

    def normalises(self, alpha, U) -> bool:
        return self.equal(self.apply(alpha, U), U)

    # --- automorphism algebra ---------------------------------------------
    def inverse(self, alpha):
        raise NotImplementedError

    def compose(self, alpha, beta):
        """alpha after beta"""
        raise NotImplementedError

    def identity(self):
        raise NotImplementedError

    # --- derived ------------------------------------------------------------
    def relative_index(self, alpha, U) -> int:
        aU = self.apply(alpha, U)
        return self.index(aU, self.intersect(aU, U))

    def intersect_with_image(self, alpha, V, U):
        """U ∩ alpha(V)"""
        return self.intersect(U, self.apply(alpha, V))

    # --- tidiness hooks (engine) ----------------------------------------------
    def plus_minus(self, alpha, U, depth: int):
        raise NotImplementedError

    def tidy_above(self, alpha, U) -> Verdict:
        raise NotImplementedError

    def tidy_below(self, alpha, U) -> Verdict:
        raise NotImplementedError

    def l_criterion(self, alpha, U):
        raise NotImplementedError

    def step2(self, alpha, U):
        raise NotImplementedError

    def power_member(self, alpha, n: int, U) -> bool | None:
        """Whether the n-th power of the element inducing alpha lies in U;
        None when alpha is not inner."""
        return None

    def power_coset(self, alpha, U, n: int) -> Verdict:
        a_n = self.power(alpha, n)
        lhs = self.index(U, self.intersect(U, self.apply(a_n, U)))
        base = self.index(U, self.intersect(U, self.apply(alpha, U)))
        return Verdict.of(lhs == base ** n, {"n": n, "index_n": lhs, "index_1": base},
                          "index(U, U∩g^nUg^-n) vs index(U, U∩gUg^-1)^n")

    def power(self, alpha, n: int):
        if n < 0:
            alpha, n = self.inverse(alpha), -n
        r = self.identity()
        for _ in range(n):
            r = self.compose(alpha, r)
        return r

    def describe(self, U) -> str:
        return repr(U)
