"""Brute-force oracles that only use the backend contract (index, intersect,
apply), never the tidiness code.  They supply independent evidence for the
engine's answers."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Any, Callable, Sequence

from .core import FiniteGroupTable, NotRepresentable, TooLarge
from .engine import backend_of


@dataclass(frozen=True)
class SubgroupFamily:
    backend_tag: str
    members: tuple
    exhaustiveness: tuple  # ("exhaustive-within", bounds) or ("sampled", seed, count)

    def __post_init__(self):
        if not self.members:
            raise ValueError("a family needs at least one member")
        if len(set(self.members)) != len(self.members):
            raise ValueError("family members must be pairwise distinct")

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def make_family(members: Sequence, exhaustiveness: tuple) -> SubgroupFamily:
    """Deduplicate (keeping first occurrences) and wrap."""
    uniq = tuple(dict.fromkeys(members))
    return SubgroupFamily(uniq[0].backend_tag, uniq, exhaustiveness)


def enumerate_subgroups(table: FiniteGroupTable) -> list[frozenset]:
    """All subgroups, by closing ⟨H, g⟩ from the trivial subgroup; sorted by
    (order, sorted elements)."""
    if table.order > 512:
        raise TooLarge("subgroup enumeration is limited to order <= 512")
    trivial = frozenset({table.identity})
    seen = {trivial}
    frontier = [trivial]
    while frontier:
        nxt = []
        for H in frontier:
            for g in table.elements():
                if g in H:
                    continue
                K = table.closure(list(H) + [g])
                if K not in seen:
                    seen.add(K)
                    nxt.append(K)
        frontier = nxt
    return sorted(seen, key=lambda H: (len(H), sorted(H)))


def oracle_relative_index(alpha, U) -> int:
    """|alpha(U) : alpha(U) ∩ U| from contract operations.  When alpha(U)
    leaves the representable ambient (p-adic case) use the measure-preserving
    identity |U : U ∩ alpha⁻¹(U)| instead."""
    be = backend_of(U)
    try:
        aU = be.apply(alpha, U)
    except NotRepresentable:
        inv = be.inverse(alpha)
        return be.index(U, be.intersect_with_image(inv, U, U))
    return be.index(aU, be.intersect(aU, U))


def brute_min_relative_index(alpha, family: SubgroupFamily) -> tuple[int, list]:
    """Exact minimum of the relative index over ``family`` and every member
    attaining it, in family order."""
    values = [(oracle_relative_index(alpha, U), i) for i, U in enumerate(family.members)]
    best = min(v for v, _ in values)
    return best, [family.members[i] for v, i in values if v == best]


# --- family builders ------------------------------------------------------------------------

def padic_level_family(p: int, ambient: str = "SL") -> SubgroupFamily:
    """Preimages of all subgroups of SL_2(F_p)."""
    from . import groups, padic

    if ambient != "SL":
        raise ValueError("level-1 families are built for SL only")
    table = groups.sl2_fp(p)
    mats = [tuple(int(v) for v in name.strip("()").split(",")) for name in table.names]
    members = [padic.CongruenceSubgroup(p, "SL", 1, frozenset(mats[i] for i in H))
               for H in enumerate_subgroups(table)]
    return make_family(members, ("exhaustive-within", {"p": p, "level": 1}))


def tree_ball_family(degree: int, length: int, radius: int = 2) -> SubgroupFamily:
    """Stabilisers of all subtrees inside the radius ball around the first
    axis edge of the translation preset."""
    from . import tree

    phi = tree.translation(degree, length)
    axis = tree.classify(phi)
    v0, v1 = axis.vertex(0), axis.vertex(1)
    ball = sorted(set(tree.ball(v0, radius, degree)) | set(tree.ball(v1, radius, degree)),
                  key=lambda v: (len(v), v))
    if len(ball) > 20:
        raise TooLarge("ball too large for subset enumeration")
    members = []
    for mask in range(1, 1 << len(ball)):
        S = [ball[i] for i in range(len(ball)) if mask >> i & 1]
        if _connected(S, degree):
            members.append(tree.fix(degree, S))
    return make_family(members, ("exhaustive-within", {"degree": degree, "length": length,
                                                       "radius": radius}))


def _connected(S: Sequence, degree: int) -> bool:
    from . import tree

    s = set(S)
    stack, seen = [S[0]], {S[0]}
    while stack:
        v = stack.pop()
        for w in tree.neighbours(v, degree):
            if w in s and w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(s)


def shift_window_family(table: FiniteGroupTable, lo: int, hi: int,
                        subgroup_choices: Sequence[frozenset] | None = None) -> SubgroupFamily:
    """All windowed subgroups with entries in ``subgroup_choices`` on [lo, hi]
    and full tails.  Defaults to {trivial, F}."""
    from . import shift

    full = frozenset(table.elements())
    choices = list(subgroup_choices) if subgroup_choices is not None else \
        [frozenset({table.identity}), full]
    canon = [shift.make_windowed(table, {lo + i: H for i, H in enumerate(combo)})
             for combo in itertools.product(choices, repeat=hi - lo + 1)]
    return make_family(canon, ("exhaustive-within", {"window": (lo, hi),
                                                     "choices": len(choices)}))


def sampled(seed: int, count: int, draw: Callable[[random.Random], Any],
            backend_tag: str | None = None) -> SubgroupFamily:
    """``count`` draws from a generator seeded with a recorded 64-bit seed;
    duplicates are dropped."""
    rng = random.Random(seed & (2 ** 64 - 1))
    members = [draw(rng) for _ in range(count)]
    return make_family(members, ("sampled", seed, count))
