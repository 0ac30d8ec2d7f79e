"""Named finite group presets given by multiplication tables."""

from __future__ import annotations

import itertools
import re

from .core import FiniteGroupTable


def cyclic(n: int) -> FiniteGroupTable:
    if n < 1:
        raise ValueError("cyclic group order must be positive")
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return FiniteGroupTable.from_table(table, f"Z{n}", [str(i) for i in range(n)])


def symmetric(n: int) -> FiniteGroupTable:
    """S_n on points 1..n, elements listed in lexicographic order so that the
    identity is index 0.  Product is composition (a*b)(x) = a(b(x))."""
    perms = list(itertools.permutations(range(n)))
    if len(perms) > 24:
        raise ValueError("symmetric presets are limited to order <= 24")
    pos = {p: i for i, p in enumerate(perms)}
    table = [[pos[tuple(a[b[x]] for x in range(n))] for b in perms] for a in perms]
    return FiniteGroupTable.from_table(table, f"S{n}", [_cycle_name(p) for p in perms])


def _cycle_name(perm: tuple[int, ...]) -> str:
    seen, cycles = set(), []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cyc, x = [], start
        while x not in seen:
            seen.add(x)
            cyc.append(str(x + 1))
            x = perm[x]
        cycles.append("(" + "".join(cyc) + ")")
    return "".join(cycles) or "e"


def sl2_fp(p: int) -> FiniteGroupTable:
    """SL_2(F_p) as a table; matrices (a, b, c, d) in lexicographic order,
    identity first."""
    mats = [(a, b, c, d) for a in range(p) for b in range(p) for c in range(p)
            for d in range(p) if (a * d - b * c) % p == 1]
    mats.sort(key=lambda m: (m != (1, 0, 0, 1), m))
    pos = {m: i for i, m in enumerate(mats)}

    def mul(x, y):
        a, b, c, d = x
        e, f, g, h = y
        return ((a * e + b * g) % p, (a * f + b * h) % p,
                (c * e + d * g) % p, (c * f + d * h) % p)

    table = [[pos[mul(x, y)] for y in mats] for x in mats]
    return FiniteGroupTable.from_table(table, f"SL2(F{p})", [str(m) for m in mats])


def preset(name: str) -> FiniteGroupTable:
    """Parse ``Z<n>``, ``C<n>``, ``S<n>`` or ``SL2F<p>``."""
    m = re.fullmatch(r"(?:Z|C)(\d+)", name)
    if m:
        return cyclic(int(m.group(1)))
    m = re.fullmatch(r"S(\d+)", name)
    if m:
        return symmetric(int(m.group(1)))
    m = re.fullmatch(r"SL2F(\d+)", name)
    if m:
        return sl2_fp(int(m.group(1)))
    raise ValueError(f"unknown group preset {name!r}")
