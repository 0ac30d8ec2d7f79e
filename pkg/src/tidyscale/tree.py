"""Aut(T_d) through lazily evaluated portraits.

Vertices of T_d are reduced words over {1..d} with no letter repeated twice
in a row, i.e. elements of the free product of d copies of Z/2; the tree is
its Cayley graph, so the neighbours of v are v·a for every letter a.  Compact
open subgroups are pointwise stabilisers Fix(S) of finite subtrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import (Backend, NotASubgroup, NotNested, RadiusExceeded,
                   SegmentUnavailable, Verdict)
from .engine import LCriterionResult, PlusMinusParts

Vertex = tuple  # tuple[int, ...]
BASE: Vertex = ()


def mul(u: Vertex, v: Vertex) -> Vertex:
    """Product in the free product of Z/2's (reduced concatenation)."""
    k, n = 0, min(len(u), len(v))
    while k < n and u[-1 - k] == v[k]:
        k += 1
    return tuple(u[:len(u) - k]) + tuple(v[k:])


def reduced(word: Iterable[int], degree: int) -> Vertex:
    out: Vertex = ()
    for a in word:
        if not 1 <= a <= degree:
            raise ValueError(f"letter {a} outside 1..{degree}")
        out = mul(out, (a,))
    return out


def neighbours(v: Vertex, degree: int) -> list[Vertex]:
    return [mul(v, (a,)) for a in range(1, degree + 1)]


def dist(u: Vertex, v: Vertex) -> int:
    return len(mul(tuple(reversed(u)), v))


def _common_prefix(u: Vertex, v: Vertex) -> int:
    n = 0
    for a, b in zip(u, v):
        if a != b:
            break
        n += 1
    return n


def geodesic(u: Vertex, v: Vertex) -> list[Vertex]:
    """Path from u up to the common prefix of u and v, then down to v."""
    c = _common_prefix(u, v)
    return [u[:j] for j in range(len(u), c - 1, -1)] + [v[:j] for j in range(c + 1, len(v) + 1)]


def hull(vertices: Iterable[Vertex]) -> frozenset:
    vs = list(vertices)
    if not vs:
        return frozenset()
    top = len(vs[0])
    for v in vs[1:]:
        top = min(top, _common_prefix(vs[0], v))
    out = set()
    for v in vs:
        for j in range(len(v), top - 1, -1):
            if v[:j] in out:
                break
            out.add(v[:j])
    return frozenset(out)


def closure(vertices: Iterable[Vertex], degree: int) -> frozenset:
    """Add the last free neighbour of any vertex with d-1 neighbours in the
    set, repeatedly: Fix(S) fixes exactly this set."""
    s = set(vertices)
    if len(s) < 2:
        return frozenset(s)
    todo = list(s)
    while todo:
        v = todo.pop()
        nb = neighbours(v, degree)
        out = [w for w in nb if w not in s]
        if len(out) == 1:
            s.add(out[0])
            todo.append(out[0])
            todo.extend(w for w in neighbours(out[0], degree) if w in s)
    return frozenset(s)


def ball(center: Vertex, radius: int, degree: int) -> list[Vertex]:
    seen = {center}
    layer = [center]
    for _ in range(radius):
        nxt = []
        for v in layer:
            for w in neighbours(v, degree):
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        layer = nxt
    return sorted(seen, key=lambda v: (len(v), v))


def _falling(n: int, k: int) -> int:
    return math.perm(n, k) if 0 <= k <= n else 0


def stab_index(S: Iterable[Vertex], S2: Iterable[Vertex], degree: int) -> int:
    """|Fix(S) : Fix(S2)| for S ⊆ S2, counted as the number of embeddings of
    S2 that restrict to the identity on S."""
    S, S2 = frozenset(S), frozenset(S2)
    if not S:
        raise ValueError("Fix of the empty set is not compact")
    if not S <= S2:
        raise NotNested("S must be contained in S'")
    placed = set(S)
    queue = sorted(S)
    result = 1
    while queue:
        u = queue.pop()
        nb = neighbours(u, degree)
        new = [w for w in nb if w in S2 and w not in placed]
        if not new:
            continue
        have = sum(1 for w in nb if w in placed)
        result *= _falling(degree - have, len(new))
        placed.update(new)
        queue.extend(new)
    if placed != S2:
        raise NotNested("S' is not connected to S")
    return result


class TreeAutomorphism:
    """Base class: an automorphism of T_d evaluated vertex by vertex."""

    backend_tag = "tree"

    def __init__(self, degree: int):
        self.degree = degree
        self._cache: dict = {}
        self._axis = None

    def __call__(self, v: Vertex) -> Vertex:
        v = tuple(v)
        img = self._cache.get(v)
        if img is None:
            img = self._eval(v)
            self._cache[v] = img
        return img

    def _eval(self, v: Vertex) -> Vertex:
        raise NotImplementedError

    def image(self, vertices: Iterable[Vertex]) -> frozenset:
        return frozenset(self(v) for v in vertices)

    def inverse(self) -> "TreeAutomorphism":
        return InverseAutomorphism(self)

    def __mul__(self, other: "TreeAutomorphism") -> "TreeAutomorphism":
        return ComposedAutomorphism(self, other)


class PortraitAutomorphism(TreeAutomorphism):
    """phi(x·a) = phi(x)·pi_x(a), with pi_x an override or the default letter
    permutation.  Off the base vertex pi_x is aligned so that the edge back
    to the parent goes to the edge back to the parent's image: if pi_x sends
    the back letter elsewhere, the letter that pi_x sends to the required
    back letter takes its place."""

    def __init__(self, degree: int, base_image: Sequence[int] = (),
                 default: Sequence[int] | None = None,
                 local_permutations: dict | None = None):
        super().__init__(degree)
        if degree < 3:
            raise ValueError("degree must be at least 3")
        self.base_image = reduced(base_image, degree)
        self.default = self._perm(default if default is not None else range(1, degree + 1))
        self.local = {reduced(k, degree): self._perm(p)
                      for k, p in (local_permutations or {}).items()}
        self._states: dict = {}

    def _perm(self, p: Sequence[int]) -> tuple:
        p = tuple(int(x) for x in p)
        if sorted(p) != list(range(1, self.degree + 1)):
            raise ValueError(f"{p} is not a permutation of 1..{self.degree}")
        return p

    def _eval(self, v: Vertex) -> Vertex:
        # resume from the longest prefix already evaluated
        states = self._states
        i = len(v)
        while i > 0 and v[:i] not in states:
            i -= 1
        img, back = states.get(v[:i], (self.base_image, None))
        for i in range(i, len(v)):
            x, a = v[:i], v[i]
            perm = self.local.get(x, self.default)
            letter = perm[a - 1]
            if back is not None:
                c = x[-1]
                if perm[c - 1] != back and letter == back:
                    letter = perm[c - 1]
            img = mul(img, (letter,))
            back = letter
            states[v[:i + 1]] = (img, back)
        return img

    def __repr__(self) -> str:
        return (f"PortraitAutomorphism(d={self.degree}, base_image={self.base_image}, "
                f"default={self.default}, local={self.local})")


class InverseAutomorphism(TreeAutomorphism):
    def __init__(self, phi: TreeAutomorphism):
        super().__init__(phi.degree)
        self.phi = phi

    def inverse(self) -> TreeAutomorphism:
        return self.phi

    def _preimage_of_base(self) -> Vertex:
        v = BASE
        while self.phi(v) != BASE:
            here = len(self.phi(v))
            v = next(u for u in neighbours(v, self.degree) if len(self.phi(u)) < here)
        return v

    def _eval(self, w: Vertex) -> Vertex:
        if not w:
            return self._preimage_of_base()
        x = self(w[:-1])
        return next(u for u in neighbours(x, self.degree) if self.phi(u) == w)

    def __repr__(self) -> str:
        return f"Inverse({self.phi!r})"


class ComposedAutomorphism(TreeAutomorphism):
    """outer ∘ inner"""

    def __init__(self, outer: TreeAutomorphism, inner: TreeAutomorphism):
        if outer.degree != inner.degree:
            raise ValueError("degree mismatch")
        super().__init__(outer.degree)
        self.outer, self.inner = outer, inner

    def _eval(self, v: Vertex) -> Vertex:
        return self.outer(self.inner(v))

    def inverse(self) -> TreeAutomorphism:
        return ComposedAutomorphism(self.inner.inverse(), self.outer.inverse())

    def __repr__(self) -> str:
        return f"({self.outer!r} ∘ {self.inner!r})"


def identity(degree: int) -> PortraitAutomorphism:
    return PortraitAutomorphism(degree)


def translation(degree: int, length: int) -> PortraitAutomorphism:
    """Translation by ``length`` along the line through the words 1212..., 2121..."""
    if length < 1:
        raise ValueError("translation length must be >= 1")
    word = tuple(1 if i % 2 == 0 else 2 for i in range(length))
    default = list(range(1, degree + 1))
    if length % 2:
        default[0], default[1] = 2, 1
    return PortraitAutomorphism(degree, word, default)


def swap(degree: int) -> PortraitAutomorphism:
    """Elliptic: exchanges directions 1 and 2 at the base vertex."""
    perm = list(range(1, degree + 1))
    perm[0], perm[1] = 2, 1
    return PortraitAutomorphism(degree, (), None, {(): perm})


def rotation(degree: int) -> PortraitAutomorphism:
    """Elliptic: cycles all directions at the base vertex."""
    return PortraitAutomorphism(degree, (), None, {(): list(range(2, degree + 1)) + [1]})


def inversion(degree: int) -> PortraitAutomorphism:
    """Elliptic: flips the edge between the base vertex and (1,)."""
    return PortraitAutomorphism(degree, (1,))


PRESETS = {"translation": translation, "swap": swap, "rotation": rotation,
           "inversion": inversion}


@dataclass(frozen=True)
class FixSubgroup:
    """Pointwise stabiliser of a finite subtree; ``vertices`` is canonical
    (the closed convex hull)."""

    degree: int
    vertices: frozenset

    backend_tag = "tree"

    @property
    def compact(self) -> bool:
        return True

    @property
    def open(self) -> bool:
        return True

    def __repr__(self) -> str:
        vs = sorted(self.vertices, key=lambda v: (len(v), v))
        return "Fix{" + ", ".join("".join(map(str, v)) or "ø" for v in vs) + "}"


def fix(degree: int, vertices: Iterable[Sequence[int]]) -> FixSubgroup:
    vs = [reduced(v, degree) for v in vertices]
    if not vs:
        raise ValueError("Fix of the empty set is not compact")
    return FixSubgroup(degree, closure(hull(vs), degree))


@dataclass
class AxisData:
    kind: str  # "elliptic" or "hyperbolic"
    phi: TreeAutomorphism
    fixed: tuple = ()  # elliptic: (v,) or an edge (v, w)
    length: int = 0
    start: Vertex = BASE
    _memo: dict | None = None

    @property
    def hyperbolic(self) -> bool:
        return self.kind == "hyperbolic"

    def vertex(self, i: int, bound: int = 10_000) -> Vertex:
        """i-th axis vertex; vertex(0) = start, vertex(length) = phi(start)."""
        if not self.hyperbolic:
            raise ValueError("elliptic automorphisms have no axis")
        if abs(i) > bound:
            raise SegmentUnavailable(f"axis index {i} beyond bound {bound}")
        if self._memo is None:
            self._memo = {}
        if i in self._memo:
            return self._memo[i]
        q, r = divmod(i, self.length)
        v = geodesic(self.start, self.phi(self.start))[r]
        f = self.phi if q > 0 else self.phi.inverse()
        for _ in range(abs(q)):
            v = f(v)
        self._memo[i] = v
        return v

    def segment(self, a: int, b: int) -> list[Vertex]:
        return [self.vertex(i) for i in range(a, b + 1)]

    def projection(self, u: Vertex) -> tuple[int, int]:
        """(index of the nearest axis vertex, distance to the axis)"""
        i = 0
        d = dist(u, self.vertex(0))
        while True:
            for j in (i - 1, i + 1):
                dj = dist(u, self.vertex(j))
                if dj < d:
                    i, d = j, dj
                    break
            else:
                return i, d


def classify(phi: TreeAutomorphism, search_radius: int = 64) -> AxisData:
    """Elliptic (fixed vertex or flipped edge) or hyperbolic (translation
    length and a vertex on the axis), by steepest descent of the
    displacement d(v, phi v) starting at the base vertex."""
    if phi._axis is not None:
        return phi._axis
    v = BASE
    disp = dist(v, phi(v))
    for _ in range(search_radius + 1):
        best = min(neighbours(v, phi.degree), key=lambda u: (dist(u, phi(u)), u))
        db = dist(best, phi(best))
        if db >= disp:
            break
        v, disp = best, db
    else:
        raise RadiusExceeded(f"displacement still decreasing after {search_radius} steps")
    if disp == 0:
        ax = AxisData("elliptic", phi, (v,))
    elif disp == 1 and phi(phi(v)) == v:
        ax = AxisData("elliptic", phi, (v, phi(v)))
    else:
        if dist(v, phi(phi(v))) != 2 * disp:
            raise AssertionError("displacement minimum is not on a translation axis")
        ax = AxisData("hyperbolic", phi, (), disp, v)
    phi._axis = ax
    return ax


class TreeBackend(Backend):
    tag = "tree"

    def __init__(self, degree: int):
        if degree < 3:
            raise ValueError("degree must be at least 3")
        self.degree = degree

    def fix(self, vertices) -> FixSubgroup:
        return fix(self.degree, vertices)

    # --- contract ----------------------------------------------------------------
    def index(self, U: FixSubgroup, V: FixSubgroup) -> int:
        if not U.vertices <= V.vertices:
            raise NotASubgroup("Fix(S') <= Fix(S) needs S inside the closure of S'")
        return stab_index(U.vertices, V.vertices, self.degree)

    def intersect(self, U: FixSubgroup, V: FixSubgroup) -> FixSubgroup:
        return FixSubgroup(self.degree, closure(hull(U.vertices | V.vertices), self.degree))

    def apply(self, phi: TreeAutomorphism, U: FixSubgroup) -> FixSubgroup:
        return FixSubgroup(self.degree, closure(phi.image(U.vertices), self.degree))

    def member(self, g: TreeAutomorphism, U: FixSubgroup) -> bool:
        return all(g(v) == v for v in U.vertices)

    def equal(self, U, V) -> bool:
        return U.vertices == V.vertices

    def inverse(self, phi):
        return phi.inverse()

    def compose(self, phi, psi):
        return ComposedAutomorphism(phi, psi)

    def identity(self):
        return identity(self.degree)

    def power(self, phi, n: int):
        if n < 0:
            phi, n = phi.inverse(), -n
        r = self.identity()
        for _ in range(n):
            r = ComposedAutomorphism(phi, r)
        return r

    def describe(self, U) -> str:
        return repr(U)

    # --- geometry -------------------------------------------------------------------
    def classify(self, phi, search_radius: int = 64) -> AxisData:
        return classify(phi, search_radius)

    def axis_segment_stabilizer(self, axis: AxisData, start: int, stop: int,
                                bound: int = 10_000) -> FixSubgroup:
        if not axis.hyperbolic:
            raise ValueError("axis segments need a hyperbolic automorphism")
        if start > stop:
            raise ValueError("segment bounds out of order")
        return FixSubgroup(self.degree, closure(
            [axis.vertex(i, bound) for i in range(start, stop + 1)], self.degree))

    def axis_segment_of(self, axis: AxisData, U: FixSubgroup) -> tuple[int, int] | None:
        """(a, b) when U is the stabiliser of the axis segment v_a..v_b."""
        proj = [axis.projection(v) for v in U.vertices]
        on = [i for i, d in proj if d == 0]
        if not on:
            return None
        a, b = min(on), max(on)
        if closure(axis.segment(a, b), self.degree) == U.vertices:
            return a, b
        return None

    def _in_axis_closure(self, axis: AxisData, u: Vertex) -> bool:
        _, d = axis.projection(u)
        return d == 0 or (self.degree == 3 and d == 1)

    def _orbit_hull(self, phi, S: frozenset, powers: Iterable[int]) -> frozenset:
        pts = set()
        for n in powers:
            f = phi if n >= 0 else phi.inverse()
            img = S
            for _ in range(abs(n)):
                img = f.image(img)
            pts |= img
        return hull(pts)

    def _horizon(self, axis: AxisData, S: frozenset) -> int:
        proj = [axis.projection(v) for v in S]
        lo = min(i - d for i, d in proj)
        hi = max(i + d for i, d in proj)
        return (hi - lo + 3) // axis.length + 2

    def plus_index(self, phi, U: FixSubgroup, K: int | None = None) -> tuple[int, int]:
        """|alpha(U+) : U+| from the truncation to K forward translates;
        returns (index, K).  For hyperbolic phi the default K puts the
        translates beyond K out of reach of the part of U+ outside phi(U+)."""
        axis = classify(phi)
        S = U.vertices
        if K is None:
            K = self._horizon(axis, S) if axis.hyperbolic else self._period(phi, S)
        outer = self._orbit_hull(phi, S, range(0, K + 1))
        inner = self._orbit_hull(phi, S, range(1, K + 1))
        return stab_index(inner, outer, self.degree), K

    def _period(self, phi, S: frozenset, bound: int = 10_000) -> int:
        img = phi.image(S)
        n = 1
        while img != S:
            img = phi.image(img)
            n += 1
            if n > bound:
                raise RadiusExceeded("orbit of the subtree did not close")
        return n

    # --- tidiness ---------------------------------------------------------------------
    def plus_minus(self, phi, U: FixSubgroup, depth: int = 8) -> PlusMinusParts:
        axis = classify(phi)
        S = U.vertices
        if not axis.hyperbolic:
            P = self._period(phi, S)
            plus = self._orbit_hull(phi, S, range(P))
            return PlusMinusParts(FixSubgroup(self.degree, closure(plus, self.degree)),
                                  FixSubgroup(self.degree, closure(plus, self.degree)), True, P)
        depth = min(depth, self._horizon(axis, S))
        plus = self._orbit_hull(phi, S, range(depth + 1))
        minus = self._orbit_hull(phi, S, range(-depth, 1))
        return PlusMinusParts(FixSubgroup(self.degree, closure(plus, self.degree)),
                              FixSubgroup(self.degree, closure(minus, self.degree)), False, depth)

    def tidy_above(self, phi, U: FixSubgroup) -> Verdict:
        axis = classify(phi)
        rel = self.relative_index(phi, U)
        if not axis.hyperbolic:
            return Verdict.of(rel == 1, {"relative_index": rel},
                              "elliptic: U+ is normalised, so tidy above iff normalised")
        seg = self.axis_segment_of(axis, U)
        plus, K = self.plus_index(phi, U)
        cert = {"relative_index": rel, "plus_index": plus, "K": K, "segment": seg}
        if plus != self.plus_index(phi, U, K + 1)[0]:
            raise AssertionError("truncated U+ index not stable")
        verdict = plus == rel
        if seg is not None and verdict != (seg[1] > seg[0]):
            raise AssertionError("geometric and counting tidy-above criteria disagree")
        reason = ("axis segment of positive length" if seg and seg[1] > seg[0]
                  else "|alpha(U+):U+| vs |alpha(U):alpha(U)∩U| on truncated U+")
        return Verdict.of(verdict, cert, reason)

    def l_criterion(self, phi, U: FixSubgroup) -> LCriterionResult:
        axis = classify(phi)
        S = U.vertices
        if not axis.hyperbolic:
            plus = self.plus_minus(phi, U).plus
            return LCriterionResult(
                Verdict.yes({"L": plus}, "elliptic: conjugates of U are periodic"),
                f"L_U = {plus!r}, the intersection of one period of conjugates")
        n0 = self._horizon(axis, S)
        far = self._orbit_hull(phi, S, [n0, n0 + 1, -n0, -n0 - 1])
        fixed = closure(far, self.degree)
        outside = sorted(v for v in S if v not in fixed)
        desc = ("elements fixing the axis and all far translates of S; "
                "fixed set near U is the closure of the axis")
        if outside:
            return LCriterionResult(
                Verdict.no({"vertex": outside[0], "n0": n0},
                           "L_U moves a vertex of S off the closed axis"), desc)
        return LCriterionResult(Verdict.yes({"n0": n0}, "S lies in the closure of the axis"), desc)

    def check_l_certificate(self, phi, U, verdict: Verdict) -> bool:
        """Independent check: the vertex lies off the closed axis."""
        axis = classify(phi)
        if verdict.is_no:
            return not self._in_axis_closure(axis, verdict.certificate["vertex"])
        return all(self._in_axis_closure(axis, v) for v in U.vertices)

    def tidy_below(self, phi, U: FixSubgroup) -> Verdict:
        axis = classify(phi)
        if not axis.hyperbolic:
            return Verdict.yes(None, "elliptic: U++ = U+ is compact")
        seg = self.axis_segment_of(axis, U)
        if seg is not None and seg[1] > seg[0]:
            return Verdict.yes({"segment": seg},
                               "U++ and U-- are the elliptic parts of end stabilisers")
        lc = self.l_criterion(phi, U)
        return Verdict(lc.verdict.answer, lc.verdict.certificate,
                       "tidy above, so tidy below iff L_U <= U")

    def step2(self, phi, U: FixSubgroup) -> FixSubgroup:
        """Replace U by the stabiliser of its projection to the axis (an axis
        segment of positive length), which contains L_U."""
        axis = classify(phi)
        idx = [axis.projection(v)[0] for v in U.vertices]
        a, b = min(idx), max(idx)
        if a == b:
            b = a + 1
        return self.axis_segment_stabilizer(axis, a, b)

    def power_member(self, phi, n: int, U) -> bool:
        return self.member(self.power(phi, n), U)
