"""Backend-agnostic tidying and scale algorithms.

Every operation resolves the backend from the subgroup it is handed and
only talks to it through :class:`tidyscale.core.Backend`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from .core import (Backend, BackendUnsupported, Budgets, DepthExceeded,
                   FiniteGroupTable, ScaleResult, Verdict, conj)

DEFAULT_BUDGETS = Budgets()


@dataclass(frozen=True)
class PlusMinusParts:
    plus: Any
    minus: Any
    exact: bool
    truncation_depth: int = 0


@dataclass(frozen=True)
class LCriterionResult:
    verdict: Verdict
    description: str


@dataclass(frozen=True)
class TidinessReport:
    tidy_above: Verdict
    tidy_below: Verdict
    tidy: Verdict
    minimising: Verdict
    plus_part: Any
    minus_part: Any
    relative_index: int
    parts_exact: bool = True


@dataclass(frozen=True)
class Descent:
    """Outcome of the intersection descent U_n = U ∩ alpha(U) ∩ ... ∩ alpha^n(U)."""

    subgroup: Any
    depth: int
    chain: tuple[tuple[int, int], ...]
    verdict: Verdict
    stationary_at: int | None = field(default=None, compare=False)


def backend_of(obj: Any, budgets: Budgets = DEFAULT_BUDGETS) -> Backend:
    tag = getattr(obj, "backend_tag", None)
    if tag == "shift":
        from .shift import ShiftBackend
        return ShiftBackend(obj.group)
    if tag == "tree":
        from .tree import TreeBackend
        return TreeBackend(obj.degree)
    if tag == "padic":
        from .padic import PadicBackend
        return PadicBackend(obj.p, obj.ambient, max_level=budgets.max_level)
    raise BackendUnsupported(f"no backend for {type(obj).__name__}")


def relative_index(alpha, U, budgets: Budgets = DEFAULT_BUDGETS) -> int:
    """|alpha(U) : alpha(U) ∩ U|"""
    return backend_of(U, budgets).relative_index(alpha, U)


def is_tidy_above(alpha, U, budgets: Budgets = DEFAULT_BUDGETS) -> Verdict:
    return backend_of(U, budgets).tidy_above(alpha, U)


def plus_minus_parts(alpha, U, depth: int = 8, budgets: Budgets = DEFAULT_BUDGETS) -> PlusMinusParts:
    return backend_of(U, budgets).plus_minus(alpha, U, depth)


def tidy_below_verdict(alpha, U, budgets: Budgets = DEFAULT_BUDGETS) -> Verdict:
    return backend_of(U, budgets).tidy_below(alpha, U)


def l_criterion(alpha, U, budgets: Budgets = DEFAULT_BUDGETS) -> LCriterionResult:
    return backend_of(U, budgets).l_criterion(alpha, U)


def descend(alpha, U, max_depth: int, window: int = 3,
            budgets: Budgets = DEFAULT_BUDGETS) -> Descent:
    """Intersect forward images until the backend certifies tidiness above.

    The relative index chain is non-increasing.  A run of ``window`` equal
    values only marks a candidate stopping point; the backend's exact
    tidy-above criterion is what ends the descent.
    """
    be = backend_of(U, budgets)
    cur = U
    chain: list[tuple[int, int]] = []
    stationary_at = None
    for n in range(max_depth + 1):
        r = be.relative_index(alpha, cur)
        if chain and r > chain[-1][1]:
            raise AssertionError(f"relative index increased along the descent: {chain + [(n, r)]}")
        chain.append((n, r))
        if stationary_at is None and len(chain) >= window and \
                len({v for _, v in chain[-window:]}) == 1:
            stationary_at = n - window + 1
        verdict = be.tidy_above(alpha, cur)
        if verdict.is_yes:
            return Descent(cur, n, tuple(chain), verdict, stationary_at)
        if n < max_depth:
            cur = be.intersect_with_image(alpha, cur, U)
    return Descent(cur, max_depth, tuple(chain),
                   Verdict.undecided({"max_depth": max_depth, "chain": tuple(chain)},
                                     "no tidy-above certificate within the depth budget"),
                   stationary_at)


def tidying_above(alpha, U, max_depth: int = 32, window: int = 3,
                  budgets: Budgets = DEFAULT_BUDGETS) -> tuple[Any, int]:
    """Return (V, N) with V = ⋂_{i<=N} alpha^i(U) certified tidy above."""
    d = descend(alpha, U, max_depth, window, budgets)
    if not d.verdict.is_yes:
        raise DepthExceeded("tidying above did not certify", d.verdict, d.chain)
    return d.subgroup, d.depth


def tidiness_report(alpha, U, scale_value: int | None = None,
                    budgets: Budgets = DEFAULT_BUDGETS) -> TidinessReport:
    be = backend_of(U, budgets)
    above = be.tidy_above(alpha, U)
    if above.is_yes:
        below = be.tidy_below(alpha, U)
    else:
        below = Verdict.undecided(None, "tidy below is only evaluated on tidy-above subgroups")
    tidy = above if above.is_no else conj(above, below, reason="tidy above and tidy below")
    ri = be.relative_index(alpha, U)
    if scale_value is None:
        mini = Verdict.undecided(None, "no certified scale supplied")
    else:
        mini = Verdict.of(ri == scale_value, {"relative_index": ri, "scale": scale_value})
    parts = be.plus_minus(alpha, U, budgets.max_depth)
    return TidinessReport(above, below, tidy, mini, parts.plus, parts.minus, ri, parts.exact)


def tidying_full(alpha, U, budgets: Budgets = DEFAULT_BUDGETS) -> tuple[Any, TidinessReport]:
    """Step 1 (descent), then Step 2 (absorb L_U) when L_U is not inside U."""
    V, _, report = _tidy(alpha, U, budgets)
    return V, report


def _tidy(alpha, U, budgets: Budgets):
    be = backend_of(U, budgets)
    d = descend(alpha, U, budgets.max_depth, budgets.window, budgets)
    chain = list(d.chain)
    if not d.verdict.is_yes:
        return d.subgroup, chain, tidiness_report(alpha, d.subgroup, budgets=budgets)
    V = d.subgroup
    lc = be.l_criterion(alpha, V)
    if lc.verdict.is_no:
        W = be.step2(alpha, V)
        d2 = descend(alpha, W, budgets.max_depth, budgets.window, budgets)
        offset = chain[-1][0] + 1
        chain += [(offset + n, r) for n, r in d2.chain]
        V = d2.subgroup
        if d2.verdict.is_yes:
            lc = be.l_criterion(alpha, V)
            if lc.verdict.is_no:
                raise AssertionError("Step 2 output still fails the L-criterion")
    report = tidiness_report(alpha, V, budgets=budgets)
    if report.tidy_above.is_yes and report.tidy_below.decided and lc.verdict.decided \
            and report.tidy_below.answer != lc.verdict.answer:
        raise AssertionError("tidy-below verdict disagrees with the L-criterion")
    return V, chain, report


def scale(alpha, seed, budgets: Budgets = DEFAULT_BUDGETS) -> ScaleResult:
    """Scale of alpha via a tidy subgroup grown from ``seed``.  When tidiness
    stays undecided the reported value is only an upper bound."""
    be = backend_of(seed, budgets)
    V, chain, report = _tidy(alpha, seed, budgets)
    value = be.relative_index(alpha, V)
    if not chain or chain[-1][1] != value:
        chain.append(((chain[-1][0] + 1) if chain else 0, value))
    return ScaleResult(value, V, tuple(chain), report.tidy.is_yes, report)


def modular(alpha, U, second=None, budgets: Budgets = DEFAULT_BUDGETS) -> Fraction:
    """Delta = |U : U ∩ alpha^-1(U)| / |U : U ∩ alpha(U)|, optionally checked
    against a second compact open subgroup."""
    be = backend_of(U, budgets)

    def delta(W):
        inv = be.inverse(alpha)
        num = be.index(W, be.intersect_with_image(inv, W, W))
        den = be.index(W, be.intersect_with_image(alpha, W, W))
        return Fraction(num, den)

    d = delta(U)
    if second is not None:
        d2 = delta(second)
        if d2 != d:
            raise AssertionError(f"modular function depends on the subgroup: {d} vs {d2}")
    return d


def scale_modular_identity(alpha, seed, second=None,
                           budgets: Budgets = DEFAULT_BUDGETS) -> Verdict:
    """s(alpha)/s(alpha^-1) == Delta(alpha), and the tidy witness for alpha
    is minimising for alpha^-1."""
    be = backend_of(seed, budgets)
    inv = be.inverse(alpha)
    fwd, bwd = scale(alpha, seed, budgets), scale(inv, seed, budgets)
    if not (fwd.certified and bwd.certified):
        return Verdict.undecided({"scale": fwd.scale, "scale_inv": bwd.scale},
                                 "a scale is not certified")
    delta = modular(alpha, seed, second if second is not None else fwd.witness, budgets)
    ratio = Fraction(fwd.scale, bwd.scale)
    shared = be.relative_index(inv, fwd.witness) == bwd.scale
    cert = {"scale": fwd.scale, "scale_inv": bwd.scale, "delta": delta,
            "witness_minimising_for_inverse": shared}
    return Verdict.of(ratio == delta and shared, cert, "s(g)/s(g^-1) = Delta(g)")


def normaliser_witness(alpha, family: Sequence[Any], seed=None,
                       budgets: Budgets = DEFAULT_BUDGETS) -> Verdict:
    if not family:
        raise ValueError("family must be nonempty")
    be = backend_of(family[0], budgets)
    for U in family:
        if be.normalises(alpha, U):
            return Verdict.yes(U, "normalised subgroup found")
    seed = family[0] if seed is None else seed
    fwd, bwd = scale(alpha, seed, budgets), scale(be.inverse(alpha), seed, budgets)
    if (fwd.certified and fwd.scale > 1) or (bwd.certified and bwd.scale > 1):
        return Verdict.no({"scale": fwd.scale, "scale_inv": bwd.scale},
                          "nontrivial scale forbids a normalised compact open subgroup")
    return Verdict.undecided({"family_size": len(family)}, "no member of the family is normalised")


def power_coset_check(alpha, U, n: int, budgets: Budgets = DEFAULT_BUDGETS) -> Verdict:
    """(UgU)^n = Ug^nU for U tidy above."""
    if n < 1:
        raise ValueError("n must be >= 1")
    be = backend_of(U, budgets)
    above = be.tidy_above(alpha, U)
    if not above.is_yes:
        return Verdict.undecided({"tidy_above": above.answer}, "U must be tidy above")
    if n == 1:
        return Verdict.yes({"n": 1}, "definitional")
    return be.power_coset(alpha, U, n)


def periodic_witness(alpha, U, N: int, budgets: Budgets = DEFAULT_BUDGETS) -> Verdict:
    be = backend_of(U, budgets)
    for n in range(1, N + 1):
        hit = be.power_member(alpha, n, U)
        if hit is None:
            break
        if hit:
            return Verdict.yes({"n": n}, "g^n lies in the compact subgroup U")
    fwd, bwd = scale(alpha, U, budgets), scale(be.inverse(alpha), U, budgets)
    if (fwd.certified and fwd.scale > 1) or (bwd.certified and bwd.scale > 1):
        return Verdict.no({"scale": fwd.scale, "scale_inv": bwd.scale},
                          "periodic elements have scale 1")
    return Verdict.undecided({"N": N}, "no power in U within the bound")


def ustar_clopen_check(alpha, U, budgets: Budgets = DEFAULT_BUDGETS) -> Verdict:
    """Is U* = ⋃_{i>=0} alpha^i(U) closed?  Decided in the shift backend."""
    be = backend_of(U, budgets)
    if not hasattr(be, "ustar"):
        return Verdict.undecided(None, f"{be.tag} backend has no U* closure rule")
    v = be.ustar(alpha, U)
    if v.is_no:
        report = tidiness_report(alpha, U, budgets=budgets)
        if report.tidy.is_yes:
            raise AssertionError("tidy subgroup with non-closed U*")
    return v


def dense_orbit_demo(width: int, table: FiniteGroupTable, shift: int = 1) -> Verdict:
    """Build a point of F^Z whose orbit under the shift meets every cylinder
    of width <= ``width`` and check the hits exhaustively."""
    from .shift import cylinder_word

    if width < 1:
        raise ValueError("width must be >= 1")
    block = cylinder_word(table.order, width)
    period = len(block)
    offsets = sorted({(n * shift) % period for n in range(period)})
    missing = 0
    for w in range(1, width + 1):
        seen = {tuple(block[(o + j) % period] for j in range(w)) for o in offsets}
        missing += table.order ** w - len(seen)
    cert = {"block": block if period <= 64 else f"<{period} letters>",
            "period": period, "offsets": len(offsets)}
    if missing:
        return Verdict.no(dict(cert, missing=missing), "some cylinders are never visited")
    return Verdict.yes(cert, "orbit meets every cylinder")
