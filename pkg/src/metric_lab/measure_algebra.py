"""Finite unions of subintervals of [0, 1] with exact boolean algebra.

An IntervalSet is the canonical form of a finite union of intervals:
sorted, pairwise disjoint, non-touching, with zero-length pieces dropped
(nullsets are identified with the empty set).  All boolean operations run
an exact sweep over the endpoint pool, so two expressions denoting the
same set always produce bit-identical canonical forms.

On top of the algebra sit the measure metric rho(A, B) = measure(A sym B),
the ternary majority and parity operations, and the quotient obtained by
identifying every set with its complement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .geometry import format_float

__all__ = [
    "IntervalSet",
    "EMPTY",
    "FULL",
    "canonicalize",
    "measure",
    "rho",
    "set_mixer",
    "set_comixer",
    "QuotientClass",
    "quotient_class",
    "quotient_dist",
    "quotient_comixer",
    "geodesic_point",
    "intertwine_check",
    "parse_interval_set",
    "format_interval_set",
]

Pair = tuple[float, float]


@dataclass(frozen=True)
class IntervalSet:
    """Canonical finite union of subintervals of [0, 1].

    Equality and hashing are structural: two IntervalSets are equal iff
    their canonical interval lists are identical.  Build instances through
    canonicalize() / from_pairs() rather than the raw constructor.
    """

    intervals: tuple[Pair, ...] = ()

    @classmethod
    def from_pairs(cls, raw: Iterable[Sequence[float]]) -> "IntervalSet":
        return canonicalize(raw)

    @property
    def measure(self) -> float:
        return math.fsum(hi - lo for lo, hi in self.intervals)

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    def complement(self) -> "IntervalSet":
        out: list[Pair] = []
        cursor = 0.0
        for lo, hi in self.intervals:
            if cursor < lo:
                out.append((cursor, lo))
            cursor = hi
        if cursor < 1.0:
            out.append((cursor, 1.0))
        return IntervalSet(tuple(out))

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return _sweep((self, other), lambda ins: ins[0] or ins[1])

    def intersection(self, other: "IntervalSet") -> "IntervalSet":
        return _sweep((self, other), lambda ins: ins[0] and ins[1])

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        return _sweep((self, other), lambda ins: ins[0] and not ins[1])

    def sym_diff(self, other: "IntervalSet") -> "IntervalSet":
        return _parity((self, other))

    def __str__(self) -> str:
        return format_interval_set(self)


EMPTY = IntervalSet(())
FULL = IntervalSet(((0.0, 1.0),))


def canonicalize(raw: Iterable[Sequence[float]]) -> IntervalSet:
    """Sort, merge overlapping/touching intervals, drop zero-length ones.

    Raises ValueError for endpoints outside [0, 1] or lo > hi.  Idempotent.
    """
    cleaned: list[Pair] = []
    for pair in raw:
        lo, hi = float(pair[0]), float(pair[1])
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("interval endpoints must not be NaN")
        if lo > hi:
            raise ValueError(f"interval has lo > hi: ({lo}, {hi})")
        if lo < 0.0 or hi > 1.0:
            raise ValueError(f"interval outside [0, 1]: ({lo}, {hi})")
        if lo < hi:
            cleaned.append((lo, hi))
    cleaned.sort()
    merged: list[Pair] = []
    for lo, hi in cleaned:
        if merged and lo <= merged[-1][1]:
            if hi > merged[-1][1]:
                merged[-1] = (merged[-1][0], hi)
        else:
            merged.append((lo, hi))
    return IntervalSet(tuple(merged))


def _sweep(
    sets: Sequence[IntervalSet], keep: Callable[[Sequence[bool]], bool]
) -> IntervalSet:
    """Exact boolean combination: keep() decides each elementary cell.

    Walks the merged endpoint pool; membership flips exactly at each set's
    own endpoints, so every cell decision is an exact boolean.  keep must
    reject the all-outside state.
    """
    tagged: list[tuple[float, int]] = []
    for k, s in enumerate(sets):
        for lo, hi in s.intervals:
            tagged.append((lo, k))
            tagged.append((hi, k))
    if not tagged:
        return EMPTY
    tagged.sort()
    inside = [False] * len(sets)
    out: list[Pair] = []
    run_lo: float | None = None
    prev: float | None = None
    i, n = 0, len(tagged)
    while i < n:
        e = tagged[i][0]
        if prev is not None and prev < e:
            if keep(inside):
                if run_lo is None:
                    run_lo = prev
            elif run_lo is not None:
                out.append((run_lo, prev))
                run_lo = None
        while i < n and tagged[i][0] == e:
            inside[tagged[i][1]] ^= True
            i += 1
        prev = e
    if run_lo is not None:
        out.append((run_lo, prev))
    return IntervalSet(tuple(out))


def _parity(sets: Sequence[IntervalSet]) -> IntervalSet:
    """Exact parity combination (iterated symmetric difference).

    A point is a boundary of the parity set iff it occurs an odd number of
    times among the operands' boundaries; the surviving boundaries are
    strictly increasing, so pairing them up is already canonical.
    """
    bounds = sorted(e for s in sets for iv in s.intervals for e in iv)
    vals: list[float] = []
    i, n = 0, len(bounds)
    while i < n:
        j = i + 1
        while j < n and bounds[j] == bounds[i]:
            j += 1
        if (j - i) % 2 == 1:
            vals.append(bounds[i])
        i = j
    return IntervalSet(tuple((vals[k], vals[k + 1]) for k in range(0, len(vals), 2)))


def measure(a: IntervalSet) -> float:
    """Total length of the canonical interval list."""
    return a.measure


def rho(a: IntervalSet, b: IntervalSet) -> float:
    """Metric: the measure of the symmetric difference."""
    return a.sym_diff(b).measure


def set_mixer(a: IntervalSet, b: IntervalSet, c: IntervalSet) -> IntervalSet:
    """Majority vote: points covered by at least two of the three sets.

    Equals (A&B) | (A&C) | (B&C); if two arguments coincide the result is
    that argument, exactly.
    """
    return _sweep((a, b, c), lambda ins: ins[0] + ins[1] + ins[2] >= 2)


def set_comixer(a: IntervalSet, b: IntervalSet, c: IntervalSet) -> IntervalSet:
    """Parity: points covered an odd number of times (A sym B sym C).

    If two arguments coincide the result is the third one, exactly.
    """
    return _parity((a, b, c))


@dataclass(frozen=True)
class QuotientClass:
    """An interval set identified with its complement, held by canonical rep.

    The representative is the smaller-measure side; on an exact measure tie
    the lexicographically smaller interval list wins.
    """

    rep: IntervalSet

    def __str__(self) -> str:
        return format_interval_set(self.rep)


def quotient_class(a: IntervalSet) -> QuotientClass:
    comp = a.complement()
    ma, mc = a.measure, comp.measure
    # comparing the two measures directly (rather than each against 1/2)
    # keeps quotient_class(A) == quotient_class(~A) exact in float arithmetic
    if ma < mc:
        rep = a
    elif mc < ma:
        rep = comp
    else:
        rep = a if a.intervals <= comp.intervals else comp
    return QuotientClass(rep)


def quotient_dist(x: QuotientClass, y: QuotientClass) -> float:
    """min over the two complement alignments of the rho distance."""
    return min(rho(x.rep, y.rep), rho(x.rep, y.rep.complement()))


def quotient_comixer(
    x: QuotientClass, y: QuotientClass, z: QuotientClass
) -> QuotientClass:
    """Parity operation on classes: well-defined because flipping any
    argument to its complement flips the parity set to its complement."""
    return quotient_class(set_comixer(x.rep, y.rep, z.rep))


def geodesic_point(t: float) -> IntervalSet:
    """The unit-speed curve t -> [0, t]; rho(gamma(s), gamma(t)) = |s - t|."""
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    if t == 0.0:
        return EMPTY
    return IntervalSet(((0.0, t),))


def intertwine_check(a: float, b: float, c: float) -> tuple[float, float]:
    """Compare the parity-set measure against its 1-d counterpart.

    lhs = measure(gamma(a) sym gamma(b) sym gamma(c)),
    rhs = a + b + c - 2 med(a, b, c); the two agree to float accumulation.
    """
    for v in (a, b, c):
        if not 0.0 <= float(v) <= 1.0:
            raise ValueError(f"arguments must lie in [0, 1], got {v}")
    from .ternary import group_comixer_1d

    lhs = set_comixer(geodesic_point(a), geodesic_point(b), geodesic_point(c)).measure
    rhs = float(group_comixer_1d(a, b, c))
    return lhs, rhs


def parse_interval_set(text: str) -> IntervalSet:
    """Parse "0.0-0.25,0.75-1.0"; the empty set is spelled "empty"."""
    body = text.strip()
    if body in ("empty", ""):
        return EMPTY
    pairs = []
    for tok in body.split(","):
        lo, sep, hi = tok.partition("-")
        if not sep:
            raise ValueError(f"cannot parse interval {tok!r}")
        try:
            pairs.append((float(lo), float(hi)))
        except ValueError:
            raise ValueError(f"cannot parse interval {tok!r}") from None
    return canonicalize(pairs)


def format_interval_set(a: IntervalSet) -> str:
    if a.is_empty:
        return "empty"
    return ",".join(f"{format_float(lo)}-{format_float(hi)}" for lo, hi in a.intervals)
