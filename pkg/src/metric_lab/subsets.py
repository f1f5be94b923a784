"""Finite subsets of a normed space under the Hausdorff metric.

Points are stored as exact coordinate tuples, lexicographically sorted, so
set equality is exact and every listing order is reproducible.  The module
also provides the nearest-point maps, their displacement, and the map
sending a set of at most three points to its mixer/co-mixer image pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .geometry import EUCLIDEAN, NormSpec, dist, format_float
from .ternary import incenter_mixer, nagel_comixer

__all__ = [
    "FiniteSubset",
    "PointMap",
    "hausdorff_dist",
    "displacement",
    "nearest_map",
    "h_map",
    "retraction_3_to_2",
    "parse_subset",
    "format_subset",
]

Point = tuple[float, ...]


@dataclass(frozen=True)
class FiniteSubset:
    """A nonempty set of distinct points sharing one dimension."""

    points: tuple[Point, ...]

    @classmethod
    def of(cls, points: Iterable, max_size: int | None = None) -> "FiniteSubset":
        pts = []
        for p in points:
            arr = np.asarray(p, dtype=float)
            if arr.ndim == 0:
                arr = arr.reshape(1)
            if arr.ndim != 1 or not np.all(np.isfinite(arr)):
                raise ValueError(f"bad point {p!r}")
            pts.append(tuple(float(v) for v in arr))
        if not pts:
            raise ValueError("a finite subset must be nonempty")
        if len({len(p) for p in pts}) != 1:
            raise ValueError("all points must share one dimension")
        distinct = tuple(sorted(set(pts)))
        if max_size is not None and len(distinct) > max_size:
            raise ValueError(
                f"subset has {len(distinct)} points, capacity is {max_size}"
            )
        return cls(distinct)

    @property
    def dim(self) -> int:
        return len(self.points[0])

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float)

    def __str__(self) -> str:
        return format_subset(self)


@dataclass(frozen=True)
class PointMap:
    """A total assignment from the points of a domain subset."""

    domain: FiniteSubset
    assignment: Mapping[Point, Point]

    def __post_init__(self) -> None:
        missing = [p for p in self.domain if p not in self.assignment]
        if missing:
            raise ValueError(f"assignment misses domain points: {missing}")

    def __call__(self, p: Point) -> Point:
        return self.assignment[p]

    def image(self) -> tuple[Point, ...]:
        return tuple(sorted({self.assignment[p] for p in self.domain}))


def hausdorff_dist(a: FiniteSubset, b: FiniteSubset, spec: NormSpec = EUCLIDEAN) -> float:
    """max over both directions of the largest nearest-point distance."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    pa, pb = a.as_array(), b.as_array()
    d = dist(pa[:, None, :], pb[None, :, :], spec)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def displacement(f: PointMap, spec: NormSpec = EUCLIDEAN) -> float:
    """Largest distance any domain point is moved."""
    return max(
        float(dist(np.asarray(p), np.asarray(f(p)), spec)) for p in f.domain
    )


def nearest_map(a: FiniteSubset, b: FiniteSubset, spec: NormSpec = EUCLIDEAN) -> PointMap:
    """Send each point of a to a nearest point of b.

    Ties go to the lexicographically smallest candidate; the displacement
    never exceeds the Hausdorff distance between a and b.
    """
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    pa, pb = a.as_array(), b.as_array()
    d = dist(pa[:, None, :], pb[None, :, :], spec)
    # b.points is sorted, so argmin's first hit is the lexicographic winner
    choice = np.argmin(d, axis=1)
    return PointMap(a, {p: b.points[j] for p, j in zip(a.points, choice)})


def h_map(f: PointMap, g: PointMap) -> PointMap:
    """Compose the two nearest maps into a self-map of f's codomain.

    h fixes every point already hit by f and sends the rest through g then
    f; its image equals the image of f and its displacement is at most
    disp(f) + disp(g).
    """
    bset = g.domain
    image_f = set(f.assignment[p] for p in f.domain)
    assignment = {}
    for bpt in bset:
        if bpt in image_f:
            assignment[bpt] = bpt
        else:
            via = g.assignment[bpt]
            if via not in f.assignment:
                raise ValueError("g must map into the domain of f")
            assignment[bpt] = f.assignment[via]
    return PointMap(bset, assignment)


def _listing(e: FiniteSubset) -> tuple[Point, Point, Point]:
    pts = e.points
    if len(pts) == 1:
        return pts[0], pts[0], pts[0]
    if len(pts) == 2:
        return pts[0], pts[0], pts[1]
    return pts[0], pts[1], pts[2]


def retraction_3_to_2(e: FiniteSubset, spec: NormSpec = EUCLIDEAN) -> FiniteSubset:
    """Map a set of at most 3 points to its {mixer, co-mixer} image pair.

    Sets of size 1 or 2 are returned unchanged (both operations reproduce
    the listed points regardless of which one is repeated), so this is a
    retraction onto the 2-point sets.  Every output point lies in the
    convex hull of the input.
    """
    if len(e) > 3:
        raise ValueError(f"expected at most 3 points, got {len(e)}")
    if len(e) <= 2:
        return e
    a, b, c = (np.asarray(p, dtype=float) for p in _listing(e))
    s = incenter_mixer(a, b, c, spec)
    t = nagel_comixer(a, b, c, spec)
    return FiniteSubset.of([s, t], max_size=2)


def parse_subset(text: str) -> FiniteSubset:
    """Parse "x1,...,xd | y1,...,yd | ..." into a FiniteSubset."""
    pts = []
    for tok in text.split("|"):
        tok = tok.strip()
        if not tok:
            raise ValueError(f"empty point in {text!r}")
        try:
            pts.append([float(v) for v in tok.split(",")])
        except ValueError:
            raise ValueError(f"cannot parse point {tok!r}") from None
    return FiniteSubset.of(pts)


def format_subset(s: FiniteSubset) -> str:
    return " | ".join(",".join(format_float(v) for v in p) for p in s.points)
