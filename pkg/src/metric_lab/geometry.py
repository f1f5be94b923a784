"""Vectors, weighted p-norms, distances, and convex-hull membership tests.

Vectors are plain numpy float arrays.  Every function here accepts batches:
the last axis is the coordinate axis, leading axes broadcast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "NormSpec",
    "EUCLIDEAN",
    "as_vector",
    "norm",
    "dist",
    "triple_hull_distance",
    "in_triple_hull",
    "parse_norm_spec",
    "format_norm_spec",
    "format_float",
]


def format_float(v: float) -> str:
    """Shortest decimal that round-trips, without a trailing ".0"."""
    s = repr(float(v))
    return s[:-2] if s.endswith(".0") else s


@dataclass(frozen=True)
class NormSpec:
    """A member of the weighted p-norm family, p in [1, inf].

    For finite p the induced norm is (sum_i w_i |v_i|**p) ** (1/p); for
    p = inf it is max_i w_i |v_i|.  Infinity is an explicit case (math.inf),
    never approximated by a large finite exponent.  Weights default to all
    ones and must be strictly positive.
    """

    p: float = 2.0
    weights: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        p = float(self.p)
        if math.isnan(p) or p < 1.0:
            raise ValueError(f"p must be in [1, inf], got {self.p!r}")
        object.__setattr__(self, "p", p)
        if self.weights is not None:
            ws = tuple(float(w) for w in self.weights)
            if not ws:
                raise ValueError("weights, if given, must be nonempty")
            if any(not math.isfinite(w) or w <= 0.0 for w in ws):
                raise ValueError("weights must be positive finite reals")
            object.__setattr__(self, "weights", ws)

    @property
    def is_inf(self) -> bool:
        return math.isinf(self.p)


EUCLIDEAN = NormSpec(2.0)


def as_vector(v) -> np.ndarray:
    """Validate and convert a single point to a 1-d float array."""
    arr = np.asarray(v, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError(f"expected a 1-d vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector coordinates must be finite")
    return arr


def _weights_for(spec: NormSpec, dim: int) -> np.ndarray | None:
    if spec.weights is None:
        return None
    if len(spec.weights) != dim:
        raise ValueError(
            f"dimension mismatch: {len(spec.weights)} weights vs dim {dim}"
        )
    return np.asarray(spec.weights)


def norm(v, spec: NormSpec = EUCLIDEAN):
    """Weighted p-norm along the last axis.

    Returns a scalar for a single vector, an array for a batch.
    """
    v = np.asarray(v, dtype=float)
    a = np.abs(v)
    w = _weights_for(spec, v.shape[-1])
    if spec.is_inf:
        aw = a if w is None else w * a
        return np.max(aw, axis=-1)
    p = spec.p
    if p == 1.0:
        aw = a if w is None else w * a
        return np.sum(aw, axis=-1)
    if p == 2.0:
        sq = a * a if w is None else w * (a * a)
        return np.sqrt(np.sum(sq, axis=-1))
    # general p: scale by the largest coordinate so a**p cannot overflow
    m = np.max(a, axis=-1, keepdims=True)
    z = a / np.where(m > 0.0, m, 1.0)
    zp = z**p if w is None else w * z**p
    return m[..., 0] * np.sum(zp, axis=-1) ** (1.0 / p)


def dist(a, b, spec: NormSpec = EUCLIDEAN):
    """Distance ||a - b|| in the given norm; the last axes must agree."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(
            f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}"
        )
    return norm(a - b, spec)


def _sq(v: np.ndarray) -> np.ndarray:
    return np.sum(v * v, axis=-1)


def _seg_dist_sq(q: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Squared Euclidean distance from q to the segment [u, v]."""
    w = v - u
    ww = _sq(w)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(ww > 0.0, np.sum((q - u) * w, axis=-1) / np.where(ww > 0.0, ww, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    return _sq(q - (u + t[..., None] * w))


def triple_hull_distance(q, a, b, c) -> np.ndarray:
    """Euclidean distance from q to the convex hull of {a, b, c}.

    Exact projection onto the (possibly degenerate) triangle: the nearest
    point is either the interior affine solution with nonnegative
    barycentric weights, a segment projection, or a vertex.
    """
    q, a, b, c = np.broadcast_arrays(
        *(np.asarray(x, dtype=float) for x in (q, a, b, c))
    )
    best = np.minimum(_sq(q - a), np.minimum(_sq(q - b), _sq(q - c)))
    best = np.minimum(best, _seg_dist_sq(q, a, b))
    best = np.minimum(best, _seg_dist_sq(q, b, c))
    best = np.minimum(best, _seg_dist_sq(q, a, c))

    e1 = b - a
    e2 = c - a
    r = q - a
    g11 = _sq(e1)
    g22 = _sq(e2)
    g12 = np.sum(e1 * e2, axis=-1)
    r1 = np.sum(e1 * r, axis=-1)
    r2 = np.sum(e2 * r, axis=-1)
    det = g11 * g22 - g12 * g12
    # nearly collinear triangles: the hull is covered by the segment cases
    ok = det > 1e-12 * g11 * g22
    safe = np.where(ok, det, 1.0)
    s = (g22 * r1 - g12 * r2) / safe
    t = (g11 * r2 - g12 * r1) / safe
    # iterative refinement recovers the accuracy the normal equations lose
    # on thin triangles (error ~ eps / relative-determinant otherwise)
    for _ in range(2):
        res = r - s[..., None] * e1 - t[..., None] * e2
        rr1 = np.sum(e1 * res, axis=-1)
        rr2 = np.sum(e2 * res, axis=-1)
        s = s + (g22 * rr1 - g12 * rr2) / safe
        t = t + (g11 * rr2 - g12 * rr1) / safe
    feasible = ok & (s >= -1e-12) & (t >= -1e-12) & (1.0 - s - t >= -1e-12)
    p = a + s[..., None] * e1 + t[..., None] * e2
    best = np.minimum(best, np.where(feasible, _sq(q - p), np.inf))
    return np.sqrt(best)


def in_triple_hull(q, a, b, c, tol: float = 1e-9):
    """True when q lies within tol of the convex hull of {a, b, c}."""
    if tol < 0.0:
        raise ValueError(f"tol must be nonnegative, got {tol}")
    dims = {np.asarray(x).shape[-1] for x in (q, a, b, c)}
    if len(dims) != 1:
        raise ValueError(f"dimension mismatch among hull arguments: {sorted(dims)}")
    d = triple_hull_distance(q, a, b, c)
    result = d <= tol
    return bool(result) if np.ndim(result) == 0 else result


def parse_norm_spec(text: str) -> NormSpec:
    """Parse "p2", "pinf", "p1.5", optionally followed by "weights=w1,w2,...".

    A bare exponent ("2", "inf") is accepted as well.
    """
    parts = text.strip().split()
    if not parts or len(parts) > 2:
        raise ValueError(f"cannot parse norm spec {text!r}")
    head = parts[0]
    if head.startswith("p"):
        head = head[1:]
    if head in ("inf", "infinity"):
        p = math.inf
    else:
        try:
            p = float(head)
        except ValueError:
            raise ValueError(f"cannot parse norm exponent {parts[0]!r}") from None
    weights = None
    if len(parts) == 2:
        key, _, rest = parts[1].partition("=")
        if key != "weights" or not rest:
            raise ValueError(f"cannot parse norm spec {text!r}")
        weights = tuple(float(tok) for tok in rest.split(","))
    return NormSpec(p, weights)


def format_norm_spec(spec: NormSpec) -> str:
    head = "pinf" if spec.is_inf else f"p{spec.p:g}"
    if spec.weights is None:
        return head
    return head + " weights=" + ",".join(f"{w:g}" for w in spec.weights)
