"""Ternary operations with the absorption or anti-absorption property.

A *mixer* maps any triple with two equal arguments to that repeated value;
a *co-mixer* maps it to the remaining third argument.  Vector-valued
operations are vectorized over leading axes (the last axis is the
coordinate axis).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import measure_algebra as ma
from .geometry import EUCLIDEAN, NormSpec, dist, norm

__all__ = [
    "MIXER_KINDS",
    "COMIXER_KINDS",
    "VECTOR_KINDS",
    "SET_KINDS",
    "TernaryOp",
    "CheckResult",
    "incenter_mixer",
    "nagel_comixer",
    "median_mixer",
    "group_comixer_1d",
    "check_absorption",
    "check_anti_absorption",
    "interchange_map",
    "derivative_bound_check",
]

VECTOR_KINDS = ("incenter", "nagel", "median", "group1d")
SET_KINDS = ("setmix", "setcomix", "quotcomix")
MIXER_KINDS = ("incenter", "median", "setmix")
COMIXER_KINDS = ("nagel", "group1d", "setcomix", "quotcomix")


def incenter_mixer(a, b, c, spec: NormSpec = EUCLIDEAN) -> np.ndarray:
    """Average of a, b, c weighted by the opposite side lengths.

    In the Euclidean plane this is the incenter of triangle abc.  The
    fully degenerate case a = b = c returns a; near-degenerate triples
    evaluate the raw formula (the normalized nonnegative weights keep it
    stable).
    """
    a, b, c = np.broadcast_arrays(
        *(np.asarray(x, dtype=float) for x in (a, b, c))
    )
    wa = dist(b, c, spec)
    wb = dist(a, c, spec)
    wc = dist(a, b, spec)
    per = (wa + wb) + wc
    degenerate = per == 0.0
    den = np.where(degenerate, 1.0, per)
    out = ((wa[..., None] * a + wb[..., None] * b) + wc[..., None] * c) / den[..., None]
    if np.any(degenerate):
        out = np.where(degenerate[..., None], a, out)
    return out


def nagel_comixer(a, b, c, spec: NormSpec = EUCLIDEAN) -> np.ndarray:
    """a + b + c minus twice the incenter mixer.

    In the Euclidean plane this is the Nagel point of triangle abc.
    """
    a, b, c = np.broadcast_arrays(
        *(np.asarray(x, dtype=float) for x in (a, b, c))
    )
    return ((a + b) + c) - 2.0 * incenter_mixer(a, b, c, spec)


def median_mixer(a, b, c) -> np.ndarray:
    """Coordinate-wise median of three vectors, computed by comparisons.

    Each output coordinate is one of the input coordinates, so absorption
    holds bit-exactly.
    """
    a, b, c = (np.asarray(x, dtype=float) for x in (a, b, c))
    return np.maximum(np.minimum(a, b), np.minimum(np.maximum(a, b), c))


def group_comixer_1d(a, b, c):
    """a + b + c - 2 med(a, b, c) on reals, elementwise on arrays.

    Computed as lo + hi - mid after sorting, with the duplicate case
    short-circuited so that two equal arguments return the third exactly.
    Inputs from a common additive subgroup of R stay in that subgroup.
    """
    a, b, c = (np.asarray(x, dtype=float) for x in (a, b, c))
    lo = np.minimum(np.minimum(a, b), c)
    hi = np.maximum(np.maximum(a, b), c)
    mid = median_mixer(a, b, c)
    out = np.where(mid == lo, hi, np.where(mid == hi, lo, (lo + hi) - mid))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class TernaryOp:
    """A named ternary operation together with the norm it is measured in.

    Vector kinds: "incenter", "nagel", "median", "group1d" (arguments are
    coordinate arrays; "median" and "group1d" ignore the norm spec).
    Interval kinds: "setmix", "setcomix" on IntervalSet and "quotcomix" on
    QuotientClass arguments.  Evaluation is deterministic: identical inputs
    give bit-identical outputs.
    """

    kind: str
    spec: NormSpec = EUCLIDEAN

    def __post_init__(self) -> None:
        if self.kind not in VECTOR_KINDS + SET_KINDS:
            raise ValueError(f"unknown ternary op kind {self.kind!r}")

    @property
    def is_mixer(self) -> bool:
        return self.kind in MIXER_KINDS

    @property
    def is_comixer(self) -> bool:
        return self.kind in COMIXER_KINDS

    @property
    def is_vector_op(self) -> bool:
        return self.kind in VECTOR_KINDS

    def __call__(self, a, b, c):
        if self.kind == "incenter":
            return incenter_mixer(a, b, c, self.spec)
        if self.kind == "nagel":
            return nagel_comixer(a, b, c, self.spec)
        if self.kind == "median":
            return median_mixer(a, b, c)
        if self.kind == "group1d":
            return group_comixer_1d(a, b, c)
        if self.kind == "setmix":
            return ma.set_mixer(a, b, c)
        if self.kind == "setcomix":
            return ma.set_comixer(a, b, c)
        return ma.quotient_comixer(a, b, c)

    def distance(self, x, y):
        """Distance between two operands/outputs in the op's own space."""
        if self.is_vector_op:
            return dist(x, y, self.spec)
        if self.kind == "quotcomix":
            return ma.quotient_dist(x, y)
        return ma.rho(x, y)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a sampled identity check: worst violation and witness."""

    passed: bool
    worst: float
    witness: tuple
    tolerance: float

    def __bool__(self) -> bool:
        return self.passed


def _identity_violations(op: TernaryOp, a, b, target):
    """Distances of op(a,a,b), op(a,b,a), op(b,a,a) from the target."""
    return (
        op.distance(op(a, a, b), target),
        op.distance(op(a, b, a), target),
        op.distance(op(b, a, a), target),
    )


def _run_pair_check(op: TernaryOp, samples, absorb: bool, tol: float) -> CheckResult:
    if op.is_vector_op and isinstance(samples, tuple) and len(samples) == 2:
        aa, bb = (np.asarray(s, dtype=float) for s in samples)
    elif op.is_vector_op:
        aa = np.asarray([p[0] for p in samples], dtype=float)
        bb = np.asarray([p[1] for p in samples], dtype=float)
    else:
        worst, witness = -1.0, None
        for a, b in samples:
            target = a if absorb else b
            v = max(_identity_violations(op, a, b, target))
            if v > worst:
                worst, witness = v, (a, b)
        return CheckResult(worst <= tol, max(worst, 0.0), witness, tol)

    target = aa if absorb else bb
    viol = np.maximum.reduce(list(_identity_violations(op, aa, bb, target)))
    idx = int(np.argmax(viol))
    worst = float(viol[idx])
    return CheckResult(worst <= tol, worst, (aa[idx], bb[idx]), tol)


def check_absorption(op: TernaryOp, samples, tol: float = 1e-10) -> CheckResult:
    """op(a,a,b), op(a,b,a), op(b,a,a) must all equal a, within tol.

    samples: a list of (a, b) pairs, or for vector ops a tuple of two
    batch arrays.  The reported violation is the largest distance found.
    Running this on a co-mixer fails with violation equal to the pair
    distance, which is itself a useful sanity check.
    """
    return _run_pair_check(op, samples, absorb=True, tol=tol)


def check_anti_absorption(op: TernaryOp, samples, tol: float = 1e-10) -> CheckResult:
    """op(a,a,b), op(a,b,a), op(b,a,a) must all equal b, within tol."""
    return _run_pair_check(op, samples, absorb=False, tol=tol)


def interchange_map(op: TernaryOp, a, b) -> Callable:
    """The map x -> op(x, a, b); for a co-mixer it swaps a and b.

    Its displacement over any region is controlled by the op's per-argument
    Lipschitz constant times the distance between a and b.
    """
    if not op.is_comixer:
        raise ValueError(f"interchange map expects a co-mixer kind, got {op.kind!r}")

    def f(x):
        return op(x, a, b)

    return f


def derivative_bound_check(
    kind: str,
    a,
    x,
    u,
    spec: NormSpec = EUCLIDEAN,
    h: float = 1e-5,
) -> float:
    """Central-difference directional derivative norm of a one-arg slice.

    kind "F_incenter" probes x -> incenter(0, a, x); kind "G_nagel" probes
    x -> nagel(0, a, x).  The caller supplies unit vectors a and u; x must
    keep distance > h from the singular points 0 and a so the difference
    quotient never straddles them.  The true derivative norm is at most 1,
    so the returned value is expected to be <= 1 + O(h).
    """
    if kind not in ("F_incenter", "G_nagel"):
        raise ValueError(f"unknown derivative kind {kind!r}")
    if h <= 0.0:
        raise ValueError("h must be positive")
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    if abs(norm(a, spec) - 1.0) > 1e-8 or abs(norm(u, spec) - 1.0) > 1e-8:
        raise ValueError("a and u must be unit vectors in the given norm")
    zero = np.zeros_like(x)
    if norm(x, spec) <= h or dist(x, a, spec) <= h:
        raise ValueError("x is within h of a singular point (0 or a)")
    op = incenter_mixer if kind == "F_incenter" else nagel_comixer
    hi = op(zero, a, x + h * u, spec)
    lo = op(zero, a, x - h * u, spec)
    return float(norm((hi - lo) / (2.0 * h), spec))
