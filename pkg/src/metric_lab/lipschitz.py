"""Empirical Lipschitz-constant estimation with reproducible sampling.

Random search can only exhibit violations, never prove a bound, so every
report states the observed maximum ratio next to the claimed bound and a
pass flag.  All sampling is driven by a SamplerConfig whose seed fixes the
entire stream: identical configs produce bit-identical reports, and
witnesses re-evaluate to their reported ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import measure_algebra as ma
from .geometry import EUCLIDEAN, NormSpec, dist, format_norm_spec, norm, parse_norm_spec
from .ternary import TernaryOp, group_comixer_1d, incenter_mixer, nagel_comixer

__all__ = [
    "SamplerConfig",
    "LipschitzReport",
    "ChainCheck",
    "estimate_per_arg_lipschitz",
    "estimate_joint_lipschitz",
    "estimate_retraction_lipschitz",
    "retraction_chain_bounds",
    "gap_probe",
    "reevaluate",
    "random_interval_set",
    "sample_vector_pairs",
    "sample_interval_pairs",
    "sample_quotient_pairs",
]

_CLIMB_STEPS = 100
_CLIMB_DECAY = 0.7
_CLIMB_TOP = 10


@dataclass(frozen=True)
class SamplerConfig:
    """Deterministic sampling plan: uniform draws from [-r, r]^dim.

    min_separation rejects argument pairs closer than the threshold so no
    0/0 ratio is ever formed; it defaults to 1e-6 * box_radius.
    """

    seed: int = 42
    count: int = 10_000
    dim: int = 2
    box_radius: float = 1.0
    min_separation: float | None = None

    def __post_init__(self) -> None:
        if self.count <= 0:
            raise ValueError("count must be positive")
        if self.dim < 1:
            raise ValueError("dim must be at least 1")
        if not self.box_radius > 0.0:
            raise ValueError("box_radius must be positive")
        if self.min_separation is not None and self.min_separation < 0.0:
            raise ValueError("min_separation must be nonnegative")

    @property
    def separation(self) -> float:
        if self.min_separation is not None:
            return self.min_separation
        return 1e-6 * self.box_radius

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def subseed(self, worker: int) -> "SamplerConfig":
        """Derive an independent child stream; merging per-worker maxima is
        associative, so results do not depend on the partitioning."""
        child = np.random.SeedSequence([self.seed, worker]).generate_state(1)[0]
        return replace(self, seed=int(child))


@dataclass(frozen=True)
class LipschitzReport:
    """Observed maximum ratio, its witness, and the claimed bound."""

    op: str
    arg_index: int | None
    norm: str | None
    dim: int | None
    seed: int
    samples: int
    estimate: float
    claimed_bound: float
    tolerance: float
    passed: bool
    witness: tuple

    def to_json_dict(self) -> dict:
        return {
            "op": self.op,
            "arg_index": self.arg_index,
            "norm": self.norm,
            "dim": self.dim,
            "seed": self.seed,
            "samples": self.samples,
            "estimate": self.estimate,
            "claimed_bound": self.claimed_bound,
            "pass": self.passed,
            "witness": [_serialize_operand(w) for w in self.witness],
        }


def _serialize_operand(w):
    if isinstance(w, ma.QuotientClass):
        return ma.format_interval_set(w.rep)
    if isinstance(w, ma.IntervalSet):
        return ma.format_interval_set(w)
    return np.asarray(w, dtype=float).tolist()


def random_interval_set(rng: np.random.Generator, max_intervals: int = 6) -> ma.IntervalSet:
    """A canonical interval set with up to max_intervals pieces."""
    k = int(rng.integers(0, max_intervals + 1))
    if k == 0:
        return ma.EMPTY
    pts = np.sort(rng.uniform(0.0, 1.0, 2 * k))
    return ma.canonicalize([(pts[2 * i], pts[2 * i + 1]) for i in range(k)])


def sample_vector_pairs(cfg: SamplerConfig) -> tuple[np.ndarray, np.ndarray]:
    rng = cfg.rng()
    r = cfg.box_radius
    return (
        rng.uniform(-r, r, (cfg.count, cfg.dim)),
        rng.uniform(-r, r, (cfg.count, cfg.dim)),
    )


def sample_interval_pairs(cfg: SamplerConfig, max_intervals: int = 6):
    rng = cfg.rng()
    return [
        (random_interval_set(rng, max_intervals), random_interval_set(rng, max_intervals))
        for _ in range(cfg.count)
    ]


def sample_quotient_pairs(cfg: SamplerConfig, max_intervals: int = 6):
    rng = cfg.rng()
    return [
        (
            ma.quotient_class(random_interval_set(rng, max_intervals)),
            ma.quotient_class(random_interval_set(rng, max_intervals)),
        )
        for _ in range(cfg.count)
    ]


def _box_diameter(spec: NormSpec, dim: int, radius: float) -> float:
    return float(norm(np.full(dim, 2.0 * radius), spec))


def _check_sampler(cfg: SamplerConfig, spec: NormSpec, dim: int, vector: bool) -> None:
    diam = _box_diameter(spec, dim, cfg.box_radius) if vector else 1.0
    if cfg.separation >= diam:
        raise ValueError(
            f"degenerate sampler: min_separation {cfg.separation} >= diameter {diam}"
        )


# ---------------------------------------------------------------------------
# ratio functions (shared by sampling, hill climbing, and re-evaluation)


def _per_arg_ratio_fn(op: TernaryOp, spec: NormSpec, k: int, sep: float):
    def fn(batch):
        args = list(batch[:3])
        x = batch[3]
        den = dist(args[k], x, spec)
        pert = list(args)
        pert[k] = x
        num = dist(op(*args), op(*pert), spec)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = num / den
        return np.where(den >= sep, ratio, -np.inf)

    return fn


def _joint_ratio_fn(op: TernaryOp, spec: NormSpec, sep: float):
    def fn(batch):
        a, b, c, a2, b2, c2 = batch
        den = np.maximum(
            dist(a, a2, spec), np.maximum(dist(b, b2, spec), dist(c, c2, spec))
        )
        num = dist(op(a, b, c), op(a2, b2, c2), spec)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = num / den
        return np.where(den >= sep, ratio, -np.inf)

    return fn


def _set_per_arg_ratio(op: TernaryOp, k: int, sep: float):
    def fn(state):
        args = list(state[:3])
        x = state[3]
        den = op.distance(args[k], x)
        if den < sep:
            return -math.inf
        pert = list(args)
        pert[k] = x
        return op.distance(op(*args), op(*pert)) / den

    return fn


# ---------------------------------------------------------------------------
# hill climbing


def _climb_vectors(ratio_fn, state, step0: float):
    """Greedy coordinate-wise refinement with multiplicative step decay."""
    state = [np.array(v, dtype=float) for v in state]
    dim = state[0].shape[-1]
    cur = float(ratio_fn([v[None, :] for v in state])[0])
    step = step0
    nv = len(state)
    nprop = nv * dim * 2
    for _ in range(_CLIMB_STEPS):
        if step < 1e-14 * max(step0, 1.0):
            break
        batch = [np.tile(v, (nprop, 1)) for v in state]
        row = 0
        for vi in range(nv):
            for ci in range(dim):
                for delta in (step, -step):
                    batch[vi][row, ci] += delta
                    row += 1
        ratios = ratio_fn(batch)
        j = int(np.argmax(ratios))
        if ratios[j] > cur:
            cur = float(ratios[j])
            state = [np.array(b[j]) for b in batch]
        else:
            step *= _CLIMB_DECAY
    return cur, tuple(state)


def _perturb_endpoint(s: ma.IntervalSet, j: int, delta: float) -> ma.IntervalSet:
    flat = [e for iv in s.intervals for e in iv]
    flat[j] = min(1.0, max(0.0, flat[j] + delta))
    pairs = []
    for i in range(0, len(flat), 2):
        lo, hi = flat[i], flat[i + 1]
        pairs.append((hi, lo) if lo > hi else (lo, hi))
    return ma.canonicalize(pairs)


def _climb_sets(ratio_fn, state, quotient: bool, step0: float = 0.05):
    def neighbors(x, j, delta):
        if quotient:
            return ma.quotient_class(_perturb_endpoint(x.rep, j, delta))
        return _perturb_endpoint(x, j, delta)

    def endpoints(x):
        iv = x.rep.intervals if quotient else x.intervals
        return 2 * len(iv)

    cur = ratio_fn(state)
    step = step0
    for _ in range(_CLIMB_STEPS):
        if step < 1e-13:
            break
        best_r, best_s = cur, None
        for si in range(len(state)):
            for j in range(endpoints(state[si])):
                for delta in (step, -step):
                    cand = state[:si] + (neighbors(state[si], j, delta),) + state[si + 1 :]
                    r = ratio_fn(cand)
                    if r > best_r:
                        best_r, best_s = r, cand
        if best_s is None:
            step *= _CLIMB_DECAY
        else:
            cur, state = best_r, best_s
    return cur, state


# ---------------------------------------------------------------------------
# estimators


def estimate_per_arg_lipschitz(
    op: TernaryOp,
    arg_index: int,
    cfg: SamplerConfig,
    spec: NormSpec | None = None,
    claimed_bound: float = 1.0,
    tolerance: float = 1e-6,
    refine: bool = True,
) -> LipschitzReport:
    """Max ratio of output movement to input movement in one argument slot.

    Perturbs only the argument at arg_index (1-based), then refines the
    top witnesses by greedy coordinate-wise hill climbing.
    """
    if arg_index not in (1, 2, 3):
        raise ValueError(f"arg_index must be 1, 2 or 3, got {arg_index}")
    spec = op.spec if spec is None else spec
    k = arg_index - 1
    if op.is_vector_op:
        estimate, witness = _per_arg_vectors(op, k, cfg, spec, refine)
    else:
        estimate, witness = _per_arg_sets(op, k, cfg, refine)
    return LipschitzReport(
        op=op.kind,
        arg_index=arg_index,
        norm=format_norm_spec(spec) if op.is_vector_op else None,
        dim=cfg.dim if op.is_vector_op else None,
        seed=cfg.seed,
        samples=cfg.count,
        estimate=estimate,
        claimed_bound=claimed_bound,
        tolerance=tolerance,
        passed=estimate <= claimed_bound + tolerance,
        witness=witness,
    )


def _per_arg_vectors(op, k, cfg, spec, refine):
    _check_sampler(cfg, spec, cfg.dim, vector=True)
    rng = cfg.rng()
    r, n, d = cfg.box_radius, cfg.count, cfg.dim
    a = rng.uniform(-r, r, (n, d))
    b = rng.uniform(-r, r, (n, d))
    c = rng.uniform(-r, r, (n, d))
    x = rng.uniform(-r, r, (n, d))
    args = [a, b, c]
    sep = cfg.separation
    for _ in range(1000):
        bad = dist(args[k], x, spec) < sep
        if not np.any(bad):
            break
        x[bad] = rng.uniform(-r, r, (int(bad.sum()), d))
    else:
        raise ValueError("sampler cannot satisfy min_separation")

    ratio_fn = _per_arg_ratio_fn(op, spec, k, sep)
    ratios = ratio_fn([a, b, c, x])
    top = _top_indices(ratios)
    best = float(ratios[top[0]])
    witness = tuple(np.array(v[top[0]]) for v in (a, b, c, x))
    if refine:
        for i in top:
            state = [np.array(v[i]) for v in (a, b, c, x)]
            got, st = _climb_vectors(ratio_fn, state, 0.05 * r)
            if got > best:
                best, witness = got, st
    return best, witness


def _per_arg_sets(op, k, cfg, refine):
    _check_sampler(cfg, EUCLIDEAN, 1, vector=False)
    rng = cfg.rng()
    quotient = op.kind == "quotcomix"

    def draw():
        s = random_interval_set(rng)
        return ma.quotient_class(s) if quotient else s

    sep = cfg.separation
    ratio_fn = _set_per_arg_ratio(op, k, sep)
    scored = []
    for _ in range(cfg.count):
        state = (draw(), draw(), draw(), draw())
        for _ in range(1000):
            if op.distance(state[k], state[3]) >= sep:
                break
            state = state[:3] + (draw(),)
        else:
            raise ValueError("sampler cannot satisfy min_separation")
        scored.append((ratio_fn(state), state))
    scored.sort(key=lambda t: t[0], reverse=True)
    best, witness = scored[0]
    if refine:
        for r0, state in scored[:_CLIMB_TOP]:
            got, st = _climb_sets(ratio_fn, state, quotient)
            if got > best:
                best, witness = got, st
    return float(best), tuple(witness)


def _top_indices(ratios: np.ndarray) -> np.ndarray:
    k = min(_CLIMB_TOP, ratios.size)
    top = np.argpartition(ratios, -k)[-k:]
    return top[np.argsort(ratios[top])[::-1]]


def estimate_joint_lipschitz(
    op: TernaryOp,
    cfg: SamplerConfig,
    spec: NormSpec | None = None,
    claimed_bound: float = 1.0,
    tolerance: float = 1e-6,
) -> LipschitzReport:
    """Max ratio with all three arguments perturbed at once: the input
    movement is the largest of the three argument distances."""
    if not op.is_vector_op:
        raise ValueError("joint estimation is defined for vector ops")
    spec = op.spec if spec is None else spec
    _check_sampler(cfg, spec, cfg.dim, vector=True)
    rng = cfg.rng()
    r, n, d = cfg.box_radius, cfg.count, cfg.dim
    base = [rng.uniform(-r, r, (n, d)) for _ in range(3)]
    pert = [rng.uniform(-r, r, (n, d)) for _ in range(3)]
    sep = cfg.separation
    for _ in range(1000):
        den = np.maximum(
            dist(base[0], pert[0], spec),
            np.maximum(dist(base[1], pert[1], spec), dist(base[2], pert[2], spec)),
        )
        bad = den < sep
        if not np.any(bad):
            break
        for arr in pert:
            arr[bad] = rng.uniform(-r, r, (int(bad.sum()), d))
    else:
        raise ValueError("sampler cannot satisfy min_separation")

    ratio_fn = _joint_ratio_fn(op, spec, sep)
    ratios = ratio_fn(base + pert)
    i = int(np.argmax(ratios))
    estimate = float(ratios[i])
    witness = tuple(np.array(v[i]) for v in base + pert)
    return LipschitzReport(
        op=op.kind,
        arg_index=None,
        norm=format_norm_spec(spec),
        dim=cfg.dim,
        seed=cfg.seed,
        samples=cfg.count,
        estimate=estimate,
        claimed_bound=claimed_bound,
        tolerance=tolerance,
        passed=estimate <= claimed_bound + tolerance,
        witness=witness,
    )


# ---------------------------------------------------------------------------
# retraction of 3-point sets


def _pairwise_batch(p: np.ndarray, q: np.ndarray, spec: NormSpec) -> np.ndarray:
    return dist(p[:, :, None, :], q[:, None, :, :], spec)


def _hausdorff_batch(p: np.ndarray, q: np.ndarray, spec: NormSpec) -> np.ndarray:
    d = _pairwise_batch(p, q, spec)
    return np.maximum(d.min(axis=2).max(axis=1), d.min(axis=1).max(axis=1))


def _retract_listings(p: np.ndarray, spec: NormSpec) -> np.ndarray:
    """Apply the {mixer, co-mixer} pair to each listed triple."""
    a, b, c = p[:, 0, :], p[:, 1, :], p[:, 2, :]
    s = incenter_mixer(a, b, c, spec)
    t = nagel_comixer(a, b, c, spec)
    return np.stack([s, t], axis=1)


def _sample_triple_pairs(cfg: SamplerConfig, spec: NormSpec):
    """Pairs of listed triples; roughly 20% of listings are degenerate."""
    _check_sampler(cfg, spec, cfg.dim, vector=True)
    rng = cfg.rng()
    r, n, d = cfg.box_radius, cfg.count, cfg.dim
    e = rng.uniform(-r, r, (n, 3, d))
    e2 = rng.uniform(-r, r, (n, 3, d))
    u = rng.uniform(size=(n, 2))
    for arr, col in ((e, 0), (e2, 1)):
        single = u[:, col] < 0.1
        double = (u[:, col] >= 0.1) & (u[:, col] < 0.2)
        arr[single, 1] = arr[single, 0]
        arr[single, 2] = arr[single, 0]
        arr[double, 2] = arr[double, 0]
    sep = cfg.separation
    for _ in range(1000):
        bad = _hausdorff_batch(e, e2, spec) < sep
        if not np.any(bad):
            break
        e2[bad] = rng.uniform(-r, r, (int(bad.sum()), 3, d))
    else:
        raise ValueError("sampler cannot satisfy min_separation")
    return e, e2


def estimate_retraction_lipschitz(
    cfg: SamplerConfig,
    spec: NormSpec = EUCLIDEAN,
    claimed_bound: float = 9.0,
    tolerance: float = 1e-6,
) -> LipschitzReport:
    """Max Hausdorff ratio of retracted pairs over input pairs."""
    e, e2 = _sample_triple_pairs(cfg, spec)
    den = _hausdorff_batch(e, e2, spec)
    num = _hausdorff_batch(_retract_listings(e, spec), _retract_listings(e2, spec), spec)
    ratios = num / den
    i = int(np.argmax(ratios))
    estimate = float(ratios[i])
    return LipschitzReport(
        op="retraction",
        arg_index=None,
        norm=format_norm_spec(spec),
        dim=cfg.dim,
        seed=cfg.seed,
        samples=cfg.count,
        estimate=estimate,
        claimed_bound=claimed_bound,
        tolerance=tolerance,
        passed=estimate <= claimed_bound + tolerance,
        witness=(np.array(e[i]), np.array(e2[i])),
    )


@dataclass(frozen=True)
class ChainCheck:
    """Worst slack in the one-argument-at-a-time retraction estimates.

    For each sampled pair (E, E') with Hausdorff distance delta, a nearest
    map f: E -> E' and the fix-or-forward map h: E' -> E' are built; the
    retracted images must stay within 3*delta resp. 6*delta.
    """

    worst_excess_f: float
    worst_excess_h: float
    samples: int
    tolerance: float
    passed: bool


def retraction_chain_bounds(
    cfg: SamplerConfig, spec: NormSpec = EUCLIDEAN, tolerance: float = 1e-9
) -> ChainCheck:
    """Verify the intermediate displacement-driven bounds on the same
    sample pairs that estimate_retraction_lipschitz draws for this cfg."""
    e, e2 = _sample_triple_pairs(cfg, spec)
    d = _pairwise_batch(e, e2, spec)
    delta = np.maximum(d.min(axis=2).max(axis=1), d.min(axis=1).max(axis=1))
    f_idx = d.argmin(axis=2)
    g_idx = d.argmin(axis=1)
    fa = np.take_along_axis(e2, f_idx[..., None], axis=1)
    cols = np.arange(3)
    in_image = (f_idx[:, None, :] == cols[None, :, None]).any(axis=2)
    h_idx = np.where(in_image, cols[None, :], np.take_along_axis(f_idx, g_idx, axis=1))
    hb = np.take_along_axis(e2, h_idx[..., None], axis=1)

    r_e = _retract_listings(e, spec)
    r_fa = _retract_listings(fa, spec)
    r_e2 = _retract_listings(e2, spec)
    r_hb = _retract_listings(hb, spec)
    excess_f = float(np.max(_hausdorff_batch(r_e, r_fa, spec) - 3.0 * delta))
    excess_h = float(np.max(_hausdorff_batch(r_e2, r_hb, spec) - 6.0 * delta))
    return ChainCheck(
        worst_excess_f=excess_f,
        worst_excess_h=excess_h,
        samples=cfg.count,
        tolerance=tolerance,
        passed=excess_f <= tolerance and excess_h <= tolerance,
    )


# ---------------------------------------------------------------------------
# displacement growth probe on the split line R \ (-1, 1)


def gap_probe(x_max: float, step: float) -> list[tuple[float, float, float]]:
    """Tabulate (x, f(x), x - f(x)) for the constrained interchange map.

    The model space is the real line with the open gap (-1, 1) removed.
    f sends x to the point nearest to the 1-d co-mixer value
    x + 1 + (-1) - 2 med(x, 1, -1) within the branch forced by continuity
    and f(1) = -1, namely (-inf, -1].  Every grid point x >= 1 therefore
    has f(x) <= -1 and displacement at least x + 1: no Lipschitz map can
    swap the two branch points, whatever its constant.
    """
    if x_max < 1.0:
        raise ValueError("x_max must be at least 1")
    if step <= 0.0:
        raise ValueError("step must be positive")
    n = int(math.floor((x_max - 1.0) / step + 1e-12))
    rows = []
    for i in range(n + 1):
        x = 1.0 + i * step
        cand = group_comixer_1d(x, 1.0, -1.0)
        fx = cand if cand <= -1.0 else -1.0
        rows.append((x, fx, x - fx))
    return rows


# ---------------------------------------------------------------------------
# witness re-evaluation


def reevaluate(report: LipschitzReport) -> float:
    """Recompute the report's ratio from its stored witness."""
    spec = parse_norm_spec(report.norm) if report.norm else EUCLIDEAN
    if report.op == "retraction":
        e = np.asarray(report.witness[0], dtype=float)[None]
        e2 = np.asarray(report.witness[1], dtype=float)[None]
        den = _hausdorff_batch(e, e2, spec)
        num = _hausdorff_batch(
            _retract_listings(e, spec), _retract_listings(e2, spec), spec
        )
        return float((num / den)[0])
    op = TernaryOp(report.op, spec)
    if op.is_vector_op:
        batch = [np.asarray(w, dtype=float)[None] for w in report.witness]
        if report.arg_index is None:
            fn = _joint_ratio_fn(op, spec, 0.0)
        else:
            fn = _per_arg_ratio_fn(op, spec, report.arg_index - 1, 0.0)
        return float(fn(batch)[0])
    fn = _set_per_arg_ratio(op, report.arg_index - 1, 0.0)
    return float(fn(report.witness))
