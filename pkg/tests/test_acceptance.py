"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and timings.  Sampling budgets and tolerances are pinned here; the
timed criteria also assert their wall-clock limits.
"""

import json
import math
import time

import numpy as np
import pytest

from metric_lab.certify import SweepConfig, derive_seed, run_certification, write_report
from metric_lab.geometry import NormSpec, triple_hull_distance
from metric_lab.lipschitz import (
    SamplerConfig,
    estimate_joint_lipschitz,
    estimate_per_arg_lipschitz,
    estimate_retraction_lipschitz,
    gap_probe,
    random_interval_set,
    retraction_chain_bounds,
    sample_interval_pairs,
    sample_quotient_pairs,
    sample_vector_pairs,
)
from metric_lab import measure_algebra as ma
from metric_lab.ternary import TernaryOp, check_absorption, check_anti_absorption

GRID_DIMS = (1, 2, 3, 8)
GRID_SPECS = (NormSpec(1.0), NormSpec(1.5), NormSpec(2.0), NormSpec(math.inf))
RETRACT_DIMS = (1, 2, 3)
RETRACT_SPECS = (NormSpec(1.0), NormSpec(2.0), NormSpec(math.inf))
SEED = 42


def _announce(num: int, text: str) -> None:
    print(f"criterion {num:2d}: PASS  {text}")


def test_criterion_01_absorption_identities():
    """Absorption / anti-absorption violations stay below 1e-10."""
    t0 = time.monotonic()
    tol = 1e-10
    worst = 0.0
    for dim in GRID_DIMS:
        for spec in GRID_SPECS:
            seed = derive_seed(SEED, f"acc1:{dim}:{spec.p}")
            pairs = sample_vector_pairs(SamplerConfig(seed=seed, count=10_000, dim=dim))
            for kind, check in (
                ("incenter", check_absorption),
                ("median", check_absorption),
                ("nagel", check_anti_absorption),
            ):
                res = check(TernaryOp(kind, spec), pairs, tol)
                assert res.passed, f"{kind} dim={dim} p={spec.p}: worst {res.worst}"
                worst = max(worst, res.worst)
    res = check_anti_absorption(
        TernaryOp("group1d"), sample_vector_pairs(SamplerConfig(seed=SEED, count=10_000, dim=1)), tol
    )
    assert res.passed and res.worst == 0.0
    ipairs = sample_interval_pairs(SamplerConfig(seed=SEED, count=10_000))
    assert check_absorption(TernaryOp("setmix"), ipairs, tol).worst == 0.0
    assert check_anti_absorption(TernaryOp("setcomix"), ipairs, tol).worst == 0.0
    qpairs = sample_quotient_pairs(SamplerConfig(seed=SEED + 1, count=10_000))
    assert check_anti_absorption(TernaryOp("quotcomix"), qpairs, tol).worst == 0.0
    elapsed = time.monotonic() - t0
    assert elapsed < 60.0, f"criterion 1 took {elapsed:.1f}s"
    _announce(1, f"worst vector violation {worst:.3e}, set violations 0, {elapsed:.1f}s")


def _per_arg_grid(kind: str) -> tuple[float, float]:
    t0 = time.monotonic()
    worst = 0.0
    for dim in GRID_DIMS:
        for spec in GRID_SPECS:
            for arg in (1, 2, 3):
                seed = derive_seed(SEED, f"acc23:{kind}:{dim}:{spec.p}:{arg}")
                cfg = SamplerConfig(seed=seed, count=100_000, dim=dim)
                rep = estimate_per_arg_lipschitz(TernaryOp(kind, spec), arg, cfg, spec)
                assert rep.passed, (
                    f"{kind} dim={dim} p={spec.p} arg={arg}: estimate {rep.estimate}"
                )
                assert rep.estimate <= 1.0 + 1e-6
                worst = max(worst, rep.estimate)
    return worst, time.monotonic() - t0


def test_criterion_02_incenter_per_argument_bound():
    """Incenter mixer is 1-Lipschitz in each argument across the grid."""
    worst, elapsed = _per_arg_grid("incenter")
    assert elapsed < 300.0, f"criterion 2 took {elapsed:.1f}s"
    _announce(2, f"incenter max per-arg estimate {worst:.9f}, {elapsed:.1f}s")


def test_criterion_03_nagel_per_argument_bound():
    """Nagel co-mixer is 1-Lipschitz in each argument across the grid."""
    worst, elapsed = _per_arg_grid("nagel")
    assert elapsed < 300.0, f"criterion 3 took {elapsed:.1f}s"
    _announce(3, f"nagel max per-arg estimate {worst:.9f}, {elapsed:.1f}s")


def test_criterion_04_median_jointly_nonexpanding():
    """Coordinate median in the sup norm never expands joint perturbations."""
    cfg = SamplerConfig(seed=derive_seed(SEED, "acc4"), count=100_000, dim=8)
    rep = estimate_joint_lipschitz(
        TernaryOp("median", NormSpec(math.inf)), cfg, claimed_bound=1.0, tolerance=1e-9
    )
    assert rep.passed and rep.estimate <= 1.0 + 1e-9
    _announce(4, f"median joint estimate {rep.estimate:.12f}")


def test_criterion_05_outputs_in_convex_hull():
    """All mixer, co-mixer, and retraction outputs lie in the input hull."""
    worst = 0.0
    for dim in GRID_DIMS:
        for spec in GRID_SPECS:
            rng = np.random.default_rng(derive_seed(SEED, f"acc5:{dim}:{spec.p}"))
            a, b, c = rng.uniform(-2, 2, (3, 10_000, dim))
            for kind in ("incenter", "nagel"):
                out = TernaryOp(kind, spec)(a, b, c)
                d = triple_hull_distance(out, a, b, c)
                assert bool(np.all(d <= 1e-8)), f"{kind} dim={dim} p={spec.p}"
                worst = max(worst, float(np.max(d)))
    # retraction output pairs, including degenerate listings
    from metric_lab.lipschitz import _retract_listings, _sample_triple_pairs

    for dim in RETRACT_DIMS:
        for spec in RETRACT_SPECS:
            cfg = SamplerConfig(
                seed=derive_seed(SEED, f"acc5r:{dim}:{spec.p}"), count=10_000, dim=dim
            )
            e, _ = _sample_triple_pairs(cfg, spec)
            out = _retract_listings(e, spec)
            for j in (0, 1):
                d = triple_hull_distance(out[:, j], e[:, 0], e[:, 1], e[:, 2])
                assert bool(np.all(d <= 1e-8))
                worst = max(worst, float(np.max(d)))
    _announce(5, f"worst hull residual {worst:.3e} at tol 1e-8")


def test_criterion_06_retraction_nine_lipschitz_with_chain():
    """Retraction ratio stays below 9; one-argument chains below 3d and 6d."""
    t0 = time.monotonic()
    worst = 0.0
    for dim in RETRACT_DIMS:
        for spec in RETRACT_SPECS:
            cfg = SamplerConfig(
                seed=derive_seed(SEED, f"acc6:{dim}:{spec.p}"), count=100_000, dim=dim
            )
            rep = estimate_retraction_lipschitz(cfg, spec)
            assert rep.passed, f"dim={dim} p={spec.p}: estimate {rep.estimate}"
            assert rep.estimate <= 9.0 + 1e-6
            chain = retraction_chain_bounds(cfg, spec, tolerance=1e-9)
            assert chain.passed, (
                f"dim={dim} p={spec.p}: chain excess {chain.worst_excess_f}, "
                f"{chain.worst_excess_h}"
            )
            worst = max(worst, rep.estimate)
    elapsed = time.monotonic() - t0
    assert elapsed < 300.0, f"criterion 6 took {elapsed:.1f}s"
    _announce(6, f"max retraction ratio {worst:.6f} (bound 9), chain ok, {elapsed:.1f}s")


def test_criterion_07_quotient_well_defined_and_nonexpanding():
    """Complement flips never change the quotient parity class; the induced
    operation is exactly nonexpanding per argument."""
    rng = np.random.default_rng(derive_seed(SEED, "acc7"))
    for _ in range(10_000):
        triple = [random_interval_set(rng) for _ in range(3)]
        base = None
        for mask in range(8):
            reps = [
                s.complement() if mask & (1 << j) else s for j, s in enumerate(triple)
            ]
            out = ma.quotient_comixer(*(ma.quotient_class(s) for s in reps))
            if base is None:
                base = out
            else:
                assert out == base
    estimates = []
    for arg in (1, 2, 3):
        cfg = SamplerConfig(seed=derive_seed(SEED, f"acc7:{arg}"), count=10_000)
        rep = estimate_per_arg_lipschitz(TernaryOp("quotcomix"), arg, cfg, tolerance=0.0)
        assert rep.passed and rep.estimate <= 1.0
        estimates.append(rep.estimate)
    _announce(7, f"10000 triples x 8 flips identical; per-arg estimates {estimates}")


def test_criterion_08_intertwine_identity():
    """Parity-set measure equals the 1-d co-mixer of the endpoints."""
    rng = np.random.default_rng(derive_seed(SEED, "acc8"))
    worst = 0.0
    for _ in range(10_000):
        a, b, c = rng.uniform(0.0, 1.0, 3)
        lhs, rhs = ma.intertwine_check(a, b, c)
        worst = max(worst, abs(lhs - rhs))
    assert worst <= 1e-12
    _announce(8, f"worst |lhs - rhs| = {worst:.3e} at tol 1e-12")


def test_criterion_09_geodesic_unit_speed_and_loop():
    """The curve t -> [0, t] is unit speed; its quotient loop closes."""
    rng = np.random.default_rng(derive_seed(SEED, "acc9"))
    worst = 0.0
    for _ in range(1000):
        s, t = rng.uniform(0.0, 1.0, 2)
        gap = abs(ma.rho(ma.geodesic_point(s), ma.geodesic_point(t)) - abs(s - t))
        worst = max(worst, gap)
    assert worst <= 1e-15
    loop = ma.quotient_dist(
        ma.quotient_class(ma.geodesic_point(0.0)),
        ma.quotient_class(ma.geodesic_point(1.0)),
    )
    assert loop == 0.0
    _announce(9, f"worst unit-speed gap {worst:.3e}; endpoint classes coincide")


def test_criterion_10_gap_probe_displacement_growth():
    """On the split line, the constrained swap map's displacement grows
    without bound: f(x) <= -1 and displacement >= x + 1, exactly."""
    table = gap_probe(100.0, 0.5)
    assert table[0][0] == 1.0 and table[-1][0] == 100.0
    assert len(table) == 199
    for x, fx, disp in table:
        assert fx <= -1.0
        assert disp >= x + 1.0
    _announce(10, f"{len(table)} grid points, all with f(x) <= -1 and disp >= x+1")


def test_criterion_11_certification_reports_are_deterministic(tmp_path):
    """Repeated certify runs with one seed produce byte-identical reports."""
    out_path = tmp_path / "report.json"

    def one_run() -> str:
        cfg = SweepConfig(
            dims=(1, 2),
            norms=(NormSpec(1.0), NormSpec(2.0), NormSpec(math.inf)),
            samples=500,
            seed=42,
            output_path=str(out_path),
        )
        report = run_certification(cfg)
        assert report["pass"], [r for r in report["results"] if not r["pass"]]
        write_report(report, str(out_path))
        return out_path.read_text()

    first, second = one_run(), one_run()

    def strip_created(text: str) -> str:
        return "\n".join(ln for ln in text.splitlines() if '"created"' not in ln)

    assert strip_created(first) == strip_created(second)
    assert json.loads(first)["results"]
    _announce(11, "two seed-42 certify reports byte-identical (timestamp aside)")
