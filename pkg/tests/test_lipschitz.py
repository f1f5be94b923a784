import json
import math

import numpy as np
import pytest

from metric_lab.geometry import EUCLIDEAN, NormSpec
from metric_lab.lipschitz import (
    SamplerConfig,
    estimate_joint_lipschitz,
    estimate_per_arg_lipschitz,
    estimate_retraction_lipschitz,
    gap_probe,
    random_interval_set,
    reevaluate,
    retraction_chain_bounds,
    sample_interval_pairs,
    sample_vector_pairs,
)
from metric_lab.measure_algebra import canonicalize
from metric_lab.ternary import TernaryOp, group_comixer_1d, median_mixer

PINF = NormSpec(math.inf)


def test_sampler_config_validation():
    with pytest.raises(ValueError):
        SamplerConfig(count=0)
    with pytest.raises(ValueError):
        SamplerConfig(dim=0)
    with pytest.raises(ValueError):
        SamplerConfig(box_radius=0.0)
    with pytest.raises(ValueError):
        SamplerConfig(min_separation=-1.0)
    assert SamplerConfig(box_radius=2.0).separation == 2e-6


def test_degenerate_sampler_rejected():
    cfg = SamplerConfig(count=10, dim=1, box_radius=1.0, min_separation=5.0)
    with pytest.raises(ValueError, match="degenerate sampler"):
        estimate_per_arg_lipschitz(TernaryOp("incenter"), 1, cfg)


def test_reports_are_reproducible():
    cfg = SamplerConfig(seed=42, count=2000, dim=2)
    rep1 = estimate_per_arg_lipschitz(TernaryOp("incenter"), 1, cfg)
    rep2 = estimate_per_arg_lipschitz(TernaryOp("incenter"), 1, cfg)
    assert json.dumps(rep1.to_json_dict(), sort_keys=True) == json.dumps(
        rep2.to_json_dict(), sort_keys=True
    )
    rep3 = estimate_per_arg_lipschitz(TernaryOp("incenter"), 1, SamplerConfig(seed=43, count=2000, dim=2))
    assert rep3.to_json_dict()["witness"] != rep1.to_json_dict()["witness"]


def test_subseed_streams_differ():
    cfg = SamplerConfig(seed=42, count=100, dim=2)
    a = cfg.subseed(0)
    b = cfg.subseed(1)
    assert a.seed != b.seed != cfg.seed


@pytest.mark.parametrize("kind,spec", [
    ("incenter", EUCLIDEAN),
    ("incenter", NormSpec(1.0)),
    ("nagel", NormSpec(1.0)),
    ("nagel", PINF),
    ("median", EUCLIDEAN),
])
def test_per_arg_estimates_stay_below_one(kind, spec):
    cfg = SamplerConfig(seed=11, count=4000, dim=3)
    for arg in (1, 2, 3):
        rep = estimate_per_arg_lipschitz(TernaryOp(kind, spec), arg, cfg, spec)
        assert rep.passed, f"{kind} arg {arg}: {rep.estimate}"
        assert rep.estimate <= 1.0 + 1e-6
        assert rep.estimate > 0.5  # the interchange pairs already force ratio about 1
        if kind == "median":
            # the median copies input coordinates, so even hill climbing
            # cannot push the ratio past 1 in float arithmetic
            assert rep.estimate <= 1.0


def test_per_arg_estimates_with_weighted_norms():
    # non-symmetric unit balls exercise the same per-argument bound
    for spec in (NormSpec(2.0, (0.5, 3.0, 1.0)), NormSpec(math.inf, (2.0, 1.0, 0.25))):
        cfg = SamplerConfig(seed=29, count=4000, dim=3)
        for kind in ("incenter", "nagel"):
            rep = estimate_per_arg_lipschitz(TernaryOp(kind, spec), 1, cfg, spec)
            assert rep.passed, f"{kind} {spec}: {rep.estimate}"


def test_per_arg_estimate_hits_one_for_comixer():
    # anti-absorption pairs realize ratio 1, so the estimate is essentially 1
    rep = estimate_per_arg_lipschitz(
        TernaryOp("nagel"), 1, SamplerConfig(seed=12, count=5000, dim=2)
    )
    assert rep.estimate == pytest.approx(1.0, abs=1e-6)


def test_scalar_ratio_sanity_median():
    # perturbing (0,0,1) -> (eps,0,1) moves the median from 0 to eps
    eps = 1e-4
    a, b, c = np.array([0.0]), np.array([0.0]), np.array([1.0])
    base = median_mixer(a, b, c)
    pert = median_mixer(np.array([eps]), b, c)
    assert float(abs(pert - base)[0] / eps) == 1.0


def test_witness_reevaluates_to_estimate():
    cfg = SamplerConfig(seed=13, count=3000, dim=2)
    reports = [
        estimate_per_arg_lipschitz(TernaryOp("incenter"), 2, cfg),
        estimate_per_arg_lipschitz(TernaryOp("nagel", NormSpec(1.0)), 3, cfg),
        estimate_joint_lipschitz(TernaryOp("median", PINF), cfg, claimed_bound=1.0),
        estimate_retraction_lipschitz(SamplerConfig(seed=14, count=3000, dim=2)),
        estimate_per_arg_lipschitz(TernaryOp("setcomix"), 1, SamplerConfig(seed=15, count=300), tolerance=0.0),
        estimate_per_arg_lipschitz(TernaryOp("quotcomix"), 2, SamplerConfig(seed=16, count=200), tolerance=0.0),
    ]
    for rep in reports:
        assert abs(reevaluate(rep) - rep.estimate) <= 1e-12


def test_joint_median_sup_norm_nonexpanding():
    rep = estimate_joint_lipschitz(
        TernaryOp("median", PINF),
        SamplerConfig(seed=17, count=20000, dim=4),
        claimed_bound=1.0,
        tolerance=1e-9,
    )
    assert rep.passed and rep.estimate <= 1.0 + 1e-9


def test_joint_incenter_within_three():
    # moving all three arguments chains three per-argument steps
    rep = estimate_joint_lipschitz(
        TernaryOp("incenter"),
        SamplerConfig(seed=18, count=20000, dim=2),
        claimed_bound=3.0,
    )
    assert rep.passed
    assert rep.estimate <= 3.0 + 1e-6


def test_retraction_estimate_under_nine():
    for spec in (NormSpec(1.0), EUCLIDEAN, PINF):
        rep = estimate_retraction_lipschitz(SamplerConfig(seed=19, count=20000, dim=2), spec)
        assert rep.passed
        assert rep.estimate <= 9.0 + 1e-6
        assert rep.estimate >= 1.0 - 1e-9  # 2-point pairs are fixed, ratio 1


def test_retraction_chain_bounds_hold():
    for spec in (NormSpec(1.0), EUCLIDEAN, PINF):
        chain = retraction_chain_bounds(SamplerConfig(seed=19, count=20000, dim=2), spec)
        assert chain.passed
        assert chain.worst_excess_f <= 1e-9
        assert chain.worst_excess_h <= 1e-9


def test_set_op_estimates_exact():
    cfg = SamplerConfig(seed=20, count=400)
    for kind in ("setcomix", "quotcomix"):
        rep = estimate_per_arg_lipschitz(TernaryOp(kind), 1, cfg, tolerance=0.0)
        assert rep.passed
        assert rep.estimate == 1.0
    rep = estimate_per_arg_lipschitz(TernaryOp("setmix"), 1, cfg, tolerance=0.0)
    assert rep.passed and rep.estimate <= 1.0


def test_failing_bound_produces_witness():
    rep = estimate_per_arg_lipschitz(
        TernaryOp("nagel"), 1, SamplerConfig(seed=21, count=2000, dim=2), claimed_bound=0.5
    )
    assert not rep.passed
    assert rep.estimate > 0.5
    # the witness is a full argument tuple that reproduces the violation
    assert len(rep.witness) == 4
    assert abs(reevaluate(rep) - rep.estimate) <= 1e-12


def test_report_json_shape():
    rep = estimate_per_arg_lipschitz(
        TernaryOp("incenter"), 1, SamplerConfig(seed=22, count=500, dim=2)
    )
    d = rep.to_json_dict()
    assert set(d) == {
        "op", "arg_index", "norm", "dim", "seed", "samples",
        "estimate", "claimed_bound", "pass", "witness",
    }
    assert d["op"] == "incenter" and d["arg_index"] == 1
    assert d["norm"] == "p2" and d["dim"] == 2
    json.dumps(d)  # serializable


def test_random_interval_set_properties():
    rng = np.random.default_rng(23)
    for _ in range(300):
        s = random_interval_set(rng)
        assert len(s.intervals) <= 6
        assert canonicalize(s.intervals) == s
    # deterministic given the generator state
    a = random_interval_set(np.random.default_rng(9))
    b = random_interval_set(np.random.default_rng(9))
    assert a == b


def test_samplers_are_deterministic():
    cfg = SamplerConfig(seed=24, count=50, dim=3)
    a1, b1 = sample_vector_pairs(cfg)
    a2, b2 = sample_vector_pairs(cfg)
    assert np.array_equal(a1, a2) and np.array_equal(b1, b2)
    p1 = sample_interval_pairs(SamplerConfig(seed=25, count=20))
    p2 = sample_interval_pairs(SamplerConfig(seed=25, count=20))
    assert p1 == p2


def test_gap_probe_examples():
    rows = gap_probe(10.0, 0.5)
    assert rows[0] == (1.0, -1.0, 2.0)
    xs = [r[0] for r in rows]
    assert xs[0] == 1.0 and xs[-1] == 10.0
    for x, fx, d in rows:
        assert fx <= -1.0
        assert d >= x + 1.0
    # displacement grows monotonically along the grid
    ds = [r[2] for r in rows]
    assert all(d2 >= d1 for d1, d2 in zip(ds, ds[1:]))


def test_gap_probe_candidate_projection():
    # at x = 3 the raw co-mixer value is 1, which the allowed branch clips to -1
    assert group_comixer_1d(3.0, 1.0, -1.0) == 1.0
    rows = dict((r[0], r[1]) for r in gap_probe(5.0, 1.0))
    assert rows[3.0] == -1.0


def test_gap_probe_validation():
    with pytest.raises(ValueError):
        gap_probe(0.5, 0.5)
    with pytest.raises(ValueError):
        gap_probe(10.0, 0.0)


def test_interval_sampler_rejects_empty_separation():
    # min_separation of 1 can never be met inside [0, 1]
    cfg = SamplerConfig(seed=26, count=10, min_separation=1.5)
    with pytest.raises(ValueError, match="degenerate sampler"):
        estimate_per_arg_lipschitz(TernaryOp("setcomix"), 1, cfg)
