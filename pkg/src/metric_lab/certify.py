"""Certification sweeps: run every sampled identity and bound check over a
configurable grid and emit a machine-readable report.

Each row names the claim functionally and records the observed estimate
next to the claimed constant, so a regression points at one specific
property.  Rows derive their seeds from the sweep seed and the row label,
making reports byte-identical across runs (the timestamp aside).
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import measure_algebra as ma
from .geometry import (
    EUCLIDEAN,
    NormSpec,
    dist,
    format_norm_spec,
    parse_norm_spec,
    triple_hull_distance,
)
from .lipschitz import (
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
from .ternary import SET_KINDS, TernaryOp, VECTOR_KINDS, check_absorption, check_anti_absorption

__all__ = ["SweepConfig", "run_certification", "write_report", "DEFAULT_OPS"]

DEFAULT_OPS = VECTOR_KINDS + SET_KINDS + ("retraction",)
_KNOWN_OPS = set(DEFAULT_OPS)


@dataclass
class SweepConfig:
    """Grid and budget for one certification run."""

    dims: tuple[int, ...] = (1, 2, 3)
    norms: tuple[NormSpec, ...] = (NormSpec(1.0), NormSpec(2.0), NormSpec(math.inf))
    ops: tuple[str, ...] = DEFAULT_OPS
    samples: int = 10_000
    seed: int = 42
    output_path: str = "certification.json"
    format: str = "json"
    claimed_bounds: dict = field(default_factory=dict)

    def validate(self) -> None:
        if not self.dims or not self.norms or not self.ops:
            raise ValueError("dims, norms and ops must be nonempty")
        if any(d < 1 for d in self.dims):
            raise ValueError("dims must be positive")
        if self.samples <= 0:
            raise ValueError("samples must be positive")
        unknown = [op for op in self.ops if op not in _KNOWN_OPS]
        if unknown:
            raise ValueError(f"unknown ops: {unknown}")
        if self.format not in ("json", "csv"):
            raise ValueError(f"format must be json or csv, got {self.format!r}")

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        cfg = cls()
        if "dims" in d:
            cfg.dims = tuple(int(x) for x in d["dims"])
        if "norms" in d:
            cfg.norms = tuple(
                n if isinstance(n, NormSpec) else parse_norm_spec(str(n))
                for n in d["norms"]
            )
        if "ops" in d:
            cfg.ops = tuple(str(x) for x in d["ops"])
        for key in ("samples", "seed"):
            if key in d:
                setattr(cfg, key, int(d[key]))
        if "output_path" in d:
            cfg.output_path = str(d["output_path"])
        if "format" in d:
            cfg.format = str(d["format"])
        if "claimed_bounds" in d:
            cfg.claimed_bounds = {str(k): float(v) for k, v in d["claimed_bounds"].items()}
        return cfg

    def to_dict(self) -> dict:
        return {
            "dims": list(self.dims),
            "norms": [format_norm_spec(n) for n in self.norms],
            "ops": list(self.ops),
            "samples": self.samples,
            "seed": self.seed,
            "output_path": self.output_path,
            "format": self.format,
            "claimed_bounds": dict(self.claimed_bounds),
        }


def derive_seed(base: int, label: str) -> int:
    """Stable per-row seed: independent of row ordering."""
    digest = hashlib.sha256(f"{base}:{label}".encode()).digest()
    return int.from_bytes(digest[:8], "big") % (2**63)


def _row(check, op=None, dim=None, norm=None, arg=None, samples=None, seed=None,
         estimate=None, claimed_bound=None, tolerance=None, passed=True, witness=None):
    return {
        "check": check,
        "op": op,
        "dim": dim,
        "norm": None if norm is None else format_norm_spec(norm),
        "arg": arg,
        "samples": samples,
        "seed": seed,
        "estimate": estimate,
        "claimed_bound": claimed_bound,
        "tolerance": tolerance,
        "pass": bool(passed),
        "witness": witness,
    }


def _witness_json(witness):
    if witness is None:
        return None
    out = []
    for w in witness:
        if isinstance(w, ma.QuotientClass):
            out.append(ma.format_interval_set(w.rep))
        elif isinstance(w, ma.IntervalSet):
            out.append(ma.format_interval_set(w))
        else:
            out.append(np.asarray(w, dtype=float).tolist())
    return out


def _identity_rows(cfg: SweepConfig) -> list[dict]:
    rows = []
    tol = 1e-10
    vector_ops = [op for op in cfg.ops if op in VECTOR_KINDS and op != "group1d"]
    for op_kind in vector_ops:
        for dim in cfg.dims:
            for nspec in cfg.norms:
                label = f"identity:{op_kind}:{dim}:{format_norm_spec(nspec)}"
                seed = derive_seed(cfg.seed, label)
                pairs = sample_vector_pairs(SamplerConfig(seed=seed, count=cfg.samples, dim=dim))
                op = TernaryOp(op_kind, nspec)
                if op.is_mixer:
                    res = check_absorption(op, pairs, tol)
                    name = "absorption"
                else:
                    res = check_anti_absorption(op, pairs, tol)
                    name = "anti_absorption"
                rows.append(_row(
                    name, op=op_kind, dim=dim, norm=nspec, samples=cfg.samples,
                    seed=seed, estimate=res.worst, claimed_bound=0.0, tolerance=tol,
                    passed=res.passed,
                    witness=None if res.passed else _witness_json(res.witness),
                ))
    if "group1d" in cfg.ops:
        label = "identity:group1d"
        seed = derive_seed(cfg.seed, label)
        pairs = sample_vector_pairs(SamplerConfig(seed=seed, count=cfg.samples, dim=1))
        res = check_anti_absorption(TernaryOp("group1d"), pairs, tol)
        rows.append(_row("anti_absorption", op="group1d", dim=1, samples=cfg.samples,
                         seed=seed, estimate=res.worst, claimed_bound=0.0,
                         tolerance=tol, passed=res.passed))
    for op_kind in [op for op in cfg.ops if op in SET_KINDS]:
        label = f"identity:{op_kind}"
        seed = derive_seed(cfg.seed, label)
        scfg = SamplerConfig(seed=seed, count=cfg.samples, dim=1)
        op = TernaryOp(op_kind)
        if op_kind == "quotcomix":
            pairs = sample_quotient_pairs(scfg)
        else:
            pairs = sample_interval_pairs(scfg)
        if op.is_mixer:
            res = check_absorption(op, pairs, tol)
            name = "absorption"
        else:
            res = check_anti_absorption(op, pairs, tol)
            name = "anti_absorption"
        rows.append(_row(name, op=op_kind, samples=cfg.samples, seed=seed,
                         estimate=res.worst, claimed_bound=0.0, tolerance=tol,
                         passed=res.passed))
    return rows


def _hull_and_symmetry_rows(cfg: SweepConfig) -> list[dict]:
    rows = []
    hull_tol, sym_tol = 1e-8, 1e-12
    for op_kind in [op for op in cfg.ops if op in ("incenter", "nagel")]:
        for dim in cfg.dims:
            for nspec in cfg.norms:
                label = f"hull:{op_kind}:{dim}:{format_norm_spec(nspec)}"
                seed = derive_seed(cfg.seed, label)
                rng = np.random.default_rng(seed)
                a, b, c = (rng.uniform(-1, 1, (cfg.samples, dim)) for _ in range(3))
                op = TernaryOp(op_kind, nspec)
                out = op(a, b, c)
                worst_hull = float(np.max(triple_hull_distance(out, a, b, c)))
                perms = [(a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)]
                worst_sym = max(
                    float(np.max(dist(out, op(*perm), nspec))) for perm in perms
                )
                rows.append(_row("hull_membership", op=op_kind, dim=dim, norm=nspec,
                                 samples=cfg.samples, seed=seed, estimate=worst_hull,
                                 claimed_bound=0.0, tolerance=hull_tol,
                                 passed=worst_hull <= hull_tol))
                rows.append(_row("symmetry", op=op_kind, dim=dim, norm=nspec,
                                 samples=cfg.samples, seed=seed, estimate=worst_sym,
                                 claimed_bound=0.0, tolerance=sym_tol,
                                 passed=worst_sym <= sym_tol))
    return rows


def _report_row(check: str, rep, arg=None) -> dict:
    return {
        "check": check,
        "op": rep.op,
        "dim": rep.dim,
        "norm": rep.norm,
        "arg": rep.arg_index if arg is None else arg,
        "samples": rep.samples,
        "seed": rep.seed,
        "estimate": rep.estimate,
        "claimed_bound": rep.claimed_bound,
        "tolerance": rep.tolerance,
        "pass": rep.passed,
        "witness": _witness_json(rep.witness) if not rep.passed else None,
    }


def _lipschitz_rows(cfg: SweepConfig) -> list[dict]:
    rows = []
    for op_kind in [op for op in cfg.ops if op in VECTOR_KINDS]:
        bound = float(cfg.claimed_bounds.get(op_kind, 1.0))
        dims = [1] if op_kind == "group1d" else cfg.dims
        norms = [EUCLIDEAN] if op_kind in ("median", "group1d") else cfg.norms
        for dim in dims:
            for nspec in norms:
                op = TernaryOp(op_kind, nspec)
                for arg in (1, 2, 3):
                    label = f"lip:{op_kind}:{dim}:{format_norm_spec(nspec)}:{arg}"
                    scfg = SamplerConfig(seed=derive_seed(cfg.seed, label),
                                         count=cfg.samples, dim=dim)
                    rep = estimate_per_arg_lipschitz(op, arg, scfg, nspec,
                                                     claimed_bound=bound)
                    rows.append(_report_row("per_arg_lipschitz", rep))
    for op_kind in [op for op in cfg.ops if op in SET_KINDS]:
        bound = float(cfg.claimed_bounds.get(op_kind, 1.0))
        op = TernaryOp(op_kind)
        for arg in (1, 2, 3):
            label = f"lip:{op_kind}:{arg}"
            scfg = SamplerConfig(seed=derive_seed(cfg.seed, label), count=cfg.samples, dim=1)
            rep = estimate_per_arg_lipschitz(op, arg, scfg, claimed_bound=bound,
                                             tolerance=0.0)
            rows.append(_report_row("per_arg_lipschitz", rep))
    if "median" in cfg.ops and any(n.is_inf and n.weights is None for n in cfg.norms):
        for dim in cfg.dims:
            label = f"joint:median:inf:{dim}"
            scfg = SamplerConfig(seed=derive_seed(cfg.seed, label), count=cfg.samples, dim=dim)
            rep = estimate_joint_lipschitz(
                TernaryOp("median", NormSpec(math.inf)), scfg,
                claimed_bound=float(cfg.claimed_bounds.get("median_joint", 1.0)),
                tolerance=1e-9,
            )
            rows.append(_report_row("joint_nonexpansion", rep))
    return rows


def _retraction_rows(cfg: SweepConfig) -> list[dict]:
    if "retraction" not in cfg.ops:
        return []
    rows = []
    bound = float(cfg.claimed_bounds.get("retraction", 9.0))
    for dim in cfg.dims:
        for nspec in cfg.norms:
            label = f"retraction:{dim}:{format_norm_spec(nspec)}"
            scfg = SamplerConfig(seed=derive_seed(cfg.seed, label),
                                 count=cfg.samples, dim=dim)
            rep = estimate_retraction_lipschitz(scfg, nspec, claimed_bound=bound)
            rows.append(_report_row("retraction_lipschitz", rep))
            chain = retraction_chain_bounds(scfg, nspec)
            worst = max(chain.worst_excess_f, chain.worst_excess_h)
            rows.append(_row("retraction_chain", op="retraction", dim=dim, norm=nspec,
                             samples=cfg.samples, seed=scfg.seed, estimate=worst,
                             claimed_bound=0.0, tolerance=chain.tolerance,
                             passed=chain.passed))
    return rows


def _quotient_rows(cfg: SweepConfig) -> list[dict]:
    if "quotcomix" not in cfg.ops:
        return []
    label = "quotient:well_defined"
    seed = derive_seed(cfg.seed, label)
    rng = np.random.default_rng(seed)
    mismatches = 0
    witness = None
    for _ in range(cfg.samples):
        triple = [random_interval_set(rng) for _ in range(3)]
        base = None
        for mask in range(8):
            reps = [
                s.complement() if mask & (1 << j) else s for j, s in enumerate(triple)
            ]
            out = ma.quotient_comixer(*(ma.quotient_class(s) for s in reps))
            if base is None:
                base = out
            elif out != base:
                mismatches += 1
                if witness is None:
                    witness = triple
    passed = mismatches == 0
    return [_row("quotient_well_defined", op="quotcomix", samples=cfg.samples,
                 seed=seed, estimate=float(mismatches), claimed_bound=0.0,
                 tolerance=0.0, passed=passed,
                 witness=None if passed else _witness_json(witness))]


def _measure_rows(cfg: SweepConfig) -> list[dict]:
    if not any(op in SET_KINDS for op in cfg.ops):
        return []
    rows = []
    label = "measure:intertwine"
    seed = derive_seed(cfg.seed, label)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(cfg.samples):
        a, b, c = rng.uniform(0.0, 1.0, 3)
        lhs, rhs = ma.intertwine_check(a, b, c)
        worst = max(worst, abs(lhs - rhs))
    rows.append(_row("intertwine_identity", op="setcomix", samples=cfg.samples,
                     seed=seed, estimate=worst, claimed_bound=0.0, tolerance=1e-12,
                     passed=worst <= 1e-12))

    label = "measure:geodesic"
    seed = derive_seed(cfg.seed, label)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(min(cfg.samples, 1000)):
        s, t = rng.uniform(0.0, 1.0, 2)
        worst = max(worst, abs(ma.rho(ma.geodesic_point(s), ma.geodesic_point(t)) - abs(s - t)))
    loop_gap = ma.quotient_dist(
        ma.quotient_class(ma.geodesic_point(0.0)), ma.quotient_class(ma.geodesic_point(1.0))
    )
    rows.append(_row("geodesic_unit_speed", samples=min(cfg.samples, 1000), seed=seed,
                     estimate=worst, claimed_bound=0.0, tolerance=1e-15,
                     passed=worst <= 1e-15))
    rows.append(_row("quotient_loop_closure", estimate=loop_gap, claimed_bound=0.0,
                     tolerance=0.0, passed=loop_gap == 0.0))
    return rows


def _gap_rows(cfg: SweepConfig) -> list[dict]:
    table = gap_probe(100.0, 0.5)
    ok = all(fx <= -1.0 and d >= x + 1.0 for x, fx, d in table)
    worst = max(fx for _, fx, _ in table)
    return [_row("gap_displacement_growth", op="group1d", samples=len(table),
                 estimate=worst, claimed_bound=-1.0, tolerance=0.0, passed=ok)]


def run_certification(cfg: SweepConfig) -> dict:
    """Run every check in the sweep; returns the report dictionary."""
    cfg.validate()
    rows: list[dict] = []
    rows += _identity_rows(cfg)
    rows += _hull_and_symmetry_rows(cfg)
    rows += _lipschitz_rows(cfg)
    rows += _retraction_rows(cfg)
    rows += _quotient_rows(cfg)
    rows += _measure_rows(cfg)
    rows += _gap_rows(cfg)
    return {
        "config": cfg.to_dict(),
        "results": rows,
        "pass": all(r["pass"] for r in rows),
    }


def write_report(report: dict, path: str, fmt: str = "json") -> None:
    """Write the report; JSON carries a "created" timestamp, CSV does not."""
    if fmt == "json":
        payload = dict(report)
        payload["created"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        text = json.dumps(payload, indent=2, sort_keys=True)
    else:
        buf = io.StringIO()
        fields = ["check", "op", "dim", "norm", "arg", "samples", "seed",
                  "estimate", "claimed_bound", "tolerance", "pass", "witness"]
        writer = csv.DictWriter(buf, fieldnames=fields)
        writer.writeheader()
        for row in report["results"]:
            flat = {k: row.get(k) for k in fields}
            if flat["witness"] is not None:
                flat["witness"] = json.dumps(flat["witness"])
            writer.writerow(flat)
        text = buf.getvalue()
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)
