"""Mixers, co-mixers, and their certified Lipschitz geometry.

A *mixer* is a symmetric-style ternary operation that returns the repeated
argument whenever two arguments coincide; a *co-mixer* returns the third
one instead.  This package implements both families on weighted p-normed
coordinate spaces (incenter / Nagel-point constructions and coordinate
medians), on the algebra of finite interval unions in [0, 1] (majority and
parity sets, with the complement quotient), and uses the pair to retract
3-point subsets onto 2-point subsets under the Hausdorff metric.  The
lipschitz module stress-tests every claimed constant with reproducible
random search.
"""

from .geometry import (
    EUCLIDEAN,
    NormSpec,
    as_vector,
    dist,
    format_norm_spec,
    in_triple_hull,
    norm,
    parse_norm_spec,
    triple_hull_distance,
)
from .measure_algebra import (
    EMPTY,
    FULL,
    IntervalSet,
    QuotientClass,
    canonicalize,
    format_interval_set,
    geodesic_point,
    intertwine_check,
    parse_interval_set,
    quotient_class,
    quotient_comixer,
    quotient_dist,
    rho,
    set_comixer,
    set_mixer,
)
from .subsets import (
    FiniteSubset,
    PointMap,
    displacement,
    format_subset,
    h_map,
    hausdorff_dist,
    nearest_map,
    parse_subset,
    retraction_3_to_2,
)
from .ternary import (
    CheckResult,
    TernaryOp,
    check_absorption,
    check_anti_absorption,
    derivative_bound_check,
    group_comixer_1d,
    incenter_mixer,
    interchange_map,
    median_mixer,
    nagel_comixer,
)
from .lipschitz import (
    ChainCheck,
    LipschitzReport,
    SamplerConfig,
    estimate_joint_lipschitz,
    estimate_per_arg_lipschitz,
    estimate_retraction_lipschitz,
    gap_probe,
    random_interval_set,
    reevaluate,
    retraction_chain_bounds,
)
from .certify import SweepConfig, run_certification, write_report

__version__ = "0.1.0"
