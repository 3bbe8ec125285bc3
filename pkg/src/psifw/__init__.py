"""Exact engine for limits of psi-class hypersurface intersections on the
moduli of stable rational marked trees, plus a desk-scale tropical
intersection toolkit (2-D curves, stable intersections, lattice-index and
facet-perturbation multiplicities)."""

from .firework import (
    Cycle,
    FireworkLevel,
    FireworkPoint,
    StarTuple,
    allowable_insertions,
    brute_force_FW,
    check_star,
    contract_shortest,
    firework_run,
    insertion_site,
    limit_cycle,
    path_system,
    realize,
    transversality_certificate,
)
from .kapranov import (
    MinProfile,
    PsiSpec,
    achieved_exactly_twice,
    in_hypersurface,
    kapranov_image,
    min_profile,
)
from .trees import (
    Branch,
    MarkedTree,
    MetricTree,
    branches,
    contract_edge,
    forgetful,
    forgetful_metric,
    hull_distance,
    insert_edge,
    shortest_edge,
    splits,
    validate_stable,
)
from .tropcycles import (
    CurveEdge,
    TropCurve2D,
    ValuedPolynomial2D,
    WeightedFan,
    check_balanced,
    local_mult,
    ray_crossings,
    stable_intersection_2d,
    trop_curve,
)

__version__ = "0.1.0"
