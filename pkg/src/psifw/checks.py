"""Bundled regression examples exercised by the ``checks`` CLI command.

Each check re-runs one of the worked examples the engine is built around and
compares against frozen exact values; the CLI exits 0 iff all of them pass.
"""

from __future__ import annotations

import warnings

from . import firework as fw
from . import tropcycles as tc
from .kapranov import PsiSpec, min_profile
from .trees import splits


def _firework_worked_example() -> dict:
    n, B = 6, 10
    specs = [
        PsiSpec.build(range(1, 7), 2, 4, 1, n, B),
        PsiSpec.build([1, 3, 4, 6], 3, 1, 2, n, B),
        PsiSpec.build([1, 2, 4, 5, 6], 5, 4, 3, n, B),
    ]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        levels = fw.firework_run(n, specs, B)
    sizes = [len(level.points) for level in levels]
    lengths1 = sorted(pt.metric.length_vector()[0] for pt in levels[1].points)
    first = next(
        pt
        for pt in levels[1].points
        if [sorted(s) for s in splits(pt.metric.tree)] == [[2, 3]]
    )
    kids = fw.allowable_insertions(first.metric, first.star, specs, B)
    kid_lengths = sorted(tuple(k.metric.lengths[e] for e in k.star.edges) for k in kids)
    level3 = {tuple(pt.metric.lengths[e] for e in pt.star.edges) for pt in levels[3].points}
    profiles = {}
    for tag, want in (((180, 19, 1), [(300, 300, 699, 780), (60, 60), (2, 2, 6)]),
                      ((180, 20, 4), [(300, 300, 680, 780), (60, 60), (25, 6, 6)])):
        pt = next(p for p in levels[3].points if tuple(p.metric.lengths[e] for e in p.star.edges) == tag)
        profiles[tag] = [min_profile(pt.metric, specs[q]).value_vector() == want[q] for q in range(3)]
    ok = (
        sizes == [1, 7, 8, 4]
        and lengths1 == [200, 200, 200, 200, 400, 400, 500]
        and kid_lengths == [(180, 20), (180, 20)]
        and {(180, 19, 1), (180, 20, 4)} <= level3
        and all(all(v) for v in profiles.values())
    )
    return {"pass": ok, "sizes": sizes, "level1_lengths": lengths1}


def _stable_intersection_degree10() -> dict:
    f1 = tc.ValuedPolynomial2D.build([((2, 2), 0), ((3, 0), 0), ((0, 3), 0), ((0, 0), 0)])
    f2 = tc.ValuedPolynomial2D.build([((2, 1), 0), ((1, 2), 0), ((1, 0), 0), ((0, 1), 0)])
    si = tc.stable_intersection_2d(tc.trop_curve(f1), tc.trop_curve(f2))
    multiset = sorted(m for _, m in si.displaced)
    ok = si.total == 10 and multiset == [1, 3, 3, 3]
    return {"pass": ok, "total": si.total, "multiset": multiset}


def _plane_cubic_crossings() -> dict:
    f = tc.ValuedPolynomial2D.build(
        [((3, 0), 0), ((1, 1), -2), ((1, 0), 1), ((0, 1), 1), ((0, 0), 2)]
    )
    curve = tc.trop_curve(f)
    crossings = tc.ray_crossings(curve, [(1, 0), (0, 1), (-1, -1)])
    ok = crossings == (1, 1, 1) and tc.check_balanced(curve)
    return {"pass": ok, "crossings": list(crossings)}


def _skeleton_multiplicities() -> dict:
    e1, e2, e3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)
    f0 = (-1, -1, -1)
    star_sigma = tc.WeightedFan.build(
        3,
        [((e1, e2), 1), ((e1, e3), 1), ((e2, e3), 1), ((e1, f0), 1), ((e2, f0), 1), ((e3, f0), 1)],
    )
    star_x1 = tc.WeightedFan.build(
        3, [(((-1, 2, 0),), 1), (((-1, 0, 2),), 1), (((1, -1, -1),), 2)]
    )
    star_x2 = tc.WeightedFan.build(
        3, [(((1, -2, 0),), 1), (((0, -1, 1),), 1), (((-1, 3, -1),), 1)]
    )
    star_x3 = tc.WeightedFan.build(
        3, [(((1, 0, -2),), 1), (((0, 1, -1),), 1), (((-1, -1, 3),), 1)]
    )
    m_zeta = tc.local_mult(star_sigma, [e1], star_x1, facet=0)
    m_zeta2 = tc.local_mult(star_sigma, [e1], star_x1, facet=3)
    coeffs = (
        tc.local_mult(star_sigma, [e1], star_x1),
        tc.local_mult(star_sigma, [e2], star_x2),
        tc.local_mult(star_sigma, [e3], star_x3),
    )
    ok = m_zeta == m_zeta2 == 2 and coeffs == (2, 1, 1)
    return {"pass": ok, "facet_values": [m_zeta, m_zeta2], "coefficients": list(coeffs)}


def _degree_law_small() -> dict:
    results = []
    for n in (5, 6):
        B = 2 * n + 1
        legs = list(range(1, n + 1))
        specs = [PsiSpec.build(legs, 1, 2, q, n, B) for q in range(1, n - 2)]
        levels = fw.firework_run(n, specs, B)
        expected = fw.degree_law_expected(n, specs)
        results.append((n, len(levels[-1].points), expected))
    ok = all(actual == expected for _, actual, expected in results)
    return {"pass": ok, "counts": results}


BUILTIN_CHECKS = {
    "firework_worked_example": _firework_worked_example,
    "stable_intersection_degree10": _stable_intersection_degree10,
    "plane_cubic_crossings": _plane_cubic_crossings,
    "skeleton_multiplicities": _skeleton_multiplicities,
    "degree_law_small": _degree_law_small,
}


def run_builtin_checks() -> dict:
    report = {}
    for name, func in BUILTIN_CHECKS.items():
        try:
            report[name] = func()
        except Exception as exc:  # surfaced in the report, not swallowed
            report[name] = {"pass": False, "error": f"{type(exc).__name__}: {exc}"}
    report["all_pass"] = all(v["pass"] for k, v in report.items() if k != "all_pass")
    return report
