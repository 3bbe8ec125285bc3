"""Desk-scale tropical cycles: 2-D curves, stable intersection, balancing,
and the facet-perturbation multiplicity for skeleton intersections.

Everything is exact: curve geometry lives in Fractions, fans have integer
generators, and "generic" translations come from a fixed deterministic
pseudo-random stream of rational vectors with growing denominators.  A
candidate translation is rejected, and the next one tried, whenever any
incidence degeneracy is detected exactly; stability of the intersection is a
combinatorial fact about the chosen candidate, never a numeric epsilon.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from . import intlinalg as la

MAX_AMBIENT_DIM = 8
GENERIC_ATTEMPTS = 64

Vec2 = tuple[Fraction, Fraction]
IntVec = tuple[int, ...]


class InputError(ValueError):
    pass


class PositioningError(ValueError):
    """Intersection is not finite / not interior where it must be."""


class GenericityError(RuntimeError):
    """No generic perturbation found within the retry budget."""


class InconsistencyError(RuntimeError):
    """A choice-independence theorem failed on the given data."""


# -- deterministic generic rationals -------------------------------------

_PRIMES = (101, 103, 107, 109, 113, 127, 131, 137, 139, 149)


def generic_vectors(dim: int, tag: str) -> Iterable[tuple[Fraction, ...]]:
    """Deterministic stream of rational vectors with growing denominators,
    all components in (0, 1)."""
    rng = random.Random(f"psifw:{tag}:{dim}")
    for k in itertools.count():
        den = _PRIMES[k % len(_PRIMES)] * (1 + k // len(_PRIMES))
        yield tuple(Fraction(rng.randrange(1, den), den) for _ in range(dim))


# -- 2-D tropical curves --------------------------------------------------


def _as_vec2(p) -> Vec2:
    x, y = p
    return (Fraction(x), Fraction(y))


def _primitive2(v) -> tuple[int, int]:
    x, y = v
    if isinstance(x, Fraction) or isinstance(y, Fraction):
        x, y = Fraction(x), Fraction(y)
        scale = x.denominator * y.denominator
        x, y = int(x * scale), int(y * scale)
    prim = la.primitive((x, y))
    return (prim[0], prim[1])


def _det2(a, b) -> Fraction:
    return a[0] * b[1] - a[1] * b[0]


@dataclass(frozen=True)
class CurveEdge:
    """One cell of a 2-D tropical curve: {base + t*direction : lo <= t <= hi}.

    ``direction`` is a primitive integer vector.  ``lo``/``hi`` of None mean
    unbounded; segments are normalized to t in [0, hi], rays to t in [0, inf).
    """

    base: Vec2
    direction: tuple[int, int]
    weight: int
    lo: Fraction | None
    hi: Fraction | None

    @staticmethod
    def segment(p, q, weight: int) -> "CurveEdge":
        p, q = _as_vec2(p), _as_vec2(q)
        if p == q:
            raise InputError("zero-length segment")
        d = _primitive2((q[0] - p[0], q[1] - p[1]))
        span = next(
            (q[i] - p[i]) / d[i] for i in range(2) if d[i]
        )
        return CurveEdge(p, d, weight, Fraction(0), span)

    @staticmethod
    def ray(base, direction, weight: int) -> "CurveEdge":
        return CurveEdge(_as_vec2(base), _primitive2(direction), weight, Fraction(0), None)

    @staticmethod
    def line(base, direction, weight: int) -> "CurveEdge":
        return CurveEdge(_as_vec2(base), _primitive2(direction), weight, None, None)

    def __post_init__(self):
        if self.weight < 1:
            raise InputError("edge weight must be >= 1")
        if self.lo is not None and self.hi is not None and not self.lo < self.hi:
            raise InputError("degenerate parameter interval")

    def point_at(self, t: Fraction) -> Vec2:
        return (self.base[0] + t * self.direction[0], self.base[1] + t * self.direction[1])

    def endpoints(self) -> list[tuple[Vec2, tuple[int, int]]]:
        """(vertex, outgoing primitive direction) for each finite end."""
        out = []
        if self.lo is not None:
            out.append((self.point_at(self.lo), self.direction))
        if self.hi is not None:
            out.append((self.point_at(self.hi), (-self.direction[0], -self.direction[1])))
        return out


@dataclass(frozen=True)
class TropCurve2D:
    edges: tuple[CurveEdge, ...]

    @staticmethod
    def build(edges: Iterable[CurveEdge]) -> "TropCurve2D":
        edges = tuple(edges)
        if not edges:
            raise InputError("a tropical curve needs at least one edge")
        return TropCurve2D(edges)

    def vertices(self) -> tuple[Vec2, ...]:
        return tuple(sorted({v for e in self.edges for v, _ in e.endpoints()}))


def check_balanced(curve: TropCurve2D) -> bool:
    """True iff at every vertex the weighted primitive directions sum to 0."""
    sums: dict[Vec2, list[Fraction]] = {}
    for edge in curve.edges:
        for vertex, outdir in edge.endpoints():
            acc = sums.setdefault(vertex, [Fraction(0), Fraction(0)])
            acc[0] += edge.weight * outdir[0]
            acc[1] += edge.weight * outdir[1]
    return all(sx == 0 and sy == 0 for sx, sy in sums.values())


# -- tropical curves of valued polynomials -------------------------------


@dataclass(frozen=True)
class ValuedPolynomial2D:
    """Terms (exponent pair u, valuation a) of a polynomial over K((t))."""

    terms: tuple[tuple[tuple[int, int], int], ...]

    @staticmethod
    def build(terms: Iterable[tuple]) -> "ValuedPolynomial2D":
        clean = tuple(((int(u[0]), int(u[1])), int(a)) for u, a in terms)
        if len(clean) < 2:
            raise InputError("need at least 2 terms")
        if len({u for u, _ in clean}) != len(clean):
            raise InputError("exponent pairs must be distinct")
        return ValuedPolynomial2D(clean)


def _value(term, point: Vec2) -> Fraction:
    (u, a) = term
    return point[0] * u[0] + point[1] * u[1] + a


def trop_curve(f: ValuedPolynomial2D) -> TropCurve2D:
    """Locus where min_u(<G,u> + a_u) is achieved twice, as a weighted curve.

    Dual to the regular subdivision of the Newton polygon induced by the
    valuations: each output edge's weight is the lattice length of the dual
    subdivision edge (the span of all terms achieving the minimum there).
    """
    terms = f.terms
    edges: dict[frozenset[int], CurveEdge] = {}
    for idx_i, idx_j in itertools.combinations(range(len(terms)), 2):
        (ui, ai), (uj, aj) = terms[idx_i], terms[idx_j]
        diff = (ui[0] - uj[0], ui[1] - uj[1])
        d = _primitive2((-diff[1], diff[0]))
        # A rational base point on the tie line <G, ui-uj> = aj - ai.
        norm = Fraction(diff[0] ** 2 + diff[1] ** 2)
        rhs = Fraction(aj - ai)
        base = (rhs * diff[0] / norm, rhs * diff[1] / norm)
        lo: Fraction | None = None
        hi: Fraction | None = None
        empty = False
        for m, term in enumerate(terms):
            if m in (idx_i, idx_j):
                continue
            um, am = term
            c = Fraction(d[0] * (ui[0] - um[0]) + d[1] * (ui[1] - um[1]))
            bound = (
                Fraction(am - ai)
                + base[0] * (um[0] - ui[0])
                + base[1] * (um[1] - ui[1])
            )
            if c > 0:
                t = bound / c
                hi = t if hi is None else min(hi, t)
            elif c < 0:
                t = bound / c
                lo = t if lo is None else max(lo, t)
            elif bound < 0:
                empty = True
                break
        if empty or (lo is not None and hi is not None and lo >= hi):
            continue
        # Interior parameter for the argmin set.
        if lo is not None and hi is not None:
            t_star = (lo + hi) / 2
        elif lo is not None:
            t_star = lo + 1
        elif hi is not None:
            t_star = hi - 1
        else:
            t_star = Fraction(0)
        point = (base[0] + t_star * d[0], base[1] + t_star * d[1])
        minimum = min(_value(term, point) for term in terms)
        argmin = frozenset(
            m for m, term in enumerate(terms) if _value(term, point) == minimum
        )
        if argmin in edges:
            continue
        exps = sorted(terms[m][0] for m in argmin)
        umin, umax = exps[0], exps[-1]
        weight = gcd(abs(umax[0] - umin[0]), abs(umax[1] - umin[1]))
        if lo is not None and hi is not None:
            edge = CurveEdge.segment(
                (base[0] + lo * d[0], base[1] + lo * d[1]),
                (base[0] + hi * d[0], base[1] + hi * d[1]),
                weight,
            )
        elif lo is not None:
            edge = CurveEdge.ray((base[0] + lo * d[0], base[1] + lo * d[1]), d, weight)
        elif hi is not None:
            edge = CurveEdge.ray(
                (base[0] + hi * d[0], base[1] + hi * d[1]), (-d[0], -d[1]), weight
            )
        else:
            edge = CurveEdge.line(base, d, weight)
        edges[argmin] = edge
    return TropCurve2D.build(
        sorted(edges.values(), key=lambda e: (e.base, e.direction, e.weight))
    )


def newton_boundary_ray_weights(f: ValuedPolynomial2D) -> dict[tuple[int, int], int]:
    """Lattice length of each Newton-polygon boundary edge, keyed by the dual
    unbounded ray direction (the negated primitive outer normal)."""
    points = [u for u, _ in f.terms]
    hull = _convex_hull(points)
    out: dict[tuple[int, int], int] = {}
    if len(hull) < 3:
        lo, hi = hull[0], hull[-1]
        d = _primitive2((hi[0] - lo[0], hi[1] - lo[1]))
        length = gcd(abs(hi[0] - lo[0]), abs(hi[1] - lo[1]))
        normal = (-d[1], d[0])
        out[normal] = length
        out[(-normal[0], -normal[1])] = length
        return out
    for a, b in zip(hull, hull[1:] + hull[:1]):
        edge = (b[0] - a[0], b[1] - a[1])
        outer = _primitive2((edge[1], -edge[0]))  # hull is counterclockwise
        ray = (-outer[0], -outer[1])
        out[ray] = out.get(ray, 0) + gcd(abs(edge[0]), abs(edge[1]))
    return out


def _convex_hull(points: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
    """Counterclockwise convex hull (Andrew's monotone chain)."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def half(seq):
        chain: list[tuple[int, int]] = []
        for p in seq:
            while (
                len(chain) >= 2
                and _det2(
                    (chain[-1][0] - chain[-2][0], chain[-1][1] - chain[-2][1]),
                    (p[0] - chain[-2][0], p[1] - chain[-2][1]),
                )
                <= 0
            ):
                chain.pop()
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(reversed(pts))
    return lower[:-1] + upper[:-1]


# -- stable intersection --------------------------------------------------


@dataclass(frozen=True)
class StableIntersection:
    """Stable intersection cycle plus the displaced transverse witness."""

    points: tuple[tuple[Vec2, int], ...]  # limit points with total multiplicity
    displaced: tuple[tuple[Vec2, int], ...]  # transverse points at `delta`
    translation: Vec2
    delta: Fraction

    @property
    def total(self) -> int:
        return sum(m for _, m in self.points)


def _interior_for_small_delta(value0: Fraction, slope: Fraction):
    """Classify t(delta) > 0 for small delta > 0: returns (ok, critical_delta).

    ``None`` ok means the candidate translation is degenerate (pinned).
    """
    if value0 > 0:
        return (True, -value0 / slope if slope < 0 else None)
    if value0 == 0:
        if slope > 0:
            return (True, None)
        return (None, None) if slope == 0 else (False, None)
    return (False, None)


def stable_intersection_2d(c1: TropCurve2D, c2: TropCurve2D) -> StableIntersection:
    """Stable intersection via a small generic translation of c2 and the limit
    of the resulting transverse points; multiplicities are lattice indices
    times the edge weights."""
    for attempt, w in zip(range(GENERIC_ATTEMPTS), generic_vectors(2, "stable2d")):
        w = (w[0] - Fraction(1, 2), w[1] - Fraction(1, 2))
        result = _try_stable_intersection(c1, c2, w)
        if result is not None:
            return result
    raise GenericityError("no generic translation found for stable intersection")


def _try_stable_intersection(
    c1: TropCurve2D, c2: TropCurve2D, w: Vec2
) -> StableIntersection | None:
    contributions = []  # (limit point, mult, t1 affine, edge1)
    criticals: list[Fraction] = []
    for e1, e2 in itertools.product(c1.edges, c2.edges):
        d1, d2 = e1.direction, e2.direction
        det = _det2(d1, d2)
        if det == 0:
            # Parallel: only dangerous when the lines can coincide.
            offset = (e2.base[0] - e1.base[0], e2.base[1] - e1.base[1])
            cross_off = _det2(d1, offset)
            cross_w = _det2(d1, w)
            if cross_w == 0:
                if cross_off == 0:
                    return None  # collinear for every delta: degenerate
                continue
            delta_star = -cross_off / cross_w
            if delta_star > 0:
                criticals.append(delta_star)
            continue
        # Solve e1.base + t1 d1 = e2.base + delta w + t2 d2, affinely in delta.
        off = (e2.base[0] - e1.base[0], e2.base[1] - e1.base[1])
        t1_0 = _det2(off, d2) / det
        t1_s = _det2(w, d2) / det
        t2_0 = _det2(off, d1) / det
        t2_s = _det2(w, d1) / det
        ok_all = True
        for t0, ts, lo, hi in (
            (t1_0, t1_s, e1.lo, e1.hi),
            (t2_0, t2_s, e2.lo, e2.hi),
        ):
            for bound, sign in ((lo, 1), (hi, -1)):
                if bound is None:
                    continue
                ok, crit = _interior_for_small_delta(sign * (t0 - bound), sign * ts)
                if ok is None:
                    return None  # pinned at an endpoint: degenerate translation
                if not ok:
                    ok_all = False
                    break
                if crit is not None:
                    criticals.append(crit)
            if not ok_all:
                break
        if not ok_all:
            continue
        mult = e1.weight * e2.weight * abs(int(_det2(d1, d2)))
        limit = e1.point_at(t1_0)
        contributions.append((limit, mult, (t1_0, t1_s), e1))
    # Distinct displaced points: affine coincidence of two crossings is
    # either persistent (degenerate) or bounded away by a critical delta.
    for (l1, _, (a1, b1), e1), (l2, _, (a2, b2), e2) in itertools.combinations(
        contributions, 2
    ):
        p0 = e1.point_at(a1)
        p1 = e2.point_at(a2)
        v0 = (p0[0] - p1[0], p0[1] - p1[1])
        v1 = (
            b1 * e1.direction[0] - b2 * e2.direction[0],
            b1 * e1.direction[1] - b2 * e2.direction[1],
        )
        if v0 == (0, 0) and v1 == (0, 0):
            return None
        roots = set()
        degenerate_coord = False
        for c0, c1_ in zip(v0, v1):
            if c1_ != 0:
                roots.add(-c0 / c1_)
            elif c0 == 0:
                degenerate_coord = True
        if degenerate_coord and len(roots) == 1:
            root = next(iter(roots))
            if root > 0:
                criticals.append(root)
        elif len(roots) == 1:
            root = next(iter(roots))
            if root > 0:
                criticals.append(root)
    delta = min(criticals) / 2 if criticals else Fraction(1)
    displaced = []
    for limit, mult, (a, b), e1 in contributions:
        displaced.append((e1.point_at(a + b * delta), mult))
    displaced.sort()
    grouped: dict[Vec2, int] = {}
    for limit, mult, _, _ in contributions:
        grouped[limit] = grouped.get(limit, 0) + mult
    points = tuple(sorted(grouped.items()))
    return StableIntersection(points, tuple(displaced), w, delta)


def ray_crossings(curve: TropCurve2D, rays: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Total tropical intersection multiplicity of the curve with each ray.

    Each crossing must be a single transverse point interior to both the ray
    and a curve edge; anything else raises PositioningError.
    """
    totals = []
    for ray in rays:
        v = _primitive2(ray)
        total = 0
        for edge in curve.edges:
            det = _det2(edge.direction, v)
            if det == 0:
                if _det2(edge.direction, edge.base) == 0:
                    overlap = _ray_meets_line_span(edge, v)
                    if overlap:
                        raise PositioningError("curve edge overlaps the ray")
                continue
            # edge.base + t*dir = s*v
            s = _det2(edge.direction, edge.base) / det
            t = _det2(v, edge.base) / det
            if s < 0:
                continue
            inside = (edge.lo is None or t > edge.lo) and (edge.hi is None or t < edge.hi)
            on_boundary = (edge.lo is not None and t == edge.lo) or (
                edge.hi is not None and t == edge.hi
            )
            if not inside and not on_boundary:
                continue
            if s == 0 or on_boundary:
                raise PositioningError("intersection not interior to ray and edge")
            total += edge.weight * abs(int(det))
        totals.append(total)
    return tuple(totals)


def _ray_meets_line_span(edge: CurveEdge, v: tuple[int, int]) -> bool:
    """For edge collinear with ray direction through origin: do they overlap?"""
    coord = 0 if v[0] else 1
    lo_s = None if edge.lo is None else edge.point_at(edge.lo)[coord] / v[coord]
    hi_s = None if edge.hi is None else edge.point_at(edge.hi)[coord] / v[coord]
    if lo_s is not None and hi_s is not None and lo_s > hi_s:
        lo_s, hi_s = hi_s, lo_s
    if hi_s is not None and hi_s <= 0:
        return False
    return True


# -- weighted fans and the skeleton multiplicity --------------------------


@dataclass(frozen=True)
class Cone:
    """Simplicial rational cone: nonneg span of ``gens`` (primitive rows)."""

    gens: tuple[IntVec, ...]
    weight: int


@dataclass(frozen=True)
class WeightedFan:
    """Explicitly listed weighted cones, optionally modulo a lineality space."""

    dim: int
    cones: tuple[Cone, ...]
    lineality: tuple[IntVec, ...] = ()

    @staticmethod
    def build(dim: int, cones: Iterable[tuple], lineality: Iterable = ()) -> "WeightedFan":
        if dim > MAX_AMBIENT_DIM:
            raise InputError(f"ambient dimension capped at {MAX_AMBIENT_DIM}")
        lin = tuple(tuple(int(x) for x in v) for v in lineality)
        if any(len(v) != dim for v in lin):
            raise InputError("lineality generators must have the ambient dimension")
        lin_basis = tuple(la.saturation(lin)) if lin else ()
        packed = []
        for gens, weight in cones:
            gen_rows = tuple(la.primitive(tuple(int(x) for x in g)) for g in gens)
            if any(len(g) != dim for g in gen_rows):
                raise InputError("cone generators must have the ambient dimension")
            if int(weight) < 1:
                raise InputError("cone weights must be >= 1")
            combined = gen_rows + lin_basis
            if combined and la.rank(combined) != len(combined):
                raise InputError(
                    "cones must be simplicial: generators (with lineality) "
                    "must be linearly independent; triangulate the input"
                )
            packed.append(Cone(gen_rows, int(weight)))
        if not packed:
            raise InputError("a fan needs at least one cone")
        return WeightedFan(dim, tuple(packed), lin)

    def lineality_basis(self) -> tuple[IntVec, ...]:
        return tuple(la.saturation(self.lineality)) if self.lineality else ()


def _solve_exact(columns: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]):
    """Solve sum_k x_k col_k = rhs exactly.

    Returns ("unique", x), ("none", None) or ("many", None).
    """
    rows = len(rhs)
    cols = len(columns)
    aug = [[Fraction(columns[c][r]) for c in range(cols)] + [Fraction(rhs[r])] for r in range(rows)]
    pivots = []
    r = 0
    for c in range(cols):
        pr = next((i for i in range(r, rows) if aug[i][c] != 0), None)
        if pr is None:
            continue
        aug[r], aug[pr] = aug[pr], aug[r]
        scale = aug[r][c]
        aug[r] = [x / scale for x in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c] != 0:
                factor = aug[i][c]
                aug[i] = [x - factor * y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    for i in range(r, rows):
        if aug[i][-1] != 0:
            return ("none", None)
    if len(pivots) < cols:
        return ("many", None)
    x = [Fraction(0)] * cols
    for i, c in enumerate(pivots):
        x[c] = aug[i][-1]
    return ("unique", tuple(x))


def _in_cone(fan: WeightedFan, cone: Cone, vec: Sequence) -> bool:
    columns = [list(g) for g in cone.gens] + [list(l) for l in fan.lineality_basis()]
    if not columns:
        return all(x == 0 for x in vec)
    status, sol = _solve_exact(
        [[Fraction(c[r]) for r in range(fan.dim)] for c in columns],
        [Fraction(x) for x in vec],
    )
    if status != "unique":
        return status == "many"  # non-simplicial impossible; conservative
    return all(sol[i] >= 0 for i in range(len(cone.gens)))


def _facet_span_basis(fan: WeightedFan, cone: Cone) -> la.Matrix:
    rows = list(cone.gens) + list(fan.lineality_basis())
    return la.saturation(rows)


def local_mult(
    star_sigma: WeightedFan,
    sigma: Sequence[Sequence[int]],
    star_trop_x: WeightedFan,
    facet: int | None = None,
    attempts: int = GENERIC_ATTEMPTS,
) -> int:
    """Facet-perturbation multiplicity of star_trop_x against the skeleton
    cone sigma inside the ambient star_sigma.

    Translates the span of sigma by a generic vector into a facet of
    star_sigma, counts weighted transverse crossings with the cones of
    star_trop_x (weight of a crossing in cone kappa: m_kappa times the index
    of L(sigma) + L(kappa) in the facet's lattice), divides by the facet
    weight, and checks the result is a positive integer independent of the
    facet choice.
    """
    if star_sigma.dim != star_trop_x.dim:
        raise InputError("fans must share the ambient dimension")
    sigma_rows = tuple(la.primitive(tuple(int(x) for x in g)) for g in sigma)
    if not sigma_rows:
        raise InputError("sigma needs at least one generator")
    if facet is not None:
        indices = [facet]
    else:
        indices = [
            idx
            for idx, cone in enumerate(star_sigma.cones)
            if all(_in_cone(star_sigma, cone, g) for g in sigma_rows)
        ]
        if not indices:
            raise InputError("sigma is not contained in any facet of star_sigma")
    values = {}
    for idx in indices:
        values[idx] = _facet_mult(star_sigma, sigma_rows, star_trop_x, idx, attempts)
    distinct = set(values.values())
    if len(distinct) > 1:
        raise InconsistencyError(
            f"multiplicity depends on the facet choice: {values}"
        )
    return distinct.pop()


def _facet_mult(
    star_sigma: WeightedFan,
    sigma_rows: tuple[IntVec, ...],
    star_trop_x: WeightedFan,
    facet_index: int,
    attempts: int,
) -> int:
    fan = star_sigma
    try:
        zeta = fan.cones[facet_index]
    except IndexError:
        raise InputError(f"no facet with index {facet_index}") from None
    if not all(_in_cone(fan, zeta, g) for g in sigma_rows):
        raise InputError("sigma is not a face of the chosen facet")
    dim = fan.dim
    w_basis = _facet_span_basis(fan, zeta)
    sigma_sat = la.saturation(sigma_rows)
    lin_basis = fan.lineality_basis()
    trop_lin = star_trop_x.lineality_basis()
    stream = generic_vectors(len(zeta.gens) + len(lin_basis), f"localmult:{facet_index}")
    for _, coeffs in zip(range(attempts), stream):
        gen_coeffs = coeffs[: len(zeta.gens)]
        lin_coeffs = [c - Fraction(1, 2) for c in coeffs[len(zeta.gens) :]]
        v = [Fraction(0)] * dim
        for c, g in zip(gen_coeffs, zeta.gens):
            for k in range(dim):
                v[k] += c * g[k]
        for c, l in zip(lin_coeffs, lin_basis):
            for k in range(dim):
                v[k] += c * l[k]
        total = _crossing_total(fan, zeta, sigma_rows, sigma_sat, w_basis, star_trop_x, trop_lin, v)
        if total is None:
            continue
        if total % zeta.weight != 0 or total // zeta.weight < 1:
            raise InconsistencyError(
                f"crossing total {total} is not a positive multiple of the "
                f"facet weight {zeta.weight}"
            )
        return total // zeta.weight
    raise GenericityError(
        "no generic perturbation found; cones may not be of complementary "
        "dimension inside the facet"
    )


def _crossing_total(
    fan: WeightedFan,
    zeta: Cone,
    sigma_rows: tuple[IntVec, ...],
    sigma_sat: la.Matrix,
    w_basis: la.Matrix,
    star_trop_x: WeightedFan,
    trop_lin: tuple[IntVec, ...],
    v: Sequence[Fraction],
):
    """Weighted crossings of (v + span sigma) with star_trop_x, or None when
    the candidate v is degenerate."""
    dim = fan.dim
    total = 0
    hits = []
    for kappa in star_trop_x.cones:
        columns = (
            [list(g) for g in kappa.gens]
            + [list(l) for l in trop_lin]
            + [[-x for x in s] for s in sigma_rows]
        )
        status, sol = _solve_exact(
            [[Fraction(col[r]) for r in range(dim)] for col in columns], v
        )
        if status == "none":
            continue
        if status == "many":
            return None
        lam = sol[: len(kappa.gens)]
        if any(x < 0 for x in lam):
            continue
        if any(x == 0 for x in lam):
            return None  # boundary hit: retry
        kappa_rows = tuple(kappa.gens) + tuple(trop_lin)
        span_rows = list(kappa_rows) + list(sigma_rows)
        # The crossing must be transverse inside the facet span.
        for row in kappa_rows:
            if la.rank(list(w_basis) + [row]) != len(w_basis):
                return None
        if la.rank(span_rows) != len(w_basis):
            return None
        point = tuple(
            sum(Fraction(g[k]) * lam[i] for i, g in enumerate(kappa.gens))
            + sum(Fraction(l[k]) * sol[len(kappa.gens) + i] for i, l in enumerate(trop_lin))
            for k in range(dim)
        )
        hits.append(point)
        kappa_sat = la.saturation(kappa_rows)
        index = la.lattice_index(
            la.Lattice.build(dim, w_basis),
            la.Lattice.build(dim, tuple(sigma_sat) + tuple(kappa_sat)),
        )
        if index == la.INFINITE:
            return None
        total += kappa.weight * index
    if len(set(hits)) != len(hits):
        return None
    return total


# -- JSON ------------------------------------------------------------------


def fan_from_json(doc: dict) -> WeightedFan:
    return WeightedFan.build(
        int(doc["dim"]),
        [(c["gens"], c.get("weight", 1)) for c in doc["cones"]],
        doc.get("lineality", ()),
    )


def fan_to_json(fan: WeightedFan) -> dict:
    doc = {
        "dim": fan.dim,
        "cones": [{"gens": [list(g) for g in c.gens], "weight": c.weight} for c in fan.cones],
    }
    if fan.lineality:
        doc["lineality"] = [list(v) for v in fan.lineality]
    return doc


def polynomial_from_json(doc: dict) -> ValuedPolynomial2D:
    return ValuedPolynomial2D.build([(t["u"], t["val"]) for t in doc["terms"]])


def curve_to_json(curve: TropCurve2D) -> dict:
    edges = []
    for e in curve.edges:
        rec: dict = {
            "base": [str(e.base[0]), str(e.base[1])],
            "direction": list(e.direction),
            "weight": e.weight,
        }
        if e.lo is not None and e.hi is not None:
            rec["kind"] = "segment"
            rec["end"] = [str(x) for x in e.point_at(e.hi)]
        elif e.lo is not None or e.hi is not None:
            rec["kind"] = "ray"
        else:
            rec["kind"] = "line"
        edges.append(rec)
    return {"edges": edges}
