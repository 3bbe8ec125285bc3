"""The firework recursion for psi-hypersurface intersections with skeleta.

Points of the r-th level are metric trees with exactly r edges lying on the
first r tropical psi-hypersurfaces.  Each level is produced from the previous
one by allowable edge insertion followed by re-solving the path-matrix
equation A y = L; contracting the shortest edge and re-solving goes back.
The level sets are also computable by brute force (enumerate condition-(*)
tuples, realize, filter by membership), which serves as an independent
oracle for the recursion.
"""

from __future__ import annotations

import itertools
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import factorial
from typing import Iterable, Sequence

from . import intlinalg as la
from .kapranov import (
    PsiSpec,
    SpecError,
    achieved_exactly_twice,
    default_base,
    in_hypersurface,
    min_profile,
)
from .trees import (
    Branch,
    MarkedTree,
    MetricTree,
    Split,
    TreeError,
    branches,
    contract_edge,
    insert_edge,
    normalize_side,
    shortest_edge,
    split_key,
    splits,
)


class InconsistencyError(RuntimeError):
    """A theorem-backed invariant failed; indicates a bug or a B below regime."""


class GuardError(ValueError):
    """Complexity guard exceeded."""


@dataclass(frozen=True)
class StarTuple:
    """Candidate (tree, ordered edges, k-vector, l-vector) for condition (*)."""

    tree: MarkedTree
    edges: tuple[Split, ...]
    kvec: tuple[int, ...]
    lvec: tuple[int, ...]

    def __post_init__(self):
        if not (len(self.edges) == len(self.kvec) == len(self.lvec)):
            raise SpecError("edges, kvec, lvec must have equal length")
        if set(self.edges) != set(self.tree.splits):
            raise SpecError("edge order must be a bijection with the tree's edges")

    @property
    def r(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class PathSystem:
    """Path matrix A, path-length vector L and edge-length solution y."""

    matrix: la.Matrix
    rhs: tuple[int, ...]
    lengths: tuple[int, ...]


@dataclass(frozen=True)
class InsertionSite:
    vertex: int
    branch_i: Branch
    branch_j: Branch
    branch_k: Branch
    k: int


@dataclass(frozen=True)
class FireworkPoint:
    metric: MetricTree
    star: StarTuple

    def sort_key(self):
        return self.metric.key()


@dataclass(frozen=True)
class FireworkLevel:
    r: int
    points: tuple[FireworkPoint, ...]


@dataclass(frozen=True)
class Cycle:
    """Effective sum of boundary strata, keyed by combinatorial tree type."""

    strata: tuple[tuple[MarkedTree, int], ...]

    def degree(self) -> int:
        return sum(c for _, c in self.strata)


def _separating_prefix(tree: MarkedTree, i: int, j: int, leg: int) -> frozenset[Split]:
    """Edges of the i-j geodesic lying before the projection of ``leg``."""
    return frozenset(
        s for s in tree.splits if tree.separates(s, i, j) and tree.separates(s, i, leg)
    )


def path_edges(tree: MarkedTree, spec: PsiSpec, k: int, ell: int) -> frozenset[Split]:
    """Edge set of the segment of the i-j geodesic between the projections
    of legs ell and k (ell nearer i); valid once condition (*) clause 1 holds."""
    e_ell = _separating_prefix(tree, spec.i, spec.j, ell)
    e_k = _separating_prefix(tree, spec.i, spec.j, k)
    return frozenset(e_k - e_ell)


def check_star(t: StarTuple, specs: Sequence[PsiSpec]) -> bool:
    """Both clauses of condition (*), via split separation tests."""
    if t.r > len(specs):
        raise SpecError("star tuple has more edges than specs")
    for q in range(1, t.r + 1):
        spec = specs[q - 1]
        k, ell = t.kvec[q - 1], t.lvec[q - 1]
        if not (k < ell and {k, ell} <= spec.S - {spec.i, spec.j}):
            return False
        e_ell = _separating_prefix(t.tree, spec.i, spec.j, ell)
        e_k = _separating_prefix(t.tree, spec.i, spec.j, k)
        if not e_ell < e_k:
            return False
        path = e_k - e_ell
        if t.edges[q - 1] not in path:
            return False
        if any(t.edges[qq] in path for qq in range(q - 1)):
            return False
    return True


def path_system(t: StarTuple, specs: Sequence[PsiSpec], B: int) -> PathSystem:
    """A from path incidence, L = ((l_q-k_q) B^(n-3-q)), y by back substitution."""
    if not check_star(t, specs):
        raise SpecError("path system requires condition (*)")
    r = t.r
    n = specs[0].n if specs else t.tree.n
    paths = [path_edges(t.tree, specs[q], t.kvec[q], t.lvec[q]) for q in range(r)]
    matrix = tuple(
        tuple(1 if t.edges[qq] in paths[q] else 0 for qq in range(r)) for q in range(r)
    )
    rhs = tuple(
        (t.lvec[q] - t.kvec[q]) * B ** (n - 3 - (q + 1)) for q in range(r)
    )
    y = la.solve_unit_upper_triangular(matrix, rhs)
    for q in range(r):
        scale = B ** (n - 3 - (q + 1))
        if not (-(-scale // 2) <= y[q] <= n * scale):
            raise InconsistencyError(
                f"edge length y_{q + 1}={y[q]} violates [{-(-scale // 2)}, {n * scale}]"
                f" (B={B}; guaranteed only for B >= {default_base(n)})"
            )
        if q > 0 and not y[q - 1] > y[q]:
            raise InconsistencyError("edge lengths must strictly decrease with level")
    return PathSystem(matrix, rhs, y)


def realize(t: StarTuple, specs: Sequence[PsiSpec], B: int) -> MetricTree:
    """Metric tree with len(e_q) = y_q; path lengths re-verified against L."""
    system = path_system(t, specs, B)
    mt = MetricTree.build(t.tree, dict(zip(t.edges, system.lengths)))
    paths = [path_edges(t.tree, specs[q], t.kvec[q], t.lvec[q]) for q in range(t.r)]
    for q in range(t.r):
        if sum(mt.lengths[s] for s in paths[q]) != system.rhs[q]:
            raise InconsistencyError("realized path length disagrees with L")
    return mt


def _stable_attachment(tree: MarkedTree, spec: PsiSpec) -> int:
    """Vertex of the S-hull where the (stabilized) leg i attaches."""
    v = tree.leg_vertex(spec.i)
    while True:
        brs = branches(tree, v)
        s_branches = [b for b in brs if b.legs & spec.S]
        if len(s_branches) >= 3:
            return v
        forward = next(b for b in s_branches if spec.i not in b.legs)
        assert forward.edge is not None, "hull must continue through an edge"
        a, b = tree.edge_endpoints(forward.edge)
        v = a if b == v else b


def insertion_site(mt: MetricTree, spec: PsiSpec) -> InsertionSite | None:
    """Attachment data (v, I, J, K, k) for the next level, or None when empty."""
    tree = mt.tree
    v = _stable_attachment(tree, spec)
    brs = branches(tree, v)
    branch_i = next(b for b in brs if spec.i in b.legs)
    branch_j = next(b for b in brs if spec.j in b.legs)
    if branch_i == branch_j:
        return None
    outside = spec.S - branch_i.legs - branch_j.legs
    k = min(outside)
    branch_k = next(b for b in brs if k in b.legs)
    return InsertionSite(v, branch_i, branch_j, branch_k, k)


def allowable_insertions(
    mt: MetricTree,
    t: StarTuple,
    specs: Sequence[PsiSpec],
    B: int,
) -> tuple[FireworkPoint, ...]:
    """All next-level points above one firework point.

    One output per branch partition B1 | B2 at the insertion vertex with the
    i-branch in B1, the j- and k-branches in B2, and some other branch of B1
    meeting S.  Every output is re-verified to lie on all hypersurfaces up to
    the new level with the minimum achieved exactly twice.
    """
    r = t.r
    if r >= len(specs):
        raise SpecError("no next-level spec available")
    spec = specs[r]
    site = insertion_site(mt, spec)
    if site is None:
        return ()
    free = [
        b
        for b in branches(mt.tree, site.vertex)
        if b not in (site.branch_i, site.branch_j, site.branch_k)
    ]
    out = []
    for size in range(len(free) + 1):
        for chosen in itertools.combinations(free, size):
            if not any(b.legs & spec.S for b in chosen):
                continue
            side1 = [site.branch_i, *chosen]
            side2 = [site.branch_j, site.branch_k, *(b for b in free if b not in chosen)]
            tree2 = insert_edge(mt.tree, site.vertex, side1, side2)
            new_split = next(s for s in tree2.splits if s not in mt.tree.splits)
            ell = min(spec.S & frozenset().union(*(b.legs for b in chosen)))
            t2 = StarTuple(
                tree2,
                t.edges + (new_split,),
                t.kvec + (site.k,),
                t.lvec + (ell,),
            )
            if not check_star(t2, specs):
                raise InconsistencyError("inserted tuple lost condition (*)")
            mt2 = realize(t2, specs, B)
            for q in range(r + 1):
                if not achieved_exactly_twice(mt2, specs[q]):
                    raise InconsistencyError(
                        f"re-verification failed at level {q + 1} after insertion"
                    )
            out.append(FireworkPoint(mt2, t2))
    out.sort(key=FireworkPoint.sort_key)
    return tuple(out)


def contract_shortest(
    mt: MetricTree,
    t: StarTuple,
    specs: Sequence[PsiSpec],
    B: int,
) -> FireworkPoint:
    """Drop the last level: contract the shortest edge and re-solve lengths."""
    if t.r < 1:
        raise SpecError("nothing to contract at level 0")
    last = t.edges[-1]
    if shortest_edge(mt) != last:
        raise InconsistencyError("shortest edge is not the last-created edge")
    tree2 = contract_edge(mt.tree, last)
    t2 = StarTuple(tree2, t.edges[:-1], t.kvec[:-1], t.lvec[:-1])
    if not check_star(t2, specs):
        raise InconsistencyError("contracted tuple lost condition (*)")
    mt2 = realize(t2, specs, B)
    n = specs[0].n
    bound = n * 2**n * B ** (n - 3 - t.r)
    for q in range(t2.r):
        if abs(mt.lengths[t.edges[q]] - mt2.lengths[t.edges[q]]) >= bound:
            raise InconsistencyError("contraction moved an edge length too far")
    return FireworkPoint(mt2, t2)


def cone_point(n: int) -> FireworkPoint:
    tree = MarkedTree.one_vertex(n)
    return FireworkPoint(MetricTree.build(tree, {}), StarTuple(tree, (), (), ()))


def _worker_count(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get("PSIFW_THREADS", "1") or "1")
    return max(1, threads)


def firework_run(
    n: int,
    specs: Sequence[PsiSpec],
    B: int | None = None,
    max_level: int | None = None,
    threads: int | None = None,
) -> list[FireworkLevel]:
    """Levels FW_0 .. FW_m of the firework recursion, canonically sorted.

    Injectivity of combinatorial types within a level and hypersurface
    membership of every generated point are asserted as the levels are built.
    """
    if n < 3:
        raise SpecError("n must be at least 3")
    if len(specs) > n - 3:
        raise SpecError("at most n-3 hypersurfaces")
    if B is None:
        B = specs[0].B if specs else default_base(n)
    if B < default_base(n):
        warnings.warn(
            f"B={B} is below the proven regime B >= {default_base(n)}; "
            "structural assertions remain active",
            stacklevel=2,
        )
    for q, spec in enumerate(specs, start=1):
        if spec.n != n or spec.q != q or spec.B != B:
            raise SpecError(f"spec at position {q} has inconsistent (n, q, B)")
    m = len(specs) if max_level is None else min(max_level, len(specs))
    workers = _worker_count(threads)
    levels = [FireworkLevel(0, (cone_point(n),))]
    for r in range(m):
        parents = levels[-1].points
        expand = lambda p: allowable_insertions(p.metric, p.star, specs, B)
        if workers > 1 and len(parents) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                batches = list(pool.map(expand, parents))
        else:
            batches = [expand(p) for p in parents]
        merged = sorted(
            (pt for batch in batches for pt in batch), key=FireworkPoint.sort_key
        )
        types = [pt.metric.tree.key() for pt in merged]
        if len(set(types)) != len(types):
            raise InconsistencyError(f"level {r + 1} contains repeated tree types")
        for pt in merged:
            if pt.metric.tree.num_edges() != r + 1:
                raise InconsistencyError("level point has wrong edge count")
            for q in range(r + 1):
                if not in_hypersurface(pt.metric, specs[q]):
                    raise InconsistencyError("level point escaped a hypersurface")
        levels.append(FireworkLevel(r + 1, tuple(merged)))
    return levels


def limit_cycle(level: FireworkLevel) -> Cycle:
    """One stratum per point, coefficient 1, keyed by combinatorial type."""
    seen: dict[tuple, MarkedTree] = {}
    for pt in level.points:
        key = pt.metric.tree.key()
        if key in seen:
            raise InconsistencyError("limit cycle would carry a coefficient > 1")
        seen[key] = pt.metric.tree
    strata = tuple((seen[k], 1) for k in sorted(seen))
    return Cycle(strata)


# -- brute-force oracle --------------------------------------------------


def enumerate_stable_trees(n: int, r: int) -> list[MarkedTree]:
    """All stable [n]-marked trees with exactly r edges (laminar split sets)."""
    candidates = [
        frozenset(c)
        for size in range(2, n - 1)
        for c in itertools.combinations(range(2, n + 1), size)
    ]
    candidates.sort(key=split_key)
    out: list[MarkedTree] = []

    def extend(start: int, chosen: list[frozenset[int]]):
        if len(chosen) == r:
            out.append(MarkedTree(tuple(range(1, n + 1)), tuple(sorted(chosen, key=split_key))))
            return
        for idx in range(start, len(candidates)):
            c = candidates[idx]
            if all(c <= d or d <= c or not (c & d) for d in chosen):
                chosen.append(c)
                extend(idx + 1, chosen)
                chosen.pop()

    extend(0, [])
    return out


def brute_force_FW(
    n: int,
    specs: Sequence[PsiSpec],
    B: int,
    r: int,
) -> tuple[MetricTree, ...]:
    """Independent oracle: enumerate all condition-(*) tuples with r edges,
    realize them, and keep the metric trees on all r hypersurfaces."""
    if n > 7 or r > 3:
        raise GuardError("oracle guard: n <= 7 and r <= 3")
    if r > len(specs):
        raise SpecError("not enough specs for the requested level")
    if r == 0:
        return (cone_point(n).metric,)
    found: dict[tuple, MetricTree] = {}
    pair_choices = [
        [
            (k, ell)
            for k, ell in itertools.combinations(sorted(spec.S - {spec.i, spec.j}), 2)
        ]
        for spec in specs[:r]
    ]
    for tree in enumerate_stable_trees(n, r):
        for order in itertools.permutations(tree.splits):
            for pairs in itertools.product(*pair_choices):
                t = StarTuple(
                    tree,
                    tuple(order),
                    tuple(k for k, _ in pairs),
                    tuple(ell for _, ell in pairs),
                )
                if not check_star(t, specs):
                    continue
                mt = realize(t, specs, B)
                if all(in_hypersurface(mt, specs[q]) for q in range(r)):
                    found.setdefault(mt.key(), mt)
    return tuple(found[k] for k in sorted(found))


# -- transversality ------------------------------------------------------


def block_path_matrix(
    maximal_type: MarkedTree,
    t: StarTuple,
    specs: Sequence[PsiSpec],
) -> la.Matrix:
    """The (n-3)x(n-3) matrix [[A, *], [0, I]] of path incidence on a maximal
    refinement, whose unit determinant certifies transversality."""
    r = t.r
    n = maximal_type.n
    if maximal_type.num_edges() != n - 3:
        raise SpecError("refinement must be a maximal (trivalent) type")
    if not set(t.tree.splits) <= set(maximal_type.splits):
        raise SpecError("refinement mismatch: coarse splits must persist")
    extra = sorted(set(maximal_type.splits) - set(t.tree.splits), key=split_key)
    columns = list(t.edges) + extra
    rows = []
    for q in range(r):
        path = path_edges(maximal_type, specs[q], t.kvec[q], t.lvec[q])
        rows.append(tuple(1 if c in path else 0 for c in columns))
    for idx in range(len(extra)):
        rows.append(
            tuple(1 if col == r + idx else 0 for col in range(len(columns)))
        )
    return tuple(rows)


def certify_determinant_one(matrix: la.Matrix) -> bool:
    return la.det(matrix) == 1


def transversality_certificate(
    mt: MetricTree,
    maximal_type: MarkedTree,
    t: StarTuple,
    specs: Sequence[PsiSpec],
    B: int,
) -> bool:
    """True iff the refined block path matrix has determinant one, so the
    local intersection multiplicity along the skeleton equals 1."""
    if mt.tree.key() != t.tree.key():
        raise SpecError("metric tree and star tuple disagree")
    matrix = block_path_matrix(maximal_type, t, specs)
    for q in range(t.r):
        for qq in range(t.r):
            expected = 1 if t.edges[qq] in path_edges(t.tree, specs[q], t.kvec[q], t.lvec[q]) else 0
            if matrix[q][qq] != expected:
                raise InconsistencyError("refined paths disagree with the coarse path matrix")
    return certify_determinant_one(matrix)


def maximal_refinements(tree: MarkedTree) -> list[MarkedTree]:
    """All trivalent types refining ``tree`` (containing its splits)."""
    found: dict[tuple, MarkedTree] = {}

    def expand(t: MarkedTree):
        big = next((v for v in t.vertices() if t.vertex_valence(v) > 3), None)
        if big is None:
            found.setdefault(t.key(), t)
            return
        brs = branches(t, big)
        others = brs[1:]
        # Fix the first branch into side1 to kill the side swap symmetry.
        for size in range(1, len(others) - 1):
            for chosen in itertools.combinations(others, size):
                side1 = [brs[0], *chosen]
                side2 = [b for b in others if b not in chosen]
                expand(insert_edge(t, big, side1, side2))

    expand(tree)
    return [found[k] for k in sorted(found)]


# -- degree law ----------------------------------------------------------


def multinomial(total: int, parts: Iterable[int]) -> int:
    parts = list(parts)
    if sum(parts) != total:
        raise ValueError("parts must sum to the total")
    value = factorial(total)
    for p in parts:
        value //= factorial(p)
    return value


def degree_law_expected(n: int, specs: Sequence[PsiSpec]) -> int | None:
    """Multinomial count of FW_{n-3} when every S_q is all of [n], else None."""
    if len(specs) != n - 3 or any(spec.S != frozenset(range(1, n + 1)) for spec in specs):
        return None
    exponents = [sum(1 for spec in specs if spec.i == leg) for leg in range(1, n + 1)]
    return multinomial(n - 3, exponents)
