"""Stable marked trees with integer edge lengths.

A tree with legs labeled by a finite set L (usually [n] = {1..n}) is stored
by its *split system*: one bipartition of L per internal edge, normalized to
the side that does not contain min(L).  Two marked trees are isomorphic iff
their normalized split sets are equal, so the split system doubles as the
canonical isomorphism key.  Because every normalized side omits min(L), a
compatible split system is a laminar family over L \\ {min(L)}, which makes
the adjacency structure (a rooted cluster tree) cheap to derive on demand.

All edge lengths are exact positive Python ints; nothing here ever touches
floating point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence


class TreeError(ValueError):
    """Structurally invalid tree input."""


class TieError(TreeError):
    """Two edges share the minimal length where a unique one is required."""


Split = frozenset[int]


def split_key(split: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(split))


def normalize_side(side: Iterable[int], legs: Iterable[int]) -> Split:
    """Return the side of the bipartition not containing the minimal leg."""
    legs = frozenset(legs)
    side = frozenset(side)
    if min(legs) in side:
        side = legs - side
    return side


def splits_compatible(a: Split, b: Split, legs: frozenset[int]) -> bool:
    """Four-case compatibility test for two splits of the same leg set."""
    return a <= b or b <= a or not (a & b) or (a | b) == legs


@dataclass(frozen=True)
class Branch:
    """One connected component of tree minus a vertex.

    ``edge`` is the split of the component's root edge, or None when the
    branch is a bare leg attached directly at the vertex.
    """

    anchor: int
    legs: Split
    edge: Split | None

    def sort_key(self):
        return split_key(self.legs)


@dataclass(frozen=True)
class MarkedTree:
    """Combinatorial type of a stable tree with legs labeled by ``legs``."""

    legs: tuple[int, ...]
    splits: tuple[Split, ...]

    # -- construction -------------------------------------------------

    @staticmethod
    def from_splits(legs: Iterable[int], splits: Iterable[Iterable[int]]) -> "MarkedTree":
        leg_tuple = tuple(sorted(set(legs)))
        if len(leg_tuple) < 3:
            raise TreeError("a stable marked tree needs at least 3 legs")
        leg_set = frozenset(leg_tuple)
        norm = []
        for s in splits:
            side = normalize_side(s, leg_set)
            if not side <= leg_set:
                raise TreeError(f"split {sorted(s)} uses labels outside the leg set")
            if not 2 <= len(side) <= len(leg_tuple) - 2:
                raise TreeError(f"split {sorted(side)} must have 2..n-2 legs on each side")
            norm.append(side)
        norm_sorted = tuple(sorted(set(norm), key=split_key))
        if len(norm_sorted) != len(norm):
            raise TreeError("duplicate splits")
        for a, b in itertools.combinations(norm_sorted, 2):
            if not splits_compatible(a, b, leg_set):
                raise TreeError(f"incompatible splits {sorted(a)} and {sorted(b)}")
        return MarkedTree(leg_tuple, norm_sorted)

    @staticmethod
    def one_vertex(legs: int | Iterable[int]) -> "MarkedTree":
        if isinstance(legs, int):
            legs = range(1, legs + 1)
        return MarkedTree.from_splits(legs, [])

    @staticmethod
    def from_adjacency(
        n: int,
        vertex_legs: Sequence[Iterable[int]],
        edges: Sequence[tuple[int, int]],
    ) -> "MarkedTree":
        """Build from an explicit vertex/edge description (must be stable)."""
        if not validate_stable(n, vertex_legs, edges):
            raise TreeError("adjacency describes an unstable tree")
        return MarkedTree.from_splits(range(1, n + 1), _adjacency_splits(n, vertex_legs, edges))

    # -- canonical identity -------------------------------------------

    def key(self) -> tuple:
        return (self.legs, tuple(split_key(s) for s in self.splits))

    @property
    def n(self) -> int:
        return len(self.legs)

    @property
    def leg_set(self) -> frozenset[int]:
        return frozenset(self.legs)

    def num_edges(self) -> int:
        return len(self.splits)

    def side_of(self, split: Split, leg: int) -> bool:
        """True iff ``leg`` is on the normalized (min-free) side of ``split``."""
        return leg in split

    def separates(self, split: Split, x: int, y: int) -> bool:
        return (x in split) != (y in split)

    def edges_on_path(self, x: int, y: int) -> tuple[Split, ...]:
        """Splits of the edges on the geodesic between legs x and y."""
        return tuple(s for s in self.splits if self.separates(s, x, y))

    # -- derived adjacency ---------------------------------------------
    #
    # Vertex 0 is the vertex carrying min(legs); vertices 1..m correspond to
    # the clusters (normalized splits) in canonical order, each sitting at
    # the far end of its edge.

    def _clusters_sorted(self) -> list[Split]:
        return sorted(self.splits, key=lambda s: (len(s), split_key(s)))

    def _parent_cluster(self, a: Split) -> Split | None:
        best = None
        for b in self.splits:
            if a < b and (best is None or b < best):
                best = b
        return best

    def vertices(self) -> tuple[int, ...]:
        return tuple(range(len(self.splits) + 1))

    def _vertex_index(self) -> dict[Split | None, int]:
        index: dict[Split | None, int] = {None: 0}
        for i, c in enumerate(sorted(self.splits, key=split_key), start=1):
            index[c] = i
        return index

    def _adjacency(self) -> list[dict]:
        """Per-vertex record: {'legs': set, 'edges': [(split, neighbor)]}."""
        index = self._vertex_index()
        adj: list[dict] = [{"legs": set(), "edges": []} for _ in range(len(self.splits) + 1)]
        for c in self.splits:
            parent = self._parent_cluster(c)
            u, v = index[c], index[parent]
            adj[u]["edges"].append((c, v))
            adj[v]["edges"].append((c, u))
        for leg in self.legs:
            containing = [c for c in self.splits if leg in c]
            home = index[min(containing, key=len)] if containing else 0
            adj[home]["legs"].add(leg)
        for rec in adj:
            rec["edges"].sort(key=lambda e: split_key(e[0]))
        return adj

    def leg_vertex(self, leg: int) -> int:
        if leg not in self.leg_set:
            raise TreeError(f"no leg {leg}")
        containing = [c for c in self.splits if leg in c]
        if not containing:
            return 0
        return self._vertex_index()[min(containing, key=len)]

    def vertex_valence(self, v: int) -> int:
        rec = self._adjacency()[v]
        return len(rec["legs"]) + len(rec["edges"])

    def edge_endpoints(self, split: Split) -> tuple[int, int]:
        index = self._vertex_index()
        if split not in index:
            raise TreeError(f"no edge with split {sorted(split)}")
        return index[split], index[self._parent_cluster(split)]


# -- free functions mirroring the tree operations ----------------------


def validate_stable(
    n: int,
    vertex_legs: Sequence[Iterable[int]],
    edges: Sequence[tuple[int, int]],
) -> bool:
    """True iff the (well-formed) tree has every valence >= 3.

    Malformed input -- duplicate or missing leg labels, references to
    unknown vertices, cycles, disconnection -- raises TreeError instead of
    returning False.
    """
    nv = len(vertex_legs)
    if nv == 0:
        raise TreeError("no vertices")
    seen: set[int] = set()
    for ls in vertex_legs:
        for leg in ls:
            if leg in seen:
                raise TreeError(f"duplicate leg label {leg}")
            seen.add(leg)
    if seen != set(range(1, n + 1)):
        raise TreeError("leg labels are not a bijection with 1..n")
    if len(edges) != nv - 1:
        raise TreeError("edge count is not vertices-1 (cycle or disconnection)")
    adj: list[list[int]] = [[] for _ in range(nv)]
    for u, v in edges:
        if not (0 <= u < nv and 0 <= v < nv) or u == v:
            raise TreeError(f"bad edge ({u},{v})")
        adj[u].append(v)
        adj[v].append(u)
    reached = {0}
    stack = [0]
    while stack:
        for w in adj[stack.pop()]:
            if w not in reached:
                reached.add(w)
                stack.append(w)
    if len(reached) != nv:
        raise TreeError("tree is disconnected")
    return all(len(list(vertex_legs[v])) + len(adj[v]) >= 3 for v in range(nv))


def _adjacency_splits(
    n: int,
    vertex_legs: Sequence[Iterable[int]],
    edges: Sequence[tuple[int, int]],
) -> list[set[int]]:
    nv = len(vertex_legs)
    adj: list[list[tuple[int, int]]] = [[] for _ in range(nv)]
    for idx, (u, v) in enumerate(edges):
        adj[u].append((idx, v))
        adj[v].append((idx, u))
    out = []
    for idx, (u, v) in enumerate(edges):
        side: set[int] = set()
        stack = [v]
        seen = {u, v}
        while stack:
            w = stack.pop()
            side.update(vertex_legs[w])
            for jdx, x in adj[w]:
                if jdx != idx and x not in seen:
                    seen.add(x)
                    stack.append(x)
        out.append(side)
    return out


def splits(tree: MarkedTree) -> tuple[Split, ...]:
    """Canonically sorted normalized splits, one per internal edge."""
    return tuple(sorted(tree.splits, key=split_key))


def branches(tree: MarkedTree, v: int) -> tuple[Branch, ...]:
    """Partition of the legs into the connected components of tree minus v."""
    index = tree._vertex_index()
    rec = tree._adjacency()[v]
    out = [Branch(v, frozenset({leg}), None) for leg in sorted(rec["legs"])]
    for split, neighbor in rec["edges"]:
        # The cluster vertex of a split sits on the split side, so the
        # component across the edge is `split` exactly when the neighbor is
        # that cluster vertex.
        side = split if neighbor == index[split] else tree.leg_set - split
        out.append(Branch(v, side, split))
    out.sort(key=Branch.sort_key)
    legs_covered = frozenset().union(*(b.legs for b in out))
    assert legs_covered == tree.leg_set, "branches must partition the legs"
    return tuple(out)


def contract_edge(tree: MarkedTree, split: Iterable[int]) -> MarkedTree:
    side = normalize_side(split, tree.leg_set)
    if side not in tree.splits:
        raise TreeError(f"no edge with split {sorted(side)}")
    return MarkedTree(tree.legs, tuple(s for s in tree.splits if s != side))


def insert_edge(
    tree: MarkedTree,
    v: int,
    side1: Sequence[Branch],
    side2: Sequence[Branch],
) -> MarkedTree:
    """Split vertex v in two, joined by a new edge carrying side1 | side2."""
    if len(side1) < 2 or len(side2) < 2:
        raise TreeError("edge insertion needs at least 2 branches on each side")
    all_branches = branches(tree, v)
    given = sorted(side1, key=Branch.sort_key) + sorted(side2, key=Branch.sort_key)
    if sorted(given, key=Branch.sort_key) != sorted(all_branches, key=Branch.sort_key):
        raise TreeError("side1, side2 must partition branches(tree, v)")
    new_legs = frozenset().union(*(b.legs for b in side1))
    new_split = normalize_side(new_legs, tree.leg_set)
    if new_split in tree.splits:
        raise TreeError("edge insertion would duplicate an existing split")
    return MarkedTree.from_splits(tree.legs, list(tree.splits) + [new_split])


def forgetful(tree: MarkedTree, keep: Iterable[int]) -> MarkedTree:
    """Convex hull of the legs in ``keep``, restabilized."""
    keep_set = frozenset(keep)
    if not keep_set <= tree.leg_set:
        raise TreeError("can only keep existing legs")
    if len(keep_set) < 3:
        raise TreeError("forgetful map needs at least 3 surviving legs")
    new_splits = set()
    for s in tree.splits:
        inter = s & keep_set
        if 2 <= len(inter) <= len(keep_set) - 2:
            new_splits.add(normalize_side(inter, keep_set))
    return MarkedTree.from_splits(keep_set, new_splits)


@dataclass(frozen=True)
class MetricTree:
    """MarkedTree plus exact positive integer edge lengths."""

    tree: MarkedTree
    lengths: Mapping[Split, int]

    @staticmethod
    def build(tree: MarkedTree, lengths: Mapping[Split, int] | Sequence[int]) -> "MetricTree":
        if not isinstance(lengths, Mapping):
            lengths = dict(zip(splits(tree), lengths))
        table = {}
        for s in tree.splits:
            if s not in lengths:
                raise TreeError(f"missing length for split {sorted(s)}")
            val = lengths[s]
            if not isinstance(val, int) or isinstance(val, bool) or val <= 0:
                raise TreeError(f"length of {sorted(s)} must be a positive integer")
            table[s] = val
        return MetricTree(tree, table)

    def key(self) -> tuple:
        return (self.tree.key(), tuple(self.lengths[s] for s in splits(self.tree)))

    def length(self, split: Iterable[int]) -> int:
        side = normalize_side(split, self.tree.leg_set)
        if side not in self.lengths:
            raise TreeError(f"no edge with split {sorted(side)}")
        return self.lengths[side]

    def length_vector(self) -> tuple[int, ...]:
        return tuple(self.lengths[s] for s in splits(self.tree))


def forgetful_metric(mt: MetricTree, keep: Iterable[int]) -> MetricTree:
    """Metric version: concatenated hull edges add their lengths."""
    keep_set = frozenset(keep)
    new_tree = forgetful(mt.tree, keep_set)
    lengths: dict[Split, int] = {s: 0 for s in new_tree.splits}
    for s, length in mt.lengths.items():
        inter = s & keep_set
        if 2 <= len(inter) <= len(keep_set) - 2:
            lengths[normalize_side(inter, keep_set)] += length
    return MetricTree.build(new_tree, lengths)


def leg_distance(mt: MetricTree, i: int, j: int) -> int:
    """Distance between the attachment points of legs i and j."""
    if i == j:
        raise TreeError("legs must be distinct")
    return sum(mt.lengths[s] for s in mt.tree.edges_on_path(i, j))


def hull_distance(mt: MetricTree, i: int, j: int, ell: int) -> int:
    """Coordinate of leg ell's nearest point on the i->j geodesic.

    Normalized so the attachment point of leg i sits at 0: the answer is the
    total length of path edges whose split separates i from ell.
    """
    if i == j or ell in (i, j):
        raise TreeError("need distinct i, j and ell outside {i, j}")
    return sum(
        mt.lengths[s]
        for s in mt.tree.splits
        if mt.tree.separates(s, i, j) and mt.tree.separates(s, i, ell)
    )


def shortest_edge(mt: MetricTree) -> Split:
    """The unique edge of strictly minimal length; ties raise TieError."""
    if not mt.tree.splits:
        raise TreeError("tree has no edges")
    best = min(mt.lengths.values())
    holders = [s for s, v in mt.lengths.items() if v == best]
    if len(holders) > 1:
        raise TieError(f"minimal length {best} is shared by {len(holders)} edges")
    return holders[0]


# -- JSON encoding ------------------------------------------------------
#
# Lengths travel as decimal strings so downstream consumers never overflow.


def metric_tree_to_json(mt: MetricTree) -> dict:
    doc: dict = {"n": mt.tree.n}
    if mt.tree.legs != tuple(range(1, mt.tree.n + 1)):
        doc["legs"] = list(mt.tree.legs)
    doc["edges"] = [
        {"split": list(split_key(s)), "length": str(mt.lengths[s])} for s in splits(mt.tree)
    ]
    return doc


def metric_tree_from_json(doc: Mapping) -> MetricTree:
    legs = doc.get("legs", range(1, int(doc["n"]) + 1))
    tree = MarkedTree.from_splits(legs, [e["split"] for e in doc["edges"]])
    lengths = {
        normalize_side(e["split"], tree.leg_set): int(e["length"]) for e in doc["edges"]
    }
    return MetricTree.build(tree, lengths)


def marked_tree_to_json(tree: MarkedTree) -> dict:
    doc: dict = {"n": tree.n}
    if tree.legs != tuple(range(1, tree.n + 1)):
        doc["legs"] = list(tree.legs)
    doc["splits"] = [list(split_key(s)) for s in splits(tree)]
    return doc
