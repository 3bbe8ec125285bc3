"""Graphviz DOT rendering of marked trees (presentation only)."""

from __future__ import annotations

from .trees import MetricTree, split_key, splits


def metric_tree_to_dot(mt: MetricTree, name: str = "tree") -> str:
    tree = mt.tree
    adjacency = tree._adjacency()
    index = tree._vertex_index()
    lines = [f"graph {name} {{", "  node [shape=point];"]
    for leg in tree.legs:
        lines.append(f'  leg{leg} [shape=none, label="{leg}"];')
    for v, rec in enumerate(adjacency):
        for leg in sorted(rec["legs"]):
            lines.append(f"  v{v} -- leg{leg};")
    for s in splits(tree):
        u = index[s]
        v = index[tree._parent_cluster(s)]
        label = mt.lengths[s]
        lines.append(f'  v{v} -- v{u} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def dot_filename(prefix: str, idx: int) -> str:
    return f"{prefix}_{idx:03d}.dot"
