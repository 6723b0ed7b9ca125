"""Boundary-labeled isomorphism of port-graphs.

Every port carries exactly one edge, so fixing the image of one node forces
the image of its whole connected component. Components touching a leaf are
anchored by the leaf name; closed components are matched by trying each
candidate node of the same kind. Component isomorphism is an equivalence,
so committing to the first closed-component match that works is safe.
"""

from __future__ import annotations

from collections import Counter
from typing import Optional

from .graph import Graph, Leaf, Port, natural_key


def _signature(g: Graph) -> Counter:
    return Counter(g.nodes.values())


def _extend(g1: Graph, g2: Graph, mapping: dict, used: set, a: str, b: str) -> bool:
    """Propagate ``a -> b`` through shared ports; mutates on success only."""
    trial: dict[str, str] = {}
    trial_used: set[str] = set()
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if x in mapping or x in trial:
            if mapping.get(x, trial.get(x)) != y:
                return False
            continue
        if y in used or y in trial_used:
            return False
        if g1.nodes[x] != g2.nodes[y]:
            return False
        trial[x] = y
        trial_used.add(y)
        for role in g1.kind(x).roles:
            e1 = g1.edges[g1.port_edge(x, role)]
            e2 = g2.edges[g2.port_edge(y, role)]
            side = 1 if role in g1.kind(x).inputs else 0
            other1, other2 = e1[1 - side], e2[1 - side]
            if isinstance(other1, Leaf) or isinstance(other2, Leaf):
                if other1 != other2:
                    return False
                continue
            if other1.role != other2.role:
                return False
            stack.append((other1.node, other2.node))
    mapping.update(trial)
    used.update(trial_used)
    return True


def is_isomorphic(g1: Graph, g2: Graph) -> Optional[dict[str, str]]:
    """A node bijection g1 -> g2 preserving kinds, roles, decorations, leaf
    names and loop count, or None. An empty dict means two node-free graphs
    are isomorphic; test the result with ``is not None``."""
    if g1.loops != g2.loops or len(g1.edges) != len(g2.edges):
        return None
    if _signature(g1) != _signature(g2):
        return None
    if g1.in_leaves != g2.in_leaves or g1.out_leaves != g2.out_leaves:
        return None

    mapping: dict[str, str] = {}
    used: set[str] = set()
    for leaf in sorted(ep for ep in g1._at if isinstance(ep, Leaf)):
        e1 = g1.edges[g1._at[leaf]]
        e2 = g2.edges[g2._at[leaf]]
        side = 0 if leaf.io == "in" else 1
        other1, other2 = e1[1 - side], e2[1 - side]
        if isinstance(other1, Leaf) or isinstance(other2, Leaf):
            if other1 != other2:
                return None
            continue
        if other1.role != other2.role:
            return None
        if not _extend(g1, g2, mapping, used, other1.node, other2.node):
            return None

    for x in g1.sorted_nodes():
        if x in mapping:
            continue
        for y in sorted(g2.nodes, key=natural_key):
            if y in used or g2.nodes[y] != g1.nodes[x]:
                continue
            if _extend(g1, g2, mapping, used, x, y):
                break
        else:
            return None
    return mapping


def component_of(g: Graph, start: str) -> set[str]:
    """Nodes port-connected to ``start``."""
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for role in g.kind(x).roles:
            src, dst = g.edges[g.port_edge(x, role)]
            for ep in (src, dst):
                if isinstance(ep, Port) and ep.node not in seen:
                    seen.add(ep.node)
                    stack.append(ep.node)
    return seen
