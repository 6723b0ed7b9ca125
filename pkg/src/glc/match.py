"""Subgraph matching of small connected patterns.

A pattern is an ordinary :class:`Graph`; its leaves are the numbered
boundary of the local move, and their names are the gluing numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .graph import Graph, GraphError, Leaf, Port, natural_key

MAX_PATTERN_SIZE = 64


@dataclass(frozen=True)
class SubgraphMatch:
    nodes: dict = field(hash=False)  # pattern node -> graph node
    edges: dict = field(hash=False)  # pattern edge id -> graph edge id
    boundary: dict = field(hash=False)  # leaf name -> (graph edge id, "source" | "target")

    def key(self) -> tuple:
        return tuple(sorted((natural_key(v) for v in self.nodes.values())))


def _check_pattern(pattern: Graph) -> str:
    if not pattern.nodes:
        raise GraphError("pattern must contain at least one node")
    if len(pattern.nodes) + len(pattern.edges) > MAX_PATTERN_SIZE:
        raise GraphError("pattern too large for local matching")
    for src, dst in pattern.edges.values():
        if isinstance(src, Leaf) and isinstance(dst, Leaf):
            raise GraphError("pattern has a node-free strand")
    from .iso import component_of

    start = pattern.sorted_nodes()[0]
    if component_of(pattern, start) != set(pattern.nodes):
        raise GraphError("pattern is not connected")
    return start


def _grow(g: Graph, pattern: Graph, start: str, image: str):
    nodes = {start: image}
    edges: dict[int, int] = {}
    boundary: dict[str, tuple[int, str]] = {}
    used = {image}
    stack = [start]
    while stack:
        p = stack.pop()
        x = nodes[p]
        if g.nodes[x] != pattern.nodes[p]:
            return None
        for role in pattern.kind(p).roles:
            pe = pattern.port_edge(p, role)
            ge = g.port_edge(x, role)
            psrc, pdst = pattern.edges[pe]
            gsrc, gdst = g.edges[ge]
            incoming = role in pattern.kind(p).inputs
            p_other, g_other = (psrc, gsrc) if incoming else (pdst, gdst)
            if isinstance(p_other, Leaf):
                boundary[p_other.name] = (ge, "source" if incoming else "target")
                continue
            if not isinstance(g_other, Port) or g_other.role != p_other.role:
                return None
            q = p_other.node
            if q in nodes:
                if nodes[q] != g_other.node:
                    return None
            else:
                if g_other.node in used:
                    return None
                nodes[q] = g_other.node
                used.add(g_other.node)
                stack.append(q)
            edges[pe] = ge
    return SubgraphMatch(nodes, edges, boundary)


def find_matches(g: Graph, pattern: Graph) -> list[SubgraphMatch]:
    """All injective, kind- and role-preserving embeddings of ``pattern``.

    Boundary edges of the pattern bind to the graph edge crossing the cut;
    two boundary numbers may bind the two halves of one graph edge.
    """
    start = _check_pattern(pattern)
    kind = pattern.nodes[start]
    found = []
    for x in g.sorted_nodes():
        if g.nodes[x] != kind:
            continue
        m = _grow(g, pattern, start, x)
        if m is not None:
            found.append(m)
    found.sort(key=SubgraphMatch.key)
    return found


def extract_match(g: Graph, pattern: Graph, m: SubgraphMatch) -> Graph:
    """Cut the matched region out of ``g``, naming cut ends by the pattern's
    boundary numbers. The result is isomorphic to ``pattern``."""
    h = Graph()
    inverse = {v: k for k, v in m.nodes.items()}
    for p, x in m.nodes.items():
        h._add_node(g.kind(x), g.nodes[x].decoration, node_id=p)
    for ge in m.edges.values():
        src, dst = g.edges[ge]
        h._add_edge(Port(inverse[src.node], src.role), Port(inverse[dst.node], dst.role))
    for name, (ge, side) in m.boundary.items():
        src, dst = g.edges[ge]
        if side == "source":
            h._add_edge(Leaf("in", name), Port(inverse[dst.node], dst.role))
        else:
            h._add_edge(Port(inverse[src.node], src.role), Leaf("out", name))
    return h
