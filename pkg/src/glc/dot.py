from __future__ import annotations

from .graph import Graph, Leaf, Port, natural_key


def _dot_id(ep) -> str:
    if isinstance(ep, Leaf):
        return f'"{ep.io}:{ep.name}"'
    return f'"{ep.node}"'


def to_dot(g: Graph, name: str = "G") -> str:
    """Deterministic Graphviz digraph; leaves are boxes, gates ellipses."""
    lines = [f"digraph {name} {{", f"  // loops: {g.loops}"]
    for nid in g.sorted_nodes():
        lines.append(f'  "{nid}" [shape=ellipse, label="{g.nodes[nid]}"];')
    leaves = sorted(
        (ep for ep in g._at if isinstance(ep, Leaf)),
        key=lambda ep: (ep.io, natural_key(ep.name)),
    )
    for leaf in leaves:
        lines.append(f'  {_dot_id(leaf)} [shape=box, label="{leaf.io.upper()} {leaf.name}"];')
    for eid in g.sorted_edges():
        src, dst = g.edges[eid]
        label = f"{src.role if isinstance(src, Port) else 'in'}->{dst.role if isinstance(dst, Port) else 'out'}"
        lines.append(f'  {_dot_id(src)} -> {_dot_id(dst)} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
