"""Typed oriented port-graphs: the data model every move works on.

A graph is a set of decorated gates with named ports, a set of oriented
edges between ports or boundary leaves, and a counter of node-free loops.
Callers treat graphs as values; the underscore-prefixed mutators exist for
moves that work on their own private copy.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union


class GraphError(ValueError):
    """Raised when a graph is structurally invalid or a primitive is misused."""

    def __init__(self, message: str, violations: Optional[list[str]] = None):
        super().__init__(message)
        self.violations = violations or []


class Kind(enum.Enum):
    LAMBDA = "LAM"
    FANOUT = "FO"
    APPLICATION = "APP"
    TERMINATION = "TOP"
    DILATION = "DIL"

    @property
    def inputs(self) -> tuple[str, ...]:
        return _ROLES[self][0]

    @property
    def outputs(self) -> tuple[str, ...]:
        return _ROLES[self][1]

    @property
    def roles(self) -> tuple[str, ...]:
        # clockwise order per gate
        return _ORDER[self]

    @property
    def prefix(self) -> str:
        return _PREFIX[self]

    @classmethod
    def parse(cls, text: Union[str, "Kind"]) -> "Kind":
        if isinstance(text, Kind):
            return text
        try:
            return cls(text.upper())
        except ValueError:
            try:
                return cls[text.upper()]
            except KeyError:
                raise GraphError(f"unknown node kind {text!r}") from None


_ROLES = {
    Kind.LAMBDA: (("in",), ("vout", "aout")),
    Kind.APPLICATION: (("fin", "ain"), ("out",)),
    Kind.FANOUT: (("in",), ("lout", "rout")),
    Kind.TERMINATION: (("in",), ()),
    Kind.DILATION: (("in1", "in2"), ("out",)),
}
_ORDER = {
    Kind.LAMBDA: ("in", "vout", "aout"),
    Kind.APPLICATION: ("fin", "ain", "out"),
    Kind.FANOUT: ("in", "lout", "rout"),
    Kind.TERMINATION: ("in",),
    Kind.DILATION: ("in1", "in2", "out"),
}
_PREFIX = {
    Kind.LAMBDA: "L",
    Kind.APPLICATION: "A",
    Kind.FANOUT: "F",
    Kind.TERMINATION: "T",
    Kind.DILATION: "D",
}

LAMBDA = Kind.LAMBDA
FANOUT = Kind.FANOUT
APPLICATION = Kind.APPLICATION
TERMINATION = Kind.TERMINATION
DILATION = Kind.DILATION

IDENT = re.compile(r"[A-Za-z0-9_]+\Z")


@dataclass(frozen=True)
class Node:
    kind: Kind
    decoration: Optional[str] = None

    def __str__(self) -> str:
        if self.decoration is None:
            return self.kind.value
        return f"{self.kind.value} {self.decoration}"


@dataclass(frozen=True, order=True)
class Port:
    node: str
    role: str

    def __str__(self) -> str:
        return f"{self.node}.{self.role}"


@dataclass(frozen=True, order=True)
class Leaf:
    io: str  # "in" or "out"
    name: str

    def __str__(self) -> str:
        return f"{self.io}:{self.name}"


Endpoint = Union[Port, Leaf]


def parse_endpoint(text: str) -> Endpoint:
    """Parse ``node.role``, ``in:name`` or ``out:name``."""
    if ":" in text:
        io, _, name = text.partition(":")
        if io not in ("in", "out") or not IDENT.match(name):
            raise GraphError(f"bad leaf endpoint {text!r}")
        return Leaf(io, name)
    node, dot, role = text.partition(".")
    if not dot or not IDENT.match(node) or not IDENT.match(role):
        raise GraphError(f"bad port endpoint {text!r}")
    return Port(node, role)


_NUM = re.compile(r"(\d+)")


def natural_key(text: str) -> tuple:
    """Sort key treating digit runs numerically, so L2 < L10."""
    return tuple(int(p) if p.isdigit() else p for p in _NUM.split(text))


def endpoint_key(ep: Endpoint) -> tuple:
    if isinstance(ep, Port):
        return (1, natural_key(ep.node), ep.role)
    return (0 if ep.io == "in" else 2, natural_key(ep.name), "")


_ID_INDEX = re.compile(r"^([A-Za-z_]+)([1-9][0-9]*)$")


class Graph:
    """An element of GRAPH: gates, oriented edges, leaves, node-free loops.

    ``edges`` maps an integer edge id to ``(source, target)``. Leaves are
    implied by edge endpoints; an IN leaf is always a source and an OUT leaf
    always a target.
    """

    __slots__ = ("nodes", "edges", "loops", "_at", "_next_edge", "_free_hint")

    def __init__(self, nodes=None, edges=None, loops: int = 0):
        self.nodes: dict[str, Node] = dict(nodes or {})
        self.edges: dict[int, tuple[Endpoint, Endpoint]] = {}
        self.loops = loops
        self._at: dict[Endpoint, int] = {}
        self._next_edge = 0
        self._free_hint: dict[str, int] = {}  # per prefix: every smaller index is taken
        for eid, (src, dst) in sorted((edges or {}).items()):
            self._put_edge(eid, src, dst)

    # -- read-only queries -------------------------------------------------

    def copy(self) -> "Graph":
        g = Graph.__new__(Graph)
        g.nodes = dict(self.nodes)
        g.edges = dict(self.edges)
        g.loops = self.loops
        g._at = dict(self._at)
        g._next_edge = self._next_edge
        g._free_hint = dict(self._free_hint)
        return g

    def kind(self, node: str) -> Kind:
        return self.nodes[node].kind

    def edge_at(self, ep: Endpoint) -> Optional[int]:
        return self._at.get(ep)

    def source(self, eid: int) -> Endpoint:
        return self.edges[eid][0]

    def target(self, eid: int) -> Endpoint:
        return self.edges[eid][1]

    def port_edge(self, node: str, role: str) -> int:
        """Id of the edge incident to port ``node.role``."""
        return self._at[Port(node, role)]

    def producer(self, node: str, role: str) -> Endpoint:
        """Source endpoint of the edge entering input port ``node.role``."""
        return self.edges[self._at[Port(node, role)]][0]

    def consumer(self, node: str, role: str) -> Endpoint:
        """Target endpoint of the edge leaving output port ``node.role``."""
        return self.edges[self._at[Port(node, role)]][1]

    @property
    def in_leaves(self) -> set[str]:
        return {ep.name for ep in self._at if isinstance(ep, Leaf) and ep.io == "in"}

    @property
    def out_leaves(self) -> set[str]:
        return {ep.name for ep in self._at if isinstance(ep, Leaf) and ep.io == "out"}

    def sorted_nodes(self) -> list[str]:
        return sorted(self.nodes, key=natural_key)

    def sorted_edges(self) -> list[int]:
        return sorted(
            self.edges,
            key=lambda e: (endpoint_key(self.edges[e][0]), endpoint_key(self.edges[e][1])),
        )

    def nodes_of(self, kind: Kind) -> list[str]:
        return [n for n in self.sorted_nodes() if self.nodes[n].kind is kind]

    def fresh_node_id(self, kind: Kind) -> str:
        """Smallest unused id with the kind's prefix; a pure function of the node set."""
        k = self._free_hint.get(kind.prefix, 1)
        while f"{kind.prefix}{k}" in self.nodes:
            k += 1
        self._free_hint[kind.prefix] = k
        return f"{kind.prefix}{k}"

    def selector(self, eid: int) -> str:
        """Text naming edge ``eid`` by its source endpoint."""
        return str(self.edges[eid][0])

    def __repr__(self) -> str:
        return f"Graph({len(self.nodes)} nodes, {len(self.edges)} edges, loops={self.loops})"

    # -- private mutators (working copies only) ----------------------------

    def _put_edge(self, eid: int, src: Endpoint, dst: Endpoint) -> None:
        for ep in (src, dst):
            if ep in self._at:
                raise GraphError(f"duplicate port use at {ep}")
        self.edges[eid] = (src, dst)
        self._at[src] = eid
        self._at[dst] = eid
        self._next_edge = max(self._next_edge, eid + 1)

    def _add_edge(self, src: Endpoint, dst: Endpoint) -> int:
        eid = self._next_edge
        self._put_edge(eid, src, dst)
        return eid

    def _remove_edge(self, eid: int) -> tuple[Endpoint, Endpoint]:
        src, dst = self.edges.pop(eid)
        del self._at[src]
        del self._at[dst]
        return src, dst

    def _add_node(self, kind: Kind, decoration: Optional[str] = None, node_id: Optional[str] = None) -> str:
        nid = node_id or self.fresh_node_id(kind)
        if nid in self.nodes:
            raise GraphError(f"duplicate node id {nid!r}")
        self.nodes[nid] = Node(kind, decoration)
        return nid

    def _remove_node(self, nid: str) -> None:
        node = self.nodes.pop(nid)
        m = _ID_INDEX.match(nid)
        if m and int(m.group(2)) < self._free_hint.get(m.group(1), 1):
            self._free_hint[m.group(1)] = int(m.group(2))
        for role in node.kind.roles:
            if Port(nid, role) in self._at:
                raise GraphError(f"node {nid} still has an edge at {role}")


# -- construction and validation ---------------------------------------------


def _direction_errors(g: Graph, src: Endpoint, dst: Endpoint) -> list[str]:
    errs = []
    if isinstance(src, Leaf):
        if src.io != "in":
            errs.append(f"edge source {src} is an OUT leaf")
    elif src.node not in g.nodes:
        errs.append(f"edge source {src} names unknown node")
    elif src.role not in g.kind(src.node).roles:
        errs.append(f"unknown role {src.role!r} for {g.kind(src.node).name} node {src.node}")
    elif src.role not in g.kind(src.node).outputs:
        errs.append(f"direction mismatch: edge leaves input port {src}")
    if isinstance(dst, Leaf):
        if dst.io != "out":
            errs.append(f"edge target {dst} is an IN leaf")
    elif dst.node not in g.nodes:
        errs.append(f"edge target {dst} names unknown node")
    elif dst.role not in g.kind(dst.node).roles:
        errs.append(f"unknown role {dst.role!r} for {g.kind(dst.node).name} node {dst.node}")
    elif dst.role not in g.kind(dst.node).inputs:
        errs.append(f"direction mismatch: edge enters output port {dst}")
    return errs


def build_graph(
    nodes: Iterable[tuple] = (),
    edges: Iterable[tuple] = (),
    loops: int = 0,
) -> Graph:
    """Build and validate a graph.

    ``nodes`` holds ``(id, kind)`` or ``(id, kind, decoration)`` tuples; kinds
    may be :class:`Kind` members or their GLF codes. ``edges`` holds
    ``(source, target)`` pairs of endpoints or endpoint strings.
    """
    g = Graph(loops=loops)
    errs: list[str] = []
    for spec in nodes:
        nid, kind = spec[0], Kind.parse(spec[1])
        deco = spec[2] if len(spec) > 2 else None
        if not IDENT.match(nid):
            errs.append(f"bad node id {nid!r}")
        elif nid in g.nodes:
            errs.append(f"duplicate node id {nid!r}")
        else:
            g.nodes[nid] = Node(kind, deco)
    for src, dst in edges:
        src = parse_endpoint(src) if isinstance(src, str) else src
        dst = parse_endpoint(dst) if isinstance(dst, str) else dst
        bad = _direction_errors(g, src, dst)
        if bad:
            errs.extend(bad)
            continue
        try:
            g._add_edge(src, dst)
        except GraphError as exc:
            errs.append(str(exc))
    if loops < 0:
        errs.append("negative loop count")
    errs.extend(v for v in validate(g) if v not in errs)
    if errs:
        raise GraphError("; ".join(errs), errs)
    return g


def validate(g: Graph) -> list[str]:
    """All invariant violations of ``g``; empty iff the graph is valid."""
    out = []
    for nid in g.sorted_nodes():
        node = g.nodes[nid]
        if node.kind is DILATION and node.decoration is None:
            out.append(f"DILATION node {nid} lacks a decoration")
        for role in node.kind.roles:
            if Port(nid, role) not in g._at:
                out.append(f"dangling port {nid}.{role}")
    for eid in g.sorted_edges():
        src, dst = g.edges[eid]
        out.extend(_direction_errors(g, src, dst))
        if g._at.get(src) != eid or g._at.get(dst) != eid:
            out.append(f"edge {src}->{dst} is not indexed consistently")
    if g.loops < 0:
        out.append("negative loop count")
    return out


def leaves_partition(g: Graph) -> tuple[set[str], set[str]]:
    """The IN and OUT leaf names of ``g``."""
    return g.in_leaves, g.out_leaves


def splice(g: Graph, upstream: int, downstream: int) -> Graph:
    """Join ``upstream``'s source to ``downstream``'s target.

    The caller is about to delete the nodes between the two edges. Splicing
    an edge with itself deletes it and records a node-free loop instead.
    """
    h = g.copy()
    _splice(h, upstream, downstream)
    return h


def _splice(g: Graph, upstream: int, downstream: int) -> Optional[int]:
    for eid in (upstream, downstream):
        if eid not in g.edges:
            raise GraphError(f"edge {eid} not present")
    if upstream == downstream:
        g._remove_edge(upstream)
        g.loops += 1
        return None
    src, _ = g._remove_edge(upstream)
    _, dst = g._remove_edge(downstream)
    return g._add_edge(src, dst)


def ports(g: Graph, nid: str) -> Iterator[Port]:
    for role in g.kind(nid).roles:
        yield Port(nid, role)
