"""Rewrites on graphs: the graphic beta move and its companions.

Every public move takes a graph and returns a new graph together with a
:class:`MoveTrace`; the input graph is never modified. Each move also has an
in-place twin (leading underscore) used by drivers that own a working copy.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .graph import (
    APPLICATION,
    FANOUT,
    LAMBDA,
    TERMINATION,
    Graph,
    Kind,
    Leaf,
    Port,
    build_graph,
    natural_key,
)
from .match import find_matches


class MoveError(ValueError):
    """A move was asked to fire at a site where it does not apply."""


class MoveKind(enum.Enum):
    BETA_REDUCE = "beta-"
    BETA_EXPAND = "beta+"
    ELIM_LOOP = "elim-loop"
    ADD_LOOP = "add-loop"
    CO_ASSOC = "coassoc"
    CO_COMM = "cocomm"
    PRUNE_LOCAL = "prune"
    PRUNE_GLOBAL = "prune@"
    GLOBAL_FANOUT = "gfanout"
    EXT1 = "ext1"


BETA_KINDS = (MoveKind.BETA_REDUCE, MoveKind.BETA_EXPAND)


@dataclass(frozen=True)
class TraceEntry:
    kind: MoveKind
    args: tuple = ()
    options: tuple = ()
    implicit: bool = False  # consequence of the previous entry, not replayed
    created: tuple = ()

    @property
    def direction(self) -> str:
        if self.kind in (MoveKind.BETA_EXPAND, MoveKind.ADD_LOOP):
            return "expand"
        return "reduce"

    def script_lines(self, counter: list) -> list[str]:
        if self.kind is MoveKind.PRUNE_GLOBAL:
            counter[0] += 1
            name = f"g{counter[0]}"
            return [f"subgraph {name} {' '.join(self.args)}", " ".join(["prune", "@" + name, *self.options])]
        return [" ".join([self.kind.value, *self.args, *self.options])]


@dataclass
class MoveTrace:
    entries: list = field(default_factory=list)

    @property
    def beta_count(self) -> int:
        return sum(1 for e in self.entries if e.kind in BETA_KINDS)

    @property
    def loops_eliminated(self) -> int:
        return sum(1 for e in self.entries if e.kind is MoveKind.ELIM_LOOP)

    def count(self, kind: MoveKind) -> int:
        return sum(1 for e in self.entries if e.kind is kind)

    def extend(self, other: "MoveTrace") -> "MoveTrace":
        self.entries.extend(other.entries)
        return self

    def to_script(self) -> str:
        counter = [0]
        lines = []
        for e in self.entries:
            if not e.implicit:
                lines.extend(e.script_lines(counter))
        return "\n".join(lines) + ("\n" if lines else "")

    def summary(self) -> str:
        return f"beta={self.beta_count} elim_loops={self.loops_eliminated} moves={len(self.entries)}"

    def __len__(self) -> int:
        return len(self.entries)


# -- beta move ---------------------------------------------------------------

REDEX_PATTERN = build_graph(
    [("L", "LAM"), ("A", "APP")],
    [
        ("in:1", "L.in"),
        ("L.vout", "out:2"),
        ("A.out", "out:3"),
        ("in:4", "A.ain"),
        ("L.aout", "A.fin"),
    ],
)


def find_beta_redexes(g: Graph) -> list[int]:
    """Connecting edges LAMBDA.aout -> APPLICATION.fin, ordered by lambda id."""
    return [m.edges[REDEX_PATTERN.port_edge("L", "aout")] for m in find_matches(g, REDEX_PATTERN)]


def _redex_edge(g: Graph, site: Union[int, str]) -> int:
    if isinstance(site, str):
        if site not in g.nodes or g.kind(site) is not LAMBDA:
            raise MoveError(f"{site!r} is not a LAMBDA node")
        site = g.port_edge(site, "aout")
    if site not in g.edges:
        raise MoveError(f"stale beta site: edge {site} no longer present")
    src, dst = g.edges[site]
    if not (
        isinstance(src, Port)
        and isinstance(dst, Port)
        and src.role == "aout"
        and dst.role == "fin"
        and g.kind(src.node) is LAMBDA
        and g.kind(dst.node) is APPLICATION
    ):
        raise MoveError(f"edge {src}->{dst} is not a beta redex")
    return site


def _beta_reduce(g: Graph, site: Union[int, str], keep_loops: bool = False) -> list[TraceEntry]:
    eid = _redex_edge(g, site)
    lam, app = g.edges[eid][0].node, g.edges[eid][1].node
    # through-connections of the deleted pair: 1 -> 3 and 4 -> 2
    through = {Port(lam, "in"): Port(app, "out"), Port(app, "ain"): Port(lam, "vout")}
    box = {lam, app}
    g._remove_edge(eid)
    removed = {}
    for port in (Port(lam, "in"), Port(app, "ain"), Port(app, "out"), Port(lam, "vout")):
        e = g.edge_at(port)
        if e is not None:
            removed[e] = g._remove_edge(e)
    by_source = {src: e for e, (src, _) in removed.items()}

    def internal(ep) -> bool:
        return isinstance(ep, Port) and ep.node in box

    visited = set()
    chains = []
    for e in sorted(removed):
        src, dst = removed[e]
        if internal(src):
            continue
        visited.add(e)
        while internal(dst):
            nxt = by_source[through[dst]]
            visited.add(nxt)
            dst = removed[nxt][1]
        chains.append((src, dst))
    cycles = 0
    for e in sorted(removed):
        if e in visited:
            continue
        cycles += 1
        while e not in visited:
            visited.add(e)
            e = by_source[through[removed[e][1]]]
    g._remove_node(lam)
    g._remove_node(app)
    created = tuple(str(src) for src, dst in chains)
    for src, dst in chains:
        g._add_edge(src, dst)
    g.loops += cycles
    options = ("keep-loops",) if keep_loops else ()
    entries = [TraceEntry(MoveKind.BETA_REDUCE, (f"{lam}.aout",), options, created=created)]
    if not keep_loops:
        g.loops -= cycles
        entries += [TraceEntry(MoveKind.ELIM_LOOP, implicit=True)] * cycles
    return entries


def beta_reduce(g: Graph, site: Union[int, str], *, keep_loops: bool = False) -> tuple[Graph, MoveTrace]:
    """Graphic beta move at a redex (its connecting edge, or its LAMBDA id).

    The edge into the LAMBDA is joined to the edge out of the APPLICATION and
    the edge into the APPLICATION's argument to the edge out of the bound
    variable. Splices that close on themselves give node-free loops, which
    the modified move eliminates at once unless ``keep_loops`` is set.
    """
    h = g.copy()
    return h, MoveTrace(_beta_reduce(h, site, keep_loops))


def _beta_expand(g: Graph, over: int, under: int, lambda_first: bool = True) -> list[TraceEntry]:
    for e in (over, under):
        if e not in g.edges:
            raise MoveError(f"edge {e} not present")
    args = (g.selector(over), g.selector(under))
    s1, t1 = g._remove_edge(over)
    lam = g._add_node(LAMBDA)
    app = g._add_node(APPLICATION)
    if over != under:
        s3, t3 = g._remove_edge(under)
        g._add_edge(s1, Port(lam, "in"))
        g._add_edge(Port(app, "out"), t1)
        g._add_edge(s3, Port(app, "ain"))
        g._add_edge(Port(lam, "vout"), t3)
    elif lambda_first:
        g._add_edge(s1, Port(lam, "in"))
        g._add_edge(Port(lam, "vout"), Port(app, "ain"))
        g._add_edge(Port(app, "out"), t1)
    else:
        g._add_edge(s1, Port(app, "ain"))
        g._add_edge(Port(app, "out"), Port(lam, "in"))
        g._add_edge(Port(lam, "vout"), t1)
    g._add_edge(Port(lam, "aout"), Port(app, "fin"))
    options = ("under-first",) if over == under and not lambda_first else ()
    return [TraceEntry(MoveKind.BETA_EXPAND, args, options, created=(lam, app))]


def beta_expand(g: Graph, over: int, under: int, *, lambda_first: bool = True) -> tuple[Graph, MoveTrace]:
    """Graphic beta move read backwards: a pair of edges becomes a redex.

    The new crossing's over strand enters from ``over``'s source and its
    under strand from ``under``'s source; the exits are exchanged, so the
    over strand leaves towards ``under``'s target. This makes the move the
    exact inverse of :func:`beta_reduce`. When ``over == under`` the single
    edge is threaded through both gates, giving a kink; ``lambda_first``
    selects which gate the strand meets first.
    """
    h = g.copy()
    return h, MoveTrace(_beta_expand(h, over, under, lambda_first))


# -- loops -------------------------------------------------------------------


def eliminate_loop(g: Graph) -> Graph:
    if g.loops < 1:
        raise MoveError("no node-free loop to eliminate")
    h = g.copy()
    h.loops -= 1
    return h


def add_loop(g: Graph) -> Graph:
    h = g.copy()
    h.loops += 1
    return h


# -- fan-out structure -------------------------------------------------------


def _require(g: Graph, node: str, kind: Kind) -> None:
    if node not in g.nodes:
        raise MoveError(f"unknown node {node!r}")
    if g.kind(node) is not kind:
        raise MoveError(f"node {node} is {g.kind(node).name}, expected {kind.name}")


def _co_comm(g: Graph, node: str) -> list[TraceEntry]:
    _require(g, node, FANOUT)
    left = g._remove_edge(g.port_edge(node, "lout"))
    right = g._remove_edge(g.port_edge(node, "rout"))
    g._add_edge(Port(node, "lout"), right[1])
    g._add_edge(Port(node, "rout"), left[1])
    return [TraceEntry(MoveKind.CO_COMM, (node,))]


def _co_assoc(g: Graph, top: str, low: str) -> list[TraceEntry]:
    _require(g, top, FANOUT)
    _require(g, low, FANOUT)
    if top == low:
        raise MoveError("CO-ASSOC needs two distinct FANOUT nodes")
    feed = g.producer(low, "in")
    if not (isinstance(feed, Port) and feed.node == top):
        raise MoveError(f"{low}.in is not fed by {top}")
    for role in ("lout", "rout"):
        if g.consumer(low, role) == Port(top, "in"):
            raise MoveError("fan-out pair forms a cycle")
    if feed.role == "rout":
        # (a, (b, c)) -> ((a, b), c)
        a = g.consumer(top, "lout")
        b = g.consumer(low, "lout")
        c = g.consumer(low, "rout")
        for role in ("lout", "rout"):
            g._remove_edge(g.port_edge(top, role))
            g._remove_edge(g.port_edge(low, role))
        g._add_edge(Port(top, "lout"), Port(low, "in"))
        g._add_edge(Port(low, "lout"), a)
        g._add_edge(Port(low, "rout"), b)
        g._add_edge(Port(top, "rout"), c)
    else:
        # ((a, b), c) -> (a, (b, c))
        a = g.consumer(low, "lout")
        b = g.consumer(low, "rout")
        c = g.consumer(top, "rout")
        for role in ("lout", "rout"):
            g._remove_edge(g.port_edge(top, role))
            g._remove_edge(g.port_edge(low, role))
        g._add_edge(Port(top, "lout"), a)
        g._add_edge(Port(top, "rout"), Port(low, "in"))
        g._add_edge(Port(low, "lout"), b)
        g._add_edge(Port(low, "rout"), c)
    return [TraceEntry(MoveKind.CO_ASSOC, (top, low))]


def fanout_restructure(g: Graph, variant: Union[MoveKind, str], site) -> Graph:
    """CO-ASSOC on ``(top, low)`` re-associates a two-node fan-out tree
    between left and right comb; CO-COMM on ``node`` swaps its branches."""
    variant = MoveKind(variant) if isinstance(variant, str) else variant
    h = g.copy()
    if variant is MoveKind.CO_COMM:
        _co_comm(h, site if isinstance(site, str) else site[0])
    elif variant is MoveKind.CO_ASSOC:
        if isinstance(site, str) or len(site) != 2:
            raise MoveError("CO-ASSOC site is a pair of FANOUT nodes")
        _co_assoc(h, *site)
    else:
        raise MoveError(f"{variant.name} is not a fan-out restructuring")
    return h


# -- pruning -----------------------------------------------------------------


def _is_top(g: Graph, ep) -> bool:
    return isinstance(ep, Port) and g.kind(ep.node) is TERMINATION


def _terminate(g: Graph, src) -> None:
    t = g._add_node(TERMINATION)
    g._add_edge(src, Port(t, "in"))


def _prune_local(g: Graph, node: str) -> list[TraceEntry]:
    if node not in g.nodes:
        raise MoveError(f"unknown node {node!r}")
    kind = g.kind(node)
    if kind not in (LAMBDA, APPLICATION, FANOUT):
        raise MoveError(f"local pruning does not apply to {kind.name}")
    outs = {role: g.consumer(node, role) for role in kind.outputs}
    dead = [role for role, ep in outs.items() if _is_top(g, ep)]
    if kind is FANOUT and len(dead) == 1:
        live = "rout" if dead == ["lout"] else "lout"
        top = outs[dead[0]].node
        g._remove_edge(g.port_edge(node, dead[0]))
        g._remove_node(top)
        in_edge = g.port_edge(node, "in")
        live_edge = g.port_edge(node, live)
        if g.edges[in_edge][0] == Port(node, live):
            g._remove_edge(in_edge)
            g.loops += 1
        else:
            src, _ = g._remove_edge(in_edge)
            _, dst = g._remove_edge(live_edge)
            g._add_edge(src, dst)
        g._remove_node(node)
        return [TraceEntry(MoveKind.PRUNE_LOCAL, (node,))]
    if len(dead) != len(kind.outputs):
        raise MoveError(f"not every output of {node} feeds a TERMINATION gate")
    for role in kind.outputs:
        top = outs[role].node
        g._remove_edge(g.port_edge(node, role))
        g._remove_node(top)
    feeders = [g._remove_edge(g.port_edge(node, role))[0] for role in kind.inputs]
    g._remove_node(node)
    for src in feeders:
        _terminate(g, src)
    return [TraceEntry(MoveKind.PRUNE_LOCAL, (node,))]


def _prune_global(g: Graph, nodes: Iterable[str], strict: bool = True) -> list[TraceEntry]:
    region = set(nodes)
    for n in region:
        if n not in g.nodes:
            raise MoveError(f"unknown node {n!r}")
    for n in list(region):
        for role in g.kind(n).outputs:
            ep = g.consumer(n, role)
            if isinstance(ep, Leaf):
                raise MoveError(f"{n}.{role} leaves the subgraph at {ep}")
            if ep.node not in region:
                if g.kind(ep.node) is not TERMINATION:
                    raise MoveError(f"{n}.{role} feeds {ep} outside the subgraph")
                region.add(ep.node)
    incoming = []
    for n in sorted(region, key=natural_key):
        for role in g.kind(n).inputs:
            src = g.producer(n, role)
            if isinstance(src, Port) and src.node in region:
                continue
            if strict:
                raise MoveError(f"{n}.{role} is fed from outside the subgraph by {src}")
            incoming.append(g.port_edge(n, role))
    feeders = [g._remove_edge(e)[0] for e in incoming]
    for n in region:
        for role in g.kind(n).roles:
            e = g.edge_at(Port(n, role))
            if e is not None:
                g._remove_edge(e)
    for n in region:
        g._remove_node(n)
    for src in feeders:
        _terminate(g, src)
    options = () if strict else ("reterminate",)
    return [TraceEntry(MoveKind.PRUNE_GLOBAL, tuple(sorted(region, key=natural_key)), options)]


def prune(g: Graph, scope: Union[str, Iterable[str]], *, strict: bool = True) -> Graph:
    """Local pruning at one node (``scope`` is a node id) or global pruning
    of a subgraph (``scope`` is a collection of node ids).

    Global pruning deletes a region whose outputs all end in TERMINATION
    gates. With ``strict=False`` the region may also be fed from the rest of
    the graph; those feeding edges are re-terminated.
    """
    h = g.copy()
    if isinstance(scope, str):
        _prune_local(h, scope)
    else:
        _prune_global(h, scope, strict)
    return h


# -- global fan-out ----------------------------------------------------------


def _closed_cone(g: Graph, fan: str) -> set[str]:
    root = g.producer(fan, "in")
    if isinstance(root, Leaf):
        raise MoveError(f"{fan} is fed directly by {root}")
    cone = set()
    stack = [root.node]
    while stack:
        x = stack.pop()
        if x in cone:
            continue
        if x == fan:
            raise MoveError(f"the cone behind {fan} reaches {fan} itself")
        cone.add(x)
        for role in g.kind(x).inputs:
            src = g.producer(x, role)
            if isinstance(src, Leaf):
                raise MoveError(f"the cone behind {fan} reads {src}")
            stack.append(src.node)
    for x in list(cone):
        for role in g.kind(x).outputs:
            ep = g.consumer(x, role)
            if Port(x, role) == root:
                continue
            if isinstance(ep, Port) and g.kind(ep.node) is TERMINATION:
                cone.add(ep.node)
            elif not (isinstance(ep, Port) and ep.node in cone):
                raise MoveError(f"the cone behind {fan} has a second boundary edge {x}.{role} -> {ep}")
    return cone


def _open_cone(g: Graph, fan: str) -> set[str]:
    """Largest term-shaped region behind ``fan``: reached backwards without
    crossing a bound-variable output, with every output consumed inside."""
    root = g.producer(fan, "in")
    if isinstance(root, Leaf) or root.role == "vout":
        raise MoveError(f"{fan} shares a variable, not a subterm")

    def reach(allowed: Optional[set]) -> set:
        seen = set()
        stack = [root.node]
        while stack:
            x = stack.pop()
            if x in seen or x == fan or (allowed is not None and x not in allowed):
                continue
            seen.add(x)
            for role in g.kind(x).inputs:
                src = g.producer(x, role)
                if isinstance(src, Port) and src.role != "vout":
                    stack.append(src.node)
        return seen

    cone = reach(None)
    while True:
        tops = set()
        for x in cone:
            for role in g.kind(x).outputs:
                ep = g.consumer(x, role)
                if isinstance(ep, Port) and g.kind(ep.node) is TERMINATION:
                    tops.add(ep.node)
        full = cone | tops
        bad = set()
        for x in cone:
            for role in g.kind(x).outputs:
                ep = g.consumer(x, role)
                if Port(x, role) != root and not (isinstance(ep, Port) and ep.node in full):
                    bad.add(x)
        if not bad:
            cone = full
            break
        cone = reach(cone - bad)
        if not cone:
            raise MoveError(f"no duplicable subterm behind {fan}")
    for role in ("lout", "rout"):
        ep = g.consumer(fan, role)
        if isinstance(ep, Port) and ep.node in cone:
            raise MoveError(f"{fan} feeds back into its own cone")
    return cone


def _global_fanout(g: Graph, fan: str, open_cone: bool = False) -> list[TraceEntry]:
    _require(g, fan, FANOUT)
    cone = _open_cone(g, fan) if open_cone else _closed_cone(g, fan)
    root = g.producer(fan, "in")
    left = g.consumer(fan, "lout")
    right = g.consumer(fan, "rout")
    for role in ("in", "lout", "rout"):
        g._remove_edge(g.port_edge(fan, role))
    g._remove_node(fan)

    order = sorted(cone, key=natural_key)
    copy = {}
    for x in order:
        copy[x] = g._add_node(g.kind(x), g.nodes[x].decoration)
    external = []
    for x in order:
        for role in g.kind(x).inputs:
            e = g.port_edge(x, role)
            src = g.edges[e][0]
            if isinstance(src, Port) and src.node in cone:
                g._add_edge(Port(copy[src.node], src.role), Port(copy[x], role))
            else:
                external.append(e)
    for e in external:
        src, dst = g._remove_edge(e)
        split = g._add_node(FANOUT)
        g._add_edge(src, Port(split, "in"))
        g._add_edge(Port(split, "lout"), dst)
        g._add_edge(Port(split, "rout"), Port(copy[dst.node], dst.role))
    g._add_edge(root, left)
    g._add_edge(Port(copy[root.node], root.role), right)
    options = ("open",) if open_cone else ()
    return [TraceEntry(MoveKind.GLOBAL_FANOUT, (fan,), options, created=tuple(copy[x] for x in order))]


def global_fanout(g: Graph, site: str, *, open_cone: bool = False) -> Graph:
    """Duplicate the subgraph feeding FANOUT ``site``, one copy per branch.

    The default requires the backward cone to be closed: its only boundary
    edge is the one into ``site`` and it reads no IN leaf. With
    ``open_cone=True`` the cone stops at bound-variable outputs and other
    external producers, and each external input is shared between the two
    copies through a new FANOUT.
    """
    h = g.copy()
    _global_fanout(h, site, open_cone)
    return h


# -- ext1 --------------------------------------------------------------------


def _ext1(g: Graph, lam: str, app: str) -> list[TraceEntry]:
    _require(g, lam, LAMBDA)
    _require(g, app, APPLICATION)
    if g.consumer(app, "out") != Port(lam, "in"):
        raise MoveError(f"{app}.out does not feed {lam}.in")
    if g.consumer(lam, "vout") != Port(app, "ain"):
        raise MoveError(f"{lam}.vout does not feed {app}.ain directly")
    if g.consumer(lam, "aout") == Port(app, "fin"):
        raise MoveError(f"{lam} and {app} are also joined as a redex")
    for role in ("out", "ain"):
        g._remove_edge(g.port_edge(app, role))
    fin = g._remove_edge(g.port_edge(app, "fin"))[0]
    aout = g._remove_edge(g.port_edge(lam, "aout"))[1]
    g._remove_node(lam)
    g._remove_node(app)
    g._add_edge(fin, aout)
    return [TraceEntry(MoveKind.EXT1, (lam, app))]


def ext1(g: Graph, lam: str, app: str) -> Graph:
    """Eta-contraction: ``\\x.(f x)`` becomes ``f``."""
    h = g.copy()
    _ext1(h, lam, app)
    return h
