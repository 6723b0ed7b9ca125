"""Knot diagrams as graphs.

A crossing is a LAMBDA/APPLICATION pair joined by ``L.aout -> A.fin``: the
over strand runs ``L.in -> L.vout`` and the under strand ``A.ain -> A.out``.
With that macro the beta move at a crossing is its oriented smoothing, and
the Reidemeister moves become short compositions of beta moves.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .diagram import (
    R3A_LHS_WORD,
    R3A_RHS_WORD,
    Crossing,
    TangleDiagram,
    check_diagram,
)
from .graph import APPLICATION, LAMBDA, Graph, Leaf, Port, natural_key
from .moves import (
    MoveError,
    MoveKind,
    MoveTrace,
    TraceEntry,
    _beta_expand,
    _beta_reduce,
)


class Sector(enum.Enum):
    TANGLE = "TANGLE"
    LINK = "LINK"
    NEITHER = "NEITHER"


@dataclass
class CrossingBinding:
    """Crossing signs, kept beside the graph: ``(lambda, application) -> sign``."""

    signs: dict = field(default_factory=dict)

    def pairs(self) -> set:
        return set(self.signs)

    def after(self, trace: MoveTrace) -> "CrossingBinding":
        """Follow a trace: smoothed crossings drop out, crossings created by
        expansion get an unknown sign. Node ids may be reused, so this must
        replay the trace rather than compare ids."""
        signs = dict(self.signs)
        for entry in trace.entries:
            if entry.kind is MoveKind.BETA_REDUCE:
                lam = entry.args[0].split(".")[0]
                signs = {p: s for p, s in signs.items() if p[0] != lam}
            elif entry.kind is MoveKind.BETA_EXPAND:
                signs[tuple(entry.created)] = None
        return CrossingBinding(signs)


# -- encoding ----------------------------------------------------------------


def encode_diagram(d: TangleDiagram) -> tuple[Graph, CrossingBinding]:
    """Crossing k (1-based, in list order) becomes ``Lk``/``Ak``."""
    check_diagram(d)
    g = Graph()
    producer: dict[str, object] = {a: Leaf("in", a) for a in d.boundary_in}
    consumer: dict[str, object] = {a: Leaf("out", a) for a in d.boundary_out}
    binding = CrossingBinding()
    for k, c in enumerate(d.crossings, 1):
        lam = g._add_node(LAMBDA, node_id=f"L{k}")
        app = g._add_node(APPLICATION, node_id=f"A{k}")
        g._add_edge(Port(lam, "aout"), Port(app, "fin"))
        consumer[c.over_in] = Port(lam, "in")
        producer[c.over_out] = Port(lam, "vout")
        consumer[c.under_in] = Port(app, "ain")
        producer[c.under_out] = Port(app, "out")
        binding.signs[(lam, app)] = c.sign
    for arc in sorted(producer, key=natural_key):
        g._add_edge(producer[arc], consumer[arc])
    for a, b in d.strands:
        g._add_edge(Leaf("in", a), Leaf("out", b))
    g.loops = d.closed_unknotted_components
    return g, binding


def detect_crossings(g: Graph) -> list[tuple[str, str]]:
    """Every ``LAMBDA.aout -> APPLICATION.fin`` pair, ordered by lambda id."""
    out = []
    for lam in g.nodes_of(LAMBDA):
        dst = g.consumer(lam, "aout")
        if isinstance(dst, Port) and dst.role == "fin" and g.kind(dst.node) is APPLICATION:
            out.append((lam, dst.node))
    return out


def connecting_edges(g: Graph) -> set[int]:
    return {g.port_edge(lam, "aout") for lam, _ in detect_crossings(g)}


_STRAND_SOURCES = {(LAMBDA, "vout"), (APPLICATION, "out")}
_STRAND_TARGETS = {(LAMBDA, "in"), (APPLICATION, "ain")}


def _on_strand(g: Graph, src, dst) -> bool:
    ok_src = isinstance(src, Leaf) or (g.kind(src.node), src.role) in _STRAND_SOURCES
    ok_dst = isinstance(dst, Leaf) or (g.kind(dst.node), dst.role) in _STRAND_TARGETS
    return ok_src and ok_dst


def classify(g: Graph) -> Sector:
    """TANGLE or LINK by local conditions; LINK additionally has no leaves."""
    pairs = detect_crossings(g)
    paired = {n for p in pairs for n in p}
    if any(node.kind not in (LAMBDA, APPLICATION) for node in g.nodes.values()):
        return Sector.NEITHER
    if paired != set(g.nodes):
        return Sector.NEITHER
    connecting = connecting_edges(g)
    for eid, (src, dst) in g.edges.items():
        if eid not in connecting and not _on_strand(g, src, dst):
            return Sector.NEITHER
    if any(isinstance(ep, Leaf) for ep in g._at):
        return Sector.TANGLE
    return Sector.LINK


def decode_to_pd(g: Graph, b: Optional[CrossingBinding] = None) -> TangleDiagram:
    """Rebuild a diagram. Interior arcs are named ``e1, e2, ...`` in edge
    order; boundary arcs take their leaf names. Without a binding every
    sign is unknown."""
    if classify(g) is Sector.NEITHER:
        raise MoveError("graph is not a tangle graph")
    pairs = detect_crossings(g)
    if b is not None and b.pairs() != set(pairs):
        missing = sorted(set(pairs) - b.pairs())
        extra = sorted(b.pairs() - set(pairs))
        raise MoveError(f"binding does not match the crossings (unbound {missing}, stale {extra})")
    connecting = connecting_edges(g)
    arc: dict[int, str] = {}
    d = TangleDiagram(closed_unknotted_components=g.loops)
    k = 0
    for eid in g.sorted_edges():
        if eid in connecting:
            continue
        src, dst = g.edges[eid]
        if isinstance(src, Leaf) and isinstance(dst, Leaf):
            d.strands.append((src.name, dst.name))
            continue
        if isinstance(src, Leaf):
            arc[eid] = src.name
            d.boundary_in.append(src.name)
        elif isinstance(dst, Leaf):
            arc[eid] = dst.name
            d.boundary_out.append(dst.name)
        else:
            k += 1
            arc[eid] = f"e{k}"
    d.boundary_in.sort(key=natural_key)
    d.boundary_out.sort(key=natural_key)
    for lam, app in pairs:
        sign = b.signs[(lam, app)] if b is not None else None
        d.crossings.append(
            Crossing(
                sign,
                arc[g.port_edge(lam, "in")],
                arc[g.port_edge(lam, "vout")],
                arc[g.port_edge(app, "ain")],
                arc[g.port_edge(app, "out")],
            )
        )
    check_diagram(d)
    return d


# -- braid-shaped patterns ---------------------------------------------------


@dataclass
class BraidMatch:
    crossings: list  # (lambda, application) per letter
    bottom: list  # edge ids entering the pattern, by position
    top: list  # edge ids leaving the pattern, by position


def _pair_of(g: Graph, node: str) -> Optional[tuple[str, str]]:
    if g.kind(node) is LAMBDA:
        dst = g.consumer(node, "aout")
        if isinstance(dst, Port) and dst.role == "fin":
            return node, dst.node
    elif g.kind(node) is APPLICATION:
        src = g.producer(node, "fin")
        if isinstance(src, Port) and src.role == "aout":
            return src.node, node
    return None


def match_braid(g: Graph, word: Sequence[int], first: str) -> Optional[BraidMatch]:
    """Match a braid word whose first crossing has LAMBDA ``first``.

    Positions are relative to the word: a letter ``+i`` or ``-i`` touches
    positions i and i+1, and ``+i`` has its over strand at i. Only the
    connectivity between crossings is checked; the edges entering the
    bottom and leaving the top must attach outside the pattern.
    """
    if first not in g.nodes or g.kind(first) is not LAMBDA:
        return None
    width = max(abs(x) for x in word) + 1
    pos: list = [None] * width  # current edge at each position
    bottom: list = [None] * width
    used = []
    for step, letter in enumerate(word):
        i = abs(letter)
        over_p, under_p = (i - 1, i) if letter > 0 else (i, i - 1)
        if step == 0:
            pair = _pair_of(g, first)
        elif pos[over_p] is not None:
            dst = g.edges[pos[over_p]][1]
            if not (isinstance(dst, Port) and dst.role == "in"):
                return None
            pair = _pair_of(g, dst.node)
        elif pos[under_p] is not None:
            dst = g.edges[pos[under_p]][1]
            if not (isinstance(dst, Port) and dst.role == "ain"):
                return None
            pair = _pair_of(g, dst.node)
        else:
            return None
        if pair is None or pair in used:
            return None
        lam, app = pair
        for p, port in ((over_p, Port(lam, "in")), (under_p, Port(app, "ain"))):
            e = g.edge_at(port)
            if pos[p] is None:
                if e in bottom:
                    return None
                bottom[p] = e
            elif pos[p] != e:
                return None
        used.append(pair)
        pos[over_p] = g.port_edge(app, "out")
        pos[under_p] = g.port_edge(lam, "vout")
    if any(e is None for e in bottom):
        return None
    inside = {n for p in used for n in p}
    for e in bottom:
        src = g.edges[e][0]
        if isinstance(src, Port) and src.node in inside:
            return None
    for e in pos:
        dst = g.edges[e][1]
        if isinstance(dst, Port) and dst.node in inside:
            return None
    return BraidMatch(used, bottom, list(pos))


def _unbraid(g: Graph, m: BraidMatch) -> tuple[list, list]:
    """Smooth every crossing of a match; return the edge now at each
    position and the trace entries."""
    entries = []
    feeders = [g.edges[e][0] for e in m.bottom]
    for lam, _ in m.crossings:
        entries += _beta_reduce(g, lam, keep_loops=True)
    return [g.edge_at(src) for src in feeders], entries


def _rebraid(g: Graph, word: Sequence[int], pos: list) -> list:
    entries = []
    pos = list(pos)
    for letter in word:
        i = abs(letter)
        over_p, under_p = (i - 1, i) if letter > 0 else (i, i - 1)
        made = _beta_expand(g, pos[over_p], pos[under_p])
        lam, app = made[0].created
        entries += made
        pos[over_p] = g.port_edge(app, "out")
        pos[under_p] = g.port_edge(lam, "vout")
    return entries


def _edge(g: Graph, site) -> int:
    if isinstance(site, int):
        if site not in g.edges:
            raise MoveError(f"edge {site} not present")
        return site
    from .script import resolve_edge

    return resolve_edge(g, site)


def _strand_edge(g: Graph, site) -> int:
    e = _edge(g, site)
    if e in connecting_edges(g):
        raise MoveError("a connecting edge is not a strand edge")
    return e


# -- Reidemeister moves ------------------------------------------------------


def kink_chiralities(g: Graph, lam: str) -> set[str]:
    """Chiralities of the kink at crossing ``lam``: A when ``L.vout -> A.ain``,
    B when ``A.out -> L.in``; both for a kink on an otherwise empty circle."""
    pair = _pair_of(g, lam) if lam in g.nodes else None
    if pair is None or pair[0] != lam:
        return set()
    _, app = pair
    found = set()
    if g.consumer(lam, "vout") == Port(app, "ain"):
        found.add("A")
    if g.consumer(app, "out") == Port(lam, "in"):
        found.add("B")
    return found


def reidemeister_r1(g: Graph, site, chirality: str, direction: str = "remove") -> tuple[Graph, MoveTrace]:
    """Remove a kink at crossing ``site`` (its LAMBDA id), or insert one on
    strand edge ``site``.

    Chirality A has the loop edge ``L.vout -> A.ain``, chirality B has
    ``A.out -> L.in``. Removal smooths the crossing and eliminates the
    small loop it leaves.
    """
    if chirality not in ("A", "B"):
        raise MoveError(f"chirality must be A or B, not {chirality!r}")
    h = g.copy()
    trace = MoveTrace()
    if direction == "remove":
        found = kink_chiralities(h, site) if isinstance(site, str) else set()
        if not found:
            raise MoveError(f"{site!r} is not a kink crossing")
        if chirality not in found:
            raise MoveError(f"kink at {site} has chirality {found.pop()}, not {chirality}")
        trace.entries += _beta_reduce(h, site, keep_loops=True)
        h.loops -= 1
        trace.entries.append(TraceEntry(MoveKind.ELIM_LOOP))
    elif direction == "insert":
        e = _strand_edge(h, site)
        trace.entries += _beta_expand(h, e, e, lambda_first=chirality == "A")
    else:
        raise MoveError(f"direction must be remove or insert, not {direction!r}")
    return h, trace


def reidemeister_r2a(g: Graph, site, direction: str = "remove") -> tuple[Graph, MoveTrace]:
    """Remove the two crossings of an R2a bigon (``site`` is the LAMBDA of
    the lower crossing), or create one from two strand edges
    ``site = (over, under)``."""
    h = g.copy()
    trace = MoveTrace()
    if direction == "remove":
        m = match_braid(h, (1, -1), site) if isinstance(site, str) else None
        if m is None:
            raise MoveError(f"no R2a bigon starts at {site!r}")
        _, trace.entries = _unbraid(h, m)
    elif direction == "insert":
        over, under = (_strand_edge(h, s) for s in site)
        if over == under:
            raise MoveError("R2a insertion needs two distinct strand edges")
        trace.entries += _rebraid(h, (1, -1), [over, under])
    else:
        raise MoveError(f"direction must be remove or insert, not {direction!r}")
    return h, trace


def reidemeister_r3a(g: Graph, site: str, inverse: bool = False) -> tuple[Graph, MoveTrace]:
    """Slide the bottom strand of the triangle ``s1 s2 s1^-1`` whose first
    crossing has LAMBDA ``site``, giving ``s2^-1 s1 s2``; ``inverse`` goes back."""
    src, dst = (R3A_RHS_WORD, R3A_LHS_WORD) if inverse else (R3A_LHS_WORD, R3A_RHS_WORD)
    h = g.copy()
    m = match_braid(h, src, site)
    if m is None:
        raise MoveError(f"no R3a triangle starts at {site!r}")
    pos, entries = _unbraid(h, m)
    if h.loops != g.loops:
        raise MoveError("R3a site closes on itself")
    entries += _rebraid(h, dst, pos)
    return h, MoveTrace(entries)
