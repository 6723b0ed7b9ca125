"""GLF, the line-oriented text form of a graph.

::

    # identity combinator
    node L1 LAM
    edge L1.vout L1.in
    edge L1.aout out:root
    loops 0
"""

from __future__ import annotations

from .graph import IDENT, Graph, GraphError, Kind, _direction_errors, parse_endpoint, validate


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)
        self.line = line
        self.column = column


def _fields(line: str) -> list[tuple[int, str]]:
    out = []
    i = 0
    while i < len(line):
        if line[i].isspace():
            i += 1
            continue
        j = i
        while j < len(line) and not line[j].isspace():
            j += 1
        out.append((i + 1, line[i:j]))
        i = j
    return out


def parse_glf(text: str) -> Graph:
    g = Graph()
    loops_seen = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        fields = _fields(line)
        if not fields:
            continue
        (col, word), args = fields[0], fields[1:]
        if word == "node":
            if len(args) not in (2, 3):
                raise ParseError("expected: node <id> <kind> [decoration]", lineno, col)
            (c_id, nid), (c_kind, kind_text) = args[0], args[1]
            if not IDENT.match(nid):
                raise ParseError(f"bad node id {nid!r}", lineno, c_id)
            if nid in g.nodes:
                raise ParseError(f"duplicate node id {nid!r}", lineno, c_id)
            try:
                kind = Kind(kind_text)
            except ValueError:
                raise ParseError(f"unknown node kind {kind_text!r}", lineno, c_kind) from None
            deco = args[2][1] if len(args) == 3 else None
            if deco is not None and kind is not Kind.DILATION:
                raise ParseError(f"{kind.name} nodes take no decoration", lineno, args[2][0])
            g._add_node(kind, deco, node_id=nid)
        elif word == "edge":
            if len(args) != 2:
                raise ParseError("expected: edge <src> <dst>", lineno, col)
            try:
                src = parse_endpoint(args[0][1])
                dst = parse_endpoint(args[1][1])
            except GraphError as exc:
                raise ParseError(str(exc), lineno, args[0][0]) from None
            errs = _direction_errors(g, src, dst)
            if errs:
                raise ParseError(errs[0], lineno, args[0][0])
            try:
                g._add_edge(src, dst)
            except GraphError as exc:
                raise ParseError(str(exc), lineno, args[0][0]) from None
        elif word == "loops":
            if len(args) != 1 or not args[0][1].isdigit():
                raise ParseError("expected: loops <count>", lineno, col)
            if loops_seen:
                raise ParseError("duplicate loops record", lineno, col)
            loops_seen = True
            g.loops = int(args[0][1])
        else:
            raise ParseError(f"unknown record {word!r}", lineno, col)
    errs = validate(g)
    if errs:
        raise GraphError("; ".join(errs), errs)
    return g


def emit_glf(g: Graph) -> str:
    lines = []
    for nid in g.sorted_nodes():
        lines.append(f"node {nid} {g.nodes[nid]}")
    for eid in g.sorted_edges():
        src, dst = g.edges[eid]
        lines.append(f"edge {src} {dst}")
    if g.loops:
        lines.append(f"loops {g.loops}")
    return "\n".join(lines) + "\n"
