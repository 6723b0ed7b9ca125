"""MoveScript: a line-per-move text form for replaying rewrites.

Edge selectors name an edge by its source endpoint (``L1.vout``, ``in:a``),
by its OUT leaf (``out:root``), or structurally: ``redex`` is the unique
beta redex and ``redex:min`` the one whose LAMBDA has the smallest id.

Primitive moves::

    beta- <edge> [keep-loops]
    beta+ <edge> <edge> [under-first]
    elim-loop | add-loop
    coassoc <node> <node> | cocomm <node>
    prune <node> | prune @<name> [reterminate]   (with: subgraph <name> <node>...)
    gfanout <node> [open]
    ext1 <node> <node>

Reidemeister macros, expanded into primitive moves in the trace::

    r1- <node> A|B        r1+ <edge> A|B
    r2a- <node>           r2a+ <edge> <edge>
    r3a <node> [back]
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import Graph, GraphError, Port, parse_endpoint
from .moves import (
    MoveError,
    MoveKind,
    MoveTrace,
    TraceEntry,
    _beta_expand,
    _beta_reduce,
    _co_assoc,
    _co_comm,
    _ext1,
    _global_fanout,
    _prune_global,
    _prune_local,
    find_beta_redexes,
)


class ScriptError(ValueError):
    def __init__(self, message: str, line: int = 0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


@dataclass(frozen=True)
class Step:
    verb: str
    args: tuple
    line: int = 0


_ARITY = {
    "beta-": (1, {"keep-loops"}),
    "beta+": (2, {"under-first"}),
    "elim-loop": (0, set()),
    "add-loop": (0, set()),
    "coassoc": (2, set()),
    "cocomm": (1, set()),
    "prune": (1, {"reterminate"}),
    "gfanout": (1, {"open"}),
    "ext1": (2, set()),
    "r1-": (2, set()),
    "r1+": (2, set()),
    "r2a-": (1, set()),
    "r2a+": (2, set()),
    "r3a": (1, {"back"}),
}


def parse_script(text: str) -> tuple[list[Step], dict[str, list[str]]]:
    """Steps and named subgraphs. Unknown verbs, wrong arity and unknown
    options are reported with their line number."""
    steps, subgraphs = [], {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        fields = raw.split("#", 1)[0].split()
        if not fields:
            continue
        verb, args = fields[0], tuple(fields[1:])
        if verb == "subgraph":
            if len(args) < 2:
                raise ScriptError("expected: subgraph <name> <node>...", lineno)
            subgraphs[args[0]] = list(args[1:])
            continue
        if verb not in _ARITY:
            raise ScriptError(f"unknown move {verb!r}", lineno)
        arity, options = _ARITY[verb]
        if len(args) < arity or any(a not in options for a in args[arity:]):
            allowed = f" [{'|'.join(sorted(options))}]" if options else ""
            raise ScriptError(f"{verb} takes {arity} argument(s){allowed}", lineno)
        steps.append(Step(verb, args, lineno))
    return steps, subgraphs


def resolve_edge(g: Graph, selector: str) -> int:
    if selector in ("redex", "redex:min"):
        redexes = find_beta_redexes(g)
        if not redexes:
            raise MoveError("no beta redex")
        if selector == "redex" and len(redexes) > 1:
            raise MoveError(f"selector 'redex' is ambiguous ({len(redexes)} redexes)")
        return redexes[0]
    try:
        ep = parse_endpoint(selector)
    except GraphError as exc:
        raise MoveError(str(exc)) from None
    if isinstance(ep, Port):
        if ep.node not in g.nodes:
            raise MoveError(f"unknown node {ep.node!r}")
        if ep.role not in g.kind(ep.node).outputs:
            raise MoveError(f"{selector} is not an output port")
    e = g.edge_at(ep)
    if e is None:
        raise MoveError(f"no edge at {selector}")
    return e


def _node(g: Graph, name: str) -> str:
    if name not in g.nodes:
        raise MoveError(f"unknown node {name!r}")
    return name


def apply_step(g: Graph, step: Step, subgraphs: dict) -> list[TraceEntry]:
    """Apply one step in place; return its trace entries."""
    from . import knots

    verb, args = step.verb, step.args
    if verb == "beta-":
        return _beta_reduce(g, resolve_edge(g, args[0]), keep_loops="keep-loops" in args[1:])
    if verb == "beta+":
        over, under = resolve_edge(g, args[0]), resolve_edge(g, args[1])
        return _beta_expand(g, over, under, lambda_first="under-first" not in args[2:])
    if verb == "elim-loop":
        if g.loops < 1:
            raise MoveError("no node-free loop to eliminate")
        g.loops -= 1
        return [TraceEntry(MoveKind.ELIM_LOOP)]
    if verb == "add-loop":
        g.loops += 1
        return [TraceEntry(MoveKind.ADD_LOOP)]
    if verb == "coassoc":
        return _co_assoc(g, _node(g, args[0]), _node(g, args[1]))
    if verb == "cocomm":
        return _co_comm(g, _node(g, args[0]))
    if verb == "prune":
        if args[0].startswith("@"):
            name = args[0][1:]
            if name not in subgraphs:
                raise MoveError(f"undefined subgraph {name!r}")
            return _prune_global(g, subgraphs[name], strict="reterminate" not in args[1:])
        if "reterminate" in args[1:]:
            raise MoveError("reterminate applies to global pruning only")
        return _prune_local(g, _node(g, args[0]))
    if verb == "gfanout":
        return _global_fanout(g, _node(g, args[0]), open_cone="open" in args[1:])
    if verb == "ext1":
        return _ext1(g, _node(g, args[0]), _node(g, args[1]))

    # macros work on copies; adopt the result
    if verb == "r1-":
        h, trace = knots.reidemeister_r1(g, _node(g, args[0]), args[1], "remove")
    elif verb == "r1+":
        h, trace = knots.reidemeister_r1(g, resolve_edge(g, args[0]), args[1], "insert")
    elif verb == "r2a-":
        h, trace = knots.reidemeister_r2a(g, _node(g, args[0]), "remove")
    elif verb == "r2a+":
        h, trace = knots.reidemeister_r2a(g, (resolve_edge(g, args[0]), resolve_edge(g, args[1])), "insert")
    else:
        h, trace = knots.reidemeister_r3a(g, _node(g, args[0]), inverse="back" in args[1:])
    for slot in Graph.__slots__:
        setattr(g, slot, getattr(h, slot))
    return trace.entries


def apply_script(g: Graph, script) -> tuple[Graph, MoveTrace]:
    """Run a script (text or ``parse_script`` output) on a copy of ``g``."""
    steps, subgraphs = parse_script(script) if isinstance(script, str) else script
    h = g.copy()
    trace = MoveTrace()
    for step in steps:
        try:
            trace.entries += apply_step(h, step, subgraphs)
        except (MoveError, GraphError) as exc:
            raise ScriptError(f"{step.verb}: {exc}", step.line) from None
    return h, trace


def replay(g: Graph, trace: MoveTrace) -> Graph:
    return apply_script(g, trace.to_script())[0]

