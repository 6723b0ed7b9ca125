"""Lambda terms as graphs: encoding, the lambda-graph condition, graph
reduction and readback."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .graph import (
    APPLICATION,
    DILATION,
    FANOUT,
    LAMBDA,
    TERMINATION,
    Graph,
    Leaf,
    Port,
    natural_key,
)
from .moves import (
    MoveError,
    MoveTrace,
    _beta_reduce,
    _global_fanout,
    _prune_global,
    _prune_local,
)
from .terms import Abs, App, Status, Term, Var, free_vars


class LambdaGraphError(ValueError):
    pass


ROOT = "root"


# -- encoding ----------------------------------------------------------------


def encode_term(t: Term) -> Graph:
    """Encode a term; free variables become IN leaves, the root the OUT leaf ``root``.

    Occurrences of a bound variable are fed from the binder's ``vout``
    through a right-comb of FANOUT nodes in left-to-right order; an unused
    binder feeds a TERMINATION gate.
    """
    g = Graph()
    # bound or free name -> list of consumer endpoints, filled while descending
    occurrences: dict[object, list] = {}

    def wire_occurrences(src, consumers) -> None:
        if not consumers:
            top = g._add_node(TERMINATION)
            g._add_edge(src, Port(top, "in"))
            return
        for dst in consumers[:-1]:
            fan = g._add_node(FANOUT)
            g._add_edge(src, Port(fan, "in"))
            g._add_edge(Port(fan, "lout"), dst)
            src = Port(fan, "rout")
        g._add_edge(src, consumers[-1])

    free: dict[str, list] = {}
    # explicit stack: (term, consumer endpoint, scope) where scope maps name -> binder key
    stack = [(t, Leaf("out", ROOT), {})]
    binders = []
    while stack:
        term, dst, scope = stack.pop()
        if isinstance(term, Var):
            key = scope.get(term.name)
            if key is None:
                free.setdefault(term.name, []).append(dst)
            else:
                occurrences[key].append(dst)
        elif isinstance(term, Abs):
            lam = g._add_node(LAMBDA)
            g._add_edge(Port(lam, "aout"), dst)
            occurrences[lam] = []
            binders.append(lam)
            stack.append((term.body, Port(lam, "in"), {**scope, term.name: lam}))
        else:
            app = g._add_node(APPLICATION)
            g._add_edge(Port(app, "out"), dst)
            # arg pushed first so the function side is visited (and numbered) first
            stack.append((term.arg, Port(app, "ain"), scope))
            stack.append((term.fun, Port(app, "fin"), scope))
    for lam in binders:
        wire_occurrences(Port(lam, "vout"), occurrences[lam])
    for name in sorted(free, key=natural_key):
        wire_occurrences(Leaf("in", name), free[name])
    return g


# -- the lambda-graph condition ----------------------------------------------


@dataclass
class LambdaGraphReport:
    is_lambda_graph: bool
    violations: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.is_lambda_graph


def is_lambda_graph(g: Graph) -> LambdaGraphReport:
    """Check that no DILATION gate is present and that every path leaving a
    bound-variable port ends at a TERMINATION gate or at the body input of
    some LAMBDA node."""
    violations = []
    for n in g.nodes_of(DILATION):
        violations.append((n, "DILATION gate present"))
    for lam in g.nodes_of(LAMBDA):
        # forward closure of the variable port through FANOUT and APPLICATION
        succ: dict[str, list[str]] = {}
        stack = [g.consumer(lam, "vout")]
        while stack:
            ep = stack.pop()
            if isinstance(ep, Leaf):
                violations.append((lam, f"variable reaches {ep}"))
                continue
            kind = g.kind(ep.node)
            if kind is TERMINATION or (kind is LAMBDA and ep.role == "in"):
                continue
            if kind not in (FANOUT, APPLICATION):
                violations.append((lam, f"variable reaches {kind.name} port {ep}"))
                continue
            if ep.node in succ:
                continue
            outs = [g.consumer(ep.node, r) for r in kind.outputs]
            succ[ep.node] = [o.node for o in outs if isinstance(o, Port) and o.node in g.nodes]
            stack.extend(outs)
        if _has_cycle(succ):
            violations.append((lam, "variable path enters a cycle without a binder"))
    return LambdaGraphReport(not violations, violations)


def _has_cycle(succ: dict) -> bool:
    state: dict[str, int] = {}
    for start in succ:
        if start in state:
            continue
        stack = [(start, iter(succ[start]))]
        state[start] = 1
        while stack:
            node, it = stack[-1]
            for nxt in it:
                if nxt not in succ:
                    continue
                if state.get(nxt) == 1:
                    return True
                if nxt not in state:
                    state[nxt] = 1
                    stack.append((nxt, iter(succ[nxt])))
                    break
            else:
                state[node] = 2
                stack.pop()
    return False


# -- readback ----------------------------------------------------------------


def readback(g: Graph, limit: int = 1_000_000) -> Term:
    """Unfold the graph behind its single OUT leaf into a term.

    Sharing through FANOUT nodes is expanded; each LAMBDA met through its
    abstraction output binds a fresh name ``x1, x2, ...`` avoiding free names.
    """
    outs = g.out_leaves
    if len(outs) != 1:
        raise LambdaGraphError(f"readback needs exactly one OUT leaf, found {len(outs)}")
    (out_name,) = outs
    taken = set(g.in_leaves)
    counter = itertools.count(1)
    budget = [limit]

    def fresh() -> str:
        while True:
            name = f"x{next(counter)}"
            if name not in taken:
                return name

    def walk(ep, env: dict, path: frozenset) -> Term:
        budget[0] -= 1
        if budget[0] < 0:
            raise LambdaGraphError("readback exceeded its traversal budget")
        while isinstance(ep, Port) and g.kind(ep.node) is FANOUT:
            if ep.node in path:
                raise LambdaGraphError(f"cycle through {ep.node} without a binder")
            path = path | {ep.node}
            ep = g.producer(ep.node, "in")
        if isinstance(ep, Leaf):
            return Var(ep.name)
        kind = g.kind(ep.node)
        if kind is LAMBDA and ep.role == "vout":
            if ep.node not in env:
                raise LambdaGraphError(f"variable of {ep.node} used outside its scope")
            return Var(env[ep.node])
        if ep.node in path:
            raise LambdaGraphError(f"cycle through {ep.node} without a binder")
        if kind is LAMBDA:
            name = fresh()
            body = walk(g.producer(ep.node, "in"), {**env, ep.node: name}, path | {ep.node})
            return Abs(name, body)
        if kind is APPLICATION:
            inner = path | {ep.node}
            return App(walk(g.producer(ep.node, "fin"), env, inner), walk(g.producer(ep.node, "ain"), env, inner))
        raise LambdaGraphError(f"{kind.name} output {ep} cannot be read back")

    return walk(g.edges[g._at[Leaf("out", out_name)]][0], {}, frozenset())


# -- reduction ---------------------------------------------------------------


def _head_lambda(g: Graph, app: str):
    """For APPLICATION ``app``: (lambda, fanout chain) if its function input
    is an abstraction output, possibly through FANOUT nodes."""
    chain = []
    ep = g.producer(app, "fin")
    while isinstance(ep, Port) and g.kind(ep.node) is FANOUT:
        chain.append(ep.node)
        ep = g.producer(ep.node, "in")
        if len(chain) > len(g.nodes):
            return None, chain
    if isinstance(ep, Port) and ep.role == "aout":
        return ep.node, chain
    return None, chain


def _next_action(g: Graph, stuck: set):
    """First action in leftmost-outermost order from the OUT leaves:
    ("beta", lambda) or ("share", fanout-nearest-the-lambda)."""
    roots = sorted((ep for ep in g._at if isinstance(ep, Leaf) and ep.io == "out"), key=lambda l: natural_key(l.name))
    seen = set()
    stack = [g.edges[g._at[leaf]][0] for leaf in reversed(roots)]
    while stack:
        ep = stack.pop()
        if isinstance(ep, Leaf) or ep.node in seen or ep.role == "vout":
            continue
        seen.add(ep.node)
        kind = g.kind(ep.node)
        if kind is APPLICATION:
            lam, chain = _head_lambda(g, ep.node)
            if lam is not None:
                if not chain:
                    return "beta", lam
                if chain[-1] not in stuck:
                    return "share", chain[-1]
            stack.append(g.producer(ep.node, "ain"))
            stack.append(g.producer(ep.node, "fin"))
        elif kind is LAMBDA:
            stack.append(g.producer(ep.node, "in"))
        elif kind is FANOUT:
            stack.append(g.producer(ep.node, "in"))
    return None


def _collect_garbage(g: Graph) -> list:
    """Remove everything the OUT leaves no longer depend on."""
    entries = []
    live = set()
    stack = [g.edges[e][0] for ep, e in g._at.items() if isinstance(ep, Leaf) and ep.io == "out"]
    while stack:
        ep = stack.pop()
        if isinstance(ep, Leaf) or ep.node in live:
            continue
        live.add(ep.node)
        for role in g.kind(ep.node).inputs:
            stack.append(g.producer(ep.node, role))
    dead = set()
    for n, node in g.nodes.items():
        if n in live:
            continue
        if node.kind is TERMINATION:
            src = g.producer(n, "in")
            if isinstance(src, Leaf) or src.node in live:
                continue
        dead.add(n)
    if dead:
        entries += _prune_global(g, dead, strict=False)
    changed = True
    while changed:
        changed = False
        for n in g.nodes_of(FANOUT):
            if any(g.kind(c.node) is TERMINATION for c in (g.consumer(n, "lout"), g.consumer(n, "rout")) if isinstance(c, Port)):
                entries += _prune_local(g, n)
                changed = True
    return entries


def _unshare_closed(g: Graph) -> list:
    for n in g.nodes_of(FANOUT):
        try:
            return _global_fanout(g, n)
        except MoveError:
            continue
    return []


def reduce_graph(g: Graph, fuel: int = 10000) -> tuple[Graph, MoveTrace, Status]:
    """Normal-order graph reduction; each beta move costs one unit of fuel.

    Between beta moves, sharing that blocks the leftmost redex is resolved by
    global fan-out, and parts of the graph unreachable from the OUT leaves
    are pruned. At normal form, closed shared subterms are duplicated so the
    result has no avoidable sharing.
    """
    report = is_lambda_graph(g)
    if not report:
        raise LambdaGraphError(f"not a lambda graph: {report.violations[0]}")
    h = g.copy()
    trace = MoveTrace()
    stuck: set = set()
    housekeeping = 0
    limit = 100 * (fuel + len(h.nodes) + 10)
    while True:
        action = _next_action(h, stuck)
        if action is None:
            entries = _unshare_closed(h)
            if not entries:
                return h, trace, Status.NORMAL
            trace.entries += entries
            trace.entries += _collect_garbage(h)
            continue
        what, site = action
        if what == "beta":
            if fuel <= 0:
                return h, trace, Status.FUEL_EXHAUSTED
            trace.entries += _beta_reduce(h, site)
            fuel -= 1
        else:
            housekeeping += 1
            if housekeeping > limit:
                raise LambdaGraphError("sharing resolution did not settle")
            try:
                trace.entries += _global_fanout(h, site)
            except MoveError:
                try:
                    trace.entries += _global_fanout(h, site, open_cone=True)
                except MoveError:
                    stuck.add(site)
                    continue
        trace.entries += _collect_garbage(h)


def normalize_term(t: Term, fuel: int = 10000) -> tuple[Term, Status, MoveTrace]:
    """Encode, reduce, read back."""
    g, trace, status = reduce_graph(encode_term(t), fuel)
    return readback(g), status, trace


def closed(t: Term) -> bool:
    return not free_vars(t)
