"""The acceptance suite: nine checks over fixtures and seeded random cases.

Each check returns a :class:`Result`; ``run`` executes a filtered subset and
``glc selfcheck`` prints one line per check.
"""

from __future__ import annotations

import difflib
import random
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Optional

from .diagram import (
    R3A_LHS_WORD,
    R3A_RHS_WORD,
    braid_diagram,
    equal_up_to_relabeling,
    fixture,
    kink,
    parse_pd,
)
from .gen import random_braid, random_graph, random_term
from .glf import emit_glf, parse_glf
from .graph import LAMBDA, Graph, Kind, Leaf, Port, build_graph, validate
from .iso import is_isomorphic
from .knots import (
    Sector,
    classify,
    connecting_edges,
    decode_to_pd,
    encode_diagram,
    reidemeister_r1,
    reidemeister_r2a,
    reidemeister_r3a,
)
from .lamgraph import encode_term, readback, reduce_graph
from .moves import (
    MoveError,
    _beta_expand,
    _beta_reduce,
    find_beta_redexes,
)
from .script import apply_script
from .terms import (
    I,
    K,
    OMEGA,
    PLUS,
    SUCC,
    TIMES,
    S,
    Abs,
    App,
    Status,
    Var,
    alpha_eq,
    apply,
    church,
    free_vars,
    parse_term,
    reference_eval,
)

SEED = 20240601


@dataclass
class Result:
    number: int
    name: str
    ok: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.ok else 'FAIL'}] {self.number}. {self.name}: {self.detail} ({self.seconds:.2f}s)"


def data_dir() -> Path:
    return Path(str(resources.files("glc") / "data"))


def _timed(limit: Optional[float], ok: bool, detail: str, start: float) -> tuple[bool, str]:
    elapsed = time.perf_counter() - start
    if limit is not None and elapsed >= limit:
        return False, f"{detail}; took {elapsed:.1f}s, limit {limit:g}s"
    return ok, detail


def _iso(a: Graph, b: Graph) -> bool:
    return is_isomorphic(a, b) is not None


def _graph_diff(got: Graph, want: Graph) -> str:
    diff = difflib.unified_diff(
        emit_glf(want).splitlines(), emit_glf(got).splitlines(), "expected", "got", lineterm=""
    )
    return "\n".join(diff)


# -- 1. lambda oracle --------------------------------------------------------


def lambda_corpus(rng: random.Random, random_cases: int = 500) -> list:
    """Named terms plus random closed terms that normalize within 200 steps."""
    numerals = [church(n) for n in range(4)]
    terms = [I, K, S, apply(S, K, K), *numerals]
    terms += [apply(SUCC, n) for n in numerals]
    terms += [apply(op, m, n) for op in (PLUS, TIMES) for m in numerals for n in numerals]
    named = len(terms)
    while len(terms) < named + random_cases:
        t = random_term(rng, 6)
        _, status, _ = reference_eval(t, 200, max_size=2000)
        if status is Status.NORMAL:
            terms.append(t)
    return terms


def check_lambda_oracle(random_cases: int = 500, limit: float = 30.0) -> tuple[bool, str]:
    start = time.perf_counter()
    rng = random.Random(SEED)
    terms = lambda_corpus(rng, random_cases)
    failures = []
    for t in terms:
        want, _, _ = reference_eval(t, 200, max_size=2000)
        g, _, status = reduce_graph(encode_term(t), 10000)
        got = readback(g) if status is Status.NORMAL else None
        if got is None or not alpha_eq(got, want):
            failures.append(f"{t} -> {got} (oracle {want})")
    detail = f"{len(terms) - len(failures)}/{len(terms)} terms agree"
    if failures:
        detail += f"; first mismatch {failures[0]}"
    return _timed(limit, not failures, detail, start)


def check_committed_corpus(path: Optional[Path] = None) -> list[str]:
    """Hand-derived normal forms against the reference evaluator and the
    graph reducer; returns mismatch descriptions."""
    path = path or data_dir() / "lambda_corpus.txt"
    problems = []
    for line in path.read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        term_text, nf_text = (part.strip() for part in line.split(";"))
        t, want = parse_term(term_text), parse_term(nf_text)
        ref, status, _ = reference_eval(t)
        if status is not Status.NORMAL or not alpha_eq(ref, want):
            problems.append(f"oracle: {term_text} -> {ref}")
        g, _, status = reduce_graph(encode_term(t))
        if status is not Status.NORMAL or not alpha_eq(readback(g), want):
            problems.append(f"graph: {term_text}")
    return problems


# -- 2. eta ------------------------------------------------------------------


def eta_instances(rng: random.Random, count: int = 50) -> list:
    out = []
    while len(out) < count:
        f = random_term(rng, 4, free=("y", "z"))
        if "x" in free_vars(f):
            continue
        out.append((Abs("x", App(f, Var("x"))), f))
    return out


def eta_site(g: Graph) -> tuple[str, str]:
    """The (LAMBDA, APPLICATION) pair of an encoded ``\\x.(f x)``."""
    root = g.edges[g.edge_at(Leaf("out", "root"))][0]
    lam = root.node
    app = g.producer(lam, "in").node
    return lam, app


def check_eta(count: int = 50, limit: float = 1.0) -> tuple[bool, str]:
    from .moves import ext1

    start = time.perf_counter()
    bad = []
    for t, f in eta_instances(random.Random(SEED + 2), count):
        g = encode_term(t)
        h = ext1(g, *eta_site(g))
        if not alpha_eq(readback(h), f):
            bad.append(str(t))
    return _timed(limit, not bad, f"{count - len(bad)}/{count} eta contractions read back to f", start)


# -- 3. Reidemeister II and III ----------------------------------------------


def embedded_pattern(rng: random.Random, pattern: tuple) -> tuple[int, list, int, int]:
    """A random open braid containing ``pattern`` shifted to a random
    position; returns (strands, word, index of the pattern's first letter,
    pattern length)."""
    span = max(abs(x) for x in pattern) + 1
    n = rng.randint(span, span + 2)
    shift = rng.randint(0, n - span)
    if len(pattern) == 2 and rng.random() < 0.5:
        pattern = tuple(-x for x in pattern)
    core = [(abs(x) + shift) * (1 if x > 0 else -1) for x in pattern]
    prefix = [rng.choice([1, -1]) * rng.randint(1, n - 1) for _ in range(rng.randint(0, 4))]
    suffix = [rng.choice([1, -1]) * rng.randint(1, n - 1) for _ in range(rng.randint(0, 4))]
    return n, prefix + core + suffix, len(prefix), len(core)


def check_r2_r3(embeddings: int = 20, data: Optional[Path] = None, limit: float = 5.0) -> tuple[bool, str]:
    start = time.perf_counter()
    data = data or data_dir()
    problems = []

    def expect(label: str, got: Graph, want: Graph, beta: int, count: int) -> None:
        if beta != count:
            problems.append(f"{label}: beta_count {beta}, expected {count}")
        elif not _iso(got, want):
            problems.append(f"{label}: result differs from the direct encoding\n{_graph_diff(got, want)}")

    for name, count in (("r2a", 2), ("r3a", 6)):
        lhs, _ = encode_diagram(parse_pd((data / f"{name}-lhs.pd").read_text()))
        rhs, _ = encode_diagram(parse_pd((data / f"{name}-rhs.pd").read_text()))
        op = reidemeister_r2a(lhs, "L1") if name == "r2a" else reidemeister_r3a(lhs, "L1")
        expect(f"{name} fixture", op[0], rhs, op[1].beta_count, count)
        try:
            got, trace = apply_script(lhs, (data / f"{name}.txt").read_text())
            expect(f"{name} committed script", got, rhs, trace.beta_count, count)
        except ValueError as exc:
            problems.append(f"{name} committed script: {exc}")

    rng = random.Random(SEED + 3)
    for k in range(embeddings):
        n, word, at, length = embedded_pattern(rng, (1, -1))
        g, _ = encode_diagram(braid_diagram(n, word))
        want, _ = encode_diagram(braid_diagram(n, word[:at] + word[at + length :]))
        got, trace = reidemeister_r2a(g, f"L{at + 1}")
        expect(f"r2a embedding {k} {word}", got, want, trace.beta_count, 2)

        n, word, at, length = embedded_pattern(rng, R3A_LHS_WORD)
        shift = abs(word[at]) - 1
        rhs_core = [(abs(x) + shift) * (1 if x > 0 else -1) for x in R3A_RHS_WORD]
        g, _ = encode_diagram(braid_diagram(n, word))
        want, _ = encode_diagram(braid_diagram(n, word[:at] + rhs_core + word[at + length :]))
        got, trace = reidemeister_r3a(g, f"L{at + 1}")
        expect(f"r3a embedding {k} {word}", got, want, trace.beta_count, 6)

    total = 4 + 2 * embeddings
    detail = f"{total - len(problems)}/{total} R2a/R3a cases certified"
    if problems:
        detail += "; " + problems[0]
    return _timed(limit, not problems, detail, start)


# -- 4. Reidemeister I -------------------------------------------------------


def check_r1(limit: float = 1.0) -> tuple[bool, str]:
    start = time.perf_counter()
    strand = build_graph([], [("in:a", "out:b")])
    problems = []
    for chirality in "AB":
        g, _ = encode_diagram(kink(chirality))
        removed, trace = reidemeister_r1(g, "L1", chirality, "remove")
        if not _iso(removed, strand) or trace.beta_count != 1 or trace.loops_eliminated != 1:
            problems.append(f"{chirality}: removal did not give the bare strand")
        back, _ = reidemeister_r1(removed, removed.edge_at(Leaf("in", "a")), chirality, "insert")
        if not _iso(back, g):
            problems.append(f"{chirality}: insert after remove is not the identity")
        inserted, trace = reidemeister_r1(strand, strand.edge_at(Leaf("in", "a")), chirality, "insert")
        lam = inserted.nodes_of(LAMBDA)[0]
        again, _ = reidemeister_r1(inserted, lam, chirality, "remove")
        if not _iso(again, strand) or trace.beta_count != 1:
            problems.append(f"{chirality}: remove after insert is not the identity")
        closed, _ = encode_diagram(parse_pd("x + k1 k2 k2 k1\n" if chirality == "A" else "x - k1 k2 k2 k1\n"))
        circle, _ = reidemeister_r1(closed, "L1", chirality, "remove")
        if circle.nodes or circle.edges or circle.loops != 1:
            problems.append(f"{chirality}: kink on a circle did not leave one circle")
    return _timed(limit, not problems, "both chiralities" if not problems else "; ".join(problems), start)


# -- 5 and 6. closure and redex/crossing coincidence ---------------------------


def random_tangle(rng: random.Random, max_crossings: int = 8):
    """An open or partially closed braid diagram with at least one loose end."""
    n, word = random_braid(rng, max_strands=4, max_length=max_crossings)
    closed = {k for k in range(1, n + 1) if rng.random() < 0.3}
    if len(closed) == n:
        closed.discard(rng.randint(1, n))
    return braid_diagram(n, word, closed)


def random_knot_move(rng: random.Random, g: Graph) -> str:
    """Apply one random beta-reduce, beta-expand or loop move in place."""
    redexes = find_beta_redexes(g)
    strands = sorted(set(g.edges) - connecting_edges(g))
    choices = ["expand"] * bool(strands) + ["reduce"] * bool(redexes) + ["loop"]
    pick = rng.choice(choices)
    if pick == "reduce":
        _beta_reduce(g, rng.choice(redexes), keep_loops=rng.random() < 0.5)
    elif pick == "expand":
        e1 = rng.choice(strands)
        e2 = e1 if rng.random() < 0.2 else rng.choice(strands)
        _beta_expand(g, e1, e2, lambda_first=rng.random() < 0.5)
    elif g.loops and rng.random() < 0.5:
        g.loops -= 1
        pick = "elim-loop"
    else:
        g.loops += 1
        pick = "add-loop"
    return pick


def closure_walk(diagrams: int = 200, moves: int = 10, seed: int = SEED + 5):
    """Yield every graph visited by the random move walks of checks 5 and 6."""
    rng = random.Random(seed)
    for _ in range(diagrams):
        g, _ = encode_diagram(random_tangle(rng))
        yield g, None
        for _ in range(moves):
            move = random_knot_move(rng, g)
            yield g, move


def check_closure(diagrams: int = 200, moves: int = 10, limit: float = 30.0) -> tuple[bool, str]:
    start = time.perf_counter()
    steps = bad = 0
    first = ""
    for g, move in closure_walk(diagrams, moves):
        steps += 1
        if classify(g) is not Sector.TANGLE or validate(g):
            bad += 1
            first = first or f"after {move}: {classify(g).name}"
    detail = f"{steps - bad}/{steps} graphs classified TANGLE"
    return _timed(limit, bad == 0, detail + (f"; {first}" if first else ""), start)


def check_redex_crossing(diagrams: int = 200, moves: int = 10) -> tuple[bool, str]:
    start = time.perf_counter()
    steps = bad = 0
    for g, _ in closure_walk(diagrams, moves):
        steps += 1
        if set(find_beta_redexes(g)) != connecting_edges(g):
            bad += 1
    return _timed(None, bad == 0, f"{steps - bad}/{steps} graphs agree", start)


# -- 7. codecs ---------------------------------------------------------------


def check_round_trips(diagrams: int = 100, graphs: int = 1000) -> tuple[bool, str]:
    start = time.perf_counter()
    problems = []
    cases = [(name, fixture(name)) for name in ("trefoil", "figure-eight", "hopf")]
    rng = random.Random(SEED + 7)
    for k in range(diagrams):
        n, word = random_braid(rng, max_strands=4, max_length=8)
        closed = rng.choice([False, True, {k for k in range(1, n + 1) if rng.random() < 0.5}])
        cases.append((f"random {k}", braid_diagram(n, word, closed)))
    for name, d in cases:
        g, b = encode_diagram(d)
        if not equal_up_to_relabeling(decode_to_pd(g, b), d):
            problems.append(f"PD {name}")
    for k in range(graphs):
        g = random_graph(rng, max_nodes=10)
        if not _iso(parse_glf(emit_glf(g)), g):
            problems.append(f"GLF graph {k}")
    total = len(cases) + graphs
    detail = f"{total - len(problems)}/{total} round trips exact"
    return _timed(None, not problems, detail + (f"; first failure {problems[0]}" if problems else ""), start)


# -- 8. inverse pair ---------------------------------------------------------


def undo_sites(g: Graph, lam: str) -> Optional[tuple]:
    """Endpoints that name, after reducing redex ``lam``, the edges whose
    expansion restores ``g``: ``(over source, under source, lambda_first)``.

    None for the two shapes expansion cannot create (a LAMBDA feeding its
    own body, an APPLICATION feeding its own argument) and for a crossing
    that is a kink both ways at once.
    """
    app = g.consumer(lam, "aout").node
    into_l = g.producer(lam, "in")
    into_a = g.producer(app, "ain")
    if into_l == Port(lam, "vout") or into_a == Port(app, "out"):
        return None
    kink_a = into_a == Port(lam, "vout")
    kink_b = into_l == Port(app, "out")
    if kink_a and kink_b:
        return None
    if kink_a:
        return into_l, into_l, True
    if kink_b:
        return into_a, into_a, False
    return into_l, into_a, True


def check_inverse_pair(cases: int = 500) -> tuple[bool, str]:
    start = time.perf_counter()
    rng = random.Random(SEED + 8)
    bad = done = 0
    kinds = [Kind.LAMBDA, Kind.APPLICATION, Kind.LAMBDA, Kind.APPLICATION, Kind.FANOUT, Kind.TERMINATION]
    while done < cases:
        g = random_graph(rng, max_nodes=8, kinds=kinds)
        if done % 2 == 0:
            if not g.edges:
                continue
            edges = sorted(g.edges)
            e1 = rng.choice(edges)
            e2 = e1 if rng.random() < 0.2 else rng.choice(edges)
            h = g.copy()
            lam = _beta_expand(h, e1, e2, lambda_first=rng.random() < 0.5)[0].created[0]
            _beta_reduce(h, lam)
        else:
            redexes = find_beta_redexes(g)
            if not redexes:
                continue
            lam = g.edges[rng.choice(redexes)][0].node
            sites = undo_sites(g, lam)
            if sites is None:
                continue
            h = g.copy()
            _beta_reduce(h, lam)
            over, under, lambda_first = sites
            _beta_expand(h, h.edge_at(over), h.edge_at(under), lambda_first=lambda_first)
        done += 1
        if not _iso(h, g):
            bad += 1
    return _timed(None, bad == 0, f"{cases - bad}/{cases} pairs restore the graph", start)


# -- 9. divergence -----------------------------------------------------------


def check_divergence(limit: float = 1.0) -> tuple[bool, str]:
    start = time.perf_counter()
    statuses = []
    for fuel in (1, 10, 100):
        try:
            _, trace, status = reduce_graph(encode_term(OMEGA), fuel)
            statuses.append(f"fuel {fuel}: {status.value} after {trace.beta_count} beta")
            ok = status is Status.FUEL_EXHAUSTED and trace.beta_count == fuel
        except (ValueError, MoveError) as exc:
            statuses.append(f"fuel {fuel}: error {exc}")
            ok = False
        if not ok:
            return _timed(limit, False, "; ".join(statuses), start)
    return _timed(limit, True, "; ".join(statuses), start)


# -- registry ----------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    number: int
    name: str
    tags: tuple
    run: Callable[[], tuple[bool, str]]


CHECKS = [
    Check(1, "lambda oracle equivalence", ("lambda",), check_lambda_oracle),
    Check(2, "eta correspondence", ("lambda", "moves"), check_eta),
    Check(3, "R2a/R3a beta-count certification", ("knot",), check_r2_r3),
    Check(4, "Reidemeister I", ("knot",), check_r1),
    Check(5, "tangle-graph closure", ("knot",), check_closure),
    Check(6, "redex/crossing coincidence", ("knot",), check_redex_crossing),
    Check(7, "round-trip codecs", ("knot", "codec", "graph"), check_round_trips),
    Check(8, "beta inverse pair", ("moves", "graph"), check_inverse_pair),
    Check(9, "divergence containment", ("lambda",), check_divergence),
]


def select(name: Optional[str] = None) -> list[Check]:
    if not name:
        return list(CHECKS)
    name = name.lower()
    if name.isdigit():
        return [c for c in CHECKS if name == str(c.number)]
    return [c for c in CHECKS if name in c.tags or name in c.name.lower()]


def run(name: Optional[str] = None) -> list[Result]:
    results = []
    for c in select(name):
        start = time.perf_counter()
        try:
            ok, detail = c.run()
        except Exception as exc:  # a crash is a failed check, reported like one
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append(Result(c.number, c.name, ok, detail, time.perf_counter() - start))
    return results



