"""Seeded random generators for terms, graphs and braid words."""

from __future__ import annotations

import random

from .graph import Graph, Kind, Leaf, Port
from .terms import Abs, App, Term, Var


def random_term(rng: random.Random, max_depth: int = 6, free: tuple = ()) -> Term:
    """A random term of depth at most ``max_depth`` whose free variables are
    drawn from ``free`` (closed when ``free`` is empty)."""
    counter = [0]

    def go(depth: int, env: tuple) -> Term:
        choices = []
        if env:
            choices.append("var")
        if depth > 0:
            choices += ["abs", "app", "app"]
        if not choices:
            choices = ["abs"]
        pick = rng.choice(choices)
        if pick == "var" or (depth == 0 and env):
            return Var(rng.choice(env))
        if pick == "abs" or depth == 0:
            counter[0] += 1
            name = rng.choice(["x", "y", "z", f"v{counter[0]}"])
            if depth == 0:
                return Abs(name, Var(name))
            return Abs(name, go(depth - 1, env + (name,)))
        return App(go(depth - 1, env), go(depth - 1, env))

    return go(max_depth, tuple(free))


def random_graph(rng: random.Random, max_nodes: int = 8, kinds=None) -> Graph:
    """A random valid graph: random gates with their ports wired by a random
    bijection, padded with IN/OUT leaves so every port is used."""
    kinds = kinds or list(Kind)
    g = Graph()
    for _ in range(rng.randint(0, max_nodes)):
        kind = rng.choice(kinds)
        deco = rng.choice(["a", "b", "c"]) if kind is Kind.DILATION else None
        g._add_node(kind, deco)
    sources = [Port(n, r) for n in g.sorted_nodes() for r in g.kind(n).outputs]
    targets = [Port(n, r) for n in g.sorted_nodes() for r in g.kind(n).inputs]
    extra = rng.randint(0, 2)
    k = 0
    while len(sources) < len(targets) + extra:
        k += 1
        sources.append(Leaf("in", f"i{k}"))
    k = 0
    while len(targets) < len(sources):
        k += 1
        targets.append(Leaf("out", f"o{k}"))
    rng.shuffle(targets)
    for src, dst in zip(sources, targets):
        g._add_edge(src, dst)
    g.loops = rng.choice([0, 0, 0, 1, 2])
    return g


def random_braid(rng: random.Random, max_strands: int = 4, max_length: int = 8) -> tuple[int, list[int]]:
    """``(strands, word)``; letter ``+i`` is sigma_i, ``-i`` its inverse."""
    n = rng.randint(2, max_strands)
    word = [rng.choice([1, -1]) * rng.randint(1, n - 1) for _ in range(rng.randint(0, max_length))]
    return n, word
