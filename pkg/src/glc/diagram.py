"""Oriented tangle and link diagrams in a planar-diagram (PD) text form.

::

    # one positive crossing, two boundary strands
    bin a c
    bout b d
    x + a b c d        # sign over_in over_out under_in under_out
    strand p q         # a crossing-free arc from boundary point p to q
    circles 0          # crossing-free closed components

A crossing's sign is ``+``, ``-`` or ``?`` (unknown).
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .graph import IDENT


class DiagramError(ValueError):
    def __init__(self, message: str, line: int = 0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


SIGNS = {"+": 1, "-": -1, "?": None}
SIGN_TEXT = {1: "+", -1: "-", None: "?"}


@dataclass(frozen=True)
class Crossing:
    sign: Optional[int]
    over_in: str
    over_out: str
    under_in: str
    under_out: str

    @property
    def inputs(self) -> tuple[str, str]:
        return (self.over_in, self.under_in)

    @property
    def outputs(self) -> tuple[str, str]:
        return (self.over_out, self.under_out)

    def renamed(self, f) -> "Crossing":
        return Crossing(self.sign, f(self.over_in), f(self.over_out), f(self.under_in), f(self.under_out))


@dataclass
class TangleDiagram:
    crossings: list = field(default_factory=list)
    boundary_in: list = field(default_factory=list)
    boundary_out: list = field(default_factory=list)
    closed_unknotted_components: int = 0
    strands: list = field(default_factory=list)  # (in label, out label), crossing-free

    @property
    def is_link(self) -> bool:
        return not (self.boundary_in or self.boundary_out or self.strands)

    def arcs(self) -> set:
        out = set(self.boundary_in) | set(self.boundary_out)
        for c in self.crossings:
            out.update(c.inputs + c.outputs)
        return out


def check_diagram(d: TangleDiagram) -> None:
    """Each arc is produced once (crossing output or boundary input) and
    consumed once (crossing input or boundary output)."""
    produced = Counter(d.boundary_in)
    consumed = Counter(d.boundary_out)
    for c in d.crossings:
        produced.update(c.outputs)
        consumed.update(c.inputs)
    uses = produced + consumed
    for arc in sorted(uses):
        if uses[arc] > 2:
            raise DiagramError(f"arc {arc!r} used {uses[arc]} times")
        if produced[arc] != 1 or consumed[arc] != 1:
            where = "boundary input" if produced[arc] == 0 else "boundary output"
            raise DiagramError(f"arc {arc!r} has a loose end; declare it as a {where}")
    labels_in = [a for a, _ in d.strands]
    labels_out = [b for _, b in d.strands]
    for labels, side, boundary in ((labels_in, "input", d.boundary_in), (labels_out, "output", d.boundary_out)):
        dup = [k for k, n in Counter(labels + list(boundary)).items() if n > 1]
        if dup:
            raise DiagramError(f"boundary {side} label {dup[0]!r} used twice")
    if d.closed_unknotted_components < 0:
        raise DiagramError("negative circle count")


def parse_pd(text: str) -> TangleDiagram:
    d = TangleDiagram()
    circles_seen = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        fields = raw.split("#", 1)[0].split()
        if not fields:
            continue
        word, args = fields[0], fields[1:]
        for a in args:
            if word != "x" or a not in SIGNS:
                if not IDENT.match(a) and not (word == "circles" and a.isdigit()):
                    raise DiagramError(f"bad arc name {a!r}", lineno)
        if word == "x":
            if len(args) != 5 or args[0] not in SIGNS:
                raise DiagramError("expected: x <+|-|?> over_in over_out under_in under_out", lineno)
            d.crossings.append(Crossing(SIGNS[args[0]], *args[1:]))
        elif word == "bin":
            d.boundary_in.extend(args)
        elif word == "bout":
            d.boundary_out.extend(args)
        elif word == "strand":
            if len(args) != 2:
                raise DiagramError("expected: strand <in> <out>", lineno)
            d.strands.append((args[0], args[1]))
        elif word == "circles":
            if len(args) != 1 or not args[0].isdigit() or circles_seen:
                raise DiagramError("expected a single: circles <n>", lineno)
            circles_seen = True
            d.closed_unknotted_components = int(args[0])
        else:
            raise DiagramError(f"unknown record {word!r}", lineno)
    # an arc listed as both boundary input and output without crossings is a strand
    touched = {a for c in d.crossings for a in c.inputs + c.outputs}
    through = [a for a in d.boundary_in if a in d.boundary_out and a not in touched]
    for a in through:
        d.boundary_in.remove(a)
        d.boundary_out.remove(a)
        d.strands.append((a, a))
    check_diagram(d)
    return d


def emit_pd(d: TangleDiagram) -> str:
    lines = []
    if d.boundary_in:
        lines.append("bin " + " ".join(d.boundary_in))
    if d.boundary_out:
        lines.append("bout " + " ".join(d.boundary_out))
    for c in d.crossings:
        lines.append(f"x {SIGN_TEXT[c.sign]} {c.over_in} {c.over_out} {c.under_in} {c.under_out}")
    for a, b in d.strands:
        lines.append(f"strand {a} {b}")
    if d.closed_unknotted_components:
        lines.append(f"circles {d.closed_unknotted_components}")
    return "\n".join(lines) + "\n"


def canonical(d: TangleDiagram) -> tuple:
    """Relabel interior arcs by first appearance in crossing order; boundary
    labels are kept. Two diagrams equal up to arc relabeling (with crossings
    in the same order) have equal canonical forms."""
    boundary = set(d.boundary_in) | set(d.boundary_out)
    names: dict[str, str] = {}
    counter = itertools.count(1)

    def rename(a: str) -> str:
        if a in boundary:
            return a
        if a not in names:
            names[a] = f"#{next(counter)}"
        return names[a]

    crossings = tuple(c.renamed(rename) for c in d.crossings)
    return (
        crossings,
        tuple(d.boundary_in),
        tuple(d.boundary_out),
        tuple(sorted(d.strands)),
        d.closed_unknotted_components,
    )


def equal_up_to_relabeling(d1: TangleDiagram, d2: TangleDiagram) -> bool:
    return canonical(d1) == canonical(d2)


# -- braids ------------------------------------------------------------------


def braid_diagram(strands: int, word, closed=False) -> TangleDiagram:
    """Diagram of a braid word read bottom to top.

    Letter ``+i`` (sigma_i) crosses the strands at positions i and i+1 with
    the left one over; ``-i`` puts the right one over. Open braids get
    boundary inputs ``i1..`` and outputs ``o1..``. ``closed`` may be True
    (full closure, a link) or a set of 1-based positions to close.
    """
    if strands < 1:
        raise DiagramError("a braid needs at least one strand")
    fresh = (f"a{k}" for k in itertools.count(1))
    start = [f"i{k}" for k in range(1, strands + 1)]
    pos = list(start)
    crossings = []
    for letter in word:
        i = abs(letter)
        if letter == 0 or i >= strands:
            raise DiagramError(f"letter {letter} out of range for {strands} strands")
        left, right = i - 1, i
        over, under = (left, right) if letter > 0 else (right, left)
        over_out, under_out = next(fresh), next(fresh)
        crossings.append(Crossing(1 if letter > 0 else -1, pos[over], over_out, pos[under], under_out))
        pos[over], pos[under] = under_out, over_out
    close = set(range(1, strands + 1)) if closed is True else set(closed or ())
    finals = {pos[k]: f"o{k + 1}" for k in range(strands) if k + 1 not in close}
    parent: dict[str, str] = {}

    def find(a: str) -> str:
        while parent.get(a, a) != a:
            a = parent[a]
        return a

    circles = 0
    for k in sorted(close):
        top, bottom = pos[k - 1], start[k - 1]
        if find(top) == find(bottom):
            circles += 1
        else:
            parent[find(bottom)] = find(top)

    def name(a: str) -> str:
        a = find(a)
        return finals.get(a, a)

    d = TangleDiagram(
        crossings=[c.renamed(name) for c in crossings],
        closed_unknotted_components=circles,
    )
    touched = {a for c in d.crossings for a in c.inputs + c.outputs}
    for k in range(1, strands + 1):
        if k in close:
            continue
        a, b = start[k - 1], f"o{k}"
        if name(a) == b and b not in touched:
            d.strands.append((a, b))
        else:
            d.boundary_in.append(name(a))
            d.boundary_out.append(b)
    check_diagram(d)
    return d


# named fixtures: (strands, word, closed)
BRAIDS = {
    "trefoil": (2, [1, 1, 1], True),
    "figure-eight": (3, [1, -2, 1, -2], True),
    "hopf": (2, [1, 1], True),
    "r2a-lhs": (2, [1, -1], False),
    "r2a-rhs": (2, [], False),
    "r3a-lhs": (3, [1, 2, -1], False),
    "r3a-rhs": (3, [-2, 1, 2], False),
}

R2A_WORD = (1, -1)
R3A_LHS_WORD = (1, 2, -1)
R3A_RHS_WORD = (-2, 1, 2)


def fixture(name: str) -> TangleDiagram:
    strands, word, closed = BRAIDS[name]
    return braid_diagram(strands, word, closed)


def kink(chirality: str) -> TangleDiagram:
    """One-crossing kink on an open strand from ``a`` to ``b``."""
    if chirality == "A":
        return TangleDiagram([Crossing(1, "a", "k", "k", "b")], ["a"], ["b"])
    if chirality == "B":
        return TangleDiagram([Crossing(-1, "k", "b", "a", "k")], ["a"], ["b"])
    raise DiagramError(f"unknown chirality {chirality!r}")
