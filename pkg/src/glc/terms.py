"""Untyped lambda terms, a parser, alpha-equality and a reference evaluator.

The evaluator is deliberately naive (named terms, capture-avoiding
substitution, leftmost-outermost strategy): it is the oracle the graph
reducer is checked against, so it shares no code with it.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Union


class TermSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Abs:
    name: str
    body: "Term"

    def __str__(self) -> str:
        return f"\\{self.name}.{self.body}"


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"

    def __str__(self) -> str:
        f = f"({self.fun})" if isinstance(self.fun, Abs) else str(self.fun)
        a = f"({self.arg})" if isinstance(self.arg, (Abs, App)) else str(self.arg)
        return f"{f} {a}"


Term = Union[Var, Abs, App]


class Status(enum.Enum):
    NORMAL = "NORMAL"
    FUEL_EXHAUSTED = "FUEL_EXHAUSTED"


# -- parsing -----------------------------------------------------------------


def _tokens(text: str):
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "\\λ.()":
            yield ("\\" if c == "λ" else c, i)
            i += 1
        elif c.isalnum() or c == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            yield (text[i:j], i)
            i = j
        else:
            raise TermSyntaxError(f"unexpected character {c!r}", i)
    yield ("", len(text))


class _Parser:
    def __init__(self, text: str):
        self.toks = list(_tokens(text))
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, want=None):
        tok, pos = self.toks[self.i]
        if want is not None and tok != want:
            raise TermSyntaxError(f"expected {want!r}, found {tok or 'end of input'!r}", pos)
        self.i += 1
        return tok, pos

    def term(self) -> Term:
        tok, pos = self.peek()
        if tok == "\\":
            self.take()
            name, npos = self.take()
            if not name or not (name[0].isalnum() or name[0] == "_") or name in "\\.()":
                raise TermSyntaxError("expected a variable name after lambda", npos)
            self.take(".")
            return Abs(name, self.term())
        return self.appterm()

    def appterm(self) -> Term:
        t = self.atom()
        while True:
            tok, _ = self.peek()
            if tok in ("", ")"):
                return t
            if tok == "\\":
                return App(t, self.term())
            t = App(t, self.atom())

    def atom(self) -> Term:
        tok, pos = self.peek()
        if tok == "(":
            self.take()
            t = self.term()
            self.take(")")
            return t
        if tok and tok not in "\\.)":
            self.take()
            return Var(tok)
        raise TermSyntaxError(f"unexpected {tok or 'end of input'!r}", pos)


def parse_term(text: str) -> Term:
    """Parse ``\\x.body`` / application syntax; application is left-associative
    and an abstraction body extends as far right as possible."""
    p = _Parser(text)
    t = p.term()
    tok, pos = p.peek()
    if tok:
        raise TermSyntaxError(f"trailing input {tok!r}", pos)
    return t


# -- structure ---------------------------------------------------------------


def free_vars(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset([t.name])
    if isinstance(t, Abs):
        return free_vars(t.body) - {t.name}
    return free_vars(t.fun) | free_vars(t.arg)


def size(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    if isinstance(t, Abs):
        return 1 + size(t.body)
    return 1 + size(t.fun) + size(t.arg)


def depth(t: Term) -> int:
    if isinstance(t, Var):
        return 0
    if isinstance(t, Abs):
        return 1 + depth(t.body)
    return 1 + max(depth(t.fun), depth(t.arg))


def to_debruijn(t: Term, env: tuple = ()):
    """Nameless form: bound variables become indices, free ones keep names."""
    if isinstance(t, Var):
        for i, name in enumerate(env):
            if name == t.name:
                return i
        return ("free", t.name)
    if isinstance(t, Abs):
        return ("lam", to_debruijn(t.body, (t.name,) + env))
    return ("app", to_debruijn(t.fun, env), to_debruijn(t.arg, env))


def alpha_eq(t1: Term, t2: Term) -> bool:
    return to_debruijn(t1) == to_debruijn(t2)


# -- reference evaluator -----------------------------------------------------


def _fresh(avoid: set, base: str) -> str:
    stem = base.rstrip("0123456789") or "v"
    for k in itertools.count(1):
        name = f"{stem}{k}"
        if name not in avoid:
            return name


def subst(t: Term, x: str, s: Term, fv_s: frozenset = None) -> Term:
    """Capture-avoiding ``t[x := s]``."""
    if fv_s is None:
        fv_s = free_vars(s)
    if isinstance(t, Var):
        return s if t.name == x else t
    if isinstance(t, App):
        return App(subst(t.fun, x, s, fv_s), subst(t.arg, x, s, fv_s))
    if t.name == x:
        return t
    fv_body = free_vars(t.body)
    if x not in fv_body:
        return t
    if t.name in fv_s:
        z = _fresh(set(fv_s) | set(fv_body) | {x}, t.name)
        return Abs(z, subst(subst(t.body, t.name, Var(z)), x, s, fv_s))
    return Abs(t.name, subst(t.body, x, s, fv_s))


def step(t: Term):
    """One leftmost-outermost beta step, or None at normal form."""
    if isinstance(t, App):
        if isinstance(t.fun, Abs):
            return subst(t.fun.body, t.fun.name, t.arg)
        f = step(t.fun)
        if f is not None:
            return App(f, t.arg)
        a = step(t.arg)
        if a is not None:
            return App(t.fun, a)
        return None
    if isinstance(t, Abs):
        b = step(t.body)
        return None if b is None else Abs(t.name, b)
    return None


def reference_eval(t: Term, fuel: int = 10000, max_size: int = None) -> tuple[Term, Status, int]:
    """Normal-order reduction. Returns ``(term, status, steps_taken)``.

    ``max_size`` optionally bounds intermediate term size; exceeding it
    counts as running out of fuel.
    """
    steps = 0
    while True:
        nxt = step(t)
        if nxt is None:
            return t, Status.NORMAL, steps
        if steps >= fuel or (max_size is not None and size(nxt) > max_size):
            return t, Status.FUEL_EXHAUSTED, steps
        t = nxt
        steps += 1


def eta_step(t: Term):
    """One leftmost eta contraction ``\\x.(f x) -> f`` with x not free in f."""
    if isinstance(t, Abs):
        b = t.body
        if isinstance(b, App) and b.arg == Var(t.name) and t.name not in free_vars(b.fun):
            return b.fun
        inner = eta_step(b)
        return None if inner is None else Abs(t.name, inner)
    if isinstance(t, App):
        f = eta_step(t.fun)
        if f is not None:
            return App(f, t.arg)
        a = eta_step(t.arg)
        return None if a is None else App(t.fun, a)
    return None


# -- a few standard combinators ----------------------------------------------


def church(n: int) -> Term:
    body: Term = Var("x")
    for _ in range(n):
        body = App(Var("f"), body)
    return Abs("f", Abs("x", body))


def apply(*terms: Term) -> Term:
    t = terms[0]
    for a in terms[1:]:
        t = App(t, a)
    return t


I = parse_term(r"\x.x")
K = parse_term(r"\x.\y.x")
S = parse_term(r"\x.\y.\z.x z (y z)")
SUCC = parse_term(r"\n.\f.\x.f (n f x)")
PLUS = parse_term(r"\m.\n.\f.\x.m f (n f x)")
TIMES = parse_term(r"\m.\n.\f.m (n f)")
OMEGA = parse_term(r"(\x.x x) (\x.x x)")
