"""The ``glc`` command line.

Exit status: 0 on success, 1 on a domain error or a negative answer
(not isomorphic, not a lambda graph, a failed self-check), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path

from .diagram import emit_pd, parse_pd
from .dot import to_dot
from .glf import emit_glf, parse_glf
from .iso import is_isomorphic
from .knots import decode_to_pd, encode_diagram
from .lamgraph import encode_term, is_lambda_graph, readback, reduce_graph
from .moves import MoveTrace
from .script import apply_script
from .terms import Status, parse_term

DEFAULT_FUEL = 10000


class DomainError(Exception):
    pass


def _fuel(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("fuel must be non-negative")
    return value


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="glc", description="Graphic lambda calculus rewriting engine.")
    sub = p.add_subparsers(dest="sector", required=True)

    def common(q, emits, default):
        q.add_argument("--emit", choices=emits, default=default, help=f"output format (default {default})")
        q.add_argument("--out", help="write output to this file instead of stdout")

    lam = sub.add_parser("lambda", help="lambda terms and lambda graphs")
    lam.add_argument("action", choices=["encode", "check", "reduce"])
    src = lam.add_mutually_exclusive_group(required=True)
    src.add_argument("--term", help="term text, e.g. '(\\x.x) y'")
    src.add_argument("--in", dest="infile", help="file holding a term, or a graph if it ends in .glf")
    lam.add_argument("--fuel", type=_fuel, default=DEFAULT_FUEL, help=f"beta-step budget (default {DEFAULT_FUEL})")
    common(lam, ["term", "glf", "dot", "trace"], None)

    knot = sub.add_parser("knot", help="tangle and link diagrams")
    knot.add_argument("action", choices=["encode", "apply", "decode"])
    knot.add_argument("--pd", help="PD diagram file (encode, apply)")
    knot.add_argument("--in", dest="infile", help="GLF graph file (decode)")
    knot.add_argument("--script", help="MoveScript file (apply)")
    common(knot, ["glf", "dot", "pd", "trace"], None)

    graph = sub.add_parser("graph", help="raw graphs")
    graph.add_argument("action", choices=["iso", "render", "run"])
    graph.add_argument("files", nargs="+", metavar="FILE")
    graph.add_argument("--script", help="MoveScript file (run)")
    common(graph, ["glf", "dot", "trace"], None)

    check = sub.add_parser("selfcheck", help="run the acceptance suite")
    check.add_argument("--filter", help="only checks whose tag, name or number matches")
    return p


def _usage(p: argparse.ArgumentParser, args) -> None:
    """Flag combinations argparse cannot express; checked before any file is read."""
    if args.sector == "knot":
        need = {"encode": ["pd"], "apply": ["pd", "script"], "decode": ["infile"]}[args.action]
        for flag in need:
            if getattr(args, flag) is None:
                p.error(f"knot {args.action} needs --{'in' if flag == 'infile' else flag}")
        if args.emit == "trace" and args.action != "apply":
            p.error("--emit trace is only meaningful for knot apply")
    elif args.sector == "graph":
        want = 2 if args.action == "iso" else 1
        if len(args.files) != want:
            p.error(f"graph {args.action} takes {want} file(s)")
        if args.action == "run" and args.script is None:
            p.error("graph run needs --script")
        if args.action != "run" and args.emit == "trace":
            p.error("--emit trace is only meaningful for graph run")
    elif args.sector == "lambda":
        if args.emit == "trace" and args.action != "reduce":
            p.error("--emit trace is only meaningful for lambda reduce")


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc.strerror}") from None


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    target = Path(out)
    fd, tmp = tempfile.mkstemp(dir=target.parent or Path("."), prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _render_graph(g, fmt: str, trace: MoveTrace | None = None) -> str:
    if fmt == "dot":
        return to_dot(g)
    if fmt == "trace":
        return (trace or MoveTrace()).to_script() + f"# {(trace or MoveTrace()).summary()}\n"
    text = emit_glf(g)
    if trace is not None:
        text += f"# {trace.summary()}\n"
    return text


def _lambda(args) -> tuple[str, int]:
    if args.term is not None:
        graph_input, text = False, args.term
    else:
        text = _read(args.infile)
        graph_input = args.infile.endswith(".glf")
    if graph_input:
        g, term = parse_glf(text), None
    else:
        term = parse_term(text.strip())
        g = encode_term(term)

    if args.action == "encode":
        fmt = args.emit or "glf"
        return (f"{term}\n" if fmt == "term" else _render_graph(g, fmt)), 0
    if args.action == "check":
        report = is_lambda_graph(g)
        if report:
            return "LAMBDA_GRAPH\n", 0
        lines = ["NOT_LAMBDA_GRAPH"] + [f"  {node}: {why}" for node, why in report.violations]
        return "\n".join(lines) + "\n", 1

    result, trace, status = reduce_graph(g, args.fuel)
    fmt = args.emit or "term"
    if fmt == "term":
        if status is Status.FUEL_EXHAUSTED:
            return "FUEL_EXHAUSTED\n", 0
        return f"{readback(result)}\n", 0
    text = _render_graph(result, fmt, trace if fmt != "dot" else None)
    if status is Status.FUEL_EXHAUSTED:
        text += "FUEL_EXHAUSTED\n" if fmt == "dot" else "# FUEL_EXHAUSTED\n"
    return text, 0


def _knot(args) -> tuple[str, int]:
    if args.action == "decode":
        g = parse_glf(_read(args.infile))
        return emit_pd(decode_to_pd(g)), 0
    diagram = parse_pd(_read(args.pd))
    g, binding = encode_diagram(diagram)
    trace = None
    if args.action == "apply":
        g, trace = apply_script(g, _read(args.script))
        binding = binding.after(trace)
    fmt = args.emit or "glf"
    if fmt == "pd":
        text = emit_pd(decode_to_pd(g, binding))
        return text + (f"# {trace.summary()}\n" if trace is not None else ""), 0
    return _render_graph(g, fmt, trace), 0


def _graph(args) -> tuple[str, int]:
    graphs = [parse_glf(_read(f)) for f in args.files]
    if args.action == "iso":
        mapping = is_isomorphic(*graphs)
        if mapping is None:
            return "NOT ISOMORPHIC\n", 1
        lines = ["ISOMORPHIC"] + [f"{a} -> {b}" for a, b in sorted(mapping.items())]
        return "\n".join(lines) + "\n", 0
    if args.action == "render":
        return _render_graph(graphs[0], args.emit or "dot"), 0
    g, trace = apply_script(graphs[0], _read(args.script))
    return _render_graph(g, args.emit or "glf", trace), 0


def _selfcheck(args) -> tuple[str, int]:
    from .selfcheck import run

    results = run(args.filter)
    if not results:
        raise DomainError(f"no check matches {args.filter!r}")
    lines = [r.line() for r in results]
    passed = sum(r.ok for r in results)
    lines.append(f"{passed}/{len(results)} checks passed")
    return "\n".join(lines) + "\n", 0 if passed == len(results) else 1


def main(argv=None) -> int:
    p = _parser()
    args = p.parse_args(argv)
    _usage(p, args)
    handler = {"lambda": _lambda, "knot": _knot, "graph": _graph, "selfcheck": _selfcheck}[args.sector]
    try:
        text, code = handler(args)
        _write(text, getattr(args, "out", None))
    except (DomainError, ValueError) as exc:
        print(f"glc: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"glc: error: {exc}", file=sys.stderr)
        return 1
    return code


if __name__ == "__main__":
    sys.exit(main())
