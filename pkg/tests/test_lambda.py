import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glc.gen import random_term
from glc.graph import APPLICATION, FANOUT, LAMBDA, TERMINATION, Leaf, Port, build_graph
from glc.iso import is_isomorphic
from glc.lamgraph import LambdaGraphError, encode_term, is_lambda_graph, normalize_term, readback, reduce_graph
from glc.moves import MoveKind, ext1
from glc.selfcheck import check_committed_corpus, data_dir, eta_instances, eta_site
from glc.terms import (
    OMEGA,
    PLUS,
    SUCC,
    TIMES,
    Abs,
    App,
    Status,
    TermSyntaxError,
    Var,
    alpha_eq,
    apply,
    church,
    parse_term,
    reference_eval,
    step,
    subst,
)


def kinds(g):
    return Counter(g.kind(n) for n in g.nodes)


class TestParse:
    def test_identity(self):
        assert parse_term(r"\x.x") == Abs("x", Var("x"))

    def test_omega(self):
        dup = Abs("x", App(Var("x"), Var("x")))
        assert parse_term(r"(\x.x x)(\x.x x)") == App(dup, dup)

    def test_church_two(self):
        assert parse_term(r"\f.\x.f (f x)") == church(2)

    def test_application_is_left_associative(self):
        assert parse_term("a b c") == App(App(Var("a"), Var("b")), Var("c"))

    def test_body_extends_right(self):
        assert parse_term(r"\x.a x \y.y") == Abs("x", App(App(Var("a"), Var("x")), Abs("y", Var("y"))))

    def test_unicode_lambda(self):
        assert parse_term("λx.x") == parse_term(r"\x.x")

    @pytest.mark.parametrize("text, position", [(r"\x x", 3), ("(a b", 4), ("a )", 2), ("", 0), (r"\.x", 1)])
    def test_errors_carry_positions(self, text, position):
        with pytest.raises(TermSyntaxError) as info:
            parse_term(text)
        assert info.value.position == position

    @pytest.mark.parametrize("text", [r"\x.x", r"\f.\x.f (f x)", r"(\x.x x) (\x.x x)", r"a (\x.x) b", r"\x.y (\z.z) x"])
    def test_printing_round_trips(self, text):
        t = parse_term(text)
        assert parse_term(str(t)) == t


class TestAlpha:
    def test_renamed_binder(self):
        assert alpha_eq(parse_term(r"\x.x"), parse_term(r"\y.y"))

    def test_different_binder_used(self):
        assert not alpha_eq(parse_term(r"\x.\y.x"), parse_term(r"\x.\y.y"))

    def test_free_names_matter(self):
        assert not alpha_eq(Var("x"), Var("y"))

    def test_shadowing(self):
        assert alpha_eq(parse_term(r"\x.\x.x"), parse_term(r"\a.\b.b"))

    def test_substitution_avoids_capture(self):
        t = subst(parse_term(r"\y.x y"), "x", Var("y"))
        assert alpha_eq(t, parse_term(r"\z.y z"))


class TestReferenceEval:
    def test_identity(self):
        assert reference_eval(parse_term(r"(\x.x) y"))[:2] == (Var("y"), Status.NORMAL)

    def test_plus_two_three(self):
        nf, status, _ = reference_eval(apply(PLUS, church(2), church(3)))
        assert status is Status.NORMAL and alpha_eq(nf, church(5))

    def test_times(self):
        nf, _, _ = reference_eval(apply(TIMES, church(2), church(3)))
        assert alpha_eq(nf, church(6))

    def test_omega(self):
        _, status, steps = reference_eval(OMEGA, fuel=100)
        assert status is Status.FUEL_EXHAUSTED and steps == 100

    def test_normal_order_avoids_divergent_argument(self):
        nf, status, _ = reference_eval(apply(parse_term(r"\x.\y.y"), OMEGA))
        assert status is Status.NORMAL and alpha_eq(nf, parse_term(r"\y.y"))

    def test_size_cap(self):
        blowup = parse_term(r"(\x.x x x) (\x.x x x)")
        _, status, _ = reference_eval(blowup, fuel=1000, max_size=200)
        assert status is Status.FUEL_EXHAUSTED


class TestEncode:
    def test_identity(self):
        g = encode_term(parse_term(r"\x.x"))
        assert kinds(g) == {LAMBDA: 1}
        assert g.consumer("L1", "vout") == Port("L1", "in")
        assert g.consumer("L1", "aout") == Leaf("out", "root")

    def test_unused_binder_terminates(self):
        g = encode_term(parse_term(r"\x.\y.x"))
        assert kinds(g) == {LAMBDA: 2, TERMINATION: 1}
        inner = g.producer(g.nodes_of(TERMINATION)[0], "in").node
        outer = next(n for n in g.nodes_of(LAMBDA) if n != inner)
        assert g.consumer(outer, "vout") == Port(inner, "in")
        assert is_lambda_graph(g)
        assert alpha_eq(readback(g), parse_term(r"\x.\y.x"))

    def test_self_application(self):
        g = encode_term(parse_term(r"\x.x x"))
        assert kinds(g) == {LAMBDA: 1, FANOUT: 1, APPLICATION: 1}
        fan = g.nodes_of(FANOUT)[0]
        assert g.consumer("L1", "vout") == Port(fan, "in")
        assert {g.consumer(fan, "lout").role, g.consumer(fan, "rout").role} == {"fin", "ain"}

    def test_fanout_tree_size(self):
        g = encode_term(parse_term(r"\x.x x x x"))
        assert kinds(g)[FANOUT] == 3

    def test_free_variables_become_inputs(self):
        g = encode_term(parse_term("f (g f)"))
        assert g.in_leaves == {"f", "g"}
        assert g.out_leaves == {"root"}


class TestLambdaGraphCheck:
    def test_dilation_is_rejected(self):
        g = build_graph(
            [("L1", "LAM"), ("D1", "DIL", "e")],
            [("L1.vout", "D1.in1"), ("in:a", "D1.in2"), ("D1.out", "L1.in"), ("L1.aout", "out:root")],
        )
        report = is_lambda_graph(g)
        assert not report and any("D1" in str(v) for v in report.violations)

    def test_variable_escaping_to_output(self):
        g = build_graph(
            [("L1", "LAM")],
            [("in:a", "L1.in"), ("L1.vout", "out:x"), ("L1.aout", "out:root")],
        )
        report = is_lambda_graph(g)
        assert not report and report.violations[0][0] == "L1"

    def test_nested_binder_reaches_other_lambda(self):
        assert is_lambda_graph(encode_term(parse_term(r"\x.\y.x")))

    def test_reduce_rejects_non_lambda_graphs(self):
        g = build_graph([("L1", "LAM")], [("in:a", "L1.in"), ("L1.vout", "out:x"), ("L1.aout", "out:root")])
        with pytest.raises(LambdaGraphError):
            reduce_graph(g)


class TestReadback:
    def test_nested(self):
        t = parse_term(r"\x.\y.x")
        assert alpha_eq(readback(encode_term(t)), t)

    def test_sharing_is_unfolded(self):
        t = readback(encode_term(parse_term(r"\x.x x")))
        assert isinstance(t, Abs) and t.body == App(Var(t.name), Var(t.name))

    def test_after_reduction(self):
        g, _, status = reduce_graph(encode_term(parse_term(r"(\x.x) (\y.y)")))
        assert status is Status.NORMAL and alpha_eq(readback(g), parse_term(r"\y.y"))

    def test_binder_names_avoid_free_names(self):
        t = parse_term(r"\a.x1 a")
        assert alpha_eq(readback(encode_term(t)), t)


class TestReduce:
    def test_identity(self):
        g, trace, status = reduce_graph(encode_term(parse_term(r"(\x.x) y")))
        assert status is Status.NORMAL and trace.beta_count == 1
        assert is_isomorphic(g, encode_term(Var("y"))) is not None

    def test_omega_runs_out_of_fuel(self):
        _, trace, status = reduce_graph(encode_term(OMEGA), fuel=50)
        assert status is Status.FUEL_EXHAUSTED and trace.beta_count == 50

    @pytest.mark.parametrize("fuel", [0, 1, 7, 200])
    def test_divergence_is_contained(self, fuel):
        _, trace, status = reduce_graph(encode_term(OMEGA), fuel=fuel)
        assert status is Status.FUEL_EXHAUSTED and trace.beta_count == fuel

    def test_twice_successor_zero(self):
        t = apply(church(2), SUCC, church(0))
        nf, status, _ = normalize_term(t)
        assert status is Status.NORMAL and alpha_eq(nf, church(2))

    def test_arithmetic(self):
        nf, status, _ = normalize_term(apply(TIMES, church(3), church(3)))
        assert status is Status.NORMAL and alpha_eq(nf, church(9))

    def test_self_application_unshares(self):
        g, trace, status = reduce_graph(encode_term(parse_term(r"(\f.f f) (\x.x)")))
        assert status is Status.NORMAL
        assert trace.count(MoveKind.GLOBAL_FANOUT) >= 1
        assert is_isomorphic(g, encode_term(parse_term(r"\x.x"))) is not None

    def test_committed_corpus(self):
        assert check_committed_corpus(data_dir() / "lambda_corpus.txt") == []


terms = st.integers(0, 2**32).map(lambda seed: random_term(random.Random(seed), 6))


class TestProperties:
    @settings(max_examples=500, deadline=None, derandomize=True)
    @given(terms)
    def test_encoding_soundness(self, t):
        g = encode_term(t)
        assert is_lambda_graph(g)
        assert alpha_eq(readback(g), t)

    @settings(max_examples=300, deadline=None, derandomize=True)
    @given(terms)
    def test_simulation(self, t):
        want, status, _ = reference_eval(t, 200, max_size=2000)
        if status is not Status.NORMAL:
            return
        got, status, _ = normalize_term(t)
        assert status is Status.NORMAL and alpha_eq(got, want)

    @settings(max_examples=300, deadline=None, derandomize=True)
    @given(terms)
    def test_one_step_correspondence(self, t):
        for _ in range(3):
            expected = step(t)
            if expected is None or len(str(expected)) > 2000:
                return
            g, trace, _ = reduce_graph(encode_term(t), fuel=1)
            assert trace.beta_count == 1
            got = readback(g)
            assert alpha_eq(got, expected)
            t = got

    def test_eta(self):
        for t, f in eta_instances(random.Random(3), 50):
            g = encode_term(t)
            assert alpha_eq(readback(ext1(g, *eta_site(g))), f)
