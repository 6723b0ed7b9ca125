import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glc.dot import to_dot
from glc.gen import random_graph
from glc.glf import ParseError, emit_glf, parse_glf
from glc.graph import (
    Graph,
    GraphError,
    Kind,
    Leaf,
    Port,
    build_graph,
    leaves_partition,
    splice,
    validate,
)
from glc.iso import is_isomorphic
from glc.lamgraph import encode_term
from glc.match import extract_match, find_matches
from glc.moves import REDEX_PATTERN
from glc.terms import parse_term

IDENTITY = [("L1", "LAM")], [("L1.vout", "L1.in"), ("L1.aout", "out:r")]


def identity():
    return build_graph(*IDENTITY)


def renamed(g: Graph, prefix: str = "Z") -> Graph:
    """The same graph with every node id replaced."""
    ids = {n: f"{prefix}{k}" for k, n in enumerate(g.sorted_nodes(), 1)}
    nodes = [(ids[n], g.kind(n), g.nodes[n].decoration) for n in g.nodes]

    def ep(e):
        return Port(ids[e.node], e.role) if isinstance(e, Port) else e

    edges = [(ep(s), ep(d)) for s, d in g.edges.values()]
    return build_graph(nodes, edges, g.loops)


class TestBuildAndValidate:
    def test_identity_shape_is_valid(self):
        g = identity()
        assert validate(g) == []
        assert leaves_partition(g) == (set(), {"r"})

    def test_port_used_twice_is_rejected(self):
        with pytest.raises(GraphError, match="duplicate port use"):
            build_graph([("L1", "LAM")], [("L1.vout", "L1.in"), ("in:a", "L1.in"), ("L1.aout", "out:r")])

    def test_bare_strand(self):
        g = build_graph([], [("in:a", "out:b")])
        assert validate(g) == []
        assert leaves_partition(g) == ({"a"}, {"b"})

    def test_edge_into_output_port(self):
        with pytest.raises(GraphError, match="direction mismatch"):
            build_graph([("L1", "LAM")], [("in:a", "L1.vout")])

    def test_unknown_role(self):
        with pytest.raises(GraphError, match="unknown role"):
            build_graph([("L1", "LAM")], [("in:a", "L1.fin")])

    def test_dangling_port_is_an_error_not_a_leaf(self):
        with pytest.raises(GraphError) as info:
            build_graph([("A1", "APP")], [("in:f", "A1.fin"), ("A1.out", "out:r")])
        assert any("dangling port A1.ain" in v for v in info.value.violations)

    def test_validate_reports_dangling_port(self):
        g = Graph()
        g._add_node(Kind.APPLICATION, node_id="A1")
        g._add_edge(Leaf("in", "f"), Port("A1", "fin"))
        g._add_edge(Port("A1", "out"), Leaf("out", "r"))
        assert validate(g) == ["dangling port A1.ain"]

    def test_loops_without_nodes_are_legal(self):
        assert validate(build_graph([], [], loops=2)) == []

    def test_dilation_needs_a_decoration(self):
        with pytest.raises(GraphError, match="decoration"):
            build_graph([("D1", "DIL")], [("in:a", "D1.in1"), ("in:b", "D1.in2"), ("D1.out", "out:c")])

    def test_port_counts(self):
        assert [len(k.roles) for k in Kind] == [3, 3, 3, 1, 3]

    def test_fresh_ids_are_smallest_unused(self):
        g = identity()
        assert g.fresh_node_id(Kind.LAMBDA) == "L2"
        g._add_node(Kind.LAMBDA, node_id="L3")
        assert g._add_node(Kind.LAMBDA) == "L2"
        assert g._add_node(Kind.LAMBDA) == "L4"


class TestSplice:
    def test_distinct_edges_join(self):
        g = build_graph([("F1", "FO")], [("in:a", "F1.in"), ("F1.lout", "out:b"), ("F1.rout", "out:c")])
        up, down = g.edge_at(Leaf("in", "a")), g.edge_at(Leaf("out", "b"))
        h = splice(g, up, down)
        assert (Leaf("in", "a"), Leaf("out", "b")) in h.edges.values()
        assert len(h.edges) == len(g.edges) - 1

    def test_same_edge_makes_a_loop(self):
        g = identity()
        e = g.port_edge("L1", "vout")
        h = splice(g, e, e)
        assert h.loops == g.loops + 1
        assert len(h.edges) == len(g.edges) - 1

    def test_missing_edge(self):
        with pytest.raises(GraphError):
            splice(identity(), 99, 99)


class TestGlf:
    TEXT = "node L1 LAM\nedge L1.aout out:root\nedge L1.vout L1.in\n"

    def test_parse_identity(self):
        g = parse_glf(self.TEXT)
        assert is_isomorphic(g, encode_term(parse_term(r"\x.x"))) is not None

    def test_emit_is_canonical(self):
        g = parse_glf("# comment\nnode L1 LAM\nedge L1.aout out:root  # trailing\nedge L1.vout L1.in\n")
        assert emit_glf(g) == self.TEXT
        assert emit_glf(parse_glf(emit_glf(g))) == emit_glf(g)

    def test_direction_error_reports_position(self):
        with pytest.raises(ParseError) as info:
            parse_glf("node L1 LAM\nedge in:a L1.vout\n")
        assert info.value.line == 2 and "direction" in str(info.value)

    def test_edge_before_node(self):
        with pytest.raises(ParseError, match="unknown node"):
            parse_glf("edge L1.aout out:root\nnode L1 LAM\n")

    def test_unknown_kind(self):
        with pytest.raises(ParseError, match="unknown node kind"):
            parse_glf("node X1 FOO\n")

    def test_validation_errors_surface(self):
        with pytest.raises(GraphError, match="dangling"):
            parse_glf("node A1 APP\n")

    def test_loops_record(self):
        g = parse_glf("loops 2\n")
        assert g.loops == 2 and emit_glf(g) == "loops 2\n"

    @settings(max_examples=300, deadline=None, derandomize=True)
    @given(st.integers(0, 2**32))
    def test_round_trip_random(self, seed):
        g = random_graph(random.Random(seed), max_nodes=12)
        assert validate(g) == []
        assert is_isomorphic(parse_glf(emit_glf(g)), g) is not None


class TestIso:
    def test_reflexive(self):
        g = encode_term(parse_term(r"\f.\x.f (f x)"))
        m = is_isomorphic(g, g)
        assert m == {n: n for n in g.nodes}

    def test_alpha_irrelevance(self):
        assert is_isomorphic(encode_term(parse_term(r"\x.x")), encode_term(parse_term(r"\y.y"))) is not None

    def test_redex_versus_normal_form(self):
        assert is_isomorphic(encode_term(parse_term(r"(\x.x) y")), encode_term(parse_term("y"))) is None

    def test_loops_and_leaves_matter(self):
        g = identity()
        h = g.copy()
        h.loops = 1
        assert is_isomorphic(g, h) is None
        assert is_isomorphic(build_graph([], [("in:a", "out:b")]), build_graph([], [("in:a", "out:c")])) is None

    def test_decorations_matter(self):
        def dil(label):
            return build_graph([("D1", "DIL", label)], [("in:a", "D1.in1"), ("in:b", "D1.in2"), ("D1.out", "out:c")])

        assert is_isomorphic(dil("x"), dil("x")) is not None
        assert is_isomorphic(dil("x"), dil("y")) is None

    def test_closed_components(self):
        g = build_graph(
            [("L1", "LAM"), ("L2", "LAM"), ("T1", "TOP")],
            [("L1.vout", "L1.in"), ("L1.aout", "L2.in"), ("L2.vout", "T1.in"), ("L2.aout", "out:r")],
        )
        assert is_isomorphic(g, renamed(g)) is not None

    @settings(max_examples=200, deadline=None, derandomize=True)
    @given(st.integers(0, 2**32))
    def test_equivalence_properties(self, seed):
        rng = random.Random(seed)
        g = random_graph(rng, max_nodes=10)
        h = renamed(g)
        assert is_isomorphic(g, h) is not None
        assert is_isomorphic(h, g) is not None
        other = random_graph(rng, max_nodes=10)
        assert (is_isomorphic(g, other) is None) == (is_isomorphic(other, g) is None)


class TestMatch:
    def test_single_redex(self):
        g = encode_term(parse_term(r"(\x.x) y"))
        assert len(find_matches(g, REDEX_PATTERN)) == 1

    def test_no_redex_in_a_strand(self):
        assert find_matches(build_graph([], [("in:a", "out:b")]), REDEX_PATTERN) == []

    def test_reextraction_is_isomorphic(self):
        g = encode_term(parse_term(r"(\x.x x) ((\y.y) (\z.z))"))
        matches = find_matches(g, REDEX_PATTERN)
        assert len(matches) == 2
        for m in matches:
            assert is_isomorphic(extract_match(g, REDEX_PATTERN, m), REDEX_PATTERN) is not None

    def test_disconnected_pattern_rejected(self):
        pattern = build_graph(
            [("L", "LAM"), ("M", "LAM")],
            [("L.vout", "L.in"), ("L.aout", "out:1"), ("M.vout", "M.in"), ("M.aout", "out:2")],
        )
        with pytest.raises(GraphError, match="connected"):
            find_matches(identity(), pattern)


class TestDot:
    def test_identity(self):
        text = to_dot(identity())
        assert text.count("shape=ellipse") == 1
        assert text.count("shape=box") == 1
        assert sum(" -> " in line for line in text.splitlines()) == 2
        assert '"L1" -> "L1" [label="vout->in"]' in text

    def test_loops_only(self):
        text = to_dot(build_graph([], [], loops=1))
        assert "// loops: 1" in text and "->" not in text

    def test_deterministic(self):
        g = encode_term(parse_term(r"\f.\x.f (f x)"))
        assert to_dot(g) == to_dot(g.copy())
