import random

import pytest

from glc.diagram import (
    BRAIDS,
    DiagramError,
    braid_diagram,
    emit_pd,
    equal_up_to_relabeling,
    fixture,
    kink,
    parse_pd,
)
from glc.gen import random_braid
from glc.graph import LAMBDA, Leaf, build_graph, validate
from glc.iso import is_isomorphic
from glc.knots import (
    CrossingBinding,
    Sector,
    classify,
    connecting_edges,
    decode_to_pd,
    detect_crossings,
    encode_diagram,
    kink_chiralities,
    reidemeister_r1,
    reidemeister_r2a,
    reidemeister_r3a,
)
from glc.lamgraph import encode_term
from glc.moves import MoveError, beta_expand, beta_reduce, eliminate_loop, find_beta_redexes
from glc.selfcheck import random_tangle
from glc.terms import parse_term

CROSSING = "bin a c\nbout b d\nx + a b c d\n"


def iso(a, b):
    return is_isomorphic(a, b) is not None


def encoded(name):
    return encode_diagram(fixture(name))[0]


def strand_ends(g):
    """IN leaf -> OUT leaf reached by following strand edges through gates."""
    through = {"in": "vout", "ain": "out"}
    ends = {}
    for name in g.in_leaves:
        ep = g.edges[g.edge_at(Leaf("in", name))][1]
        while not isinstance(ep, Leaf):
            ep = g.edges[g.port_edge(ep.node, through[ep.role])][1]
        ends[name] = ep.name
    return ends


class TestParsePd:
    def test_single_crossing(self):
        d = parse_pd(CROSSING)
        assert len(d.crossings) == 1 and d.crossings[0].sign == 1
        assert d.boundary_in == ["a", "c"] and d.boundary_out == ["b", "d"]

    def test_trefoil(self):
        d = fixture("trefoil")
        assert len(d.crossings) == 3 and d.is_link
        assert len(detect_crossings(encode_diagram(d)[0])) == 3

    def test_arc_used_three_times(self):
        with pytest.raises(DiagramError, match="used"):
            parse_pd("bin c\nbout b\nx + a a a b\n")

    def test_loose_end(self):
        with pytest.raises(DiagramError):
            parse_pd("bin a\nx + a b c d\n")

    def test_bad_sign(self):
        with pytest.raises(DiagramError) as info:
            parse_pd("# header\nx * a b c d\n")
        assert info.value.line == 2

    def test_emit_round_trip(self):
        for name in BRAIDS:
            d = fixture(name)
            assert equal_up_to_relabeling(parse_pd(emit_pd(d)), d)


class TestEncode:
    def test_single_crossing(self):
        g, binding = encode_diagram(parse_pd(CROSSING))
        assert len(g.nodes) == 2 and len(g.edges) == 5
        assert len(g.in_leaves) + len(g.out_leaves) == 4
        assert binding.signs == {("L1", "A1"): 1}

    def test_macro_wiring(self):
        g, _ = encode_diagram(parse_pd(CROSSING))
        assert g.producer("L1", "in") == Leaf("in", "a")
        assert g.consumer("L1", "vout") == Leaf("out", "b")
        assert g.producer("A1", "ain") == Leaf("in", "c")
        assert g.consumer("A1", "out") == Leaf("out", "d")

    def test_trefoil(self):
        g = encoded("trefoil")
        assert len(g.nodes) == 6
        assert len(connecting_edges(g)) == 3 and len(g.edges) == 9
        assert not g.in_leaves and not g.out_leaves

    def test_unknot(self):
        g, _ = encode_diagram(parse_pd("circles 1\n"))
        assert not g.nodes and g.loops == 1

    def test_detect_on_terms_and_strands(self):
        assert detect_crossings(encode_term(parse_term(r"(\x.x) y"))) == [("L1", "A1")]
        assert detect_crossings(build_graph([], [("in:a", "out:a")])) == []

    def test_redexes_are_crossings(self):
        for name in BRAIDS:
            g = encoded(name)
            assert set(find_beta_redexes(g)) == connecting_edges(g)


class TestDecode:
    @pytest.mark.parametrize("name", sorted(BRAIDS))
    def test_round_trip(self, name):
        d = fixture(name)
        g, binding = encode_diagram(d)
        assert equal_up_to_relabeling(decode_to_pd(g, binding), d)

    def test_single_crossing(self):
        d = parse_pd(CROSSING)
        assert equal_up_to_relabeling(decode_to_pd(*encode_diagram(d)), d)

    def test_missing_binding(self):
        g, binding = encode_diagram(fixture("trefoil"))
        partial = CrossingBinding({p: s for p, s in binding.signs.items() if p[0] != "L2"})
        with pytest.raises(MoveError):
            decode_to_pd(g, partial)

    def test_unbound_signs_are_unknown(self):
        d = decode_to_pd(encode_diagram(parse_pd(CROSSING))[0])
        assert d.crossings[0].sign is None and "x ?" in emit_pd(d)

    def test_not_a_tangle(self):
        with pytest.raises(MoveError):
            decode_to_pd(encode_term(parse_term(r"\x.x")))

    def test_random_round_trips(self):
        rng = random.Random(5)
        for _ in range(100):
            d = random_tangle(rng)
            g, binding = encode_diagram(d)
            assert equal_up_to_relabeling(decode_to_pd(g, binding), d)


class TestClassify:
    def test_sectors(self):
        assert classify(encoded("trefoil")) is Sector.LINK
        assert classify(encode_diagram(parse_pd(CROSSING))[0]) is Sector.TANGLE
        assert classify(encode_term(parse_term(r"\x.x"))) is Sector.NEITHER

    def test_empty_and_strand(self):
        assert classify(build_graph([], [], loops=2)) is Sector.LINK
        assert classify(build_graph([], [("in:a", "out:b")])) is Sector.TANGLE

    def test_fanout_is_not_a_tangle(self):
        g = build_graph([("F1", "FO")], [("in:a", "F1.in"), ("F1.lout", "out:b"), ("F1.rout", "out:c")])
        assert classify(g) is Sector.NEITHER

    def test_closure_under_moves(self):
        rng = random.Random(9)
        for _ in range(200):
            g = encode_diagram(random_tangle(rng))[0]
            for site in find_beta_redexes(g):
                assert classify(beta_reduce(g, site)[0]) is not Sector.NEITHER
            strand = sorted(set(g.edges) - connecting_edges(g))
            if strand:
                h, _ = beta_expand(g, rng.choice(strand), rng.choice(strand))
                assert classify(h) is not Sector.NEITHER
            if g.loops:
                assert classify(eliminate_loop(g)) is not Sector.NEITHER


class TestSmoothing:
    def test_single_crossing(self):
        g, _ = encode_diagram(parse_pd(CROSSING))
        assert strand_ends(beta_reduce(g, "L1")[0]) == {"a": "d", "c": "b"}

    def test_random_braids(self):
        rng = random.Random(21)
        checked = 0
        for _ in range(100):
            n, word = random_braid(rng, 4, 6)
            g, _ = encode_diagram(braid_diagram(n, word))
            for lam, app in detect_crossings(g):
                if kink_chiralities(g, lam):
                    continue
                over_in = g.producer(lam, "in")
                under_in = g.producer(app, "ain")
                over_out = g.consumer(lam, "vout")
                under_out = g.consumer(app, "out")
                h, _ = beta_reduce(g, lam)
                assert h.edges[h.edge_at(over_in)][1] == under_out
                assert h.edges[h.edge_at(under_in)][1] == over_out
                checked += 1
        assert checked > 100


class TestR1:
    @pytest.mark.parametrize("chirality", ["A", "B"])
    def test_remove(self, chirality):
        g, _ = encode_diagram(kink(chirality))
        h, trace = reidemeister_r1(g, "L1", chirality)
        assert iso(h, build_graph([], [("in:a", "out:b")]))
        assert trace.beta_count == 1 and trace.loops_eliminated == 1

    def test_wrong_chirality(self):
        g, _ = encode_diagram(kink("A"))
        with pytest.raises(MoveError, match="chirality"):
            reidemeister_r1(g, "L1", "B")

    def test_not_a_kink(self):
        g, _ = encode_diagram(parse_pd(CROSSING))
        with pytest.raises(MoveError, match="not a kink"):
            reidemeister_r1(g, "L1", "A")

    @pytest.mark.parametrize("chirality", ["A", "B"])
    def test_insert_matches_fixture(self, chirality):
        strand = build_graph([], [("in:a", "out:b")])
        h, trace = reidemeister_r1(strand, "in:a", chirality, "insert")
        assert iso(h, encode_diagram(kink(chirality))[0]) and trace.beta_count == 1
        back, _ = reidemeister_r1(h, "L1", chirality)
        assert iso(back, strand)

    def test_insert_rejects_connecting_edge(self):
        g, _ = encode_diagram(parse_pd(CROSSING))
        with pytest.raises(MoveError):
            reidemeister_r1(g, "L1.aout", "A", "insert")

    def test_kink_on_closed_circle(self):
        g, _ = encode_diagram(parse_pd("x + b k k b\n"))
        assert kink_chiralities(g, "L1") == {"A", "B"}
        h, trace = reidemeister_r1(g, "L1", "A")
        assert not h.nodes and h.loops == 1
        assert trace.beta_count == 1 and trace.loops_eliminated == 1


class TestR2a:
    def test_remove(self):
        h, trace = reidemeister_r2a(encoded("r2a-lhs"), "L1")
        assert iso(h, encoded("r2a-rhs")) and trace.beta_count == 2
        assert strand_ends(h) == {n: n.replace("i", "o") for n in h.in_leaves}

    def test_insert_then_remove(self):
        rhs = encoded("r2a-rhs")
        h, trace = reidemeister_r2a(rhs, ("in:i1", "in:i2"), "insert")
        assert iso(h, encoded("r2a-lhs")) and trace.beta_count == 2
        lam = next(n for n in h.nodes_of(LAMBDA) if reidemeister_applicable(h, n))
        back, trace = reidemeister_r2a(h, lam)
        assert iso(back, rhs) and trace.beta_count == 2

    def test_pattern_mismatch(self):
        with pytest.raises(MoveError):
            reidemeister_r2a(encoded("trefoil"), "L1")

    def test_needs_distinct_edges(self):
        with pytest.raises(MoveError):
            reidemeister_r2a(encoded("r2a-rhs"), ("in:i1", "in:i1"), "insert")


def reidemeister_applicable(g, lam):
    try:
        reidemeister_r2a(g, lam)
    except MoveError:
        return False
    return True


def r3a_site(g, inverse):
    for lam in g.nodes_of(LAMBDA):
        try:
            reidemeister_r3a(g, lam, inverse)
        except MoveError:
            continue
        return lam
    raise AssertionError("no R3a site")


class TestR3a:
    def test_lhs_to_rhs(self):
        h, trace = reidemeister_r3a(encoded("r3a-lhs"), "L1")
        assert iso(h, encoded("r3a-rhs")) and trace.beta_count == 6

    def test_there_and_back(self):
        g = encoded("r3a-lhs")
        h, _ = reidemeister_r3a(g, "L1")
        back, trace = reidemeister_r3a(h, r3a_site(h, True), inverse=True)
        assert iso(back, g) and trace.beta_count == 6

    def test_twice_round(self):
        g = encoded("r3a-lhs")
        for _ in range(2):
            h, _ = reidemeister_r3a(g, r3a_site(g, False))
            g, _ = reidemeister_r3a(h, r3a_site(h, True), inverse=True)
        assert iso(g, encoded("r3a-lhs"))

    def test_pattern_mismatch(self):
        with pytest.raises(MoveError, match="no R3a"):
            reidemeister_r3a(encoded("trefoil"), "L1")

    def test_embedded_in_a_larger_braid(self):
        g, _ = encode_diagram(braid_diagram(4, [3, 1, 2, -1, -3]))
        want, _ = encode_diagram(braid_diagram(4, [3, -2, 1, 2, -3]))
        h, trace = reidemeister_r3a(g, "L2")
        assert iso(h, want) and trace.beta_count == 6 and validate(h) == []


class TestBinding:
    def test_after_follows_the_trace(self):
        g, binding = encode_diagram(fixture("r2a-lhs"))
        h, trace = reidemeister_r2a(g, "L1")
        assert binding.after(trace).signs == {}
        g2, trace2 = reidemeister_r2a(h, ("in:i1", "in:i2"), "insert")
        signs = binding.after(trace).after(trace2).signs
        assert set(signs.values()) == {None} and len(signs) == 2
        assert set(signs) == set(detect_crossings(g2))

    def test_ids_reused_after_deletion(self):
        g, binding = encode_diagram(fixture("r3a-lhs"))
        h, trace = reidemeister_r3a(g, "L1")
        after = binding.after(trace)
        assert set(after.signs) == set(detect_crossings(h))
        assert set(after.signs.values()) == {None}
        assert emit_pd(decode_to_pd(h, after)).count("x ?") == 3
