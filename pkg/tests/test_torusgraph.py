import random

import pytest

from isingdimer.torusgraph import (
    GraphError,
    ParseError,
    TorusGraph,
    parse_torus_graph,
    serialize_torus_graph,
)

from conftest import DIMER_FIXTURE, ISING_FIXTURE


def honeycomb(n=1, m=1):
    g = TorusGraph()
    for i in range(n):
        for j in range(m):
            g.add_vertex(f"u{i}{j}", "n")
            g.add_vertex(f"v{i}{j}", "n")
    for i in range(n):
        for j in range(m):
            g.add_edge(f"a{i}{j}", f"u{i}{j}", f"v{i}{j}", 0, 0)
            g.add_edge(f"b{i}{j}", f"u{i}{j}", f"v{(i + 1) % n}{j}", 1 if i + 1 == n else 0, 0)
            g.add_edge(f"c{i}{j}", f"u{i}{j}", f"v{i}{(j + 1) % m}", 0, 1 if j + 1 == m else 0)
    for i in range(n):
        for j in range(m):
            g.set_rotation(f"u{i}{j}", [f"a{i}{j}+", f"b{i}{j}+", f"c{i}{j}+"])
            g.set_rotation(f"v{i}{j}", [f"a{i}{j}-", f"b{(i - 1) % n}{j}-", f"c{i}{(j - 1) % m}-"])
    return g.freeze()


class TestValidate:
    def test_ising_fixture(self):
        g, _, _ = parse_torus_graph(ISING_FIXTURE)
        rep = g.validate()
        assert (rep["V"], rep["E"], rep["F"], rep["euler"]) == (1, 2, 1, 0)

    def test_dimer_fixture(self):
        g, _, _ = parse_torus_graph(DIMER_FIXTURE)
        rep = g.validate()
        assert (rep["V"], rep["E"], rep["F"]) == (8, 12, 4)
        assert sorted(rep["faces"].values()) == [4, 4, 8, 8]
        assert rep["bipartite"]

    def test_rotation_names_foreign_dart(self):
        g = TorusGraph()
        g.add_vertex("u")
        g.add_vertex("v")
        g.add_edge("e", "u", "v", 0, 0)
        g.set_rotation("u", ["e-"])   # e- is based at v, not u
        g.set_rotation("v", ["e+"])
        with pytest.raises(GraphError, match="e-"):
            g.freeze()

    def test_face_displacement_violation(self):
        g = TorusGraph()
        g.add_vertex("u")
        g.add_edge("e", "u", "u", 1, 0)
        g.set_rotation("u", ["e+", "e-"])
        g.freeze()
        with pytest.raises(GraphError):
            g.validate()

    def test_monochrome_edge_rejected(self):
        g = TorusGraph()
        g.add_vertex("u", "b")
        g.add_vertex("v", "b")
        g.add_edge("e1", "u", "v", 0, 0)
        g.add_edge("e2", "u", "v", 1, 0)
        g.add_edge("e3", "u", "v", 0, 1)
        g.set_rotation("u", ["e1+", "e2+", "e3+"])
        g.set_rotation("v", ["e1-", "e2-", "e3-"])
        g.freeze()
        with pytest.raises(GraphError, match="joins two"):
            g.validate()


class TestZigzags:
    def test_ising_fixture_classes(self):
        g, _, _ = parse_torus_graph(ISING_FIXTURE)
        classes = sorted(z["class"] for z in g.zigzag_paths())
        assert classes == [(-1, -1), (-1, 1), (1, -1), (1, 1)]

    def test_dimer_fixture_classes(self):
        g, _, _ = parse_torus_graph(DIMER_FIXTURE)
        classes = sorted(z["class"] for z in g.zigzag_paths())
        assert classes == [(-1, -1), (-1, 1), (1, -1), (1, 1)]
        assert all(len(z["darts"]) == 6 for z in g.zigzag_paths())

    def test_single_loop(self):
        g = TorusGraph()
        g.add_vertex("u")
        g.add_edge("e", "u", "u", 1, 0)
        g.set_rotation("u", ["e+", "e-"])
        g.freeze()
        classes = sorted(z["class"] for z in g.zigzag_paths())
        assert classes == [(-1, 0), (1, 0)]


class TestHomology:
    def test_red_zigzag_class(self, dimer_fixture):
        g, _ = dimer_fixture
        zz = next(z for z in g.zigzag_paths() if z["class"] == (1, 1))
        assert g.cycle_displacement(zz["darts"]) == (1, 1)

    def test_face_boundary_zero(self, dimer_fixture):
        g, _ = dimer_fixture
        for fid, orbit in g.faces():
            assert g.cycle_displacement(orbit) == (0, 0)

    def test_cycle_plus_reversal_zero(self, dimer_fixture):
        g, _ = dimer_fixture
        zz = g.zigzag_paths()[0]
        both = [(d, 1) for d in zz["darts"]] + [(g.twin(d), 1) for d in zz["darts"]]
        assert g.cycle_displacement(both) == (0, 0)

    def test_non_cycle_rejected(self, dimer_fixture):
        g, _ = dimer_fixture
        with pytest.raises(GraphError):
            g.cycle_displacement(["e1+"])

    def test_zigzag_class_sum_is_zero(self, dimer_fixture):
        g, _ = dimer_fixture
        total = [0, 0]
        for z in g.zigzag_paths():
            total[0] += z["class"][0]
            total[1] += z["class"][1]
        assert total == [0, 0]

    def test_every_dart_in_two_faces_with_orientation(self, dimer_fixture):
        g, _ = dimer_fixture
        count = {}
        for fid, orbit in g.faces():
            for d in orbit:
                count[d] = count.get(d, 0) + 1
        assert all(v == 1 for v in count.values())
        assert set(count) == set(g.darts)


class TestNewtonPolygon:
    def test_fixture_square(self):
        g, _, _ = parse_torus_graph(ISING_FIXTURE)
        poly, anchored = g.newton_polygon()
        assert set(poly.vertices) == {(1, 0), (0, 1), (-1, 0), (0, -1)}
        assert anchored
        assert poly.is_centrally_symmetric()

    def test_dimer_fixture_same_square(self):
        g, _, _ = parse_torus_graph(DIMER_FIXTURE)
        poly, anchored = g.newton_polygon()
        assert set(poly.vertices) == {(1, 0), (0, 1), (-1, 0), (0, -1)}
        assert not anchored

    def test_color_change_reflects_classes(self, dimer_fixture):
        g, _ = dimer_fixture
        from isingdimer.dimer import color_change
        gb, _ = color_change(g, {e: 1 for e in g.edges()})
        a = sorted(z["class"] for z in g.zigzag_paths())
        b = sorted((-p, -q) for p, q in (z["class"] for z in gb.zigzag_paths()))
        assert a == b


class TestMinimal:
    def test_fixture_minimal(self, dimer_fixture):
        g, _ = dimer_fixture
        ok, cert = g.check_minimal()
        assert ok and cert["kind"] == "minimal"

    def test_honeycomb_minimal(self):
        ok, _ = honeycomb(2, 2).check_minimal()
        assert ok

    def test_zero_homology_detected(self):
        g = TorusGraph()
        g.add_vertex("u")
        g.add_vertex("v")
        g.add_edge("e1", "u", "v", 0, 0)
        g.add_edge("e2", "u", "v", 0, 0)
        g.add_edge("e3", "u", "v", 1, 0)
        g.add_edge("e4", "u", "v", 0, 1)
        g.set_rotation("u", ["e1+", "e2+", "e3+", "e4+"])
        g.set_rotation("v", ["e1-", "e2-", "e4-", "e3-"])
        g.freeze()
        ok, cert = g.check_minimal()
        assert not ok
        assert cert["kind"] in ("zero-homology", "self-intersection", "parallel-bigon")

    def test_relabeling_invariance(self, dimer_fixture):
        g, _ = dimer_fixture
        rng = random.Random(3)
        names = {e: f"x{rng.randrange(10**6)}_{i}" for i, e in enumerate(g.edges())}
        h = TorusGraph()
        for v in g.vertex_ids():
            h.add_vertex(v, g.colors[v])
        for e in g.edges():
            v1, v2, dx, dy = g.edge_ends[e]
            h.add_edge(names[e], v1, v2, dx, dy)
        for v in g.vertex_ids():
            h.set_rotation(v, [names[d[:-1]] + d[-1] for d in g.rotation[v]])
        h.freeze()
        assert h.check_minimal()[0] == g.check_minimal()[0]


class TestDual:
    def test_self_dual_square_lattice(self):
        g, _, _ = parse_torus_graph(ISING_FIXTURE)
        d = g.dual_graph()
        rep = d.validate()
        assert (rep["V"], rep["E"], rep["F"]) == (1, 2, 1)
        assert d.isomorphic(g)

    def test_involution(self):
        g = honeycomb(2, 2)
        dd = g.dual_graph().dual_graph()
        assert dd.isomorphic(g)

    def test_euler_preserved(self):
        g = honeycomb(2, 2)
        d = g.dual_graph()
        assert d.validate()["euler"] == 0


class TestFormat:
    def test_roundtrip(self, dimer_fixture):
        g, wt = dimer_fixture
        text = serialize_torus_graph(g, weights=wt)
        g2, wt2, _ = parse_torus_graph(text)
        assert g2.isomorphic(g)
        assert wt2 == wt

    def test_header_required(self):
        with pytest.raises(ParseError):
            parse_torus_graph("vertex a n\n")

    def test_unknown_key(self):
        with pytest.raises(ParseError, match="line 2"):
            parse_torus_graph("torus-graph v1\nfrobnicate a b\n")

    def test_malformed_rot_line_number(self):
        bad = "torus-graph v1\nvertex a n\nvertex b n\nedge e a b 0 0\nrot a zz\nrot b e-\n"
        with pytest.raises(ParseError, match="line 5"):
            parse_torus_graph(bad)

    def test_loop_needs_explicit_dart(self):
        bad = "torus-graph v1\nvertex a n\nedge e a a 1 0\nrot a e e\n"
        with pytest.raises(ParseError, match="explicit dart"):
            parse_torus_graph(bad)

    def test_comments_and_bare_edges(self):
        text = ("torus-graph v1\n# a honeycomb cell\n"
                "vertex u n\nvertex v n\n"
                "edge a u v 0 0\nedge b u v 1 0\nedge c u v 0 1\n"
                "rot u a b c\nrot v a b c\n")
        g, _, _ = parse_torus_graph(text)
        assert g.validate()["E"] == 3
