import itertools
import math
import random
from fractions import Fraction

import pytest

from isingdimer.exactalg import LaurentPoly2, lm_determinant, lp_sigma
from isingdimer.dimer import color_change, gauge_transform, square_move, x_of_cycle
from isingdimer.ising import (GadgetMap, IsingModel, couplings_from_file_data,
                              make_coupling, to_dimer)
from isingdimer.spectral import (
    SpectralError,
    amoeba_sample,
    canonical_sign,
    characteristic_polynomial,
    discrete_abel,
    divisor_of_vertex,
    kappa_gauge_equivalent,
    kappa_is_valid,
    kasteleyn_matrix,
    nu_map,
    solve_kasteleyn_signs,
    spectral_report,
    verify_ising_spectral,
)
from isingdimer.torusgraph import TorusGraph, parse_torus_graph

from conftest import DIMER_FIXTURE, FIXTURE_KAPPA, ISING_FIXTURE, S1, C1, S2, C2


def fixture_gm():
    return GadgetMap({"1": "f2", "2": "f3"},
                     {"w1": "b4", "w2": "b3", "w3": "b2", "w4": "b1"}, {}, {})


EXPECTED_P = "2 - 4/13*w - 4/13*w^-1 - 36/65*z - 36/65*z^-1"


class TestKasteleynMatrix:
    def test_fixture_entries(self, dimer_fixture):
        g, wt = dimer_fixture
        K = kasteleyn_matrix(g, wt, FIXTURE_KAPPA)
        assert K.entries[("w1", "b2")] == LaurentPoly2.const(S2)
        assert K.entries[("w1", "b3")] == LaurentPoly2.const(C2)
        assert K.entries[("w3", "b1")] == LaurentPoly2.const(-S1)
        assert K.entries[("w4", "b2")] == LaurentPoly2.const(-C2)
        assert K.entries[("w1", "b4")] == LaurentPoly2.monomial(1, -1)
        assert K.entries[("w2", "b3")] == LaurentPoly2.monomial(-1, 0)
        assert K.entries[("w3", "b2")] == LaurentPoly2.monomial(0, 1)
        assert K.entries[("w2", "b2")].is_zero()

    def test_gauge_scales_det_by_constant(self, dimer_fixture):
        g, wt = dimer_fixture
        rng = random.Random(8)
        f = {v: Fraction(rng.randint(1, 9), rng.randint(1, 9)) for v in g.vertex_ids()}
        P1 = lm_determinant(kasteleyn_matrix(g, wt, FIXTURE_KAPPA))
        P2 = lm_determinant(kasteleyn_matrix(g, gauge_transform(g, wt, f), FIXTURE_KAPPA))
        ratios = {ij: P2.terms[ij] / c for ij, c in P1.terms.items()}
        assert len(set(ratios.values())) == 1
        assert next(iter(ratios.values())) != 0


class TestCharacteristicPolynomial:
    def test_fixture_exact(self, dimer_fixture):
        g, wt = dimer_fixture
        data = characteristic_polynomial(g, wt, FIXTURE_KAPPA)
        assert data.poly.canonical_str() == EXPECTED_P
        assert data.genus == 1
        assert data.polygon.vertices == [(-1, 0), (0, -1), (1, 0), (0, 1)]

    def test_sigma_invariance_and_perturbation(self, dimer_fixture):
        g, wt = dimer_fixture
        P = characteristic_polynomial(g, wt, FIXTURE_KAPPA).poly
        assert lp_sigma(P) == P
        wtp = dict(wt)
        wtp["e5"] = wtp["e5"] * 2
        P2 = characteristic_polynomial(g, wtp, FIXTURE_KAPPA).poly
        assert lp_sigma(P2) != P2

    def test_numeric_figure_parameters(self, dimer_fixture):
        # c1 = 1/sqrt(2), c2 = sqrt(3)/2: coefficient of z is -c1*s2 = -1/(2 sqrt 2)
        g, _ = dimer_fixture
        c1 = 1 / math.sqrt(2)
        s1 = math.sqrt(1 - c1 * c1)
        c2 = math.sqrt(3) / 2
        s2 = math.sqrt(1 - c2 * c2)
        wt = {"e1": 1.0, "e2": s2, "e3": c2, "e4": s2, "e5": 1.0, "e6": c2,
              "e7": s1, "e8": 1.0, "e9": c1, "e10": c1, "e11": 1.0, "e12": s1}
        P = characteristic_polynomial(g, wt, FIXTURE_KAPPA).poly
        assert abs(P.coeff(1, 0) - (-c1 * s2)) < 1e-12
        assert abs(P.coeff(1, 0) - (-1 / (2 * math.sqrt(2)))) < 1e-12
        assert P.isclose(lp_sigma(P), 1e-12)

    def test_move_preserves_curve_at_ising_locus(self, dimer_fixture):
        g, wt = dimer_fixture
        P = characteristic_polynomial(g, wt, FIXTURE_KAPPA).poly
        g2, wt2, rec = square_move(g, wt, "f2")
        curves = []
        for lab, kappa in solve_kasteleyn_signs(g2):
            P2 = lm_determinant(kasteleyn_matrix(g2, wt2, kappa))
            curves.append(canonical_sign(P2))
        assert canonical_sign(P) in curves


class TestKasteleynSigns:
    def test_four_distinct_classes(self, dimer_fixture):
        g, _ = dimer_fixture
        classes = solve_kasteleyn_signs(g)
        assert len(classes) == 4
        assert sorted(lab for lab, _ in classes) == [(-1, -1), (-1, 1), (1, -1), (1, 1)]
        for _, kappa in classes:
            assert kappa_is_valid(g, kappa)
        for (l1, k1), (l2, k2) in itertools.combinations(classes, 2):
            assert not kappa_gauge_equivalent(g, k1, k2)

    def test_face_products(self, dimer_fixture):
        g, _ = dimer_fixture
        for _, kappa in solve_kasteleyn_signs(g):
            for fid, orbit in g.faces():
                prod = 1
                for d in orbit:
                    prod *= kappa[g.darts[d].edge]
                assert prod == (-1) ** (len(orbit) // 2 + 1)
                if len(orbit) == 4:
                    assert prod == -1

    def test_figure_representative_among_classes(self, dimer_fixture):
        g, _ = dimer_fixture
        assert kappa_is_valid(g, FIXTURE_KAPPA)
        hits = [lab for lab, k in solve_kasteleyn_signs(g)
                if kappa_gauge_equivalent(g, k, FIXTURE_KAPPA)]
        assert len(hits) == 1


class TestDivisors:
    def test_fixture_exact(self, dimer_fixture):
        g, wt = dimer_fixture
        Dw = divisor_of_vertex(g, wt, FIXTURE_KAPPA, "w2")
        Db = divisor_of_vertex(g, wt, FIXTURE_KAPPA, "b3")
        assert Dw.points == [(Fraction(13, 20), Fraction(52, 25), 1)]
        assert Db.points == [(Fraction(20, 13), Fraction(25, 52), 1)]
        assert Dw.matches(Db.sigma())

    def test_degree_equals_genus(self, dimer_fixture):
        g, wt = dimer_fixture
        data = characteristic_polynomial(g, wt, FIXTURE_KAPPA)
        for v in ("w1", "w2", "b1", "b4"):
            D = divisor_of_vertex(g, wt, FIXTURE_KAPPA, v)
            assert len(D) == data.genus == 1

    def test_numeric_matches_exact(self, dimer_fixture):
        g, wt = dimer_fixture
        wtf = {e: float(v) for e, v in wt.items()}
        D = divisor_of_vertex(g, wtf, FIXTURE_KAPPA, "w2", mode="numeric")
        (z, w, m), = D.points
        assert abs(z - 0.65) < 1e-10 and abs(w - 2.08) < 1e-10

    def test_genus_zero_empty(self):
        g = TorusGraph()
        g.add_vertex("B", "b")
        g.add_vertex("W", "w")
        g.add_edge("a", "B", "W", 0, 0)
        g.add_edge("b", "B", "W", 1, 0)
        g.add_edge("c", "B", "W", 0, 1)
        g.set_rotation("B", ["a+", "b+", "c+"])
        g.set_rotation("W", ["a-", "b-", "c-"])
        g.freeze()
        g.validate()
        wt = {"a": Fraction(1), "b": Fraction(2), "c": Fraction(3)}
        _, kappa = solve_kasteleyn_signs(g)[0]
        D = divisor_of_vertex(g, wt, kappa, "W")
        assert len(D) == 0


class TestNuMap:
    def test_fixture_singleton_sides(self, dimer_fixture):
        g, wt = dimer_fixture
        nm = nu_map(g, wt)
        assert len(nm["sides"]) == 4
        for side in nm["sides"]:
            assert side["length"] == 1
            assert len(side["zigzags"]) == 1
            assert not side["ties"]

    def test_opposite_sides_intercepts_negate_at_locus(self, dimer_fixture):
        g, wt = dimer_fixture
        nm = nu_map(g, wt)
        by_vec = {tuple(s["vector"]): s["intercepts"] for s in nm["sides"]}
        for v, ints in by_vec.items():
            opp = by_vec[(-v[0], -v[1])]
            assert all(abs(a + b) < 1e-12 for a, b in zip(sorted(ints), sorted(-x for x in opp)))

    def test_gauge_invariance(self, dimer_fixture):
        g, wt = dimer_fixture
        rng = random.Random(13)
        f = {v: Fraction(rng.randint(1, 9), rng.randint(1, 9)) for v in g.vertex_ids()}
        nm1 = nu_map(g, wt)
        nm2 = nu_map(g, gauge_transform(g, wt, f))
        for s1, s2 in zip(nm1["sides"], nm2["sides"]):
            assert s1["zigzags"] == s2["zigzags"]
            assert all(abs(a - b) < 1e-12 for a, b in zip(s1["intercepts"], s2["intercepts"]))


class TestColorChangeIdentities:
    def test_matrix_transpose_identity(self, dimer_fixture):
        g, wt = dimer_fixture
        gb, wtb = color_change(g, wt)
        K = kasteleyn_matrix(g, wt, FIXTURE_KAPPA)
        Kb = kasteleyn_matrix(gb, wtb, FIXTURE_KAPPA)
        # rows of Kb are the old blacks; Kb[b, w] = K[w, b](1/z, 1/w)
        assert Kb.rows == K.cols and Kb.cols == K.rows
        for w in K.rows:
            for b in K.cols:
                assert Kb.entries[(b, w)] == lp_sigma(K.entries[(w, b)])

    def test_p_and_divisor_symmetry(self, dimer_fixture):
        g, wt = dimer_fixture
        gb, wtb = color_change(g, wt)
        P = lm_determinant(kasteleyn_matrix(g, wt, FIXTURE_KAPPA))
        Pb = lm_determinant(kasteleyn_matrix(gb, wtb, FIXTURE_KAPPA))
        assert canonical_sign(Pb) == canonical_sign(lp_sigma(P))
        Dv = divisor_of_vertex(g, wt, FIXTURE_KAPPA, "w2")
        Dvb = divisor_of_vertex(gb, wtb, FIXTURE_KAPPA, "w2")
        assert Dvb.matches(Dv.sigma())


class TestVerifyIsingSpectral:
    def test_fixture_passes(self, dimer_fixture):
        g, wt = dimer_fixture
        ok, rep = verify_ising_spectral(g, wt, FIXTURE_KAPPA, fixture_gm(), "w2")
        assert ok
        assert rep["partner_black"] == "b3"
        assert rep["divisor_white"].points == [(Fraction(13, 20), Fraction(52, 25), 1)]

    def test_doubled_edge_fails_sigma(self, dimer_fixture):
        g, wt = dimer_fixture
        wtp = dict(wt)
        wtp["e5"] = wtp["e5"] * 2
        ok, rep = verify_ising_spectral(g, wtp, FIXTURE_KAPPA, fixture_gm(), "w2")
        assert not ok and not rep["sigma_invariant"]

    def test_asymmetric_weights_fail_nu(self, dimer_fixture):
        g, wt = dimer_fixture
        wtp = dict(wt)
        wtp["e2"] = wtp["e2"] * 3
        ok, rep = verify_ising_spectral(g, wtp, FIXTURE_KAPPA, fixture_gm(), "w2")
        assert not rep["nu_condition"]

    def test_all_whites_pass(self, dimer_fixture):
        g, wt = dimer_fixture
        gm = fixture_gm()
        for w in g.whites():
            ok, _ = verify_ising_spectral(g, wt, FIXTURE_KAPPA, gm, w)
            assert ok

    def test_report_text(self, dimer_fixture):
        g, wt = dimer_fixture
        text, ok = spectral_report(g, wt, FIXTURE_KAPPA, fixture_gm(), "w2")
        assert ok
        assert text.startswith("spectral-report v1\n")
        assert f"polynomial {EXPECTED_P}" in text
        assert "divisor D_w (13/20,52/25)x1" in text


class TestDiscreteAbel:
    def test_window_consistency(self, dimer_fixture):
        g, _ = dimer_fixture
        labels = discrete_abel(g, window=1)   # 3x3 block of translates
        base = g.whites()[0]
        assert labels[(base, (0, 0))].counts == {}
        zzc = {zz["id"]: zz["class"] for zz in g.zigzag_paths()}
        for (v, t), lab in labels.items():
            deg = lab.reduced(zzc).degree()
            assert deg == (0 if g.colors[v] == "w" else 2)

    def test_edge_relation(self, dimer_fixture):
        g, _ = dimer_fixture
        labels = discrete_abel(g, window=1)
        zz_of = {}
        for zz in g.zigzag_paths():
            for d in zz["darts"]:
                zz_of[d] = zz["id"]
        for d in g.darts:
            if g.colors[g.tail(d)] != "w":
                continue
            w, b = g.tail(d), g.head(d)
            dd = g.disp(d)
            if (w, (0, 0)) in labels and (b, dd) in labels:
                diff = dict(labels[(b, dd)].counts)
                for z, c in labels[(w, (0, 0))].counts.items():
                    diff[z] = diff.get(z, 0) - c
                pair = sorted([zz_of[d], zz_of[g.twin(d)]])
                expect = {}
                for z in pair:
                    expect[z] = expect.get(z, 0) + 1
                assert {k: v for k, v in diff.items() if v} == expect

    def test_monomial_divisor_degree_zero(self, dimer_fixture):
        g, _ = dimer_fixture
        zzc = {zz["id"]: zz["class"] for zz in g.zigzag_paths()}
        from isingdimer.spectral import AbelLabel
        for t in ((1, 0), (0, 1), (1, 1)):
            red = AbelLabel({}, t).reduced(zzc)
            assert red.degree() == 0
            assert red.offset == (0, 0)


class TestAmoeba:
    def test_residuals_and_symmetry(self, dimer_fixture):
        g, wt = dimer_fixture
        P = lm_determinant(kasteleyn_matrix(g, wt, FIXTURE_KAPPA))
        rows = amoeba_sample(P, grid=40, region=(-2, 2, -2, 2))
        assert rows
        Pn = P.to_numeric()
        assert all(abs(Pn.eval(z, w)) < 1e-8 for _, _, _, z, w in rows)
        pts = [(x, y) for x, y, *_ in rows]
        step = 4.0 / 40 + 1e-6
        for x, y in pts[::11]:
            assert any(abs(x + a) <= step and abs(y + b) <= step for a, b in pts)

    def test_divisor_point_in_amoeba(self, dimer_fixture):
        g, wt = dimer_fixture
        P = lm_determinant(kasteleyn_matrix(g, wt, FIXTURE_KAPPA))
        rows = amoeba_sample(P, grid=60, region=(-2, 2, -2, 2))
        tx, ty = math.log(13 / 20), math.log(52 / 25)
        d = min(math.hypot(x - tx, y - ty) for x, y, *_ in rows)
        assert d < 4.0 / 60 + 1e-9

    def test_degenerate_rejected(self):
        with pytest.raises(SpectralError):
            amoeba_sample(LaurentPoly2({(1, 0): Fraction(1), (0, 0): Fraction(2)}))


class TestSecondFixturePolygon:
    def test_genus_zero_polygon_coherence(self):
        g = TorusGraph()
        g.add_vertex("B", "b")
        g.add_vertex("W", "w")
        g.add_edge("a", "B", "W", 0, 0)
        g.add_edge("b", "B", "W", 1, 0)
        g.add_edge("c", "B", "W", 0, 1)
        g.set_rotation("B", ["a+", "b+", "c+"])
        g.set_rotation("W", ["a-", "b-", "c-"])
        g.freeze()
        g.validate()
        assert g.check_minimal()[0]
        wt = {"a": Fraction(2), "b": Fraction(3), "c": Fraction(5)}
        _, kappa = solve_kasteleyn_signs(g)[0]
        data = characteristic_polynomial(g, wt, kappa)
        gp, _ = g.newton_polygon()
        assert data.polygon.normalized().vertices == gp.normalized().vertices
        assert data.genus == 0

    def test_honeycomb_dimer_polygon_coherence(self):
        from test_torusgraph import honeycomb
        g = honeycomb(1, 1)
        model = IsingModel(g, {e: make_coupling(sc=(Fraction(4, 5), Fraction(3, 5)))
                               for e in g.edges()})
        gd, wt, gm = to_dimer(model)
        assert gd.check_minimal()[0] == g.check_minimal()[0]
        _, kappa = solve_kasteleyn_signs(gd)[0]
        data = characteristic_polynomial(gd, wt, kappa)
        gp, _ = gd.newton_polygon()
        assert data.polygon.normalized().vertices == gp.normalized().vertices


class TestHarnackAndSingularities:
    def test_two_to_one_diagnostic(self, dimer_fixture):
        from isingdimer.spectral import harnack_diagnostic
        g, wt = dimer_fixture
        P = lm_determinant(kasteleyn_matrix(g, wt, FIXTURE_KAPPA))
        rep = harnack_diagnostic(P)
        assert rep["consistent"]
        assert all(p["preimages"] == 2 for p in rep["probes"])

    def test_fixture_curve_smooth(self, dimer_fixture):
        from isingdimer.spectral import detect_singularities
        g, wt = dimer_fixture
        P = lm_determinant(kasteleyn_matrix(g, wt, FIXTURE_KAPPA))
        assert detect_singularities(P) == []

    def test_nodal_curve_detected(self):
        from isingdimer.spectral import detect_singularities
        # (z + 1/z + w + 1/w): node at (z, w) = (1, -1) and (-1, 1)
        P = LaurentPoly2({(1, 0): Fraction(1), (-1, 0): Fraction(1),
                          (0, 1): Fraction(1), (0, -1): Fraction(1)})
        hits = detect_singularities(P)
        assert hits


class TestToDimerSpectralPath:
    def test_charpoly_from_to_dimer_matches(self):
        gi, _, raw = parse_torus_graph(ISING_FIXTURE)
        model = IsingModel(gi, couplings_from_file_data(raw))
        gd, wt, gm = to_dimer(model)
        curves = set()
        for lab, kappa in solve_kasteleyn_signs(gd):
            P = lm_determinant(kasteleyn_matrix(gd, wt, kappa))
            curves.add(canonical_sign(P).canonical_str())
        assert EXPECTED_P in curves

    def test_spectral_conditions_on_to_dimer(self):
        gi, _, raw = parse_torus_graph(ISING_FIXTURE)
        model = IsingModel(gi, couplings_from_file_data(raw))
        gd, wt, gm = to_dimer(model)
        lab, kappa = solve_kasteleyn_signs(gd)[0]
        white = gd.whites()[0]
        ok, rep = verify_ising_spectral(gd, wt, kappa, gm, white)
        assert ok
