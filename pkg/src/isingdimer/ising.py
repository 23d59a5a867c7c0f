"""Ising models on torus graphs: coupling representations, Kramers-Wannier
duality, the star-triangle move, and the mapping to the bipartite dimer graph.

Couplings are stored in the x-representation x = exp(-2J), which makes all
conversions rational: s = 2x/(1+x^2), c = (1-x^2)/(1+x^2), x = (1-c)/s.
"""
from __future__ import annotations

import math
from fractions import Fraction

from .torusgraph import TorusGraph, GraphError


class CouplingError(ValueError):
    pass


def _fraction_sqrt(q):
    """Exact square root of a nonnegative Fraction, or None."""
    q = Fraction(q)
    if q < 0:
        return None
    ns = math.isqrt(q.numerator)
    ds = math.isqrt(q.denominator)
    if ns * ns == q.numerator and ds * ds == q.denominator:
        return Fraction(ns, ds)
    return None


class Coupling:
    """One Ising edge coupling: s^2 + c^2 = 1 with 0 < s, c < 1.

    Exact couplings keep Fractions throughout and omit J when irrational.
    """

    __slots__ = ("s", "c", "x", "J", "exact")

    def __init__(self, s, c, x, J=None, exact=True):
        self.s = s
        self.c = c
        self.x = x
        self.J = J
        self.exact = exact

    def __repr__(self):
        return f"Coupling(s={self.s}, c={self.c}, x={self.x})"

    def __eq__(self, other):
        return isinstance(other, Coupling) and (self.s, self.c) == (other.s, other.c)


def make_coupling(J=None, sc=None, x=None):
    """Build a coupling from J > 0, an exact (s, c) pair, or x in (0, 1)."""
    given = sum(v is not None for v in (J, sc, x))
    if given != 1:
        raise CouplingError("give exactly one of J, sc, x")
    if J is not None:
        if J <= 0:
            raise CouplingError("J must be positive")
        s = 1.0 / math.cosh(2 * J)
        c = math.tanh(2 * J)
        return Coupling(s, c, math.exp(-2 * J), J=J, exact=False)
    if sc is not None:
        s, c = sc
        if isinstance(s, Fraction) and isinstance(c, Fraction):
            if s * s + c * c != 1:
                raise CouplingError(f"s^2 + c^2 = {s * s + c * c} != 1")
            if not (0 < s < 1 and 0 < c < 1):
                raise CouplingError("s and c must lie in (0, 1)")
            xval = (1 - c) / s
            J = None
            return Coupling(s, c, xval, J=J, exact=True)
        s, c = float(s), float(c)
        if abs(s * s + c * c - 1.0) > 1e-12:
            raise CouplingError("s^2 + c^2 != 1")
        return Coupling(s, c, (1 - c) / s, J=0.5 * math.atanh(c), exact=False)
    if isinstance(x, Fraction):
        if not (0 < x < 1):
            raise CouplingError("x must lie in (0, 1)")
        s = 2 * x / (1 + x * x)
        c = (1 - x * x) / (1 + x * x)
        return Coupling(s, c, x, exact=True)
    x = float(x)
    if not (0.0 < x < 1.0):
        raise CouplingError("x must lie in (0, 1)")
    s = 2 * x / (1 + x * x)
    c = (1 - x * x) / (1 + x * x)
    return Coupling(s, c, x, J=-0.5 * math.log(x), exact=False)


class IsingModel:
    """A torus graph (uncolored, faces disks) with a coupling per edge."""

    def __init__(self, graph, couplings):
        if graph.is_bipartite_colored():
            raise GraphError("Ising graphs are uncolored")
        missing = [e for e in graph.edges() if e not in couplings]
        if missing:
            raise GraphError(f"edges without couplings: {missing}")
        graph.validate()
        self.graph = graph
        self.couplings = dict(couplings)

    def copy(self):
        return IsingModel(self.graph.copy(), dict(self.couplings))


def couplings_from_file_data(raw):
    """Convert parser output ({'J': v} or {'s':, 'c':}) to Coupling objects."""
    out = {}
    for e, spec in raw.items():
        if "J" in spec:
            out[e] = make_coupling(J=spec["J"])
        else:
            out[e] = make_coupling(sc=(spec["s"], spec["c"]))
    return out


def dual_x(x):
    """Kramers-Wannier dual coupling: x + x* + x x* = 1."""
    return (1 - x) / (1 + x)


def dual_ising(model):
    """Dual Ising model on the dual graph; x* = (1-x)/(1+x) per edge.

    Dual edge ids equal primal edge ids, so couplings transfer directly.
    """
    dual = model.graph.dual_graph()
    new = {}
    for e, cp in model.couplings.items():
        xs = dual_x(cp.x)
        new[e] = make_coupling(x=xs)
    return IsingModel(dual, new)


def _ydelta_radicals(a, b, c):
    """The three radicands of the star-triangle move, as exact Fractions
    when the inputs are exact."""
    p = a * b * c + 1
    ra = p * (a + b * c) / ((b + a * c) * (c + a * b))
    rb = p * (b + a * c) / ((a + b * c) * (c + a * b))
    rc = p * (c + a * b) / ((a + b * c) * (b + a * c))
    return ra, rb, rc


def ydelta_weights(a, b, c):
    """The star-triangle radicals A, B, C as printed: A = sqrt of
    (abc+1)(a+bc) / ((b+ac)(c+ab)), cyclically.

    Stays exact when every radicand is a perfect square; otherwise floats.
    These are the weights in the exp(+2J) convention; `y_delta` wraps them
    for models kept in x = exp(-2J).
    """
    exact_in = all(isinstance(v, Fraction) for v in (a, b, c))
    if exact_in:
        ra, rb, rc = _ydelta_radicals(Fraction(a), Fraction(b), Fraction(c))
        roots = [_fraction_sqrt(r) for r in (ra, rb, rc)]
        if all(r is not None for r in roots):
            return tuple(roots)
        ra, rb, rc = map(float, (ra, rb, rc))
    else:
        ra, rb, rc = _ydelta_radicals(*map(float, (a, b, c)))
    return (math.sqrt(ra), math.sqrt(rb), math.sqrt(rc))


def deltay_weights(A, B, C, tol=1e-13):
    """Inverse star-triangle: legs (a, b, c) with ydelta_weights(a,b,c) = (A,B,C).

    Reduction: AB = (1+abc)/(c+ab) fixes ab as a function of c, and the two
    remaining relations are linear in (b, ab/b); the consistency equation is
    solved for c by scanning and bisection. Of the two positive solutions
    (a triple and its reciprocal) the abc <= 1 branch is returned, exactly
    when a rational reconstruction verifies exactly.
    """
    A_, B_, C_ = map(float, (A, B, C))
    ab_pair, bc_pair, ca_pair = A_ * B_, B_ * C_, C_ * A_

    def partial(c):
        den = ab_pair - c
        if abs(den) < 1e-300:
            return None
        m = (1.0 - ab_pair * c) / den          # m = a*b
        p = 1.0 + m * c
        alpha = p / bc_pair                     # a + b c
        beta = p / ca_pair                      # b + a c
        det = c * c - 1.0
        if abs(det) < 1e-300:
            return None
        b = (c * alpha - beta) / det
        a = (c * beta - alpha) / det
        return a, b, m

    def fval(c):
        got = partial(c)
        if got is None:
            return None
        a, b, m = got
        return a * b - m

    sols = []
    grid = [math.exp(-16.0 + 32.0 * k / 800) for k in range(801)]
    prev_c, prev_f = None, None
    for c in grid:
        f = fval(c)
        if f is None:
            prev_c, prev_f = None, None
            continue
        if prev_f is not None and (f == 0.0 or (f > 0) != (prev_f > 0)):
            lo, hi, flo = prev_c, c, prev_f
            for _ in range(200):
                mid = math.sqrt(lo * hi)
                fm = fval(mid)
                if fm is None:
                    break
                if fm == 0.0:
                    lo = hi = mid
                    break
                if (fm > 0) == (flo > 0):
                    lo, flo = mid, fm
                else:
                    hi = mid
            croot = math.sqrt(lo * hi)
            got = partial(croot)
            if got is not None:
                a, b, _ = got
                cand = _newton3(_deltay_residual(ab_pair, bc_pair, ca_pair),
                                (a, b, croot))
                if cand is not None and all(v > 0 for v in cand):
                    sols.append(cand)
        prev_c, prev_f = c, f
    best = None
    for a, b, c in sols:
        forward = ydelta_weights(a, b, c)
        err = max(abs(float(x) - y) for x, y in zip(forward, (A_, B_, C_)))
        if err < 1e-8 and (best is None or a * b * c < best[0] * best[1] * best[2]):
            best = (a, b, c)
    if best is None:
        raise CouplingError("star-triangle inversion did not converge")
    a, b, c = best
    if a * b * c > 1.0 + 1e-9:
        a, b, c = 1 / a, 1 / b, 1 / c   # take the abc <= 1 branch
    if all(isinstance(v, Fraction) for v in (A, B, C)):
        fr = [Fraction(v).limit_denominator(10 ** 6) for v in (a, b, c)]
        if ydelta_weights(*fr) == (Fraction(A), Fraction(B), Fraction(C)):
            return tuple(fr)
    return a, b, c


def _deltay_residual(ab_pair, bc_pair, ca_pair):
    def residual(v):
        a, b, c = v
        p = 1 + a * b * c
        return (p / (c + a * b) - ab_pair,
                p / (a + b * c) - bc_pair,
                p / (b + a * c) - ca_pair)
    return residual


def _newton3(residual, seed):
    v = list(seed)
    fv = residual(v)
    norm = sum(abs(x) for x in fv)
    for _ in range(120):
        if norm < 1e-14:
            return tuple(v)
        h = 1e-7
        cols = []
        for k in range(3):
            vp = list(v)
            vp[k] += h
            fp = residual(vp)
            cols.append(tuple((fp[i] - fv[i]) / h for i in range(3)))
        m = [[cols[j][i] for j in range(3)] for i in range(3)]
        dx = _solve3(m, tuple(-x for x in fv))
        if dx is None:
            return None
        step = 1.0
        while step > 1e-6:
            vn = [v[k] + step * dx[k] for k in range(3)]
            if all(x > 0 for x in vn):
                fn = residual(vn)
                nn = sum(abs(x) for x in fn)
                if nn < norm:
                    v, fv, norm = vn, fn, nn
                    break
            step /= 2
        else:
            break
    return tuple(v) if norm < 1e-11 else None


def _solve3(m, rhs):
    d = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
         - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
         + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
    if abs(d) < 1e-300:
        return None
    out = []
    for k in range(3):
        mm = [row[:] for row in m]
        for i in range(3):
            mm[i][k] = rhs[i]
        dk = (mm[0][0] * (mm[1][1] * mm[2][2] - mm[1][2] * mm[2][1])
              - mm[0][1] * (mm[1][0] * mm[2][2] - mm[1][2] * mm[2][0])
              + mm[0][2] * (mm[1][0] * mm[2][1] - mm[1][1] * mm[2][0]))
        out.append(dk / d)
    return out


def _reciprocal(x):
    if isinstance(x, Fraction):
        return 1 / x
    return 1.0 / x


def ydelta_x_map(a, b, c):
    """Model-level Y->triangle map on x = exp(-2J) weights: the triangle
    x-weights are the reciprocals of the printed radicals (the J-level move
    is the same; the radicals live in the exp(+2J) convention)."""
    return tuple(_reciprocal(v) for v in ydelta_weights(a, b, c))


def deltay_x_map(A, B, C):
    """Model-level triangle->Y map on x = exp(-2J) weights."""
    sols = deltay_weights(_reciprocal(A), _reciprocal(B), _reciprocal(C))
    return tuple(sols)


def y_delta(model, site):
    """Apply the star-triangle move at `site`.

    `site` is a degree-3 vertex id (Y -> triangle) or a triangular face id
    (triangle -> Y); prefix with "v:" or "f:" to disambiguate when a vertex
    and a face share a name. Returns a new IsingModel.
    """
    g = model.graph
    if site.startswith("v:"):
        return _y_to_delta(model, site[2:])
    if site.startswith("f:"):
        return _delta_to_y(model, site[2:])
    is_vertex = site in g.colors
    is_face = site in g.face_ids()
    if is_vertex and is_face:
        raise GraphError(f"{site} names both a vertex and a face; use v:/f:")
    if is_vertex:
        return _y_to_delta(model, site)
    if is_face:
        return _delta_to_y(model, site)
    raise GraphError(f"{site} is neither a vertex nor a face")


def _y_to_delta(model, v):
    g = model.graph
    if g.degree(v) != 3:
        raise GraphError(f"vertex {v} has degree {g.degree(v)}, need 3")
    legs = list(g.rotation[v])  # ccw darts out of v
    ends = [g.head(d) for d in legs]
    if v in ends:
        raise GraphError("star-triangle with a leg looping back to the center is unsupported")
    a, b, c = (model.couplings[g.darts[d].edge].x for d in legs)
    A, B, C = ydelta_x_map(a, b, c)
    # new edge opposite leg i joins ends[i+1], ends[i+2]
    new = TorusGraph()
    for u in g.vertex_ids():
        if u != v:
            new.add_vertex(u, g.colors[u], g.positions.get(u))
    kept = [e for e in g.edges() if v not in (g.edge_ends[e][0], g.edge_ends[e][1])]
    for e in kept:
        v1, v2, dx, dy = g.edge_ends[e]
        new.add_edge(e, v1, v2, dx, dy)
    tri_names = []
    weights = {}
    leg_disp = [g.disp(d) for d in legs]
    for i in range(3):
        u1, u2 = ends[(i + 1) % 3], ends[(i + 2) % 3]
        d1, d2 = leg_disp[(i + 1) % 3], leg_disp[(i + 2) % 3]
        name = f"yd_{v}_{i}"
        # path u1 -> v -> u2
        new.add_edge(name, u1, u2, d2[0] - d1[0], d2[1] - d1[1])
        tri_names.append(name)
        weights[name] = (A, B, C)[i]
    for u in g.vertex_ids():
        if u == v:
            continue
        rot = []
        for d in g.rotation[u]:
            if g.head(d) != v:
                rot.append(d)
                continue
            i = legs.index(g.twin(d))
            # replace the leg toward v by darts toward ends[i+1], ends[i+2]
            e_next = tri_names[(i + 2) % 3]   # edge {ends[i], ends[i+1]}, u1-end here
            e_prev = tri_names[(i + 1) % 3]   # edge {ends[i+2], ends[i]}, u2-end here
            rot.append(e_next + "+")
            rot.append(e_prev + "-")
        new.set_rotation(u, rot)
    new.freeze()
    couplings = {e: model.couplings[e] for e in kept}
    for name, x in weights.items():
        couplings[name] = make_coupling(x=x if isinstance(x, Fraction) else float(x))
    return IsingModel(new, couplings)


def _delta_to_y(model, fid):
    g = model.graph
    orbit = g.face_darts(fid)
    if len(orbit) != 3:
        raise GraphError(f"face {fid} has {len(orbit)} sides, need 3")
    verts = [g.tail(d) for d in orbit]
    if len(set(verts)) != 3:
        raise GraphError("triangle face with repeated vertices is unsupported")
    # orbit darts: d_i from verts[i] to verts[i+1]; triangle edge opposite
    # verts[i] is edge(orbit[i+1]).
    A = {verts[i]: model.couplings[g.darts[orbit[(i + 1) % 3]].edge].x for i in range(3)}
    xa, xb, xc = (A[verts[0]], A[verts[1]], A[verts[2]])
    a, b, c = deltay_x_map(xa, xb, xc)
    legs_x = {verts[0]: a, verts[1]: b, verts[2]: c}
    center = f"dy_{fid}"
    tri_edges = {g.darts[d].edge for d in orbit}
    new = TorusGraph()
    for u in g.vertex_ids():
        new.add_vertex(u, g.colors[u], g.positions.get(u))
    new.add_vertex(center, "n")
    kept = [e for e in g.edges() if e not in tri_edges]
    for e in kept:
        v1, v2, dx, dy = g.edge_ends[e]
        new.add_edge(e, v1, v2, dx, dy)
    # legs: center -> verts[i]; displacements chosen so that leg_i - leg_j
    # matches the old triangle edge from verts[j] to verts[i]
    leg_disp = {verts[0]: (0, 0)}
    leg_disp[verts[1]] = g.disp(orbit[0])
    d1 = g.disp(orbit[1])
    leg_disp[verts[2]] = (leg_disp[verts[1]][0] + d1[0], leg_disp[verts[1]][1] + d1[1])
    leg_names = {}
    for i, u in enumerate(verts):
        name = f"dyleg_{fid}_{i}"
        new.add_edge(name, center, u, *leg_disp[u])
        leg_names[u] = name
    for u in g.vertex_ids():
        rot = []
        for d in g.rotation[u]:
            if g.darts[d].edge in tri_edges:
                # both triangle darts at u are consecutive around the corner;
                # replace the pair with the single leg dart (once)
                if rot and rot[-1] == leg_names[u] + "-":
                    continue
                rot.append(leg_names[u] + "-")
            else:
                rot.append(d)
        # collapse a wrap-around duplicate
        if len(rot) > 1 and rot[0] == rot[-1] == leg_names[u] + "-":
            rot.pop()
        new.set_rotation(u, rot)
    new.set_rotation(center, [leg_names[v] + "+" for v in _ccw_center_order(g, orbit)])
    new.freeze()
    couplings = {e: model.couplings[e] for e in kept}
    for u, name in leg_names.items():
        x = legs_x[u]
        couplings[name] = make_coupling(x=x if isinstance(x, Fraction) else float(x))
    return IsingModel(new, couplings)


def _ccw_center_order(g, orbit):
    """Vertex order around the new center so its rotation is ccw.

    The triangle face's ccw boundary visits verts[0], verts[1], verts[2];
    legs from an interior point inherit that ccw order.
    """
    return [g.tail(d) for d in orbit]


# -- the Ising -> dimer gadget map -------------------------------------------


class GadgetMap:
    """Bookkeeping of to_dimer: per Ising edge its square face and blacks,
    per white corner its partner black (the 1-edge neighbor)."""

    def __init__(self, squares, partners, corner_of, black_of_dart):
        self.squares = squares            # ising edge -> face id in the dimer graph
        self.partners = partners          # white id -> black id
        self.corner_of = corner_of        # (vertex, rotation index) -> white id
        self.black_of_dart = black_of_dart  # ising dart -> black id

    def serialize(self):
        out = ["gadget-map v1"]
        for e in sorted(self.squares):
            out.append(f"square {e} {self.squares[e]}")
        for w in sorted(self.partners):
            out.append(f"partner {w} {self.partners[w]}")
        return "\n".join(out) + "\n"


def parse_gadget_map(text):
    squares, partners = {}, {}
    lines = text.splitlines()
    if not lines or lines[0].strip() != "gadget-map v1":
        raise GraphError("missing 'gadget-map v1' header")
    for raw in lines[1:]:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "square" and len(parts) == 3:
            squares[parts[1]] = parts[2]
        elif parts[0] == "partner" and len(parts) == 3:
            partners[parts[1]] = parts[2]
        else:
            raise GraphError(f"bad gadget-map line: {raw!r}")
    return GadgetMap(squares, partners, {}, {})


def to_dimer(model):
    """Replace every Ising edge by the six-edge bipartite gadget.

    Per dart d of the Ising graph there is a black B(d); per rotation corner
    (u; d, d_next) a white. The corner after dart d carries the s-edge of d,
    the c-edge of d (from the black of twin(d)) and the weight-1 edge to the
    black of d_next. Displacements: c-edges carry -disp(d), everything else 0,
    which preserves every zig-zag homology class.

    Returns (bipartite TorusGraph, weights: edge -> Fraction|float, GadgetMap).
    """
    g = model.graph
    gn = TorusGraph()
    black = {}
    for d in sorted(g.darts):
        black[d] = f"B_{d}"
        gn.add_vertex(black[d], "b")
    corner = {}
    corner_name = {}
    for u in g.vertex_ids():
        rot = g.rotation[u]
        for i, d in enumerate(rot):
            w = f"W_{u}_{i}"
            corner[(u, i)] = w
            corner_name[(u, d)] = w     # corner after dart d
            gn.add_vertex(w, "w")
    weights = {}
    s_edge, c_edge, one_edge = {}, {}, {}
    for u in g.vertex_ids():
        rot = g.rotation[u]
        k = len(rot)
        for i, d in enumerate(rot):
            w = corner[(u, i)]
            e = g.darts[d].edge
            cp = model.couplings[e]
            dn = rot[(i + 1) % k]
            es = f"s_{d}"
            ec = f"c_{d}"
            e1 = f"o_{u}_{i}"
            gn.add_edge(es, black[d], w, 0, 0)
            dd = g.disp(d)
            gn.add_edge(ec, black[g.twin(d)], w, -dd[0], -dd[1])
            gn.add_edge(e1, black[dn], w, 0, 0)
            weights[es] = cp.s
            weights[ec] = cp.c
            weights[e1] = Fraction(1) if cp.exact else 1.0
            s_edge[d], c_edge[d], one_edge[(u, i)] = es, ec, e1
    # rotations: black B(d): ccw (incoming 1-edge, s-edge, c-edge);
    # white corner: ccw (c-edge, s-edge, 1-edge)
    for u in g.vertex_ids():
        rot = g.rotation[u]
        k = len(rot)
        for i, d in enumerate(rot):
            prev_i = (i - 1) % k
            b = black[d]
            gn.set_rotation(b, [one_edge[(u, prev_i)] + "+",
                                s_edge[d] + "+",
                                c_edge[g.twin(d)] + "+"])
            w = corner[(u, i)]
            gn.set_rotation(w, [c_edge[d] + "-",
                                s_edge[d] + "-",
                                one_edge[(u, i)] + "-"])
    gn.freeze()
    gn.validate()
    gn = _orient_marking(gn)
    squares = {}
    for e in g.edges():
        fid = gn.face_of_dart(s_edge[e + "+"] + "+")
        if len(gn.face_darts(fid)) != 4:
            fid = gn.face_of_dart(s_edge[e + "+"] + "-")
        squares[e] = fid
    partners = {}
    for (u, i), w in corner.items():
        dn = g.rotation[u][(i + 1) % len(g.rotation[u])]
        partners[w] = black[dn]
    gm = GadgetMap(squares, partners, dict(corner), dict(black))
    return gn, weights, gm


def _abel_orientation_ok(g):
    from .spectral import discrete_abel, SpectralError
    try:
        discrete_abel(g, window=1)
        return True
    except SpectralError:
        return False


def _apply_lattice_map(g, S):
    out = TorusGraph()
    for v in g.vertex_ids():
        out.add_vertex(v, g.colors[v], g.positions.get(v))
    for e in g.edges():
        v1, v2, dx, dy = g.edge_ends[e]
        out.add_edge(e, v1, v2, S[0][0] * dx + S[0][1] * dy,
                     S[1][0] * dx + S[1][1] * dy)
    for v in g.vertex_ids():
        out.set_rotation(v, list(g.rotation[v]))
    return out.freeze()


def _orient_marking(gn):
    """Make the gadget marking orientation-compatible.

    The raw gadget displacements preserve the zig-zag class multiset but can
    identify H1 of the torus with the reversed orientation, which the
    discrete Abel translation rule detects. In that case the multiset admits
    a determinant -1 lattice symmetry; compose the marking with the smallest
    such reflection (preferring coordinate reflections). The output is
    canonical up to lattice symmetries of the Newton polygon.
    """
    minimal, _ = gn.check_minimal()
    if not minimal:
        return gn
    if _abel_orientation_ok(gn):
        return gn
    classes = sorted(z["class"] for z in gn.zigzag_paths())
    span = max(max(abs(p), abs(q)) for p, q in classes) + 1
    cands = []
    rng = range(-span, span + 1)
    for a in rng:
        for b in rng:
            for c in rng:
                for d in rng:
                    if a * d - b * c != -1:
                        continue
                    mapped = sorted((a * p + b * q, c * p + d * q) for p, q in classes)
                    if mapped == classes:
                        cands.append(((abs(b) + abs(c), abs(a - 1) + abs(d - 1),
                                       a, b, c, d), ((a, b), (c, d))))
    for _, S in sorted(cands):
        flipped = _apply_lattice_map(gn, S)
        if _abel_orientation_ok(flipped):
            return flipped
    raise GraphError("could not orient the gadget marking")
