"""Dimer models as gauge classes of edge weights: X-coordinates on cycles,
the intersection pairing at trivalent vertices, square and contraction moves
with cycle transport, color change, and the Ising-locus characterization.
"""
from __future__ import annotations

import math
from fractions import Fraction

from .exactalg import ModeError
from .torusgraph import TorusGraph, GraphError
from .ising import _fraction_sqrt, make_coupling


class MoveError(ValueError):
    pass


def _one_like(wt):
    return Fraction(1) if all(isinstance(v, Fraction) for v in wt.values()) else 1.0


def x_of_cycle(g, wt, cycle):
    """Evaluate the gauge class on a cycle.

    `cycle` is a dart-id walk (closed, alternating) or a list of
    (dart, multiplicity) pairs with zero boundary. Darts traversed
    black->white multiply the numerator, white->black the denominator.
    """
    items = [(d, 1) if not isinstance(d, tuple) else d for d in cycle]
    g.cycle_displacement(items)  # raises unless it is a cycle
    num = _one_like(wt)
    den = _one_like(wt)
    for d, m in items:
        dart = g.darts[d]
        wv = wt[dart.edge]
        if g.colors[dart.vertex] == "b":
            num *= wv ** m if m >= 0 else 1 / (wv ** (-m))
        else:
            den *= wv ** m if m >= 0 else 1 / (wv ** (-m))
    return num / den


def face_x_values(g, wt):
    """X of every face (counterclockwise boundary)."""
    return {fid: x_of_cycle(g, wt, orbit) for fid, orbit in g.faces()}


def basis_x_values(g, wt, cycle_a=None, cycle_b=None, omit_face=None):
    """X on the basis {all faces except one} + {a, b}.

    The omitted face (default: the last face id) is reported separately via
    the product-one identity.
    """
    faces = face_x_values(g, wt)
    fids = sorted(faces)
    if omit_face is None:
        omit_face = fids[-1]
    if cycle_a is None or cycle_b is None:
        ca, cb = g.homology_basis_cycles()
        cycle_a = cycle_a or ca
        cycle_b = cycle_b or cb
    out = {fid: x for fid, x in faces.items() if fid != omit_face}
    out["a"] = x_of_cycle(g, wt, cycle_a)
    out["b"] = x_of_cycle(g, wt, cycle_b)
    prod = _one_like(wt)
    for x in faces.values():
        prod *= x
    return out, {"omitted_face": omit_face, "omitted_x": faces[omit_face],
                 "face_product": prod}


def gauge_canonicalize(g, wt):
    """Gauge so that a deterministic spanning tree (lowest edge ids) has
    weight 1 everywhere. Two cochains are gauge equivalent iff their
    canonical forms are equal."""
    parent = {v: v for v in g.vertex_ids()}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    tree = []
    adj = {v: [] for v in g.vertex_ids()}
    for e in g.edges():
        v1, v2, _, _ = g.edge_ends[e]
        r1, r2 = find(v1), find(v2)
        if r1 != r2:
            parent[r1] = r2
            tree.append(e)
            adj[v1].append((e, v2))
            adj[v2].append((e, v1))
    pot = {g.vertex_ids()[0]: _one_like(wt)}
    stack = [g.vertex_ids()[0]]
    while stack:
        v = stack.pop()
        for e, u in adj[v]:
            if u in pot:
                continue
            b, w = (v, u) if g.colors[v] == "b" else (u, v)
            # want pot[b]^-1 * wt * pot[w] == 1
            if b == v:
                pot[u] = pot[v] / wt[e]
            else:
                pot[u] = pot[v] * wt[e]
            stack.append(u)
    if len(pot) != len(g.vertex_ids()):
        raise GraphError("graph is disconnected")
    out = {}
    for e, x in wt.items():
        v1, v2, _, _ = g.edge_ends[e]
        b, w = (v1, v2) if g.colors[v1] == "b" else (v2, v1)
        out[e] = x * pot[w] / pot[b]
    return out


def gauge_transform(g, wt, f):
    """Apply a vertex function f: wt'(e) = f(b)^-1 wt(e) f(w)."""
    out = {}
    for e, x in wt.items():
        v1, v2, _, _ = g.edge_ends[e]
        b, w = (v1, v2) if g.colors[v1] == "b" else (v2, v1)
        out[e] = x * f.get(w, 1) / f.get(b, 1)
    return out


# -- intersection pairing (trivalent) -----------------------------------------


def _transits(g, cycle):
    """Per-vertex transits of a dart walk: vertex -> list of (in_port, out_port).

    Ports are darts based at the vertex; the in-port is the twin of the
    arriving dart.
    """
    out = {}
    k = len(cycle)
    for i, d in enumerate(cycle):
        nxt = cycle[(i + 1) % k]
        v = g.head(d)
        if g.tail(nxt) != v:
            raise GraphError("walk is not connected")
        out.setdefault(v, []).append((g.twin(d), nxt))
    return out


def _half_cross_sign(g, v, t1, t2):
    """Crossing sign of two transits at a trivalent vertex sharing one port.

    Strand endpoints on a shared port are ordered by the ccw distance to
    their other endpoint; the perturbed chords either cross or not, and the
    sign is the orientation of (dir1, dir2) at the crossing.
    """
    rot = g.rotation[v]
    n = len(rot)
    idx = {p: i for i, p in enumerate(rot)}

    def pos(port, other):
        # ccw rank of `other` seen from `port`, as a fraction used to offset
        # split endpoints within the port's angular sector
        r = (idx[other] - idx[port]) % n
        return idx[port] + 0.2 + 0.6 * (r / n)

    a1, b1 = t1
    a2, b2 = t2
    pts = {}
    pts["a1"] = pos(a1, b1)
    pts["b1"] = pos(b1, a1)
    pts["a2"] = pos(a2, b2)
    pts["b2"] = pos(b2, a2)
    ang = {k: 2 * math.pi * p / n for k, p in pts.items()}
    P = {k: (math.cos(t), math.sin(t)) for k, t in ang.items()}
    d1 = (P["b1"][0] - P["a1"][0], P["b1"][1] - P["a1"][1])
    d2 = (P["b2"][0] - P["a2"][0], P["b2"][1] - P["a2"][1])
    if not _segments_cross(P["a1"], P["b1"], P["a2"], P["b2"]):
        return 0
    return 1 if d1[0] * d2[1] - d1[1] * d2[0] > 0 else -1


def _segments_cross(p1, p2, p3, p4):
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    o1, o2 = orient(p1, p2, p3), orient(p1, p2, p4)
    o3, o4 = orient(p3, p4, p1), orient(p3, p4, p2)
    return (o1 * o2 < 0) and (o3 * o4 < 0)


def intersection_pairing(g, cycle_c, cycle_d):
    """<c, d> = sum over black vertices of eps minus sum over whites.

    Both cycles are dart walks; all touched vertices must be trivalent.
    Transits through the same unordered port pair contribute 0; transits
    sharing one port contribute +-1/2; disjoint transits cannot occur at a
    trivalent vertex.
    """
    tc = _transits(g, cycle_c)
    td = _transits(g, cycle_d)
    total = Fraction(0)
    for v in set(tc) & set(td):
        if g.degree(v) != 3:
            raise GraphError(f"vertex {v} is not trivalent; pairing unsupported")
        eps = Fraction(0)
        for t1 in tc[v]:
            for t2 in td[v]:
                if set(t1) == set(t2):
                    continue
                shared = set(t1) & set(t2)
                if len(shared) == 1:
                    eps += Fraction(_half_cross_sign(g, v, t1, t2), 2)
                # at a trivalent vertex two transits always share a port
        total += eps if g.colors[v] == "b" else -eps
    return total


# -- square move ---------------------------------------------------------------


class MoveRecord:
    """Replayable record of one local move."""

    def __init__(self, kind, data):
        self.kind = kind
        self.data = data

    def map_face(self, fid):
        return self.data["face_map"].get(fid, fid)

    def reroute(self, cycle):
        return self.data["reroute"](cycle)


def square_move(g, wt, fid):
    """Spider move at the quadrilateral face `fid`.

    The face must be bounded by four edges with distinct trivalent black
    corners carrying pendant (third) edges; to_dimer output always qualifies.
    Returns (new graph, new weights, MoveRecord).
    """
    orbit = g.face_darts(fid)
    if len(orbit) != 4:
        raise MoveError(f"face {fid} has {len(orbit)} sides, need 4")
    if g.colors[g.tail(orbit[0])] == "w":
        orbit = orbit[1:] + orbit[:1]
    d0, d1, d2, d3 = orbit
    B1, m3, B2, m1 = (g.tail(d) for d in orbit)
    if len({B1, m3, B2, m1}) != 4:
        raise MoveError(f"face {fid} has repeated corners")
    if g.degree(B1) != 3 or g.degree(B2) != 3:
        raise MoveError("square corners must be trivalent blacks")
    p1 = next(d for d in g.rotation[B1] if d not in (d0, g.twin(d3)))
    p2 = next(d for d in g.rotation[B2] if d not in (d2, g.twin(d1)))
    m2, m4 = g.head(p1), g.head(p2)

    # gauge the pendant weights to 1 (gauge at the two blacks)
    wt = dict(wt)
    for black, pend in ((B1, p1), (B2, p2)):
        lam = wt[g.darts[pend].edge]
        for d in g.rotation[black]:
            wt[g.darts[d].edge] = wt[g.darts[d].edge] / lam
    a = wt[g.darts[d0].edge]
    dd = wt[g.darts[d1].edge]
    c = wt[g.darts[d2].edge]
    b = wt[g.darts[d3].edge]
    delta = a * c + b * dd

    removed_edges = {g.darts[x].edge for x in (d0, d1, d2, d3, p1, p2)}

    def fresh(base, taken):
        name = base
        k = 0
        while name in taken:
            k += 1
            name = f"{base}.{k}"
        return name

    nb1 = fresh(f"{B1}'", set(g.colors))
    nb2 = fresh(f"{B2}'", set(g.colors) | {nb1})
    gn = TorusGraph()
    for v in g.vertex_ids():
        if v not in (B1, B2):
            gn.add_vertex(v, g.colors[v], g.positions.get(v))
    gn.add_vertex(nb1, "b", g.positions.get(B1))
    gn.add_vertex(nb2, "b", g.positions.get(B2))
    new_wt = {e: x for e, x in wt.items() if e not in removed_edges}
    for e in g.edges():
        if e in removed_edges:
            continue
        v1, v2, dx, dy = g.edge_ends[e]
        gn.add_edge(e, v1, v2, dx, dy)

    def D(x):
        return g.disp(x)

    def add(name, black, white, disp, weight):
        gn.add_edge(name, black, white, disp[0], disp[1])
        new_wt[name] = weight

    neg = lambda t: (-t[0], -t[1])
    plus = lambda s, t: (s[0] + t[0], s[1] + t[1])
    one = _one_like(wt)
    taken = set(g.edge_ends)
    pA1 = fresh(f"{fid}_pA", taken)   # B_A' - m1 pendant
    pB3 = fresh(f"{fid}_pB", taken)   # B_B' - m3 pendant
    eA2 = fresh(f"{fid}_a2", taken)   # B_A' - m2, weight d/delta
    eA4 = fresh(f"{fid}_a4", taken)   # B_A' - m4, weight a/delta
    eB2 = fresh(f"{fid}_b2", taken)   # B_B' - m2, weight c/delta
    eB4 = fresh(f"{fid}_b4", taken)   # B_B' - m4, weight b/delta
    add(pA1, nb1, m1, neg(D(d3)), one)
    add(eA2, nb1, m2, D(p1), dd / delta)
    add(eA4, nb1, m4, plus(plus(neg(D(d3)), neg(D(d2))), D(p2)), a / delta)
    add(pB3, nb2, m3, neg(D(d1)), one)
    add(eB2, nb2, m2, plus(plus(neg(D(d1)), neg(D(d0))), D(p1)), c / delta)
    add(eB4, nb2, m4, D(p2), b / delta)

    gn.set_rotation(nb1, [pA1 + "+", eA2 + "+", eA4 + "+"])
    gn.set_rotation(nb2, [pB3 + "+", eB4 + "+", eB2 + "+"])
    for v in g.vertex_ids():
        if v in (B1, B2):
            continue
        rot = []
        i = 0
        old = g.rotation[v]
        while i < len(old):
            d = old[i]
            if d == d1 and i + 1 < len(old) + 1 and old[(i + 1) % len(old)] == g.twin(d0):
                rot.append(pB3 + "-")
                i += 2 if i + 1 < len(old) else 1
                continue
            if d == d3 and old[(i + 1) % len(old)] == g.twin(d2):
                rot.append(pA1 + "-")
                i += 2 if i + 1 < len(old) else 1
                continue
            if d == g.twin(p1):
                rot.append(eB2 + "-")
                rot.append(eA2 + "-")
                i += 1
                continue
            if d == g.twin(p2):
                rot.append(eA4 + "-")
                rot.append(eB4 + "-")
                i += 1
                continue
            if d in (g.twin(d0), g.twin(d2)):
                # wrap-around partner of the pair replacement
                i += 1
                continue
            rot.append(d)
            i += 1
        gn.set_rotation(v, rot)
    gn.freeze()
    gn.validate()

    # face mapping via surviving darts
    face_map = {}
    for old_fid, old_orbit in g.faces():
        survivor = next((x for x in old_orbit if g.darts[x].edge not in removed_edges), None)
        if survivor is not None:
            face_map[old_fid] = gn.face_of_dart(survivor)
    face_map[fid] = gn.face_of_dart(eA2 + "+")

    # transit table: old corner->black->corner hops mapped to new dart paths.
    # Diagonal hops (between opposite square corners) stay on their black's
    # pendant-corner side, which is what the cycle correspondence of the
    # spider move does.
    routes = {
        (m2, B1, m3): [eB2 + "-", pB3 + "+"],
        (m3, B1, m2): [pB3 + "-", eB2 + "+"],
        (m2, B1, m1): [eA2 + "-", pA1 + "+"],
        (m1, B1, m2): [pA1 + "-", eA2 + "+"],
        (m4, B2, m3): [eB4 + "-", pB3 + "+"],
        (m3, B2, m4): [pB3 + "-", eB4 + "+"],
        (m4, B2, m1): [eA4 + "-", pA1 + "+"],
        (m1, B2, m4): [pA1 + "-", eA4 + "+"],
        (m1, B1, m3): [pA1 + "-", eA2 + "+", eB2 + "-", pB3 + "+"],
        (m3, B1, m1): [pB3 + "-", eB2 + "+", eA2 + "-", pA1 + "+"],
        (m1, B2, m3): [pA1 + "-", eA4 + "+", eB4 + "-", pB3 + "+"],
        (m3, B2, m1): [pB3 + "-", eB4 + "+", eA4 + "-", pA1 + "+"],
    }

    def reroute(cycle):
        """Rewrite a dart walk of the old graph in the new graph."""
        segs = list(cycle)
        n = len(segs)
        if n and all(g.darts[d].edge in removed_edges for d in segs):
            raise MoveError("cycle lies entirely inside the moved gadget")
        # rotate so the walk starts on a surviving dart
        k = next(i for i, d in enumerate(segs) if g.darts[d].edge not in removed_edges)
        segs = segs[k:] + segs[:k]
        out = []
        i = 0
        while i < n:
            d = segs[i]
            if g.darts[d].edge not in removed_edges:
                out.append(d)
                i += 1
                continue
            if i + 1 >= n or g.darts[segs[i + 1]].edge not in removed_edges:
                raise MoveError("walk stops on a removed black vertex")
            d2_ = segs[i + 1]
            key = (g.tail(d), g.head(d), g.head(d2_))
            if key not in routes:
                raise MoveError(f"cannot transport hop {key}")
            out.extend(routes[key])
            i += 2
        return out

    record = MoveRecord("square", {
        "face": fid, "new_face": face_map[fid], "face_map": face_map,
        "reroute": reroute, "new_blacks": (nb1, nb2),
        "corners": (m1, m2, m3, m4),
    })
    return gn, new_wt, record


def contraction_move(g, wt, v):
    """Contract a degree-2 vertex into a single vertex of its neighbors' color."""
    if g.degree(v) != 2:
        raise MoveError(f"vertex {v} has degree {g.degree(v)}, need 2")
    dA, dB = g.rotation[v]
    eA, eB = g.darts[dA].edge, g.darts[dB].edge
    if eA == eB:
        raise MoveError("contracting a doubled edge is unsupported")
    nA, nB = g.head(dA), g.head(dB)
    if nA == nB:
        raise MoveError("contraction would create a single merged loop vertex")
    # gauge both edges to 1: first at v, then at the far endpoint of eB
    wt = dict(wt)
    lam = wt[eA]
    wt[eA], wt[eB] = wt[eA] / lam, wt[eB] / lam
    mu = wt[eB]
    for d in g.rotation[nB]:
        wt[g.darts[d].edge] = wt[g.darts[d].edge] / mu

    # the merged vertex keeps nA's name and position; nB's darts move over,
    # with nB now reached by the path nA -> v -> nB, displacement
    # -disp(dA) + disp(dB)
    off = (-g.disp(dA)[0] + g.disp(dB)[0], -g.disp(dA)[1] + g.disp(dB)[1])
    gn = TorusGraph()
    for u in g.vertex_ids():
        if u not in (v, nB):
            gn.add_vertex(u, g.colors[u], g.positions.get(u))
    if nA not in gn.colors:
        raise MoveError("unexpected vertex bookkeeping")
    new_wt = {}
    for e in g.edges():
        if e in (eA, eB):
            continue
        v1, v2, dx, dy = g.edge_ends[e]
        if v1 == nB:
            v1, dx, dy = nA, dx + off[0], dy + off[1]
        if v2 == nB:
            # dart e- is based at nB and gains off; the stored dart loses it
            v2, dx, dy = nA, dx - off[0], dy - off[1]
        gn.add_edge(e, v1, v2, dx, dy)
        new_wt[e] = wt[e]
    rotA = list(g.rotation[nA])
    rotB = list(g.rotation[nB])
    ia = rotA.index(g.twin(dA))
    ib = rotB.index(g.twin(dB))
    spliced = rotA[:ia] + rotB[ib + 1:] + rotB[:ib] + rotA[ia + 1:]
    gn_rot = []
    for d in spliced:
        gn_rot.append(d)
    for u in g.vertex_ids():
        if u in (v, nA, nB):
            continue
        gn.set_rotation(u, list(g.rotation[u]))
    gn.set_rotation(nA, gn_rot)
    gn.freeze()
    gn.validate()

    def reroute(cycle):
        out = []
        for d in cycle:
            e = g.darts[d].edge
            if e in (eA, eB):
                continue
            out.append(d)
        return out

    record = MoveRecord("contract", {
        "vertex": v, "merged": nA, "gone": nB,
        "face_map": _match_faces(g, gn, {eA, eB}),
        "reroute": reroute,
    })
    return gn, new_wt, record


def _match_faces(g, gn, removed_edges):
    out = {}
    for fid, orbit in g.faces():
        survivor = next((x for x in orbit if g.darts[x].edge not in removed_edges), None)
        if survivor is not None:
            out[fid] = gn.face_of_dart(survivor)
    return out


def uncontraction_move(g, wt, v, arc_start, arc_len, tag="u"):
    """Split vertex v: darts arc_start..arc_start+arc_len-1 (ccw) stay on a
    new copy v1; the rest go to v2; a degree-2 vertex of the opposite color
    joins them with two weight-1 edges."""
    rot = list(g.rotation[v])
    k = len(rot)
    if not (0 < arc_len < k):
        raise MoveError("arc must be a proper nonempty subset")
    arc = [rot[(arc_start + i) % k] for i in range(arc_len)]
    rest = [rot[(arc_start + arc_len + i) % k] for i in range(k - arc_len)]
    col = g.colors[v]
    mid_col = "w" if col == "b" else "b"
    v1, v2, mid = f"{v}_{tag}1", f"{v}_{tag}2", f"{v}_{tag}m"
    gn = TorusGraph()
    for u in g.vertex_ids():
        if u != v:
            gn.add_vertex(u, g.colors[u], g.positions.get(u))
    gn.add_vertex(v1, col, g.positions.get(v))
    gn.add_vertex(v2, col)
    gn.add_vertex(mid, mid_col)
    new_wt = {}
    where = {}
    for d in arc:
        where[d] = v1
    for d in rest:
        where[d] = v2
    for e in g.edges():
        va, vb, dx, dy = g.edge_ends[e]
        if va == v:
            va = where[e + "+"]
        if vb == v:
            vb = where[e + "-"]
        gn.add_edge(e, va, vb, dx, dy)
        new_wt[e] = wt[e]
    e1, e2 = f"{v}_{tag}e1", f"{v}_{tag}e2"
    one = _one_like(wt)
    if col == "b":
        gn.add_edge(e1, v1, mid, 0, 0)
        gn.add_edge(e2, v2, mid, 0, 0)
    else:
        gn.add_edge(e1, mid, v1, 0, 0)
        gn.add_edge(e2, mid, v2, 0, 0)
    new_wt[e1] = one
    new_wt[e2] = one
    gn.set_rotation(v1, arc + [e1 + "+" if col == "b" else e1 + "-"])
    gn.set_rotation(v2, rest + [e2 + "+" if col == "b" else e2 + "-"])
    gn.set_rotation(mid, [e1 + "-" if col == "b" else e1 + "+",
                          e2 + "-" if col == "b" else e2 + "+"])
    for u in g.vertex_ids():
        if u != v:
            gn.set_rotation(u, list(g.rotation[u]))
    gn.freeze()
    gn.validate()
    record = MoveRecord("uncontract", {
        "vertex": v, "parts": (v1, v2, mid),
        "face_map": _match_faces(g, gn, set()),
        "reroute": lambda cycle: list(cycle),
    })
    return gn, new_wt, record


def color_change(g, wt):
    """Flip every vertex color, keeping edges, rotations and weights."""
    gn = g.copy()
    gn.colors = {v: ("w" if c == "b" else "b" if c == "w" else "n")
                 for v, c in g.colors.items()}
    return gn, dict(wt)


# -- the Ising locus ------------------------------------------------------------


def ising_locus_check(g, wt, gadget_map, tol=None):
    """Apply the square move at every gadget square and compare the X basis
    with the color change. Returns (passes, report).

    The report carries per-basis-element residuals (mu-route value divided by
    color-change value, minus one) and the structural isomorphism check.
    """
    squares = sorted(set(gadget_map.squares.values()))
    cur_g, cur_wt = g, dict(wt)
    face_map = {fid: fid for fid in g.face_ids()}
    cycle_a, cycle_b = g.homology_basis_cycles()
    ca, cb = list(cycle_a), list(cycle_b)
    for fid in squares:
        cur_fid = face_map[fid]
        cur_g, cur_wt, rec = square_move(cur_g, cur_wt, cur_fid)
        face_map = {old: rec.map_face(nf) for old, nf in face_map.items()}
        ca = rec.reroute(ca)
        cb = rec.reroute(cb)
    cc_g, cc_wt = color_change(g, wt)
    iso = cur_g.isomorphic(cc_g)

    residuals = {}
    ok = True
    for fid in g.face_ids():
        target = x_of_cycle(cc_g, cc_wt, g.face_darts(fid))
        got = x_of_cycle(cur_g, cur_wt, cur_g.face_darts(face_map[fid]))
        residuals[fid] = _residual(got, target)
        ok = ok and _is_zero(residuals[fid], tol)
    for name, cyc_old, cyc_new in (("a", cycle_a, ca), ("b", cycle_b, cb)):
        target = x_of_cycle(cc_g, cc_wt, cyc_old)
        got = x_of_cycle(cur_g, cur_wt, cyc_new)
        residuals[name] = _residual(got, target)
        ok = ok and _is_zero(residuals[name], tol)
    report = {"residuals": residuals, "isomorphic": iso,
              "mu_graph": cur_g, "mu_weights": cur_wt, "face_map": face_map}
    return ok and iso, report


def _residual(got, target):
    try:
        return got / target - 1
    except ZeroDivisionError:
        return float("inf")


def _is_zero(r, tol):
    if isinstance(r, Fraction):
        return r == 0 if tol is None else abs(r) <= tol
    return abs(r) <= (tol if tol is not None else 1e-9)


def ising_from_faces(face_x):
    """Couplings from square-face X values: s = sqrt(X/(1+X)), c = sqrt(1/(1+X)).

    Exact when the fractions are perfect squares, numeric otherwise.
    """
    out = {}
    for key, x in face_x.items():
        if isinstance(x, Fraction):
            if x <= 0:
                raise MoveError(f"face X must be positive, got {x}")
            s2 = x / (1 + x)
            c2 = 1 / (1 + x)
            s, c = _fraction_sqrt(s2), _fraction_sqrt(c2)
            if s is not None and c is not None:
                out[key] = make_coupling(sc=(s, c))
                continue
            x = float(x)
        if x <= 0:
            raise MoveError(f"face X must be positive, got {x}")
        s = math.sqrt(x / (1 + x))
        c = math.sqrt(1 / (1 + x))
        out[key] = make_coupling(sc=(s, c))
    return out
