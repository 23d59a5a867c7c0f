"""Torus-embedded graphs as rotation systems with homology displacements.

A graph is stored as a set of darts (directed half-edges). Each dart knows
its twin, the next dart counterclockwise around its tail vertex, and a
displacement in Z^2 recording signed crossings with the two fundamental
loops (x-crossings give the z exponent, y-crossings the w exponent).

Faces are the orbits of d -> prev_ccw(twin(d)); their boundaries are
counterclockwise. Zig-zag paths turn maximally right at black vertices and
maximally left at white ones; on uncolored graphs both turn parities are
tracked, which yields every path together with its reversal partner.
"""
from __future__ import annotations

from fractions import Fraction

from .exactalg import NewtonPolygon


def _primitive_period(seq):
    """Smallest repeating block of a cyclic sequence (degree-2 vertices make
    alternating strands retrace themselves)."""
    n = len(seq)
    for p in range(1, n + 1):
        if n % p == 0 and all(seq[i] == seq[i % p] for i in range(n)):
            return seq[:p]
    return seq


class GraphError(ValueError):
    """Raised for structurally invalid graphs or inputs."""


class ParseError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class Dart:
    __slots__ = ("id", "edge", "vertex", "head", "disp")

    def __init__(self, dart_id, edge, vertex, head, disp):
        self.id = dart_id
        self.edge = edge
        self.vertex = vertex          # tail
        self.head = head
        self.disp = (int(disp[0]), int(disp[1]))

    def __repr__(self):
        return f"Dart({self.id}: {self.vertex}->{self.head} {self.disp})"


class TorusGraph:
    """Immutable-after-validation combinatorial map on the torus.

    vertices: id -> color ('b' | 'w' | 'n'); positions optional metadata.
    Edge ids are strings; the two darts of edge e are named 'e+' (the
    stored orientation, carrying the stored displacement) and 'e-'.
    """

    def __init__(self):
        self.colors = {}
        self.positions = {}
        self.darts = {}
        self.edge_ends = {}           # edge id -> (v1, v2, dx, dy)
        self.rotation = {}            # vertex -> list of dart ids, ccw
        self._next = {}
        self._prev = {}
        self._faces = None
        self._face_of = None
        self._zigzags = None
        self._cycle_a = None
        self._cycle_b = None

    # -- construction -------------------------------------------------------

    def add_vertex(self, v, color="n", pos=None):
        if v in self.colors:
            raise GraphError(f"duplicate vertex {v}")
        if color not in ("b", "w", "n"):
            raise GraphError(f"bad color {color!r} for vertex {v}")
        self.colors[v] = color
        if pos is not None:
            self.positions[v] = (float(pos[0]), float(pos[1]))

    def add_edge(self, e, v1, v2, dx=0, dy=0):
        if e in self.edge_ends:
            raise GraphError(f"duplicate edge {e}")
        for v in (v1, v2):
            if v not in self.colors:
                raise GraphError(f"edge {e} references unknown vertex {v}")
        self.edge_ends[e] = (v1, v2, int(dx), int(dy))
        self.darts[e + "+"] = Dart(e + "+", e, v1, v2, (dx, dy))
        self.darts[e + "-"] = Dart(e + "-", e, v2, v1, (-dx, -dy))

    def set_rotation(self, v, dart_ids):
        if v not in self.colors:
            raise GraphError(f"rotation for unknown vertex {v}")
        self.rotation[v] = list(dart_ids)

    def freeze(self):
        """Resolve rotations into successor maps; clears caches."""
        self._next, self._prev = {}, {}
        for v, ds in self.rotation.items():
            for d in ds:
                if d not in self.darts:
                    raise GraphError(f"rotation at {v} names unknown dart {d}")
                if self.darts[d].vertex != v:
                    raise GraphError(f"dart {d} is not based at {v}")
            for i, d in enumerate(ds):
                nxt = ds[(i + 1) % len(ds)]
                self._next[d] = nxt
                self._prev[nxt] = d
        self._faces = None
        self._face_of = None
        self._zigzags = None
        self._cycle_a = None
        self._cycle_b = None
        return self

    def copy(self):
        g = TorusGraph()
        g.colors = dict(self.colors)
        g.positions = dict(self.positions)
        for e, (v1, v2, dx, dy) in self.edge_ends.items():
            g.edge_ends[e] = (v1, v2, dx, dy)
            g.darts[e + "+"] = Dart(e + "+", e, v1, v2, (dx, dy))
            g.darts[e + "-"] = Dart(e + "-", e, v2, v1, (-dx, -dy))
        g.rotation = {v: list(ds) for v, ds in self.rotation.items()}
        return g.freeze()

    # -- elementary queries --------------------------------------------------

    def twin(self, d):
        return d[:-1] + ("-" if d.endswith("+") else "+")

    def next_ccw(self, d):
        return self._next[d]

    def prev_ccw(self, d):
        return self._prev[d]

    def tail(self, d):
        return self.darts[d].vertex

    def head(self, d):
        return self.darts[d].head

    def disp(self, d):
        return self.darts[d].disp

    def edges(self):
        return sorted(self.edge_ends)

    def vertex_ids(self):
        return sorted(self.colors)

    def degree(self, v):
        return len(self.rotation.get(v, ()))

    def is_bipartite_colored(self):
        if any(c == "n" for c in self.colors.values()):
            return False
        return all(self.colors[v1] != self.colors[v2] for v1, v2, _, _ in self.edge_ends.values())

    def blacks(self):
        return sorted(v for v, c in self.colors.items() if c == "b")

    def whites(self):
        return sorted(v for v, c in self.colors.items() if c == "w")

    # -- faces ---------------------------------------------------------------

    def face_next(self, d):
        """Next dart counterclockwise around the face to the left of d."""
        return self.prev_ccw(self.twin(d))

    def faces(self):
        """List of faces; each is a list of dart ids in ccw boundary order.

        Deterministic: faces discovered scanning darts in sorted id order.
        """
        if self._faces is None:
            seen = set()
            out = []
            face_of = {}
            for d0 in sorted(self.darts):
                if d0 in seen:
                    continue
                orbit = []
                d = d0
                while True:
                    orbit.append(d)
                    seen.add(d)
                    d = self.face_next(d)
                    if d == d0:
                        break
                    if len(orbit) > 2 * len(self.darts):
                        raise GraphError(f"face trace from {d0} does not close")
                fid = f"f{len(out)}"
                for d in orbit:
                    face_of[d] = fid
                out.append((fid, orbit))
            self._faces = out
            self._face_of = face_of
        return self._faces

    def face_ids(self):
        return [fid for fid, _ in self.faces()]

    def face_darts(self, fid):
        for f, orbit in self.faces():
            if f == fid:
                return list(orbit)
        raise GraphError(f"unknown face {fid}")

    def face_of_dart(self, d):
        self.faces()
        return self._face_of[d]

    # -- validation ----------------------------------------------------------

    def validate(self):
        """Check all invariants; returns a report dict, raises GraphError on failure."""
        problems = []
        for d, dart in self.darts.items():
            t = self.twin(d)
            if t not in self.darts:
                problems.append(f"dart {d} has no twin")
                continue
            tw = self.darts[t]
            if tw.vertex != dart.head or tw.head != dart.vertex:
                problems.append(f"twin of {d} has inconsistent endpoints")
            if tw.disp != (-dart.disp[0], -dart.disp[1]):
                problems.append(f"twin of {d} has inconsistent displacement")
        for v in self.colors:
            ds = self.rotation.get(v)
            if not ds:
                problems.append(f"vertex {v} has no rotation")
                continue
            at_v = sorted(d for d, dart in self.darts.items() if dart.vertex == v)
            if sorted(ds) != at_v:
                problems.append(f"rotation at {v} does not list exactly its darts")
        if problems:
            raise GraphError("; ".join(problems))

        faces = self.faces()
        for fid, orbit in faces:
            dx = sum(self.disp(d)[0] for d in orbit)
            dy = sum(self.disp(d)[1] for d in orbit)
            if (dx, dy) != (0, 0):
                raise GraphError(f"face {fid} has nonzero total displacement ({dx},{dy})")
        V = len(self.colors)
        E = len(self.edge_ends)
        F = len(faces)
        euler = V - E + F
        if euler != 0:
            raise GraphError(f"Euler characteristic {euler} != 0 (V={V} E={E} F={F})")
        colored = all(c in "bw" for c in self.colors.values())
        if colored:
            for e, (v1, v2, _, _) in self.edge_ends.items():
                if self.colors[v1] == self.colors[v2]:
                    raise GraphError(f"edge {e} joins two {self.colors[v1]}-vertices")
        return {
            "V": V, "E": E, "F": F, "euler": euler,
            "faces": {fid: len(orbit) for fid, orbit in faces},
            "bipartite": colored,
        }

    # -- homology -------------------------------------------------------------

    def cycle_displacement(self, darts_with_mult):
        """Homology class of an integer combination of darts.

        Accepts a list of dart ids (each multiplicity 1) or (dart, mult) pairs.
        Verifies the boundary vanishes.
        """
        flow = {}
        total = [0, 0]
        for item in darts_with_mult:
            d, m = item if isinstance(item, tuple) else (item, 1)
            dart = self.darts[d]
            flow[dart.vertex] = flow.get(dart.vertex, 0) - m
            flow[dart.head] = flow.get(dart.head, 0) + m
            total[0] += m * dart.disp[0]
            total[1] += m * dart.disp[1]
        if any(flow.values()):
            raise GraphError("dart combination is not a cycle")
        return (total[0], total[1])

    def walk_displacement(self, dart_seq):
        dx = sum(self.disp(d)[0] for d in dart_seq)
        dy = sum(self.disp(d)[1] for d in dart_seq)
        return (dx, dy)

    def homology_basis_cycles(self):
        """Two closed walks with classes (1,0) and (0,1), found by BFS in the
        Z^2-cover from the smallest vertex. Deterministic."""
        if self._cycle_a is None:
            self._cycle_a = self._find_class_cycle((1, 0))
            self._cycle_b = self._find_class_cycle((0, 1))
        return self._cycle_a, self._cycle_b

    def _find_class_cycle(self, target):
        root = self.vertex_ids()[0]
        start = (root, 0, 0)
        goal = (root, target[0], target[1])
        prev = {start: None}
        frontier = [start]
        while frontier:
            nxt = []
            for node in frontier:
                v, x, y = node
                for d in self.rotation[v]:
                    dart = self.darts[d]
                    child = (dart.head, x + dart.disp[0], y + dart.disp[1])
                    if abs(child[1]) > abs(target[0]) + 2 or abs(child[2]) > abs(target[1]) + 2:
                        continue
                    if child not in prev:
                        prev[child] = (node, d)
                        nxt.append(child)
            if goal in prev:
                break
            frontier = nxt
            if not frontier:
                raise GraphError(f"no cycle of class {target} found")
        path = []
        node = goal
        while prev[node] is not None:
            node, d = prev[node]
            path.append(d)
        path.reverse()
        return path

    # -- zig-zag paths ---------------------------------------------------------

    def zigzag_paths(self):
        """Zig-zag paths with homology classes.

        Bipartite graphs use the black-right/white-left rule, and every dart
        lies on exactly one path. Uncolored graphs track (dart, parity)
        strands with alternating maximal turns; every dart is covered once
        per parity, producing each path together with its reversal.
        Returns a list of dicts: {'id', 'darts', 'class'}.
        """
        if self._zigzags is not None:
            return self._zigzags
        out = []
        if self.is_bipartite_colored():
            seen = set()
            for d0 in sorted(self.darts):
                if d0 in seen:
                    continue
                darts = []
                d = d0
                while True:
                    darts.append(d)
                    seen.add(d)
                    t = self.twin(d)
                    if self.colors[self.head(d)] == "b":
                        d = self.next_ccw(t)   # maximal right at black
                    else:
                        d = self.prev_ccw(t)   # maximal left at white
                    if d == d0:
                        break
                    if len(darts) > 2 * len(self.darts):
                        raise GraphError("zig-zag does not close")
                out.append(darts)
        else:
            seen = set()
            for d0 in sorted(self.darts):
                for p0 in (1, -1):
                    if (d0, p0) in seen:
                        continue
                    darts = []
                    d, p = d0, p0
                    while True:
                        darts.append(d)
                        seen.add((d, p))
                        t = self.twin(d)
                        d = self.next_ccw(t) if p > 0 else self.prev_ccw(t)
                        p = -p
                        if (d, p) == (d0, p0):
                            break
                        if len(darts) > 4 * len(self.darts):
                            raise GraphError("zig-zag strand does not close")
                    out.append(_primitive_period(darts))
        self._zigzags = [
            {"id": f"zz{i}", "darts": ds, "class": self.walk_displacement(ds)}
            for i, ds in enumerate(out)
        ]
        return self._zigzags

    def zigzag_of_dart(self, d):
        """Id of the zig-zag containing dart d (bipartite graphs)."""
        for zz in self.zigzag_paths():
            if d in zz["darts"]:
                return zz["id"]
        raise GraphError(f"dart {d} not on any zig-zag")

    # -- Newton polygon ----------------------------------------------------------

    def newton_polygon(self):
        """Polygon assembled from zig-zag classes.

        Uncolored graphs: centered at the origin (classes come in opposite
        pairs, so the centering is integral). Bipartite graphs: returned with
        the translation flag set (normalized to the lex-min vertex at the
        origin is NOT applied; vertices are the centered walk, flag tells
        consumers the translation is conventional).
        Returns (NewtonPolygon, translation_free: bool).
        """
        classes = [zz["class"] for zz in self.zigzag_paths()]
        if any(c == (0, 0) for c in classes):
            raise GraphError("zero-homology zig-zag: graph is not minimal")
        import math
        def angle(v):
            return math.atan2(v[1], v[0])
        ordered = sorted(classes, key=angle)
        pts = [(0, 0)]
        for v in ordered:
            pts.append((pts[-1][0] + v[0], pts[-1][1] + v[1]))
        if pts[-1] != (0, 0):
            raise GraphError("zig-zag classes do not close a polygon")
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        cx, cy = max(xs) + min(xs), max(ys) + min(ys)
        bipartite = self.is_bipartite_colored()
        if cx % 2 == 0 and cy % 2 == 0:
            pts = [(x - cx // 2, y - cy // 2) for x, y in pts]
            return NewtonPolygon(pts), not bipartite
        if not bipartite:
            raise GraphError("uncolored graph polygon cannot be centered integrally")
        return NewtonPolygon(pts), False

    # -- minimality -----------------------------------------------------------

    def check_minimal(self):
        """Minimality via lifts to a finite window of the Z^2-cover.

        Returns (bool, certificate). The certificate names the offending
        zig-zags and dart lifts for each violation.
        """
        zzs = self.zigzag_paths()
        for zz in zzs:
            if zz["class"] == (0, 0):
                return False, {"kind": "zero-homology", "zigzag": zz["id"]}
        L = max(len(zz["darts"]) for zz in zzs) + 1

        def lift(zz):
            """Dart lifts (dart, (tx, ty)) over enough periods to cover the window."""
            reps = 2 * L + 3
            out = []
            t = (0, 0)
            for _ in range(reps):
                for d in zz["darts"]:
                    out.append((d, t))
                    dd = self.disp(d)
                    t = (t[0] + dd[0], t[1] + dd[1])
            return out

        lifted = {zz["id"]: lift(zz) for zz in zzs}

        # self-intersection: the lift uses the same edge-lift on two passes
        # (periodic repeats of the same dart are the same pass).
        for zz in zzs:
            path = lifted[zz["id"]]
            period = len(zz["darts"])
            edge_seen = {}
            for idx, (d, t) in enumerate(path):
                key = (self.darts[d].edge, t)
                if key in edge_seen:
                    prev_idx = edge_seen[key]
                    if (idx - prev_idx) % period != 0 or path[prev_idx][0] != d:
                        return False, {"kind": "self-intersection", "zigzag": zz["id"],
                                       "darts": (path[prev_idx][0], d)}
                else:
                    edge_seen[key] = idx
        # parallel bigons: two lifts traversing two distinct edge-lifts in the
        # same direction and the same order.
        for za in zzs:
            for zb in zzs:
                if za["id"] > zb["id"]:
                    continue
                hit = self._bigon_between(lifted[za["id"]], lifted[zb["id"]],
                                          za, zb, L)
                if hit:
                    return False, hit
        return True, {"kind": "minimal"}

    def _bigon_between(self, path_a, path_b, za, zb, window):
        """Detect a parallel bigon between two lifted paths (including a path
        against its own translates)."""
        pos_b = {}
        for idx, (d, t) in enumerate(path_b):
            pos_b.setdefault((d, t), idx)
        cls = za["class"]

        def edge_lift(d, t):
            if d.endswith("+"):
                return (self.darts[d].edge, t)
            dd = self.disp(d)
            return (self.darts[d].edge, (t[0] + dd[0], t[1] + dd[1]))

        for shift_x in range(-window, window + 1):
            for shift_y in range(-window, window + 1):
                if za["id"] == zb["id"] and cls[0] * shift_y == cls[1] * shift_x:
                    continue  # own translate along the class is the same lift
                shared = []
                for idx, (d, t) in enumerate(path_a):
                    key = (d, (t[0] + shift_x, t[1] + shift_y))
                    if key in pos_b:
                        shared.append((idx, pos_b[key], d, t))
                if len(shared) < 2:
                    continue
                shared.sort()
                for i in range(len(shared)):
                    for j in range(i + 1, len(shared)):
                        ia, ib, da, ta = shared[i]
                        ja, jb, db, tb = shared[j]
                        if ia < ja and ib < jb and edge_lift(da, ta) != edge_lift(db, tb):
                            return {"kind": "parallel-bigon", "zigzags": (za["id"], zb["id"]),
                                    "darts": (da, db)}
        return None

    # -- duality ---------------------------------------------------------------

    def face_lift_label(self, d, t):
        """Label (face id, translate) of the face-lift containing dart-lift (d, t).

        The translate label is the translate of the face's minimal dart within
        the lifted orbit.
        """
        fid = self.face_of_dart(d)
        orbit = self.face_darts(fid)
        k = orbit.index(d)
        # walk backward to the orbit start accumulating displacement
        tx, ty = t
        for i in range(k):
            dd = self.disp(orbit[k - 1 - i])
            tx, ty = tx - dd[0], ty - dd[1]
        # orbit[0] lift translate now (tx, ty); canonical dart = min(orbit)
        m = orbit.index(min(orbit))
        for i in range(m):
            dd = self.disp(orbit[i])
            tx, ty = tx + dd[0], ty + dd[1]
        return (fid, (tx, ty))

    def dual_graph(self):
        """Dual torus graph: faces become vertices.

        The dual dart of e+ runs from the face left of e+ to the face left of
        e-; its displacement is the translate difference of the two face-lifts
        in the Z^2-cover. Primal edge ids are kept, so e+ in the dual
        corresponds to e+ in the primal.
        """
        self.faces()
        dual = TorusGraph()
        for fid, _ in self.faces():
            dual.add_vertex(fid, "n")
        for e, (v1, v2, dx, dy) in self.edge_ends.items():
            f_plus = self.face_of_dart(e + "+")
            f_minus = self.face_of_dart(e + "-")
            _, t1 = self.face_lift_label(e + "+", (0, 0))
            _, t2 = self.face_lift_label(e + "-", (dx, dy))
            dual.add_edge(e, f_plus, f_minus, t2[0] - t1[0], t2[1] - t1[1])
        # rotation at a dual vertex (= primal face): radial dual darts cross
        # the ccw face boundary in the same ccw order.
        for fid, orbit in self.faces():
            dual.set_rotation(fid, list(orbit))
        dual.freeze()
        return dual

    # -- isomorphism (rotation system + colors) ---------------------------------

    def canonical_form(self):
        """Canonical string of the rotation system with colors, for isomorphism
        tests. Tries every dart as the seed of a relabeling BFS."""
        best = None
        for seed in sorted(self.darts):
            label = {}
            order = []
            stack = [seed]
            while stack:
                d = stack.pop()
                if d in label:
                    continue
                label[d] = len(label)
                order.append(d)
                stack.append(self.twin(d))
                stack.append(self.next_ccw(d))
            if len(label) != len(self.darts):
                continue  # disconnected; seed covers one component
            desc = []
            for d in order:
                desc.append((label[self.twin(d)], label[self.next_ccw(d)],
                             self.colors[self.tail(d)]))
            s = repr(desc)
            if best is None or s < best:
                best = s
        return best

    def isomorphic(self, other):
        return self.canonical_form() == other.canonical_form()


# -- text format ----------------------------------------------------------------


def parse_torus_graph(text):
    """Parse the `torus-graph v1` format.

    Returns (TorusGraph, weights: edge->Fraction|float, couplings: edge->dict).
    Strict: unknown keys, bad arity and undefined references are errors.
    """
    g = TorusGraph()
    weights = {}
    couplings = {}
    rot_lines = []
    lines = text.splitlines()
    if not lines or lines[0].strip() != "torus-graph v1":
        raise ParseError("missing 'torus-graph v1' header", 1)
    for no, raw in enumerate(lines[1:], start=2):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key = parts[0]
        try:
            if key == "vertex":
                if len(parts) not in (3, 5):
                    raise ParseError("vertex takes: id color [x y]", no)
                pos = (float(parts[3]), float(parts[4])) if len(parts) == 5 else None
                g.add_vertex(parts[1], parts[2], pos)
            elif key == "edge":
                if len(parts) != 6:
                    raise ParseError("edge takes: id v1 v2 dx dy", no)
                g.add_edge(parts[1], parts[2], parts[3], int(parts[4]), int(parts[5]))
            elif key == "rot":
                if len(parts) < 3:
                    raise ParseError("rot takes: vertex dart...", no)
                rot_lines.append((no, parts[1], parts[2:]))
            elif key == "weight":
                if len(parts) != 3:
                    raise ParseError("weight takes: edge value", no)
                weights[parts[1]] = _parse_number(parts[2], no)
            elif key == "coupling":
                if len(parts) != 3:
                    raise ParseError("coupling takes: edge J=<v>|sc=<s>,<c>", no)
                couplings[parts[1]] = _parse_coupling(parts[2], no)
            else:
                raise ParseError(f"unknown key {key!r}", no)
        except GraphError as exc:
            raise ParseError(str(exc), no) from exc
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(str(exc), no) from exc
    for no, v, ds in rot_lines:
        resolved = []
        for name in ds:
            if name.endswith("+") or name.endswith("-"):
                if name not in g.darts:
                    raise ParseError(f"unknown dart {name}", no)
                resolved.append(name)
            else:
                if name not in g.edge_ends:
                    raise ParseError(f"unknown edge {name}", no)
                v1, v2, _, _ = g.edge_ends[name]
                if v1 == v2:
                    raise ParseError(f"loop edge {name} needs an explicit dart (+/-)", no)
                if v1 == v:
                    resolved.append(name + "+")
                elif v2 == v:
                    resolved.append(name + "-")
                else:
                    raise ParseError(f"edge {name} not incident to {v}", no)
        try:
            g.set_rotation(v, resolved)
        except GraphError as exc:
            raise ParseError(str(exc), no) from exc
    g.freeze()
    for e in weights:
        if e not in g.edge_ends:
            raise ParseError(f"weight for unknown edge {e}")
    for e in couplings:
        if e not in g.edge_ends:
            raise ParseError(f"coupling for unknown edge {e}")
    return g, weights, couplings


def _parse_number(text, line):
    try:
        if "/" in text or text.lstrip("+-").isdigit():
            return Fraction(text)
        return float(text)
    except ValueError as exc:
        raise ParseError(f"bad number {text!r}", line) from exc


def _parse_coupling(text, line):
    if text.startswith("J="):
        return {"J": float(text[2:])}
    if text.startswith("sc="):
        body = text[3:]
        if "," not in body:
            raise ParseError("sc= takes two comma-separated rationals", line)
        s, c = body.split(",", 1)
        return {"s": Fraction(s), "c": Fraction(c)}
    raise ParseError(f"bad coupling spec {text!r}", line)


def serialize_torus_graph(g, weights=None, couplings=None):
    """Write the `torus-graph v1` format deterministically."""
    out = ["torus-graph v1"]
    for v in g.vertex_ids():
        pos = g.positions.get(v)
        if pos:
            out.append(f"vertex {v} {g.colors[v]} {pos[0]:.12g} {pos[1]:.12g}")
        else:
            out.append(f"vertex {v} {g.colors[v]}")
    for e in g.edges():
        v1, v2, dx, dy = g.edge_ends[e]
        out.append(f"edge {e} {v1} {v2} {dx} {dy}")
    for v in g.vertex_ids():
        out.append("rot " + v + " " + " ".join(g.rotation[v]))
    if weights:
        for e in sorted(weights):
            w = weights[e]
            s = str(w) if isinstance(w, Fraction) else f"{w:.12g}"
            out.append(f"weight {e} {s}")
    if couplings:
        for e in sorted(couplings):
            c = couplings[e]
            if "s" in c:
                out.append(f"coupling {e} sc={c['s']},{c['c']}")
            else:
                out.append(f"coupling {e} J={c['J']:.12g}")
    return "\n".join(out) + "\n"
