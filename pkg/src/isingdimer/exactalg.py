"""Exact algebra kernels: rationals, two-variable Laurent polynomials,
small Laurent-entry matrices, lattice Newton polygons and resultants.

Coefficients are either `fractions.Fraction` (exact mode) or Python
floats/complex (numeric mode). A mode is uniform within any one value;
mixing modes in a binary operation raises `ModeError`.
"""
from __future__ import annotations

import cmath
from fractions import Fraction

NUMERIC_ZERO_TOL = 1e-10


class ModeError(TypeError):
    """Raised when exact and numeric coefficients are mixed."""


class DimensionError(ValueError):
    """Raised for non-square matrices or exceeded size bounds."""


def is_exact_scalar(c):
    return isinstance(c, (int, Fraction))


def as_coeff(c):
    """Normalize a scalar into an admissible coefficient."""
    if isinstance(c, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, (Fraction, float, complex)):
        return c
    raise TypeError(f"unsupported coefficient type {type(c)!r}")


def coeff_is_zero(c, tol=NUMERIC_ZERO_TOL):
    if isinstance(c, Fraction):
        return c == 0
    return abs(c) <= tol


def format_coeff(c):
    """Render a coefficient: exact as p/q, numeric with 12 significant digits."""
    if isinstance(c, Fraction):
        return str(c)
    if isinstance(c, complex):
        return f"({c.real:.12g}{c.imag:+.12g}j)"
    return f"{c:.12g}"


def parse_rational(text):
    """Parse 'p/q' or an integer string into a Fraction."""
    return Fraction(text)


def _mono_str(i, j):
    parts = []
    if i == 1:
        parts.append("z")
    elif i != 0:
        parts.append(f"z^{i}")
    if j == 1:
        parts.append("w")
    elif j != 0:
        parts.append(f"w^{j}")
    return "*".join(parts)


def _term_sort_key(ij):
    i, j = ij
    return (abs(i), i < 0, abs(j), j < 0)


class LaurentPoly2:
    """A Laurent polynomial in z, w: a finite map (i, j) -> nonzero coefficient."""

    __slots__ = ("terms", "exact")

    def __init__(self, terms=None):
        clean = {}
        exact = True
        for ij, c in (terms or {}).items():
            c = as_coeff(c)
            if not is_exact_scalar(c):
                exact = False
            if coeff_is_zero(c, 0.0 if is_exact_scalar(c) else 0.0):
                continue
            if c != 0:
                clean[(int(ij[0]), int(ij[1]))] = c
        if not all(is_exact_scalar(c) for c in clean.values()):
            if any(is_exact_scalar(c) for c in clean.values()):
                clean = {ij: complex(c) if is_exact_scalar(c) else c for ij, c in clean.items()}
            exact = False
        self.terms = clean
        self.exact = exact if clean else True

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero():
        return LaurentPoly2({})

    @staticmethod
    def const(c):
        return LaurentPoly2({(0, 0): c})

    @staticmethod
    def monomial(i, j, c=1):
        return LaurentPoly2({(i, j): c})

    @staticmethod
    def var_z():
        return LaurentPoly2.monomial(1, 0)

    @staticmethod
    def var_w():
        return LaurentPoly2.monomial(0, 1)

    # -- basic queries ------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def support(self):
        return set(self.terms)

    def coeff(self, i, j):
        return self.terms.get((i, j), Fraction(0))

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly2):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def isclose(self, other, tol=NUMERIC_ZERO_TOL):
        keys = set(self.terms) | set(other.terms)
        return all(abs(complex(self.coeff(*k)) - complex(other.coeff(*k))) <= tol for k in keys)

    # -- ring operations ----------------------------------------------------

    def _check_mode(self, other):
        if self.terms and other.terms and self.exact != other.exact:
            raise ModeError("mixed exact/numeric operands")

    def __add__(self, other):
        if not isinstance(other, LaurentPoly2):
            other = LaurentPoly2.const(other)
        self._check_mode(other)
        terms = dict(self.terms)
        for ij, c in other.terms.items():
            s = terms.get(ij, 0) + c
            if coeff_is_zero(s, 0.0):
                terms.pop(ij, None)
            else:
                terms[ij] = s
        return LaurentPoly2(terms)

    def __neg__(self):
        return LaurentPoly2({ij: -c for ij, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, LaurentPoly2):
            other = LaurentPoly2.const(other)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly2):
            other = LaurentPoly2.const(other)
        self._check_mode(other)
        terms = {}
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in other.terms.items():
                ij = (i1 + i2, j1 + j2)
                s = terms.get(ij, 0) + c1 * c2
                if coeff_is_zero(s, 0.0):
                    terms.pop(ij, None)
                else:
                    terms[ij] = s
        return LaurentPoly2(terms)

    __rmul__ = __mul__
    __radd__ = __add__

    def __pow__(self, n):
        if n < 0:
            if len(self.terms) == 1:
                (i, j), c = next(iter(self.terms.items()))
                inv = Fraction(1, 1) / c if is_exact_scalar(c) else 1.0 / c
                return LaurentPoly2.monomial(-i, -j, inv) ** (-n)
            raise ValueError("negative powers only for monomials")
        out = LaurentPoly2.const(Fraction(1) if self.exact else 1.0)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def scale(self, c):
        c = as_coeff(c)
        return LaurentPoly2({ij: v * c for ij, v in self.terms.items()})

    def sigma(self):
        """(z, w) -> (1/z, 1/w): negate every exponent pair."""
        return LaurentPoly2({(-i, -j): c for (i, j), c in self.terms.items()})

    def shift(self, di, dj):
        return LaurentPoly2({(i + di, j + dj): c for (i, j), c in self.terms.items()})

    def eval(self, z, w):
        total = 0
        for (i, j), c in self.terms.items():
            zi = z ** i if i >= 0 else 1 / (z ** (-i))
            wj = w ** j if j >= 0 else 1 / (w ** (-j))
            total += (c if not isinstance(c, Fraction) or isinstance(z, Fraction) else complex(c)) * zi * wj
        return total

    def eval_exact(self, z, w):
        """Evaluate at exact rational (z, w); requires exact mode."""
        if not self.exact:
            raise ModeError("eval_exact on numeric polynomial")
        z, w = Fraction(z), Fraction(w)
        total = Fraction(0)
        for (i, j), c in self.terms.items():
            total += c * z ** i * w ** j
        return total

    def to_numeric(self):
        return LaurentPoly2({ij: complex(c) for ij, c in self.terms.items()})

    # -- degrees ------------------------------------------------------------

    def degree_range(self, var):
        """(min, max) exponent of 'z' or 'w' over the support; None for zero."""
        if not self.terms:
            return None
        k = 0 if var == "z" else 1
        exps = [ij[k] for ij in self.terms]
        return min(exps), max(exps)

    def coeffs_in(self, var):
        """View as a polynomial in `var` after clearing the minimal exponent.

        Returns (coeff list low..high as LaurentPoly2 in the other variable,
        cleared exponent).
        """
        if not self.terms:
            raise ValueError("zero polynomial")
        k = 0 if var == "z" else 1
        lo = min(ij[k] for ij in self.terms)
        hi = max(ij[k] for ij in self.terms)
        out = [dict() for _ in range(hi - lo + 1)]
        for (i, j), c in self.terms.items():
            d = (i if k == 0 else j) - lo
            other = (0, j) if k == 0 else (i, 0)
            out[d][other] = c
        return [LaurentPoly2(t) for t in out], lo

    # -- output -------------------------------------------------------------

    def canonical_str(self):
        if not self.terms:
            return "0"
        pieces = []
        for ij in sorted(self.terms, key=_term_sort_key):
            c = self.terms[ij]
            mono = _mono_str(*ij)
            if isinstance(c, Fraction):
                neg = c < 0
                mag = -c if neg else c
                body = f"{mag}" if not mono else (mono if mag == 1 else f"{mag}*{mono}")
            else:
                neg = isinstance(c, float) and c < 0
                mag = -c if neg else c
                body = format_coeff(mag) if not mono else f"{format_coeff(mag)}*{mono}"
            if not pieces:
                pieces.append(("-" if neg else "") + body)
            else:
                pieces.append(("- " if neg else "+ ") + body)
        return " ".join(pieces)

    def __repr__(self):
        return f"LaurentPoly2({self.canonical_str()})"


def lp_mul(p, q):
    """Exact product of two Laurent polynomials (same mode)."""
    return p * q


def lp_sigma(p):
    """Apply the involution sigma: (z, w) -> (z^-1, w^-1)."""
    return p.sigma()


ONE = LaurentPoly2.const(Fraction(1))


class LaurentMatrix:
    """A rectangular matrix of Laurent polynomials with labeled rows/columns."""

    def __init__(self, rows, cols, entries):
        self.rows = list(rows)
        self.cols = list(cols)
        self.entries = {}
        for r in self.rows:
            for c in self.cols:
                v = entries.get((r, c), LaurentPoly2.zero())
                if not isinstance(v, LaurentPoly2):
                    v = LaurentPoly2.const(v)
                self.entries[(r, c)] = v

    def __getitem__(self, rc):
        return self.entries[rc]

    def is_square(self):
        return len(self.rows) == len(self.cols)

    def transpose(self):
        return LaurentMatrix(self.cols, self.rows, {(c, r): v for (r, c), v in self.entries.items()})

    def map_entries(self, f):
        return LaurentMatrix(self.rows, self.cols, {rc: f(v) for rc, v in self.entries.items()})

    def matmul(self, other):
        if self.cols != other.rows:
            raise DimensionError("inner labels disagree")
        out = {}
        for r in self.rows:
            for c in other.cols:
                acc = LaurentPoly2.zero()
                for k in self.cols:
                    acc = acc + self.entries[(r, k)] * other.entries[(k, c)]
                out[(r, c)] = acc
        return LaurentMatrix(self.rows, other.cols, out)

    def equals(self, other):
        return (self.rows == other.rows and self.cols == other.cols
                and all(self.entries[rc] == other.entries[rc] for rc in self.entries))


def _det_cofactor(m, row_labels, col_labels, entries, memo):
    n = len(row_labels)
    if n == 0:
        return ONE
    if n == 1:
        return entries[(row_labels[0], col_labels[0])]
    key = (row_labels, col_labels)
    if key in memo:
        return memo[key]
    # expand along the sparsest row
    best_i = min(range(n), key=lambda i: sum(bool(entries[(row_labels[i], c)]) for c in col_labels))
    r = row_labels[best_i]
    rest_rows = row_labels[:best_i] + row_labels[best_i + 1:]
    acc = LaurentPoly2.zero()
    for k, c in enumerate(col_labels):
        a = entries[(r, c)]
        if not a:
            continue
        rest_cols = col_labels[:k] + col_labels[k + 1:]
        minor = _det_cofactor(m, rest_rows, rest_cols, entries, memo)
        term = a * minor
        sign = (-1) ** (best_i + k)
        acc = acc + (term if sign > 0 else -term)
    memo[key] = acc
    return acc


def lp_divexact(p, d):
    """Exact division p / d in the Laurent ring; raises if not divisible."""
    if d.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if p.is_zero():
        return LaurentPoly2.zero()
    lead = max(d.terms, key=_lex_key)
    dlead = d.terms[lead]
    rem = p
    qterms = {}
    guard = len(p.terms) * len(d.terms) + len(p.terms) + 8
    while rem.terms:
        guard -= 1
        if guard < 0:
            raise ArithmeticError("exact division did not terminate")
        rl = max(rem.terms, key=_lex_key)
        c = rem.terms[rl]
        qc = c / dlead
        qij = (rl[0] - lead[0], rl[1] - lead[1])
        qterms[qij] = qterms.get(qij, 0) + qc
        rem = rem - LaurentPoly2.monomial(*qij, qc) * d
    return LaurentPoly2(qterms)


def _lex_key(ij):
    return ij


def lm_determinant(m, bound=16):
    """Determinant of a square Laurent matrix.

    Cofactor expansion with minor memoization for n <= 8, fraction-free
    Bareiss elimination for larger matrices (up to `bound`).
    """
    if not m.is_square():
        raise DimensionError("determinant of a non-square matrix")
    n = len(m.rows)
    if n > bound:
        raise DimensionError(f"matrix dimension {n} exceeds bound {bound}")
    if n == 0:
        return ONE
    if n <= 8:
        return _det_cofactor(m, tuple(m.rows), tuple(m.cols), m.entries, {})
    # Bareiss on a dense copy
    a = [[m.entries[(r, c)] for c in m.cols] for r in m.rows]
    sign = 1
    prev = ONE
    for k in range(n - 1):
        if a[k][k].is_zero():
            piv = next((i for i in range(k + 1, n) if not a[i][k].is_zero()), None)
            if piv is None:
                return LaurentPoly2.zero()
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = lp_divexact(num, prev) if not prev == ONE else num
        prev = a[k][k]
    det = a[n - 1][n - 1]
    return det if sign > 0 else -det


def lm_adjugate(m, bound=16):
    """Adjugate (transposed cofactor matrix): m @ adj(m) == det(m) * I."""
    if not m.is_square():
        raise DimensionError("adjugate of a non-square matrix")
    n = len(m.rows)
    if n == 0:
        return LaurentMatrix([], [], {})
    if n == 1:
        return LaurentMatrix(m.cols, m.rows, {(m.cols[0], m.rows[0]): ONE})
    memo = {}
    out = {}
    rows = tuple(m.rows)
    cols = tuple(m.cols)
    for i, r in enumerate(rows):
        rest_rows = rows[:i] + rows[i + 1:]
        for j, c in enumerate(cols):
            rest_cols = cols[:j] + cols[j + 1:]
            minor = _det_cofactor(m, rest_rows, rest_cols, m.entries, memo)
            if (i + j) % 2:
                minor = -minor
            out[(c, r)] = minor
    return LaurentMatrix(m.cols, m.rows, out)


class NewtonPolygon:
    """Convex hull of a finite set of lattice points.

    vertices: counterclockwise, starting from the lexicographically
    smallest vertex. sides: per hull edge, its primitive vector and lattice
    length. interior: lattice points strictly inside.
    """

    def __init__(self, points):
        pts = sorted({(int(x), int(y)) for x, y in points})
        if not pts:
            raise ValueError("empty support")
        self.vertices = _convex_hull(pts)
        self.sides = []
        k = len(self.vertices)
        if k >= 2:
            for t in range(k if k > 2 else 1):
                x0, y0 = self.vertices[t]
                x1, y1 = self.vertices[(t + 1) % k]
                dx, dy = x1 - x0, y1 - y0
                g = _gcd(abs(dx), abs(dy))
                self.sides.append(((dx // g, dy // g), g))
        self.interior = self._interior_points()

    def _interior_points(self):
        v = self.vertices
        if len(v) < 3:
            return []
        xs = [p[0] for p in v]
        ys = [p[1] for p in v]
        out = []
        for x in range(min(xs), max(xs) + 1):
            for y in range(min(ys), max(ys) + 1):
                if all(_cross(v[i], v[(i + 1) % len(v)], (x, y)) > 0 for i in range(len(v))):
                    out.append((x, y))
        return out

    @property
    def genus(self):
        return len(self.interior)

    def translate(self, dx, dy):
        return NewtonPolygon([(x + dx, y + dy) for x, y in self.vertices])

    def normalized(self):
        """Translate so the lexicographically smallest vertex is the origin."""
        x0, y0 = min(self.vertices)
        return self.translate(-x0, -y0)

    def reflect(self):
        return NewtonPolygon([(-x, -y) for x, y in self.vertices])

    def is_centrally_symmetric(self):
        s = set(self.vertices)
        return all((-x, -y) in s for x, y in s)

    def __eq__(self, other):
        if not isinstance(other, NewtonPolygon):
            return NotImplemented
        return self.vertices == other.vertices

    def __hash__(self):
        return hash(tuple(self.vertices))

    def __repr__(self):
        return f"NewtonPolygon({self.vertices})"


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a if a else 1


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _convex_hull(pts):
    """Monotone chain; returns ccw vertex list starting at the lex-min vertex."""
    if len(pts) == 1:
        return list(pts)
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 0:
        hull = [pts[0], pts[-1]]
    if len(hull) == 2 and hull[0] == hull[1]:
        hull = hull[:1]
    return hull


def newton_polygon(p):
    """Newton polygon of a nonzero Laurent polynomial."""
    if p.is_zero():
        raise ValueError("zero polynomial has no Newton polygon")
    return NewtonPolygon(p.support())


def minkowski_sum(a, b):
    return NewtonPolygon([(x1 + x2, y1 + y2) for x1, y1 in a.vertices for x2, y2 in b.vertices])


def resultant_eliminate(p, q, var):
    """Resultant eliminating `var` ('z' or 'w').

    Both inputs are cleared of their minimal `var` exponent first; the
    cleared monomial exponents are reported. Returns
    (resultant: LaurentPoly2 in the other variable, (cleared_p, cleared_q)).
    Sign convention: Sylvester determinant with the p-coefficient rows first.
    """
    if var not in ("z", "w"):
        raise ValueError("var must be 'z' or 'w'")
    if p.is_zero() or q.is_zero():
        raise ValueError("resultant of a zero polynomial")
    pc, plo = p.coeffs_in(var)
    qc, qlo = q.coeffs_in(var)
    m, n = len(pc) - 1, len(qc) - 1
    if m == 0 and n == 0:
        raise ValueError(f"both inputs constant in {var}")
    size = m + n
    labels_r = list(range(size))
    labels_c = list(range(size))
    entries = {}
    # n shifted copies of p's coefficients (descending), then m of q's
    for s in range(n):
        for k, c in enumerate(reversed(pc)):
            entries[(s, s + k)] = c
    for s in range(m):
        for k, c in enumerate(reversed(qc)):
            entries[(n + s, s + k)] = c
    mat = LaurentMatrix(labels_r, labels_c, entries)
    return lm_determinant(mat, bound=max(16, size)), (plo, qlo)
