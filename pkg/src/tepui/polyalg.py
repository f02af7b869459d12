"""Exact multivariate polynomial arithmetic over the rationals.

Polynomials are immutable sparse term maps {exponent tuple: Fraction} over a
fixed variable tuple.  Coefficients stay exact rationals throughout; floats
enter only when something is evaluated at a floating-point point.
"""

from __future__ import annotations

import itertools
import re
from fractions import Fraction

from .errors import DomainError, ParseError


def _coeff(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError("coefficient must be int or Fraction, got %r" % (c,))


def grevlex_key(exps):
    # graded reverse lexicographic: total degree first, then the last
    # variable with a differing exponent decides, smaller exponent wins
    return (sum(exps), tuple(-e for e in reversed(exps)))


def lex_key(exps):
    return tuple(exps)


MONOMIAL_KEYS = {"grevlex": grevlex_key, "lex": lex_key}


class Polynomial:
    __slots__ = ("vars", "terms")

    def __init__(self, variables, terms=None):
        object.__setattr__(self, "vars", tuple(variables))
        clean = {}
        if terms:
            n = len(self.vars)
            for exps, c in terms.items():
                exps = tuple(exps)
                if len(exps) != n:
                    raise DomainError("exponent tuple %r does not match variables %r" % (exps, self.vars))
                if any(e < 0 for e in exps):
                    raise DomainError("negative exponent in %r" % (exps,))
                c = _coeff(c)
                if c:
                    clean[exps] = clean.get(exps, Fraction(0)) + c
                    if not clean[exps]:
                        del clean[exps]
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *a):
        raise AttributeError("Polynomial is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, variables):
        return cls(variables, {})

    @classmethod
    def constant(cls, variables, c):
        variables = tuple(variables)
        return cls(variables, {(0,) * len(variables): _coeff(c)})

    @classmethod
    def one(cls, variables):
        return cls.constant(variables, 1)

    @classmethod
    def variable(cls, variables, name):
        variables = tuple(variables)
        if name not in variables:
            raise DomainError("unknown variable %r (have %r)" % (name, variables))
        i = variables.index(name)
        e = [0] * len(variables)
        e[i] = 1
        return cls(variables, {tuple(e): Fraction(1)})

    # -- queries -----------------------------------------------------------

    @property
    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise DomainError("polynomial %s is not constant" % self)
        z = (0,) * len(self.vars)
        return self.terms.get(z, Fraction(0))

    def total_degree(self):
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, name):
        i = self.vars.index(name)
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def sorted_terms(self, key=grevlex_key):
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    # -- ring operations ----------------------------------------------------

    def _check(self, other):
        if self.vars != other.vars:
            raise DomainError("variable mismatch: %r vs %r" % (self.vars, other.vars))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.vars, other)
        self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e, Fraction(0)) + c
            if s:
                terms[e] = s
            elif e in terms:
                del terms[e]
        return Polynomial(self.vars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.vars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = _coeff(other)
            if not c:
                return Polynomial.zero(self.vars)
            return Polynomial(self.vars, {e: c * d for e, d in self.terms.items()})
        self._check(other)
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = terms.get(e, Fraction(0)) + c1 * c2
                if s:
                    terms[e] = s
                elif e in terms:
                    del terms[e]
        return Polynomial(self.vars, terms)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise DomainError("polynomial powers must be nonnegative integers")
        out = Polynomial.one(self.vars)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.vars, other)
        return isinstance(other, Polynomial) and self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    # -- calculus / evaluation ----------------------------------------------

    def differentiate(self, name):
        if name not in self.vars:
            raise DomainError("unknown variable %r" % name)
        i = self.vars.index(name)
        terms = {}
        for e, c in self.terms.items():
            if e[i]:
                de = list(e)
                de[i] -= 1
                terms[tuple(de)] = c * e[i]
        return Polynomial(self.vars, terms)

    def evaluate(self, point):
        if len(point) != len(self.vars):
            raise DomainError(
                "point has %d coordinates, polynomial has %d variables" % (len(point), len(self.vars))
            )
        exact = all(isinstance(c, (int, Fraction)) for c in point)
        total = Fraction(0) if exact else 0.0
        for e, c in self.terms.items():
            v = c if exact else float(c)
            for x, k in zip(point, e):
                if k:
                    v = v * x**k
            total += v
        return total

    def substitute(self, images):
        """Plug polynomials in for the variables.  images[i] replaces vars[i];
        all images must share one variable tuple, which the result uses."""
        if len(images) != len(self.vars):
            raise DomainError("need %d substitution images" % len(self.vars))
        if not images:
            raise DomainError("substitute needs at least one image to fix the target ring")
        tvars = images[0].vars
        for g in images:
            if g.vars != tvars:
                raise DomainError("substitution images disagree on variables")
        out = Polynomial.zero(tvars)
        cache = [{0: Polynomial.one(tvars)} for _ in images]
        for e, c in self.terms.items():
            part = Polynomial.constant(tvars, c)
            for i, k in enumerate(e):
                if k not in cache[i]:
                    cache[i][k] = images[i] ** k
                part = part * cache[i][k]
            out = out + part
        return out

    def shift(self, point):
        """Recenter at `point`: returns p(x + point) in the same variables."""
        images = []
        for i, name in enumerate(self.vars):
            images.append(Polynomial.variable(self.vars, name) + Polynomial.constant(self.vars, point[i]))
        return self.substitute(images)

    def extend(self, variables):
        """Lift into a superset ring (same names, possibly more variables)."""
        variables = tuple(variables)
        pos = []
        for name in self.vars:
            if name not in variables:
                raise DomainError("extension drops variable %r" % name)
            pos.append(variables.index(name))
        terms = {}
        for e, c in self.terms.items():
            ne = [0] * len(variables)
            for p, k in zip(pos, e):
                ne[p] = k
            terms[tuple(ne)] = c
        return Polynomial(variables, terms)

    # -- printing ------------------------------------------------------------

    def text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                v if k == 1 else "%s^%d" % (v, k) for v, k in zip(self.vars, e) if k
            )
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = "%s*%s" % (abs(c), mono)
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            out += " %s %s" % (sign, body)
        return out

    def __str__(self):
        return self.text()

    def __repr__(self):
        return "Polynomial(%r, %s)" % (list(self.vars), self.text())


# -- parser -------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*)|([-+*/^()−]))")


def _tokenize(text):
    pos, out = 0, []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError("bad character %r at position %d in %r" % (text[pos], pos, text))
        num, name, dstar, op = m.groups()
        if num is not None:
            out.append(("num", int(num)))
        elif name is not None:
            out.append(("name", name))
        elif dstar is not None:
            out.append(("op", "^"))
        else:
            out.append(("op", "-" if op == "−" else op))
        pos = m.end()
    out.append(("end", None))
    return out


class _Parser:
    def __init__(self, tokens, variables):
        self.toks = tokens
        self.i = 0
        self.vars = tuple(variables)

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expr(self):
        t = self.term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            op = self.take()[1]
            rhs = self.term()
            t = t + rhs if op == "+" else t - rhs
        return t

    def term(self):
        t = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            rhs = self.unary()
            if op == "*":
                t = t * rhs
            else:
                if not rhs.is_constant() or rhs.is_zero:
                    raise ParseError("division only by nonzero constants")
                t = t * (Fraction(1) / rhs.constant_value())
        return t

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            if self.peek() == ("op", "-"):
                raise ParseError("negative exponents are not allowed")
            kind, val = self.take()
            if kind != "num":
                raise ParseError("exponent must be an integer literal")
            return base**val
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return Polynomial.constant(self.vars, val)
        if kind == "name":
            return Polynomial.variable(self.vars, val)
        if (kind, val) == ("op", "("):
            inner = self.expr()
            if self.take() != ("op", ")"):
                raise ParseError("missing close paren")
            return inner
        raise ParseError("unexpected token %r" % ((kind, val),))


def parse_polynomial(text, variables) -> Polynomial:
    """Parse `3/2*x^2*y - 1` style text over the given variables."""
    if not isinstance(text, str):
        raise ParseError("polynomial source must be a string, got %r" % (text,))
    try:
        p = _Parser(_tokenize(text), variables)
        out = p.expr()
        if p.peek() != ("end", None):
            raise ParseError("trailing input in %r" % text)
        return out
    except DomainError as exc:
        raise ParseError(str(exc)) from exc


# -- points ---------------------------------------------------------------------

def parse_coordinate(value):
    """Exact when possible: ints and numeric strings become Fractions
    (including '1/2' and decimal strings); floats go through repr so 0.1
    means 1/10."""
    if isinstance(value, bool):
        raise ParseError("boolean is not a coordinate")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError("bad coordinate %r" % value) from exc
    raise ParseError("bad coordinate %r" % (value,))


def parse_point(values):
    return tuple(parse_coordinate(v) for v in values)


def is_exact_point(point):
    return all(isinstance(c, (int, Fraction)) for c in point)


# -- exact linear algebra over the rationals -------------------------------------

def exact_rref(rows):
    """Reduced row echelon form over Fraction.  Returns (rows, pivot_cols)."""
    m = [list(map(_coeff, r)) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = Fraction(1) / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def exact_rank(rows):
    return len(exact_rref(rows)[1])


def exact_nullspace(rows):
    """Basis of the right nullspace of the matrix (rows over Fraction)."""
    if not rows:
        return []
    ncols = len(rows[0])
    rref, pivots = exact_rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -rref[r][f]
        basis.append(v)
    return basis


def solve_exact(rows, rhs):
    """One solution of A x = b over Fraction, or None if inconsistent."""
    if not rows:
        return [] if not any(rhs) else None
    n = len(rows[0])
    aug = [list(map(_coeff, r)) + [_coeff(b)] for r, b in zip(rows, rhs)]
    rref, pivots = exact_rref(aug)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for r, p in enumerate(pivots):
        x[p] = rref[r][n]
    return x


def in_span(columns, target):
    """Is `target` a rational linear combination of the column vectors?"""
    if not columns:
        return not any(target)
    rows = [[col[i] for col in columns] for i in range(len(target))]
    return solve_exact(rows, target) is not None


def float_rank(rows, tol=1e-9):
    """Gaussian elimination with full pivoting; entries below tol never pivot."""
    m = [[float(v) for v in r] for r in rows]
    rank = 0
    nr, nc = len(m), len(m[0]) if m else 0
    used_r, used_c = set(), set()
    while True:
        best, br, bc = tol, None, None
        for i in range(nr):
            if i in used_r:
                continue
            for j in range(nc):
                if j in used_c:
                    continue
                if abs(m[i][j]) > best:
                    best, br, bc = abs(m[i][j]), i, j
        if br is None:
            return rank
        rank += 1
        used_r.add(br)
        used_c.add(bc)
        piv = m[br][bc]
        for i in range(nr):
            if i in used_r:
                continue
            f = m[i][bc] / piv
            if f:
                m[i] = [a - f * b for a, b in zip(m[i], m[br])]


# -- polynomial matrices -----------------------------------------------------------

class PolyMatrix:
    __slots__ = ("vars", "rows", "cols", "entries")

    def __init__(self, variables, entries):
        object.__setattr__(self, "vars", tuple(variables))
        ent = tuple(tuple(row) for row in entries)
        ncols = {len(r) for r in ent}
        if len(ncols) > 1:
            raise DomainError("ragged matrix")
        for row in ent:
            for p in row:
                if not isinstance(p, Polynomial) or p.vars != self.vars:
                    raise DomainError("matrix entries must share the matrix variables")
        object.__setattr__(self, "entries", ent)
        object.__setattr__(self, "rows", len(ent))
        object.__setattr__(self, "cols", ncols.pop() if ncols else 0)

    def __setattr__(self, *a):
        raise AttributeError("PolyMatrix is immutable")

    @classmethod
    def zero(cls, variables, rows, cols):
        z = Polynomial.zero(variables)
        return cls(variables, [[z] * cols for _ in range(rows)])

    @classmethod
    def from_columns(cls, variables, columns, rows=None):
        if not columns:
            if rows is None:
                raise DomainError("cannot infer row count of an empty matrix")
            return cls(variables, [[] for _ in range(rows)])
        rows = len(columns[0])
        return cls(variables, [[col[i] for col in columns] for i in range(rows)])

    def column(self, j):
        return [self.entries[i][j] for i in range(self.rows)]

    def columns(self):
        return [self.column(j) for j in range(self.cols)]

    def transpose(self):
        return PolyMatrix(self.vars, [self.column(j) for j in range(self.cols)])

    def map(self, fn):
        return PolyMatrix(self.vars, [[fn(p) for p in row] for row in self.entries])

    def evaluate(self, point):
        return [[p.evaluate(point) for p in row] for row in self.entries]

    def rank_at(self, point, tol=1e-9):
        vals = self.evaluate(point)
        if self.cols == 0 or self.rows == 0:
            return 0
        if is_exact_point(point):
            return exact_rank(vals)
        return float_rank(vals, tol)

    def mul_vector(self, vec):
        if len(vec) != self.cols:
            raise DomainError("vector length %d does not match %d columns" % (len(vec), self.cols))
        out = []
        for i in range(self.rows):
            s = Polynomial.zero(self.vars)
            for j, v in enumerate(vec):
                s = s + self.entries[i][j] * v
            out.append(s)
        return out

    def __mul__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise DomainError("matrix shapes do not compose")
        cols = [self.mul_vector(other.column(j)) for j in range(other.cols)]
        return PolyMatrix.from_columns(self.vars, cols, rows=self.rows)

    def __eq__(self, other):
        return (
            isinstance(other, PolyMatrix)
            and self.vars == other.vars
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.vars, self.entries))

    def text_rows(self):
        return [[p.text() for p in row] for row in self.entries]

    def __repr__(self):
        return "PolyMatrix(%r, %r)" % (list(self.vars), self.text_rows())


def determinant(matrix: PolyMatrix) -> Polynomial:
    n = matrix.rows
    if n != matrix.cols:
        raise DomainError("determinant of a non-square matrix")
    if n == 0:
        return Polynomial.one(matrix.vars)

    def rec(rows, cols):
        if len(rows) == 1:
            return matrix.entries[rows[0]][cols[0]]
        total = Polynomial.zero(matrix.vars)
        r0 = rows[0]
        for k, c in enumerate(cols):
            e = matrix.entries[r0][c]
            if e.is_zero:
                continue
            sub = rec(rows[1:], cols[:k] + cols[k + 1 :])
            term = e * sub
            total = total + (term if k % 2 == 0 else -term)
        return total

    return rec(tuple(range(n)), tuple(range(n)))


def minors(matrix: PolyMatrix, k: int):
    """All k x k minors, row subsets then column subsets in lexicographic
    index order."""
    if k <= 0 or k > min(matrix.rows, matrix.cols):
        raise DomainError("minor order %d out of range for %dx%d" % (k, matrix.rows, matrix.cols))
    out = []
    for rs in itertools.combinations(range(matrix.rows), k):
        for cs in itertools.combinations(range(matrix.cols), k):
            sub = PolyMatrix(matrix.vars, [[matrix.entries[i][j] for j in cs] for i in rs])
            out.append(determinant(sub))
    return out


def poly_exact_div(num: Polynomial, den: Polynomial) -> Polynomial:
    """Exact division num/den; raises if den does not divide num."""
    if den.is_zero:
        raise DomainError("division by the zero polynomial")
    if num.is_zero:
        return num
    q = Polynomial.zero(num.vars)
    r = num
    dlt = max(den.terms, key=grevlex_key)
    dlc = den.terms[dlt]
    while not r.is_zero:
        rlt = max(r.terms, key=grevlex_key)
        diff = tuple(a - b for a, b in zip(rlt, dlt))
        if any(d < 0 for d in diff):
            raise DomainError("inexact polynomial division")
        mono = Polynomial(num.vars, {diff: r.terms[rlt] / dlc})
        q = q + mono
        r = r - mono * den
    return q


def generic_rank_matrix(matrix: PolyMatrix) -> int:
    """Rank over the rational function field (fraction-free Bareiss)."""
    m = [list(row) for row in matrix.entries]
    nr, nc = matrix.rows, matrix.cols
    if nr == 0 or nc == 0:
        return 0
    rank = 0
    prev = Polynomial.one(matrix.vars)
    row = 0
    for col in range(nc):
        piv = next((i for i in range(row, nr) if not m[i][col].is_zero), None)
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        for i in range(row + 1, nr):
            for j in range(col + 1, nc):
                m[i][j] = poly_exact_div(m[row][col] * m[i][j] - m[i][col] * m[row][j], prev)
            m[i][col] = Polynomial.zero(matrix.vars)
        prev = m[row][col]
        rank += 1
        row += 1
        if row == nr:
            break
    return rank
