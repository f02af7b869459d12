"""Anchored brackets on trivial bundles.

The data is finite: an anchor matrix whose columns are the images of
the frame sections, written as coefficient vectors of the coordinate
vector fields, plus structure functions on frame pairs.  Brackets of
general sections expand from that data through the Leibniz rule, so
every axiom check here reduces to a polynomial identity on the frame.
"""

from fractions import Fraction
from itertools import combinations, combinations_with_replacement

from .errors import DomainError, InvolutivityError
from .fpmodules import CERTIFIED_VISIBLE, FPModule, invisible_test
from .grobner import ModuleBasis, groebner_basis, lift_combination, module_member
from .polyalg import Polynomial, PolyMatrix, grevlex_key, in_span

__all__ = [
    "SectionExpr",
    "AnchoredBracket",
    "ObstructionWitness",
    "FoliationResult",
    "bracket",
    "check_leibniz",
    "check_jacobi",
    "check_weak_jacobi",
    "check_ideal",
    "quotient_obstruction",
    "synthesize_bracket",
    "foliation_of",
    "vector_field_commutator",
]


def vector_field_commutator(x, y, variables):
    """[X, Y] for polynomial coefficient vectors of coordinate fields."""
    names = tuple(variables)
    out = []
    for d in range(len(names)):
        s = Polynomial.zero(names)
        for e, name in enumerate(names):
            s = s + x[e] * y[d].differentiate(name) - y[e] * x[d].differentiate(name)
        out.append(s)
    return out


def _derive_along(field, f, variables):
    # field is a coefficient vector over the coordinate frame
    s = Polynomial.zero(tuple(variables))
    for coeff, name in zip(field, variables):
        if not coeff.is_zero:
            s = s + coeff * f.differentiate(name)
    return s


class SectionExpr:
    """Section of the trivial bundle: one polynomial coefficient per frame slot."""

    __slots__ = ("vars", "coeffs")

    def __init__(self, variables, coeffs):
        object.__setattr__(self, "vars", tuple(variables))
        cs = tuple(coeffs)
        for p in cs:
            if not isinstance(p, Polynomial) or p.vars != self.vars:
                raise DomainError("section coefficients must share the section variables")
        object.__setattr__(self, "coeffs", cs)

    def __setattr__(self, *a):
        raise AttributeError("SectionExpr is immutable")

    @classmethod
    def zero(cls, variables, rank):
        return cls(variables, [Polynomial.zero(variables)] * rank)

    @classmethod
    def frame(cls, variables, rank, index):
        if not 0 <= index < rank:
            raise DomainError("frame index %d outside rank %d" % (index, rank))
        z = Polynomial.zero(variables)
        one = Polynomial.one(variables)
        return cls(variables, [one if j == index else z for j in range(rank)])

    @property
    def rank(self):
        return len(self.coeffs)

    @property
    def is_zero(self):
        return all(p.is_zero for p in self.coeffs)

    def scale(self, f):
        if not isinstance(f, Polynomial):
            f = Polynomial.constant(self.vars, Fraction(f))
        return SectionExpr(self.vars, [f * p for p in self.coeffs])

    def __add__(self, other):
        if not isinstance(other, SectionExpr):
            return NotImplemented
        if other.vars != self.vars or other.rank != self.rank:
            raise DomainError("section shapes do not match")
        return SectionExpr(self.vars, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        if not isinstance(other, SectionExpr):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return SectionExpr(self.vars, [-p for p in self.coeffs])

    def evaluate(self, point):
        return [p.evaluate(point) for p in self.coeffs]

    def __eq__(self, other):
        return (
            isinstance(other, SectionExpr)
            and self.vars == other.vars
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.vars, self.coeffs))

    def text(self):
        parts = []
        for j, p in enumerate(self.coeffs):
            if p.is_zero:
                continue
            t = p.text()
            if t == "1":
                parts.append("e%d" % (j + 1))
            else:
                parts.append("(%s)*e%d" % (t, j + 1))
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return "SectionExpr(%r, %s)" % (list(self.vars), self.text())


def _as_section(value, L):
    if isinstance(value, SectionExpr):
        if value.vars != L.vars:
            raise DomainError("section variables do not match the bracket")
        if value.rank != L.rank:
            raise DomainError("section rank %d does not match %d" % (value.rank, L.rank))
        return value
    return _as_section(SectionExpr(L.vars, value), L)


class AnchoredBracket:
    """Anchor matrix plus structure functions over the frame.

    Structure data is supplied only on pairs (i, j) with i < j; the
    value on (j, i) is the negative and the diagonal is zero, so
    antisymmetry holds by construction rather than by trust.
    """

    __slots__ = ("vars", "rank", "anchor", "table")

    def __init__(self, variables, rank, anchor, structure=None):
        names = tuple(variables)
        n = len(names)
        rank = int(rank)
        if rank < 0:
            raise DomainError("rank must be nonnegative")
        if not isinstance(anchor, PolyMatrix) or anchor.vars != names:
            raise DomainError("anchor must be a PolyMatrix over the bracket variables")
        if anchor.rows != n:
            raise DomainError("anchor needs one row per variable")
        # a zero-row matrix cannot carry a column count, so the shape
        # check only applies over a base with at least one variable
        if n > 0 and anchor.cols != rank:
            raise DomainError("anchor needs one column per frame section")
        table = {}
        for key, vec in sorted((structure or {}).items()):
            i, j = key
            if not (0 <= i < j < rank):
                raise DomainError("structure functions live on frame pairs i < j")
            cs = tuple(vec)
            if len(cs) != rank:
                raise DomainError("structure vector length must equal the rank")
            for p in cs:
                if not isinstance(p, Polynomial) or p.vars != names:
                    raise DomainError("structure entries must share the bracket variables")
            if any(not p.is_zero for p in cs):
                table[(i, j)] = cs
        object.__setattr__(self, "vars", names)
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "anchor", anchor)
        object.__setattr__(self, "table", table)

    def __setattr__(self, *a):
        raise AttributeError("AnchoredBracket is immutable")

    def frame_section(self, j):
        return SectionExpr.frame(self.vars, self.rank, j)

    def anchor_column(self, j):
        if not 0 <= j < self.rank:
            raise DomainError("frame index %d outside rank %d" % (j, self.rank))
        return tuple(self.anchor.entries[d][j] for d in range(self.anchor.rows))

    def structure(self, i, j):
        """Structure vector on the ordered pair (i, j), antisymmetry applied."""
        for idx in (i, j):
            if not 0 <= idx < self.rank:
                raise DomainError("frame index %d outside rank %d" % (idx, self.rank))
        zero = (Polynomial.zero(self.vars),) * self.rank
        if i == j:
            return zero
        if i < j:
            return self.table.get((i, j), zero)
        vec = self.table.get((j, i))
        return zero if vec is None else tuple(-p for p in vec)

    def apply_anchor(self, a):
        """Push a section to a vector field: sum of coefficient * anchor column."""
        a = _as_section(a, self)
        n = self.anchor.rows
        out = [Polynomial.zero(self.vars) for _ in range(n)]
        for j, f in enumerate(a.coeffs):
            if f.is_zero:
                continue
            for d in range(n):
                out[d] = out[d] + f * self.anchor.entries[d][j]
        return tuple(out)

    def bracket_sections(self, a, b):
        """Leibniz expansion of the bracket of two sections."""
        a = _as_section(a, self)
        b = _as_section(b, self)
        out = [Polynomial.zero(self.vars) for _ in range(self.rank)]
        for i, fi in enumerate(a.coeffs):
            if fi.is_zero:
                continue
            for j, gj in enumerate(b.coeffs):
                if gj.is_zero or i == j:
                    continue
                cvec = self.structure(i, j)
                scale = fi * gj
                for k, ck in enumerate(cvec):
                    if not ck.is_zero:
                        out[k] = out[k] + scale * ck
        rho_a = self.apply_anchor(a)
        for j, gj in enumerate(b.coeffs):
            if not gj.is_zero:
                out[j] = out[j] + _derive_along(rho_a, gj, self.vars)
        rho_b = self.apply_anchor(b)
        for i, fi in enumerate(a.coeffs):
            if not fi.is_zero:
                out[i] = out[i] - _derive_along(rho_b, fi, self.vars)
        return SectionExpr(self.vars, out)

    def __repr__(self):
        return "AnchoredBracket(vars=%r, rank=%d, pairs=%d)" % (
            list(self.vars),
            self.rank,
            len(self.table),
        )


def bracket(a, b, L):
    """Bracket of two sections under the given anchored bracket."""
    return L.bracket_sections(a, b)


def _test_functions(variables):
    names = tuple(variables)
    out = [Polynomial.one(names)]
    for name in names:
        out.append(Polynomial.variable(names, name))
    for d, e in combinations_with_replacement(range(len(names)), 2):
        out.append(Polynomial.variable(names, names[d]) * Polynomial.variable(names, names[e]))
    return out


def check_leibniz(L):
    """Leibniz rule on the frame against all monomial test functions of degree <= 2.

    Brackets expanded by this module satisfy the rule identically, so a
    failure can only come from a hand-edited table or an overridden
    expansion; the witness is (frame i, frame j, test function, defect).
    """
    tests = _test_functions(L.vars)
    for i in range(L.rank):
        a = L.frame_section(i)
        rho_a = L.apply_anchor(a)
        for j in range(L.rank):
            b = L.frame_section(j)
            base = L.bracket_sections(a, b)
            for f in tests:
                lhs = L.bracket_sections(a, b.scale(f))
                rhs = base.scale(f) + b.scale(_derive_along(rho_a, f, L.vars))
                if lhs != rhs:
                    return False, (i, j, f, lhs - rhs)
    return True, None


def _jacobiator(L, a, b, c):
    return (
        L.bracket_sections(L.bracket_sections(a, b), c)
        + L.bracket_sections(L.bracket_sections(b, c), a)
        + L.bracket_sections(L.bracket_sections(c, a), b)
    )


def check_jacobi(L):
    """Nonzero Jacobiators on frame triples; an empty table means the bracket is Lie."""
    out = {}
    for i, j, k in combinations(range(L.rank), 3):
        jac = _jacobiator(L, L.frame_section(i), L.frame_section(j), L.frame_section(k))
        if not jac.is_zero:
            out[(i, j, k)] = jac
    return out


def check_weak_jacobi(L):
    """Does every frame Jacobiator push to the zero vector field under the anchor?"""
    for i, j, k in combinations(range(L.rank), 3):
        jac = _jacobiator(L, L.frame_section(i), L.frame_section(j), L.frame_section(k))
        if jac.is_zero:
            continue
        if any(not p.is_zero for p in L.apply_anchor(jac)):
            return False
    return True


def _check_submodule(D, L):
    if not isinstance(D, ModuleBasis):
        raise DomainError("expected a ModuleBasis of sections")
    if D.vars != L.vars:
        raise DomainError("module variables do not match the bracket")
    if D.ambient != L.rank:
        raise DomainError("module ambient rank %d does not match %d" % (D.ambient, L.rank))


def check_ideal(D, L):
    """Is the bracket of the submodule with every frame section inside the submodule?

    Checks membership of [d, e_j] for each reduced-basis generator d and
    each frame e_j.  Returns (True, None) or (False, (d, j, bracket)).
    """
    _check_submodule(D, L)
    basis = groebner_basis(D)
    for col in basis.columns:
        d = SectionExpr(L.vars, col)
        for j in range(L.rank):
            br = L.bracket_sections(d, L.frame_section(j))
            if br.is_zero:
                continue
            if not module_member(list(br.coeffs), basis):
                return False, (tuple(col), j, tuple(br.coeffs))
    return True, None


class ObstructionWitness:
    """Frame/section pair whose bracket escapes the submodule span at a point."""

    __slots__ = ("frame", "section", "bracket", "point")

    def __init__(self, frame, section, bracket, point):
        self.frame = frame
        self.section = section
        self.bracket = bracket
        self.point = point

    def __repr__(self):
        return "ObstructionWitness(frame=e%d, section=%s, bracket=%s, point=%r)" % (
            self.frame + 1,
            self.section.text(),
            self.bracket.text(),
            tuple(self.point),
        )


def _monomials_through(variables, bound):
    names = tuple(variables)
    n = len(names)
    exps = []
    for total in range(bound + 1):
        for combo in combinations_with_replacement(range(n), total):
            e = [0] * n
            for idx in combo:
                e[idx] += 1
            exps.append(tuple(e))
    exps.sort(key=grevlex_key)
    return [Polynomial(names, {e: Fraction(1)}) for e in exps]


def quotient_obstruction(D, L, bound=2):
    """Bounded search for a pair blocking any bracket on the quotient by D.

    Candidate sections sigma are monomial multiples of the module
    generators with multiplier degree <= bound; each lies pointwise in
    the span of the generators at every point.  A frame section e_j
    with [e_j, sigma] escaping that span at some point means no bracket
    compatible with this one can descend to the quotient, and the pair
    is returned with the point, re-verified by exact rank arithmetic.
    None means the search was exhausted; absence up to the bound is not
    a proof that the quotient bracket exists.
    """
    _check_submodule(D, L)
    if not D.columns:
        return None
    mod = FPModule(L.vars, L.rank, D.matrix())
    seen = set()
    candidates = []
    for col in D.columns:
        for mono in _monomials_through(L.vars, bound):
            sig = tuple(mono * p for p in col)
            if all(p.is_zero for p in sig) or sig in seen:
                continue
            seen.add(sig)
            candidates.append(SectionExpr(L.vars, sig))
    for j in range(L.rank):
        a = L.frame_section(j)
        for sigma in candidates:
            br = L.bracket_sections(a, sigma)
            if br.is_zero:
                continue
            verdict = invisible_test(mod, list(br.coeffs))
            if verdict.status != CERTIFIED_VISIBLE:
                continue
            pt = verdict.witness
            cols_at = [[p.evaluate(pt) for p in col] for col in D.columns]
            if not in_span(cols_at, sigma.evaluate(pt)):
                continue
            if in_span(cols_at, br.evaluate(pt)):
                continue
            return ObstructionWitness(j, sigma, br, pt)
    return None


def synthesize_bracket(anchor, basis=None):
    """Build an anchored bracket over an involutive anchor matrix.

    Every frame-pair commutator of anchor columns is lifted back
    through the column module in both orders, and the antisymmetrized
    lift coefficients become the structure functions.  The result
    passes the Leibniz and anchored-Jacobiator checks.  A commutator
    outside the column module raises InvolutivityError naming the pair.
    """
    if not isinstance(anchor, PolyMatrix):
        raise DomainError("expected the anchor as a PolyMatrix")
    names = anchor.vars
    if anchor.rows != len(names):
        raise DomainError("anchor needs one row per variable")
    cols = [tuple(c) for c in anchor.columns()]
    rank = anchor.cols
    if basis is None:
        basis = ModuleBasis(names, anchor.rows, cols)
    else:
        if not isinstance(basis, ModuleBasis) or basis.vars != names:
            raise DomainError("basis must be a ModuleBasis over the anchor variables")
        if basis.ambient != anchor.rows or [tuple(c) for c in basis.columns] != cols:
            raise DomainError("basis columns must list the anchor columns in order")
    table = {}
    half = Fraction(1, 2)
    for i in range(rank):
        for j in range(i + 1, rank):
            w = vector_field_commutator(cols[i], cols[j], names)
            lam = lift_combination(list(w), basis)
            if lam is None:
                raise InvolutivityError(
                    (i, j), "(" + ", ".join(p.text() for p in w) + ")"
                )
            mu = lift_combination([-p for p in w], basis)
            if mu is None:
                mu = [-p for p in lam]
            cvec = tuple((a - b) * half for a, b in zip(lam, mu))
            if any(not p.is_zero for p in cvec):
                table[(i, j)] = cvec
    return AnchoredBracket(names, rank, anchor, table)


class FoliationResult:
    """Reduced basis of the anchor-column vector fields plus an involutivity verdict."""

    __slots__ = ("basis", "involutive", "closure", "closed", "rounds")

    def __init__(self, basis, involutive, closure, closed, rounds):
        self.basis = basis
        self.involutive = involutive
        self.closure = closure
        self.closed = closed
        self.rounds = rounds

    def __repr__(self):
        return "FoliationResult(involutive=%r, generators=%d, rounds=%d)" % (
            self.involutive,
            len(self.closure),
            self.rounds,
        )


def _missing_commutators(gens, basis, variables):
    out = []
    seen = set()
    for a, b in combinations(gens, 2):
        w = tuple(vector_field_commutator(a, b, variables))
        if all(p.is_zero for p in w) or w in seen:
            continue
        seen.add(w)
        if not module_member(list(w), basis):
            out.append(w)
    return out


def foliation_of(L, rounds=5):
    """Vector-field module generated by the anchor columns.

    The verdict tests pairwise commutators of the reduced basis for
    membership.  When it fails, commutators are adjoined for at most
    `rounds` passes and the enlarged generating list is reported as a
    closure suggestion; `closed` records whether the suggestion is
    itself involutive.
    """
    if not isinstance(L, AnchoredBracket):
        raise DomainError("expected an AnchoredBracket")
    n = len(L.vars)
    gens = [tuple(c) for c in L.anchor.columns() if any(not p.is_zero for p in c)]
    basis = groebner_basis(ModuleBasis(L.vars, n, gens))
    involutive = not _missing_commutators(basis.columns, basis, L.vars)
    if involutive:
        return FoliationResult(basis, True, gens, True, 0)
    current = list(gens)
    cur_basis = basis
    used = 0
    for _ in range(rounds):
        missing = _missing_commutators(current, cur_basis, L.vars)
        if not missing:
            break
        current = current + missing
        cur_basis = groebner_basis(ModuleBasis(L.vars, n, current))
        used += 1
    closed = not _missing_commutators(current, cur_basis, L.vars)
    return FoliationResult(basis, False, current, closed, used)
