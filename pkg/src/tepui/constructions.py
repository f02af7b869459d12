"""Functorial constructions on quotient-bundle presentations and finitely
presented modules: direct sums, tensor products, pullbacks along polynomial
maps, base-change comparison at a finite jet order, and jet models of module
tensors with symbolic flat factors.

Jet conventions.  The order-k jet algebra at a rational point m is
Q[x]/I_m^(k+1) with the standard-monomial basis written in the shifted
coordinates (x - m)^alpha.  Section-jet computations reduce everything to
exact linear algebra over Q: a finitely generated submodule of Q[x]^N is
truncated by listing the jets of monomial multiples of its generators.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

from .bundle import Box, Cell, CellwiseBundle, SignCondition, SubbundlePresentation
from .config import DEFAULTS
from .errors import DomainError
from .fpmodules import FPModule
from .grobner import ModuleBasis, groebner_basis, smith_normal_form, syzygies
from .polyalg import (
    Polynomial,
    PolyMatrix,
    exact_rank,
    exact_rref,
    is_exact_point,
    parse_point,
    poly_exact_div,
)
from .realroots import has_real_root, irreducible_factors, poly_gcd, real_vanishing_part


class PolyMap:
    """Polynomial map between affine spaces: one source-variable polynomial
    per target coordinate."""

    __slots__ = ("source_vars", "target_vars", "components")

    def __init__(self, source_vars, target_vars, components):
        source_vars = tuple(source_vars)
        target_vars = tuple(target_vars)
        components = tuple(components)
        if len(components) != len(target_vars):
            raise DomainError(
                "map needs %d components, got %d" % (len(target_vars), len(components))
            )
        for p in components:
            if not isinstance(p, Polynomial) or p.vars != source_vars:
                raise DomainError("map components must be polynomials in the source variables")
        object.__setattr__(self, "source_vars", source_vars)
        object.__setattr__(self, "target_vars", target_vars)
        object.__setattr__(self, "components", components)

    def __setattr__(self, *a):
        raise AttributeError("PolyMap is immutable")

    @classmethod
    def identity(cls, variables):
        variables = tuple(variables)
        comps = [Polynomial.variable(variables, v) for v in variables]
        return cls(variables, variables, comps)

    def apply_to_poly(self, p: Polynomial) -> Polynomial:
        """Compose: p in the target variables -> p(f) in the source variables."""
        if p.vars != self.target_vars:
            raise DomainError("polynomial lives in %r, map targets %r" % (p.vars, self.target_vars))
        return p.substitute(list(self.components))

    def apply_to_point(self, point):
        point = parse_point(point)
        if len(point) != len(self.source_vars):
            raise DomainError("point dimension does not match the map source")
        return tuple(c.evaluate(point) for c in self.components)

    def __repr__(self):
        return "PolyMap(%r -> %r, %r)" % (
            list(self.source_vars),
            list(self.target_vars),
            [c.text() for c in self.components],
        )


# -- sums, tensors, pullbacks ----------------------------------------------------

def _common_base(left, right):
    if tuple(left.vars) != tuple(right.vars):
        raise DomainError("bundles live over different variables")
    if left.domain != right.domain:
        raise DomainError("bundles live over different domains")
    return left.vars, left.domain


def _paired_pieces(left, right):
    cellwise = isinstance(left, CellwiseBundle) or isinstance(right, CellwiseBundle)
    pairs = []
    for c1, g1 in left.pieces_view():
        for c2, g2 in right.pieces_view():
            pairs.append((c1.conjoin(c2), g1, g2))
    return cellwise, pairs


def _assemble(variables, ambient, pieces, domain, cellwise):
    if not cellwise:
        (_, mat), = pieces
        return SubbundlePresentation(variables, ambient, mat, domain)
    return CellwiseBundle(variables, ambient, pieces, domain)


def direct_sum(left, right):
    """Blockwise sum: ambient N+N', block-diagonal generators, cells refined
    to common intersections."""
    variables, domain = _common_base(left, right)
    n_l, n_r = left.ambient_rank, right.ambient_rank
    zero = Polynomial.zero(variables)
    cellwise, pairs = _paired_pieces(left, right)
    pieces = []
    for cell, g1, g2 in pairs:
        cols = [list(col) + [zero] * n_r for col in g1.columns()]
        cols += [[zero] * n_l + list(col) for col in g2.columns()]
        pieces.append((cell, PolyMatrix.from_columns(variables, cols, rows=n_l + n_r)))
    return _assemble(variables, n_l + n_r, pieces, domain, cellwise)


def tensor(left, right):
    """Tensor on generators: ambient N*N', columns {g_i (x) e'_j} together
    with {e_i (x) g'_j}, index (a, b) -> a*N' + b.  The generator set is the
    full pattern, not minimalized; at every point its span has codimension
    (N - rank G)(N' - rank G'), so fiber dims multiply."""
    variables, domain = _common_base(left, right)
    n_l, n_r = left.ambient_rank, right.ambient_rank
    big = n_l * n_r
    zero = Polynomial.zero(variables)
    cellwise, pairs = _paired_pieces(left, right)
    pieces = []
    for cell, g1, g2 in pairs:
        cols = []
        for col in g1.columns():
            for j in range(n_r):
                vec = [zero] * big
                for a in range(n_l):
                    vec[a * n_r + j] = col[a]
                cols.append(vec)
        for i in range(n_l):
            for col in g2.columns():
                vec = [zero] * big
                for b in range(n_r):
                    vec[i * n_r + b] = col[b]
                cols.append(vec)
        pieces.append((cell, PolyMatrix.from_columns(variables, cols, rows=big)))
    return _assemble(variables, big, pieces, domain, cellwise)


def pullback(bundle, f: PolyMap, source_domain: Box | None = None, samples=None, seed=None):
    """Compose generators and cell conditions with the map.  When the bundle
    domain is restricted, the source domain is sampled and each image must
    land inside it."""
    if tuple(bundle.vars) != f.target_vars:
        raise DomainError("map target variables do not match the bundle base")
    src = f.source_vars
    domain = source_domain or Box.unbounded(len(src))
    if domain.dim != len(src):
        raise DomainError("source domain dimension does not match the map source")
    if any(b != (None, None) for b in bundle.domain.bounds):
        rng = random.Random(DEFAULTS.seed if seed is None else seed)
        for _ in range(50 if samples is None else samples):
            p = domain.sample(rng)
            q = f.apply_to_point(p)
            if not bundle.domain.contains(q):
                raise DomainError(
                    "source point %s maps to %s, outside the bundle domain"
                    % (tuple(str(c) for c in p), tuple(str(c) for c in q))
                )

    def push_matrix(g: PolyMatrix) -> PolyMatrix:
        cols = [[f.apply_to_poly(e) for e in col] for col in g.columns()]
        return PolyMatrix.from_columns(src, cols, rows=bundle.ambient_rank)

    def push_cell(cell: Cell) -> Cell:
        return Cell([SignCondition(f.apply_to_poly(c.poly), c.relation) for c in cell.conditions])

    if isinstance(bundle, CellwiseBundle):
        pieces = [(push_cell(c), push_matrix(g)) for c, g in bundle.pieces_view()]
        return CellwiseBundle(src, bundle.ambient_rank, pieces, domain)
    return SubbundlePresentation(src, bundle.ambient_rank, push_matrix(bundle.generators), domain)


# -- jet models -------------------------------------------------------------------

def _monomials_upto(n, k):
    out = []
    for total in range(k + 1):
        for c in itertools.combinations_with_replacement(range(n), total):
            e = [0] * n
            for i in c:
                e[i] += 1
            out.append(tuple(e))
    return out


class JetModel:
    """The order-k jet algebra at a rational point: Q[x]/I_m^(k+1).

    The quotient basis is the standard monomials of the Groebner basis of
    I_m^(k+1); construction verifies it is exactly the monomials of degree
    at most k in the shifted coordinates, so the dimension is C(n+k, k).
    """

    __slots__ = ("vars", "point", "order", "basis", "dimension", "_index")

    def __init__(self, variables, point, order):
        variables = tuple(variables)
        point = parse_point(point)
        if len(point) != len(variables):
            raise DomainError("jet point dimension does not match the variables")
        if not is_exact_point(point):
            raise DomainError("jet models need a rational base point")
        order = int(order)
        if order < 0:
            raise DomainError("jet order must be nonnegative")
        n = len(variables)
        lin = [
            Polynomial.variable(variables, v) - Polynomial.constant(variables, point[i])
            for i, v in enumerate(variables)
        ]
        gens = []
        for combo in itertools.combinations_with_replacement(range(n), order + 1):
            g = Polynomial.one(variables)
            for i in combo:
                g = g * lin[i]
            gens.append(g)
        gb = groebner_basis(ModuleBasis.from_polys(gens))
        lead = [max(col[0].terms, key=lambda e: (sum(e), e)) for col in gb.columns]
        basis = []
        for alpha in _monomials_upto(n, order + 1):
            if any(all(a >= b for a, b in zip(alpha, lt)) for lt in lead):
                continue
            basis.append(alpha)
        if len(basis) != math.comb(n + order, order) or any(sum(a) > order for a in basis):
            raise DomainError("internal error: jet quotient basis is not the expected one")
        object.__setattr__(self, "vars", variables)
        object.__setattr__(self, "point", point)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "basis", tuple(basis))
        object.__setattr__(self, "dimension", len(basis))
        object.__setattr__(self, "_index", {a: i for i, a in enumerate(basis)})

    def __setattr__(self, *a):
        raise AttributeError("JetModel is immutable")

    def reduce(self, p: Polynomial):
        """Coefficient vector of p modulo I_m^(k+1) on the shifted basis."""
        if p.vars != self.vars:
            raise DomainError("polynomial variables do not match the jet model")
        out = [Fraction(0)] * self.dimension
        for e, c in p.shift(self.point).terms.items():
            if sum(e) <= self.order:
                out[self._index[e]] += c
        return out


def _jet_span_vectors(columns, jet: JetModel, ambient):
    """Jets of all basis-monomial multiples of the given module generators:
    an exact spanning set for the image of the generated submodule inside
    (jet algebra)^ambient.  Coordinates are blocked per component."""
    dim = jet.dimension
    vectors = []
    for col in columns:
        if len(col) != ambient:
            raise DomainError("generator length does not match the ambient rank")
        shifted = [p.shift(jet.point) for p in col]
        for alpha in jet.basis:
            vec = [Fraction(0)] * (ambient * dim)
            hit = False
            for i, p in enumerate(shifted):
                for e, c in p.terms.items():
                    beta = tuple(a + b for a, b in zip(e, alpha))
                    if sum(beta) <= jet.order:
                        vec[i * dim + jet._index[beta]] += c
                        hit = True
            if hit:
                vectors.append(vec)
    return vectors


class FlatQuotient:
    """Symbolic module of smooth functions on a univariate cell, i.e. the
    quotient of all functions by those vanishing identically on the cell.
    Not a polynomial module; it enters jet and fiberwise computations only,
    never Groebner membership."""

    __slots__ = ("vars", "cell")

    def __init__(self, variables, cell: Cell):
        variables = tuple(variables)
        if len(variables) != 1:
            raise DomainError("flat factors are univariate only")
        if not isinstance(cell, Cell):
            raise DomainError("flat factor needs a Cell")
        object.__setattr__(self, "vars", variables)
        object.__setattr__(self, "cell", cell)

    def __setattr__(self, *a):
        raise AttributeError("FlatQuotient is immutable")

    def jet_presentation(self, point, order):
        """Presentation of the jet model at the point: the full jet algebra
        when the cell has an interval germ there (functions on the cell keep
        every derivative), the evaluation line when the point is isolated in
        the cell, zero outside the closure."""
        point = parse_point(point)
        interval = _cell_holds_on_germ(self.cell, point, +1) or _cell_holds_on_germ(
            self.cell, point, -1
        )
        if interval:
            return 1, []
        if self.cell.contains(point):
            x = Polynomial.variable(self.vars, self.vars[0])
            return 1, [[x - Polynomial.constant(self.vars, point[0])]]
        return 1, [[Polynomial.one(self.vars)]]


def _germ_sign(p: Polynomial, point, side):
    """Sign of p on the open interval immediately to one side of the point
    (side=+1 right, -1 left).  0 means p is identically zero."""
    q = p.shift(point)
    if q.is_zero:
        return 0
    deg, coeff = min(((e[0], c) for e, c in q.terms.items()), key=lambda t: t[0])
    s = 1 if coeff > 0 else -1
    if side < 0 and deg % 2 == 1:
        s = -s
    return s


def _condition_holds_on_germ(cond: SignCondition, point, side):
    s = _germ_sign(cond.poly, point, side)
    r = cond.relation
    if r == ">":
        return s > 0
    if r == ">=":
        return s >= 0
    if r == "==":
        return s == 0
    if r == "<=":
        return s <= 0
    return s < 0


def _cell_holds_on_germ(cell: Cell, point, side):
    return all(_condition_holds_on_germ(c, point, side) for c in cell.conditions)


def _jet_factor(factor, point, order):
    if isinstance(factor, FlatQuotient):
        return factor.jet_presentation(point, order)
    if isinstance(factor, FPModule):
        return factor.free_rank, [list(col) for col in factor.presentation.columns()]
    raise DomainError("tensor factors must be FPModule or FlatQuotient")


def jet_module_tensor(left, right, point, order) -> int:
    """Dimension of the order-k jet model at the point of the tensor of two
    module factors (FPModule or FlatQuotient).  The tensor is presented over
    the jet algebra by the usual block pattern {relation (x) basis} and
    reduced by exact linear algebra."""
    if tuple(left.vars) != tuple(right.vars):
        raise DomainError("tensor factors live over different variables")
    variables = tuple(left.vars)
    point = parse_point(point)
    if len(point) != len(variables):
        raise DomainError("point dimension does not match the factors")
    jet = JetModel(variables, point, order)
    p1, rel1 = _jet_factor(left, point, order)
    p2, rel2 = _jet_factor(right, point, order)
    zero = Polynomial.zero(variables)
    cols = []
    for col in rel1:
        for j in range(p2):
            vec = [zero] * (p1 * p2)
            for a in range(p1):
                vec[a * p2 + j] = col[a]
            cols.append(vec)
    for i in range(p1):
        for col in rel2:
            vec = [zero] * (p1 * p2)
            for b in range(p2):
                vec[i * p2 + b] = col[b]
            cols.append(vec)
    span = _jet_span_vectors(cols, jet, p1 * p2)
    return p1 * p2 * jet.dimension - exact_rank(span)


# -- section jets of cellwise bundles ---------------------------------------------

def _stripped_column_module(mat: PolyMatrix):
    """Generators of the pointwise-limit module of the column span near any
    point: the first r columns of U^-1 from the Smith form.  On a punctured
    neighborhood of every point the column span equals the span of these
    (everywhere independent) columns."""
    if mat.cols == 0:
        return []
    snf = smith_normal_form(mat)
    r = sum(1 for d in snf.diag if not d.is_zero)
    return [snf.Uinv.column(i) for i in range(r)]


def _side_in_domain(domain: Box, point, side):
    lo, hi = domain.bounds[0]
    if side > 0:
        return hi is None or point[0] < hi
    return lo is None or point[0] > lo


def _module_intersection(a_cols, b_cols, variables, ambient):
    """Generators of the intersection of two column submodules of Q[x]^N,
    via syzygies of the stacked generator list."""
    if not a_cols or not b_cols:
        return []
    stacked = ModuleBasis(
        variables, ambient, [tuple(c) for c in a_cols] + [tuple(c) for c in b_cols]
    )
    out = []
    for s in syzygies(stacked).columns:
        w = []
        for i in range(ambient):
            acc = Polynomial.zero(variables)
            for j, col in enumerate(a_cols):
                acc = acc + s[j] * col[i]
            w.append(acc)
        if any(not p.is_zero for p in w):
            out.append(w)
    return out


def section_jet_dim(bundle, point, order) -> int:
    """Dimension of the order-k jets at the point of global sections of the
    quotient bundle (univariate base).

    Jets of sections are the full jet space of R^N-valued functions modulo
    jets of subbundle sections.  The latter are computed exactly: on each
    germ side the constraint is membership in the pointwise-limit module of
    that side's cell, a smooth function obeying both sides has its Taylor
    series in the intersection module, and the cell owning the point itself
    pins the order-0 coefficient into the span of its generators there."""
    if len(bundle.vars) != 1:
        raise DomainError("section jets are univariate only")
    point = parse_point(point)
    if not is_exact_point(point):
        raise DomainError("section jets need a rational base point")
    if not bundle.domain.contains(point):
        raise DomainError("point outside the bundle domain")
    variables = tuple(bundle.vars)
    ambient = bundle.ambient_rank
    jet = JetModel(variables, point, order)
    pieces = bundle.pieces_view()

    side_gens = []
    for side in (+1, -1):
        if not _side_in_domain(bundle.domain, point, side):
            side_gens.append(None)
            continue
        hits = [g for c, g in pieces if _cell_holds_on_germ(c, point, side)]
        if len(hits) != 1:
            raise DomainError(
                "expected exactly one cell on the %s germ at %s, found %d"
                % ("right" if side > 0 else "left", point[0], len(hits))
            )
        side_gens.append(_stripped_column_module(hits[0]))

    right, left = side_gens
    if right is None and left is None:
        inter = [
            [Polynomial.one(variables) if i == j else Polynomial.zero(variables) for i in range(ambient)]
            for j in range(ambient)
        ]
    elif right is None:
        inter = left
    elif left is None:
        inter = right
    else:
        inter = _module_intersection(right, left, variables, ambient)

    span = _jet_span_vectors(inter, jet, ambient)
    basis_rows, pivots = exact_rref(span)
    basis_rows = basis_rows[: len(pivots)]
    dim_w = len(pivots)

    # order-0 coefficients must lie in the span of the owning cell's columns
    value_cols = [
        [Fraction(row[j]) for row in bundle.matrix_at(point).evaluate(point)]
        for j in range(bundle.matrix_at(point).cols)
    ]
    idx0 = jet._index[(0,) * len(variables)]
    v0_rows = [[row[i * jet.dimension + idx0] for i in range(ambient)] for row in basis_rows]
    base = [list(c) for c in value_cols]
    rk_quot = exact_rank(v0_rows + base) - (exact_rank(base) if base else 0)
    return ambient * jet.dimension - (dim_w - rk_quot)


# -- base change at finite jet order ----------------------------------------------

def _pointwise_line_model(column, variables):
    """Polynomial generator of the smooth pointwise sections of the line
    spanned by the given polynomial vector: factor out the content, keep one
    copy of each content factor that vanishes somewhere on real points.
    Factors whose real zero set cannot be decided (not affine-linear, not
    univariate) are rejected."""
    nonzero = [p for p in column if not p.is_zero]
    if not nonzero:
        return None
    content = nonzero[0]
    for p in nonzero[1:]:
        content = poly_gcd(content, p)
    primitive = [poly_exact_div(p, content) for p in column]
    if len(variables) == 1:
        kept = real_vanishing_part(content)
    else:
        kept = Polynomial.one(variables)
        for q, _ in irreducible_factors(content):
            if q.total_degree() == 1:
                kept = kept * q
                continue
            used = [v for v, d in zip(variables, _var_degrees(q)) if d]
            if len(used) == 1:
                restricted = _restrict_to_variable(q, used[0])
                if has_real_root(restricted):
                    kept = kept * q
                continue
            raise DomainError(
                "cannot decide the real zero set of factor %s; pass pointwise_model" % q.text()
            )
    return [kept * p for p in primitive]


def _var_degrees(p: Polynomial):
    degs = [0] * len(p.vars)
    for e in p.terms.items():
        for i, k in enumerate(e[0]):
            degs[i] = max(degs[i], k)
    return degs


def _restrict_to_variable(p: Polynomial, name):
    i = p.vars.index(name)
    terms = {}
    for e, c in p.terms.items():
        terms[(e[i],)] = c
    return Polynomial((name,), terms)


def _principal_column(basis: ModuleBasis):
    nonzero = [col for col in basis.columns if any(not p.is_zero for p in col)]
    if len(nonzero) > 1:
        return None
    if not nonzero:
        return [Polynomial.zero(basis.vars)] * basis.ambient
    return list(nonzero[0])


def base_change_comparison(v_rank, subbundle: ModuleBasis, f: PolyMap, point, order,
                           pointwise_model=None):
    """Compare pulled-back subbundle sections against the pointwise section
    model of the pulled-back subbundle, at a finite jet order around a point.

    The target-side generators are first saturated to the pointwise section
    model (sections of the spanned line, not the module the raw generators
    happen to span), composed with the map, and the jets they span at the
    point are tested to contain the jets of every generator of the source
    pointwise model.  Containment for all generators is surjectivity of the
    comparison map at that order; by the cokernel identification its failure
    is a nontrivial kernel on the quotient side.  The source model is
    autodetected for principal generators, or supplied as a list of
    generator columns over the source variables.

    Returns {"alpha_D_surjective_at_order_k", "ker_alpha_nontrivial",
    "witness"}; the witness is a failing generator, as component text.
    """
    if subbundle.ambient != v_rank:
        raise DomainError("subbundle ambient rank does not match the bundle rank")
    if tuple(subbundle.vars) != f.target_vars:
        raise DomainError("subbundle variables do not match the map target")
    src = f.source_vars
    point = parse_point(point)
    if len(point) != len(src):
        raise DomainError("point dimension does not match the map source")

    column = _principal_column(subbundle)
    if column is None:
        raise DomainError("target subbundle is not principal; unsupported shape")
    saturated = _pointwise_line_model(column, subbundle.vars)
    if saturated is None:
        pulled = []
    else:
        pulled = [[f.apply_to_poly(p) for p in saturated]]

    if pointwise_model is not None:
        model = [list(col) for col in pointwise_model]
        for col in model:
            if len(col) != v_rank or any(p.vars != src for p in col):
                raise DomainError("pointwise model columns must have length %d over %r" % (v_rank, src))
    else:
        if not pulled:
            model = []
        else:
            m = _pointwise_line_model(pulled[0], src)
            model = [] if m is None else [m]

    jet = JetModel(src, point, order)
    pulled_span = _jet_span_vectors(pulled, jet, v_rank)
    base_rank = exact_rank(pulled_span)
    surjective = True
    witness = None
    for col in model:
        extra = _jet_span_vectors([col], jet, v_rank)
        if exact_rank(pulled_span + extra) != base_rank:
            surjective = False
            witness = [p.text() for p in col]
            break
    return {
        "alpha_D_surjective_at_order_k": surjective,
        "ker_alpha_nontrivial": not surjective,
        "witness": witness,
    }
