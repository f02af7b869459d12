"""Acceptance gate: the frozen behaviors the toolkit promises, each checked
at its stated tolerance and wall-clock budget.  One criterion per test, one
pass/fail line per criterion on stdout (visible under pytest -s).

Criterion map:
 1. pinched-line fiber dimensions, exact rational arithmetic
 2. tensor of meeting half-line bundles: section/jet divergence
 3. invisibility certificates and fiber determination for a nilpotent class
 4. pullback and base-change comparison along a fold map
 5. quotient-bracket obstruction witness, re-verified by exact ranks
 6. bracket synthesis from involutive anchors satisfies the bracket laws
 7. membership agrees with a degree-truncated linear-algebra oracle
 8. transport holonomy around loops, linearity, and RK4 convergence order
 9. grid semicontinuity verdict on random bundles and shipped fixtures
10. module-to-bundle round trip preserves fiber dimensions
"""

import contextlib
import itertools
import json
import math
import random
import time
from fractions import Fraction
from importlib import resources

from tepui.algebroid import AnchoredBracket, check_leibniz, check_weak_jacobi, \
    quotient_obstruction, synthesize_bracket
from tepui.bundle import Box, Cell, SignCondition, SubbundlePresentation, \
    fiber_dim, mrank_grid
from tepui.constructions import FlatQuotient, PolyMap, base_change_comparison, \
    jet_module_tensor, pullback, section_jet_dim, tensor
from tepui.dynamics import FPath, bott_transport, flow
from tepui.fpmodules import CERTIFIED_INVISIBLE, CERTIFIED_VISIBLE, FPModule, \
    fiber_determination_univariate, fp_fiber_dim, invisible_test, module_to_bundle
from tepui.grobner import ModuleBasis, module_member
from tepui.jsonio import bundle_from_dict
from tepui.polyalg import Polynomial, PolyMatrix, parse_polynomial

X = ("x",)
Y = ("y",)
XY = ("x", "y")


def P(text, names=X):
    return parse_polynomial(text, names)


@contextlib.contextmanager
def criterion(number, budget_s):
    t0 = time.monotonic()
    try:
        yield
    except BaseException:
        print("criterion %02d: FAIL (%.2f s)" % (number, time.monotonic() - t0))
        raise
    dt = time.monotonic() - t0
    if dt >= budget_s:
        print("criterion %02d: FAIL (%.2f s, budget %.0f s)" % (number, dt, budget_s))
        raise AssertionError(
            "criterion %d exceeded its %.0f s budget: %.2f s" % (number, budget_s, dt)
        )
    print("criterion %02d: PASS (%.2f s)" % (number, dt))


def fixture_payload(name):
    text = resources.files("tepui").joinpath("fixtures_data", name).read_text()
    return json.loads(text)


def random_nonzero_rational(rng, span=40, den=12):
    while True:
        q = Fraction(rng.randint(-span, span), rng.randint(1, den))
        if q != 0:
            return q


# 1. multiplication by the coordinate pinches exactly one fiber


def test_criterion_01_pinched_fiber_dims():
    with criterion(1, 1.0):
        b = SubbundlePresentation(X, 1, PolyMatrix(X, [[P("x")]]))
        assert fiber_dim(b, (Fraction(0),)) == 1
        rng = random.Random(101)
        for _ in range(20):
            q = random_nonzero_rational(rng)
            assert fiber_dim(b, (q,)) == 0


# 2. meeting half-lines: one-point section space, jet count diverges


def test_criterion_02_tensor_section_divergence():
    with criterion(2, 5.0):
        left = bundle_from_dict(fixture_payload("halfline_left.json"))
        right = bundle_from_dict(fixture_payload("halfline_right.json"))
        tb = tensor(left, right)
        rep = mrank_grid(tb, Box([(Fraction(-1), Fraction(1))]), Fraction(1, 20))
        assert len(rep.nodes) == 41
        for node, dim in zip(rep.nodes, rep.dims):
            assert dim == (1 if node == (Fraction(0),) else 0)
        flat_left = FlatQuotient(X, Cell([SignCondition(P("x"), "<=")]))
        flat_right = FlatQuotient(X, Cell([SignCondition(P("x"), ">=")]))
        origin = (Fraction(0),)
        for k in range(6):
            module_side = jet_module_tensor(flat_left, flat_right, origin, k)
            bundle_side = section_jet_dim(tb, origin, k)
            assert module_side == k + 1
            assert bundle_side == 1
            if k >= 1:
                assert module_side > bundle_side


# 3. nilpotent class: invisible generator, visible unit, split quotient


def test_criterion_03_invisible_class_certificates():
    with criterion(3, 1.0):
        q = FPModule(X, 1, PolyMatrix(X, [[P("x^2")]]))
        v = invisible_test(q, P("x"))
        assert v.status == CERTIFIED_INVISIBLE
        assert not module_member(P("x"), q.column_module())
        u = invisible_test(q, P("1"))
        assert u.status == CERTIFIED_VISIBLE
        assert u.witness == (Fraction(0),)
        fd = fiber_determination_univariate(q)
        assert [[p.text() for p in col] for col in fd.invisible_generators] == [["x"]]
        quo = fd.quotient
        assert quo.free_rank == 1
        assert [[p.text() for p in col] for col in quo.presentation.columns()] == [["x"]]


# 4. fold map y -> y^2: pulled-back quotient and jet comparison


def test_criterion_04_base_change_pullback():
    with criterion(4, 2.0):
        b = SubbundlePresentation(X, 1, PolyMatrix(X, [[P("x")]]))
        f = PolyMap(Y, X, [P("y^2", Y)])
        pb = pullback(b, f)
        assert fiber_dim(pb, (Fraction(0),)) == 1
        rng = random.Random(404)
        for q in [Fraction(1, 2), Fraction(-1, 2), Fraction(1)] + [
            random_nonzero_rational(rng) for _ in range(10)
        ]:
            assert fiber_dim(pb, (q,)) == 0
        d = ModuleBasis(X, 1, [[P("x")]])
        res = base_change_comparison(1, d, f, (Fraction(0),), 1)
        assert res["alpha_D_surjective_at_order_k"] is False
        assert res["ker_alpha_nontrivial"] is True


# 5. inert line that brackets out of its own span at the degenerate point


def test_criterion_05_quotient_bracket_witness():
    with criterion(5, 2.0):
        L = AnchoredBracket(Y, 2, PolyMatrix(Y, [[P("1", Y), P("0", Y)]]))
        D = ModuleBasis(Y, 2, [[P("0", Y), P("y", Y)]])
        w = quotient_obstruction(D, L, bound=2)
        assert w is not None
        assert w.frame == 0
        assert [p.text() for p in w.section.coeffs] == ["0", "y"]
        assert tuple(w.point) == (Fraction(0),)
        # exact ranks at the witness point: the bracket leaves the span
        d_cols = [list(col) for col in D.columns]
        d_rank = PolyMatrix.from_columns(Y, d_cols, rows=2).rank_at(w.point)
        aug = PolyMatrix.from_columns(Y, d_cols + [list(w.bracket.coeffs)], rows=2)
        assert d_rank == 0
        assert aug.rank_at(w.point) == 1


# 6. synthesized brackets satisfy the bracket laws as polynomial identities


def _involutive_anchor(rng, case):
    """Anchor matrices whose column modules are involutive by construction:
    scaled coordinate frames, a scaled triangular family, and a field paired
    with a function multiple of itself."""
    if case == 0:
        n = rng.randint(1, 3)
        k = rng.randint(1, n)
        names = ("x", "y", "z")[:n]
        p = _random_linear(rng, names, allow_zero=False)
        entries = [
            [p if i == j else Polynomial(names, {}) for j in range(k)]
            for i in range(n)
        ]
        return PolyMatrix(names, entries)
    if case == 1:
        p = _random_linear(rng, XY, allow_zero=False)
        cols = [
            [P("x", XY), P("0", XY)],
            [P("y", XY), P("0", XY)],
            [P("0", XY), P("y", XY)],
        ]
        entries = [[p * col[i] for col in cols] for i in range(2)]
        return PolyMatrix(XY, entries)
    n = rng.randint(1, 3)
    names = ("x", "y", "z")[:n]
    while True:
        field = [_random_linear(rng, names) for _ in range(n)]
        if any(not c.is_zero for c in field):
            break
    f = _random_linear(rng, names, allow_zero=False)
    entries = [[field[i], f * field[i]] for i in range(n)]
    return PolyMatrix(names, entries)


def _random_linear(rng, names, allow_zero=True):
    terms = {}
    zero = (0,) * len(names)
    if rng.random() < 0.6:
        terms[zero] = Fraction(rng.randint(-2, 2))
    for i in range(len(names)):
        if rng.random() < 0.6:
            e = tuple(1 if j == i else 0 for j in range(len(names)))
            terms[e] = Fraction(rng.randint(-2, 2))
    terms = {e: c for e, c in terms.items() if c}
    if not terms and not allow_zero:
        e = tuple(1 if j == 0 else 0 for j in range(len(names)))
        terms[e] = Fraction(1)
    return Polynomial(names, terms)


def test_criterion_06_bracket_synthesis_laws():
    with criterion(6, 30.0):
        rng = random.Random(606)
        anchors = [_involutive_anchor(rng, i % 3) for i in range(20)]
        assert len(anchors) == 20
        for anchor in anchors:
            assert anchor.rows <= 3 and anchor.cols <= 3
            assert all(
                p.total_degree() <= 2 for row in anchor.entries for p in row
            )
            L = synthesize_bracket(anchor)
            ok, witness = check_leibniz(L)
            assert ok, witness
            assert check_weak_jacobi(L) is True


# 7. membership vs. an independent degree-truncated linear solve


def _monomials(nv, bound):
    return [
        e
        for e in itertools.product(range(bound + 1), repeat=nv)
        if sum(e) <= bound
    ]


def truncated_lift_exists(v, gens, slack=3):
    """Brute-force oracle: is v a combination sum(lam_i * g_i) with
    total degree of every lam_i at most deg(v) + slack?  Decided exactly by
    sparse Gaussian elimination on the monomial coefficient equations."""
    bound = max(v.total_degree(), 0) + slack
    alphas = _monomials(len(v.vars), bound)
    rows = {}
    for i, g in enumerate(gens):
        if g.is_zero:
            continue
        for alpha in alphas:
            for gamma, c in g.terms.items():
                beta = tuple(a + b for a, b in zip(alpha, gamma))
                rows.setdefault(beta, {})[(i, alpha)] = c
    pivots = {}
    for beta in sorted(set(rows) | set(v.terms)):
        r = dict(rows.get(beta, {}))
        b = v.terms.get(beta, Fraction(0))
        while True:
            hit = next((k for k in r if k in pivots), None)
            if hit is None:
                break
            pr, pb = pivots[hit]
            f = r.pop(hit)
            for kk, vv in pr.items():
                acc = r.get(kk, Fraction(0)) - f * vv
                if acc:
                    r[kk] = acc
                else:
                    r.pop(kk, None)
            b -= f * pb
        if not r:
            if b:
                return False
            continue
        piv = min(r)
        c = r.pop(piv)
        pivots[piv] = ({k: val / c for k, val in r.items()}, b / c)
    return True


def _random_poly(rng, names, deg, max_terms):
    pool = _monomials(len(names), deg)
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        terms[rng.choice(pool)] = Fraction(rng.randint(-3, 3))
    terms = {e: c for e, c in terms.items() if c}
    return Polynomial(names, terms)


def test_criterion_07_membership_oracle_agreement():
    with criterion(7, 60.0):
        rng = random.Random(707)
        for trial in range(50):
            nv = rng.choice([1, 1, 2, 2, 2, 3])
            names = ("x", "y", "z")[:nv]
            while True:
                gens = [
                    _random_poly(rng, names, 3, 3)
                    for _ in range(rng.randint(1, 3))
                ]
                gens = [g for g in gens if not g.is_zero]
                if any(g.total_degree() > 0 for g in gens):
                    break
            basis = ModuleBasis.from_polys(gens)

            v = _random_poly(rng, names, rng.randint(1, 2), 3)
            if truncated_lift_exists(v, gens):
                assert module_member(v, basis), (trial, v.text())

            member = Polynomial(names, {})
            for g in gens:
                member = member + _random_poly(rng, names, 1, 2) * g
            assert module_member(member, basis), (trial, member.text())
            assert truncated_lift_exists(member, gens), (trial, member.text())

            vanishing = [
                Polynomial(names, {e: c for e, c in g.terms.items() if sum(e) > 0})
                for g in gens
            ]
            vanishing = [g for g in vanishing if not g.is_zero]
            if vanishing:
                vbasis = ModuleBasis.from_polys(vanishing)
                one = Polynomial(names, {(0,) * nv: Fraction(1)})
                nonmember = one + _random_poly(rng, names, 2, 2) * vanishing[0]
                assert not module_member(nonmember, vbasis), (trial, nonmember.text())
                assert not truncated_lift_exists(nonmember, vanishing)


# 8. loop holonomy of transport and integrator convergence order


def _rotation():
    return (P("-y", XY), P("x", XY))


def _fitted_order(errors, steps):
    lhs = [math.log(h) for h in steps]
    les = [math.log(e) for e in errors]
    mh = sum(lhs) / len(lhs)
    me = sum(les) / len(les)
    return sum((a - mh) * (b - me) for a, b in zip(lhs, les)) / sum(
        (a - mh) ** 2 for a in lhs
    )


def test_criterion_08_transport_holonomy_and_rk4_order():
    with criterion(8, 10.0):
        gens = [_rotation()]
        w0 = (1.0, 0.0)

        full = bott_transport(gens, FPath((1.0, 0.0), [((1,), 2.0 * math.pi)]), w0)
        assert max(abs(a - b) for a, b in zip(full.representative, w0)) < 1e-5

        half = bott_transport(gens, FPath((1.0, 0.0), [((1,), math.pi)]), w0)
        assert max(abs(a + b) for a, b in zip(half.representative, w0)) < 1e-5

        path = FPath((1.0, 0.0), [((1,), math.pi / 3.0)])
        w1, w2 = (1.0, 0.0), (0.5, -0.25)
        a, b = 2.0, -3.0
        combo = tuple(a * u + b * v for u, v in zip(w1, w2))
        r1 = bott_transport(gens, path, w1)
        r2 = bott_transport(gens, path, w2)
        rc = bott_transport(gens, path, combo)
        for d in range(2):
            want = a * r1.representative[d] + b * r2.representative[d]
            assert abs(rc.representative[d] - want) < 1e-6

        steps = [1e-1, 5e-2, 2.5e-2]
        scaling = (P("x"),)
        errs = [
            abs(flow(scaling, (1.0,), math.log(2.0), step=h)[0] - 2.0)
            for h in steps
        ]
        assert _fitted_order(errs, steps) >= 3.7
        errs = []
        for h in steps:
            end = flow(_rotation(), (1.0, 0.0), math.pi / 2.0, step=h)
            errs.append(math.hypot(end[0], end[1] - 1.0))
        assert _fitted_order(errs, steps) >= 3.7


# 9. grid verdict is pass on random presentations and every shipped bundle


def _random_bundle(rng, names):
    rows = rng.randint(1, 3)
    cols = rng.randint(0, 3)
    entries = []
    for _ in range(rows):
        row = []
        for _ in range(cols):
            terms = {}
            for _ in range(rng.randint(0, 2)):
                key = tuple(rng.randint(0, 2) for _ in names)
                terms[key] = Fraction(rng.randint(-3, 3))
            row.append(Polynomial(names, terms))
        entries.append(row)
    mat = PolyMatrix(names, entries) if cols else PolyMatrix.zero(names, rows, 0)
    return SubbundlePresentation(names, rows, mat)


def test_criterion_09_grid_semicontinuity():
    with criterion(9, 10.0):
        rng = random.Random(909)
        for i in range(20):
            names = X if i % 2 else XY
            b = _random_bundle(rng, names)
            box = Box([(Fraction(-1), Fraction(1))] * len(names))
            rep = mrank_grid(b, box, Fraction(1, 2))
            assert rep.semicontinuity_pass is True
        shipped = [
            "cross.json",
            "free2.json",
            "halfline_left.json",
            "halfline_right.json",
            "open_halfline_right.json",
        ]
        for name in shipped:
            b = bundle_from_dict(fixture_payload(name))
            rep = mrank_grid(b, Box([(Fraction(-1), Fraction(1))]), Fraction(1, 4))
            assert rep.semicontinuity_pass is True, name


# 10. presentation -> bundle keeps every fiber dimension


def _random_fpmodule(rng, names):
    free_rank = rng.randint(1, 3)
    cols = rng.randint(0, 3)
    entries = []
    for _ in range(free_rank):
        row = []
        for _ in range(cols):
            terms = {}
            for _ in range(rng.randint(0, 2)):
                key = tuple(rng.randint(0, 2) for _ in names)
                terms[key] = Fraction(rng.randint(-2, 2))
            row.append(Polynomial(names, terms))
        entries.append(row)
    mat = PolyMatrix(names, entries) if cols else PolyMatrix.zero(names, free_rank, 0)
    return FPModule(names, free_rank, mat)


def test_criterion_10_module_bundle_round_trip():
    with criterion(10, 30.0):
        rng = random.Random(1010)
        points_checked = 0
        for i in range(20):
            names = X if i % 2 else XY
            m = _random_fpmodule(rng, names)
            b = module_to_bundle(m)
            for _ in range(10):
                pt = tuple(
                    Fraction(rng.randint(-20, 20), rng.randint(1, 10))
                    for _ in names
                )
                assert fp_fiber_dim(m, pt) == fiber_dim(b, pt)
                points_checked += 1
        assert points_checked == 200
