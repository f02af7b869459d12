import random
from fractions import Fraction

import pytest

from tepui.bundle import fiber_dim, generic_rank
from tepui.errors import DomainError
from tepui.fpmodules import (
    CERTIFIED_INVISIBLE,
    CERTIFIED_VISIBLE,
    SAMPLED_UNCERTIFIED,
    FPModule,
    fiber_determination_univariate,
    fp_fiber_dim,
    invisible_test,
    module_to_bundle,
)
from tepui.grobner import ModuleBasis, module_member
from tepui.polyalg import PolyMatrix, Polynomial, parse_polynomial

X = ("x",)
XY = ("x", "y")


def P(text, names=X):
    return parse_polynomial(text, names)


def fp(names, free_rank, cols):
    """Module coker(P) from presentation columns given as text lists."""
    if cols:
        entries = [[P(c[i], names) for c in cols] for i in range(free_rank)]
        mat = PolyMatrix(names, entries)
    else:
        mat = PolyMatrix.zero(names, free_rank, 0)
    return FPModule(names, free_rank, mat)


def dual_numbers():
    return fp(X, 1, [["x^2"]])


def test_fp_fiber_dim_frozen_values():
    assert fp_fiber_dim(dual_numbers(), (Fraction(0),)) == 1
    assert fp_fiber_dim(dual_numbers(), (Fraction(3),)) == 0
    free2 = fp(X, 2, [])
    assert fp_fiber_dim(free2, (Fraction(0),)) == 2
    assert fp_fiber_dim(free2, (Fraction(-7, 2),)) == 2
    irr = fp(X, 1, [["x^2 + 1"]])
    for t in (0, 1, -2, Fraction(5, 3)):
        assert fp_fiber_dim(irr, (Fraction(t),)) == 0


def test_fp_fiber_dim_point_mismatch():
    with pytest.raises(DomainError):
        fp_fiber_dim(dual_numbers(), (Fraction(0), Fraction(0)))


def test_invisible_nilpotent_direction():
    m = dual_numbers()
    verdict = invisible_test(m, P("x"))
    assert verdict.status == CERTIFIED_INVISIBLE
    assert verdict.witness is None
    assert verdict.certificate
    assert not module_member([P("x")], ModuleBasis.from_polys([P("x^2")]))


def test_invisible_unit_is_visible():
    verdict = invisible_test(dual_numbers(), P("1"))
    assert verdict.status == CERTIFIED_VISIBLE
    assert verdict.witness == (Fraction(0),)


def test_invisible_uncertified_without_real_witness():
    irr = fp(X, 1, [["x^2 + 1"]])
    verdict = invisible_test(irr, P("1"), samples=200, seed=3)
    assert verdict.status == SAMPLED_UNCERTIFIED
    assert verdict.witness is None
    assert verdict.samples_used >= 200


def test_invisible_element_validation():
    m = fp(X, 2, [])
    with pytest.raises(DomainError):
        invisible_test(m, P("x"))
    with pytest.raises(DomainError):
        invisible_test(m, [P("x")])
    with pytest.raises(DomainError):
        invisible_test(dual_numbers(), [parse_polynomial("x", XY)])


def rank_jumps(module, v, point):
    pres = module.presentation
    aug = PolyMatrix(
        module.vars,
        [list(pres.entries[i]) + [v[i]] for i in range(pres.rows)],
    )
    return aug.rank_at(point) > pres.rank_at(point)


def random_module(rng, names):
    free_rank = rng.randint(1, 2)
    cols = rng.randint(0, 2)
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


def random_element(rng, names, free_rank, max_deg=2):
    out = []
    for _ in range(free_rank):
        terms = {}
        for _ in range(rng.randint(0, 3)):
            key = tuple(rng.randint(0, max_deg) for _ in names)
            terms[key] = Fraction(rng.randint(-3, 3))
        out.append(Polynomial(names, terms))
    return out


def test_verdict_soundness_on_random_modules():
    rng = random.Random(17)
    for _ in range(25):
        m = random_module(rng, X)
        v = random_element(rng, X, m.free_rank)
        verdict = invisible_test(m, v, samples=60, seed=rng.randint(0, 10**6))
        if verdict.status == CERTIFIED_VISIBLE:
            assert rank_jumps(m, v, verdict.witness)
        else:
            for _ in range(20):
                pt = (Fraction(rng.randint(-40, 40), rng.randint(1, 12)),)
                assert not rank_jumps(m, v, pt)


def test_presentation_columns_never_visible():
    rng = random.Random(29)
    for _ in range(20):
        m = random_module(rng, XY)
        pres = m.presentation
        if pres.cols == 0:
            continue
        cols = pres.columns()
        coeffs = [
            Polynomial(XY, {(rng.randint(0, 1), rng.randint(0, 1)): Fraction(rng.randint(-2, 2))})
            for _ in cols
        ]
        v = [Polynomial.zero(XY) for _ in range(m.free_rank)]
        for lam, col in zip(coeffs, cols):
            v = [acc + lam * c for acc, c in zip(v, col)]
        verdict = invisible_test(m, v, samples=40, seed=rng.randint(0, 10**6))
        assert verdict.status != CERTIFIED_VISIBLE


def test_fiber_determination_nilpotent():
    fd = fiber_determination_univariate(dual_numbers())
    assert [[p.text() for p in col] for col in fd.invisible_generators] == [["x"]]
    assert [p.text() for p in fd.smith_diag] == ["x^2"]
    assert [p.text() for p in fd.rho] == ["x"]
    q = fd.quotient
    assert q.free_rank == 1
    assert [[p.text() for p in col] for col in q.presentation.columns()] == [["x"]]
    assert fp_fiber_dim(q, (Fraction(0),)) == 1
    assert fp_fiber_dim(q, (Fraction(2),)) == 0


def test_fiber_determination_no_real_support():
    fd = fiber_determination_univariate(fp(X, 1, [["x^2 + 1"]]))
    assert [[p.text() for p in col] for col in fd.invisible_generators] == [["1"]]
    assert [p.text() for p in fd.rho] == ["1"]
    q = fd.quotient
    assert [[p.text() for p in col] for col in q.presentation.columns()] == [["1"]]
    for t in (0, 1, -3):
        assert fp_fiber_dim(q, (Fraction(t),)) == 0


def test_fiber_determination_free_module():
    fd = fiber_determination_univariate(fp(X, 2, []))
    assert list(fd.invisible_generators) == []
    assert list(fd.smith_diag) == []
    assert list(fd.rho) == []
    assert fd.quotient.free_rank == 2
    assert fd.quotient.presentation.cols == 0


def test_fiber_determination_quotient_kills_invisibles():
    rng = random.Random(41)
    fd = fiber_determination_univariate(dual_numbers())
    q = fd.quotient
    basis = ModuleBasis.from_polys([q.presentation.entries[0][0]])
    for _ in range(40):
        v = random_element(rng, X, 1, max_deg=4)
        if module_member([v[0]], basis):
            continue
        verdict = invisible_test(q, v, samples=40, seed=rng.randint(0, 10**6))
        assert verdict.status != CERTIFIED_INVISIBLE


def test_fiber_determination_rejects_multivariate():
    m = FPModule(XY, 1, PolyMatrix(XY, [[parse_polynomial("x*y", XY)]]))
    with pytest.raises(DomainError):
        fiber_determination_univariate(m)


def test_module_to_bundle_column_module():
    m = FPModule(XY, 2, PolyMatrix(XY, [[parse_polynomial("x", XY)], [parse_polynomial("y", XY)]]))
    b = module_to_bundle(m)
    assert b.ambient_rank == 2
    assert generic_rank(b) == 1
    assert fiber_dim(b, (Fraction(0), Fraction(0))) == 2
    assert fiber_dim(b, (Fraction(1), Fraction(0))) == 1


def test_module_to_bundle_preserves_fiber_dims():
    rng = random.Random(53)
    for _ in range(10):
        m = random_module(rng, XY)
        b = module_to_bundle(m)
        for _ in range(20):
            pt = (
                Fraction(rng.randint(-30, 30), rng.randint(1, 10)),
                Fraction(rng.randint(-30, 30), rng.randint(1, 10)),
            )
            assert fiber_dim(b, pt) == fp_fiber_dim(m, pt)


def test_fpmodule_shape_validation():
    with pytest.raises(DomainError):
        FPModule(X, 2, PolyMatrix(X, [[P("x")]]))
    with pytest.raises(DomainError):
        FPModule(XY, 1, PolyMatrix(X, [[P("x")]]))
