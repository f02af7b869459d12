"""Exact univariate real-root tools: Sturm chains, rational-root extraction,
bisection isolation, and a factorization bridge (sympy does the irreducible
factorization over Q; everything else is exact Fraction arithmetic here).
"""

from __future__ import annotations

from fractions import Fraction

import sympy

from .errors import DomainError
from .polyalg import Polynomial

ISOLATION_WIDTH = Fraction(1, 2**30)


def uni_coeffs(p: Polynomial) -> list[Fraction]:
    if len(p.vars) != 1:
        raise DomainError("univariate operation on %d-variable polynomial" % len(p.vars))
    if p.is_zero:
        return []
    deg = max(e[0] for e in p.terms)
    cs = [Fraction(0)] * (deg + 1)
    for e, c in p.terms.items():
        cs[e[0]] = c
    return cs


def from_coeffs(variables, cs) -> Polynomial:
    return Polynomial(variables, {(i,): c for i, c in enumerate(cs) if c})


def _trim(cs):
    while cs and not cs[-1]:
        cs.pop()
    return cs


def _divmod(f, g):
    f = list(f)
    if not g:
        raise ZeroDivisionError
    q = [Fraction(0)] * max(0, len(f) - len(g) + 1)
    while len(f) >= len(g) and _trim(f):
        k = len(f) - len(g)
        c = f[-1] / g[-1]
        q[k] = c
        for i, gc in enumerate(g):
            f[k + i] -= c * gc
        _trim(f)
    return _trim(q), f


def _derivative(cs):
    return [c * i for i, c in enumerate(cs)][1:]


def _gcd(a, b):
    a, b = list(a), list(b)
    while b:
        _, r = _divmod(a, b)
        a, b = b, r
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def squarefree_coeffs(cs):
    if len(cs) <= 1:
        return list(cs)
    g = _gcd(cs, _derivative(list(cs)))
    if len(g) <= 1:
        return list(cs)
    q, r = _divmod(cs, g)
    assert not r
    return q


def sturm_chain(cs):
    chain = [list(cs), _derivative(list(cs))]
    while chain[-1]:
        _, r = _divmod(chain[-2], chain[-1])
        chain.append([-c for c in r])
    chain.pop()
    return chain


def _eval(cs, x: Fraction):
    v = Fraction(0)
    for c in reversed(cs):
        v = v * x + c
    return v


def _variations(signs):
    signs = [s for s in signs if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a * b < 0)


def _sign(v):
    return (v > 0) - (v < 0)


def sturm_count(chain, a: Fraction, b: Fraction) -> int:
    """Distinct real roots in (a, b] for the squarefree chain."""
    va = _variations([_sign(_eval(cs, a)) for cs in chain])
    vb = _variations([_sign(_eval(cs, b)) for cs in chain])
    return va - vb


def root_bound(cs) -> Fraction:
    lead = cs[-1]
    m = max((abs(c / lead) for c in cs[:-1]), default=Fraction(0))
    return m + 1


def count_real_roots(p: Polynomial) -> int:
    cs = squarefree_coeffs(uni_coeffs(p))
    if len(cs) <= 1:
        return 0
    b = root_bound(cs)
    return sturm_count(sturm_chain(cs), -b, b)


def has_real_root(p: Polynomial) -> bool:
    cs = uni_coeffs(p)
    if len(cs) <= 1:
        return False
    if (len(cs) - 1) % 2 == 1:
        return True
    return count_real_roots(p) > 0


def rational_roots(p: Polynomial) -> list[Fraction]:
    """All rational roots, exactly, via the rational-root theorem."""
    cs = _trim(list(uni_coeffs(p)))
    if len(cs) <= 1:
        return []
    roots = set()
    val = 0
    while not cs[0]:
        cs = cs[1:]
        val = 1
    if val:
        roots.add(Fraction(0))
    if len(cs) > 1:
        # clear denominators so candidates come from integer divisors
        den = 1
        for c in cs:
            den = den * c.denominator // _int_gcd(den, c.denominator)
        ics = [int(c * den) for c in cs]
        a0, an = abs(ics[0]), abs(ics[-1])
        if a0:
            for pnum in _divisors(a0):
                for qden in _divisors(an):
                    for cand in (Fraction(pnum, qden), Fraction(-pnum, qden)):
                        if _eval(cs, cand) == 0:
                            roots.add(cand)
    return sorted(roots)


def _int_gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _divisors(n):
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def isolate_real_roots(p: Polynomial, width: Fraction = ISOLATION_WIDTH):
    """Disjoint isolating intervals (a, b], each holding one real root,
    refined by Sturm bisection until b - a <= width.  Rational roots come
    back as degenerate [r, r] pairs."""
    cs = squarefree_coeffs(uni_coeffs(p))
    if len(cs) <= 1:
        return []
    chain = sturm_chain(cs)
    b = root_bound(cs)
    out = []
    stack = [(-b, b)]
    while stack:
        lo, hi = stack.pop()
        n = sturm_count(chain, lo, hi)
        if n == 0:
            continue
        if n == 1 and hi - lo <= width:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        if _eval(cs, mid) == 0:
            out.append((mid, mid))
            # shrink around the hit so the halves exclude it
            eps = min(width, (hi - lo)) / 4
            stack.append((lo, mid - eps))
            stack.append((mid + eps, hi))
        else:
            stack.append((lo, mid))
            stack.append((mid, hi))
    return sorted(out)


def divmod_uni(f: Polynomial, g: Polynomial):
    """Polynomial division with remainder in one variable."""
    q, r = _divmod(uni_coeffs(f), uni_coeffs(g))
    return from_coeffs(f.vars, q), from_coeffs(f.vars, r)


# -- factorization bridge ------------------------------------------------------

def _to_sympy(p: Polynomial):
    syms = sympy.symbols(list(p.vars)) if len(p.vars) > 1 else [sympy.Symbol(p.vars[0])]
    rep = {e: sympy.Rational(c.numerator, c.denominator) for e, c in p.terms.items()}
    return sympy.Poly.from_dict(rep, *syms), syms


def _from_sympy(poly, variables) -> Polynomial:
    terms = {}
    for exps, c in poly.as_dict().items():
        q = sympy.Rational(c)
        terms[tuple(int(e) for e in exps)] = Fraction(int(q.p), int(q.q))
    return Polynomial(variables, terms)


def irreducible_factors(p: Polynomial):
    """[(factor, multiplicity)] over Q, factors monic-normalized, constants
    dropped.  Works for any number of variables."""
    if p.is_zero or p.is_constant():
        return []
    sp, _ = _to_sympy(p)
    _, factors = sp.factor_list()
    out = []
    for f, mult in factors:
        q = _from_sympy(f, p.vars)
        if q.is_constant():
            continue
        lead = q.terms[max(q.terms, key=lambda e: (sum(e), e))]
        out.append((q * (Fraction(1) / lead), int(mult)))
    return out


def real_vanishing_part(p: Polynomial) -> Polynomial:
    """Monic square-free product of the irreducible factors of a univariate
    polynomial that have at least one real root.  The principal generator of
    {q : q vanishes at every real zero of p}."""
    out = Polynomial.one(p.vars)
    for f, _ in irreducible_factors(p):
        if has_real_root(f):
            out = out * f
    return out


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic gcd over Q, any number of variables."""
    if a.vars != b.vars:
        raise DomainError("gcd operands must share variables")
    if a.is_zero:
        return b
    if b.is_zero:
        return a
    sa, _ = _to_sympy(a)
    sb, _ = _to_sympy(b)
    g = _from_sympy(sa.gcd(sb), a.vars)
    lead = g.terms[max(g.terms, key=lambda e: (sum(e), e))]
    return g * (Fraction(1) / lead)
