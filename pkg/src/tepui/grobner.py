"""Groebner bases for submodules of free modules over Q[x1..xn].

Buchberger's algorithm with normal pair selection, the coprimality criterion
(ideals only; it is not sound for module S-pairs) and the chain criterion.
Module terms are ordered position-over-term, lower component index first,
grevlex on the monomial part by default.  Output bases are always reduced,
monic, and sorted, so equal submodules give identical bases.

Division is tracked, which yields membership certificates
(lift_combination), Schreyer-style syzygies, and the radical membership
test via the 1 - t*f trick.  A univariate Smith normal form with verified
transforms lives here too.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DomainError
from .polyalg import MONOMIAL_KEYS, Polynomial, PolyMatrix
from .realroots import divmod_uni


class ModuleBasis:
    """Finite generating set of a submodule of Q[x]^ambient.

    columns[i] is a length-`ambient` tuple of Polynomials.  ambient == 1 is
    the ideal case; from_polys/polys convert between the two views.
    """

    __slots__ = ("vars", "ambient", "columns", "order", "is_groebner", "_cache")

    def __init__(self, variables, ambient, columns, order="grevlex", is_groebner=False):
        object.__setattr__(self, "vars", tuple(variables))
        object.__setattr__(self, "ambient", int(ambient))
        if self.ambient < 0:
            raise DomainError("ambient rank must be nonnegative")
        if order not in MONOMIAL_KEYS:
            raise DomainError("unknown monomial order %r" % order)
        cols = []
        for col in columns:
            col = tuple(col)
            if len(col) != self.ambient:
                raise DomainError("column length %d does not match ambient rank %d" % (len(col), self.ambient))
            for p in col:
                if not isinstance(p, Polynomial) or p.vars != self.vars:
                    raise DomainError("column entries must be polynomials over %r" % (self.vars,))
            cols.append(col)
        object.__setattr__(self, "columns", tuple(cols))
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "is_groebner", bool(is_groebner))
        object.__setattr__(self, "_cache", {})

    def __setattr__(self, *a):
        raise AttributeError("ModuleBasis is immutable")

    @classmethod
    def from_polys(cls, polys, order="grevlex"):
        polys = list(polys)
        if not polys:
            raise DomainError("from_polys needs at least one polynomial to fix the ring")
        return cls(polys[0].vars, 1, [(p,) for p in polys], order=order)

    @classmethod
    def from_matrix(cls, matrix: PolyMatrix, order="grevlex"):
        return cls(matrix.vars, matrix.rows, matrix.columns(), order=order)

    def polys(self):
        if self.ambient != 1:
            raise DomainError("polys() only applies to ambient rank 1")
        return [col[0] for col in self.columns]

    def matrix(self) -> PolyMatrix:
        return PolyMatrix.from_columns(self.vars, [list(c) for c in self.columns], rows=self.ambient)

    def __eq__(self, other):
        return (
            isinstance(other, ModuleBasis)
            and self.vars == other.vars
            and self.ambient == other.ambient
            and self.order == other.order
            and self.columns == other.columns
        )

    def __hash__(self):
        return hash((self.vars, self.ambient, self.order, self.columns))

    def __repr__(self):
        return "ModuleBasis(ambient=%d, columns=%r)" % (
            self.ambient,
            [[p.text() for p in col] for col in self.columns],
        )


# -- term-level engine ----------------------------------------------------------

def _term_key(order):
    mono = MONOMIAL_KEYS[order]

    def key(term):
        comp, exps = term
        return (-comp, mono(exps))

    return key


def _to_vec(col):
    v = {}
    for comp, p in enumerate(col):
        for e, c in p.terms.items():
            v[(comp, e)] = c
    return v


def _to_col(vec, ambient, variables):
    polys = [{} for _ in range(ambient)]
    for (comp, e), c in vec.items():
        polys[comp][e] = c
    return tuple(Polynomial(variables, t) for t in polys)


def _vscale(v, c):
    return {t: c * x for t, x in v.items()}


def _vadd_scaled(a, c, shift, b):
    """a + c * x^shift * b as a fresh dict."""
    out = dict(a)
    for (comp, e), bc in b.items():
        t = (comp, tuple(x + y for x, y in zip(e, shift)))
        s = out.get(t, Fraction(0)) + c * bc
        if s:
            out[t] = s
        elif t in out:
            del out[t]
    return out


def _vsub_qmul(a, q, b):
    """a - q * b where q is a polynomial given as {exps: coeff}."""
    for shift, c in q.items():
        a = _vadd_scaled(a, -c, shift, b)
    return a


def _divides(e1, e2):
    return all(a <= b for a, b in zip(e1, e2))


class _Item:
    __slots__ = ("vec", "lt", "lc", "rep")

    def __init__(self, vec, key, rep=None):
        self.vec = vec
        self.lt = max(vec, key=key)
        self.lc = vec[self.lt]
        self.rep = rep

    def monic(self):
        if self.lc != 1:
            inv = Fraction(1) / self.lc
            self.vec = _vscale(self.vec, inv)
            if self.rep is not None:
                self.rep = _vscale(self.rep, inv)
            self.lc = Fraction(1)
        return self


def _normal_form(vec, items, key, track=False):
    """Full reduction of vec by items.  Returns (remainder, quotients) where
    quotients[i] is {exps: coeff} with vec = sum q_i items_i + remainder."""
    rem = {}
    work = dict(vec)
    quots = [dict() for _ in items] if track else None
    while work:
        t = max(work, key=key)
        comp, exps = t
        c = work[t]
        hit = None
        for idx, it in enumerate(items):
            (icomp, iexps) = it.lt
            if icomp == comp and _divides(iexps, exps):
                hit = idx
                break
        if hit is None:
            rem[t] = c
            del work[t]
            continue
        it = items[hit]
        shift = tuple(a - b for a, b in zip(exps, it.lt[1]))
        factor = c / it.lc
        work = _vadd_scaled(work, -factor, shift, it.vec)
        if track:
            quots[hit][shift] = quots[hit].get(shift, Fraction(0)) + factor
    return rem, quots


def _spair(a, b, nvars, track=False):
    (comp, ea), (_, eb) = a.lt, b.lt
    lcm = tuple(max(x, y) for x, y in zip(ea, eb))
    sa = tuple(l - x for l, x in zip(lcm, ea))
    sb = tuple(l - x for l, x in zip(lcm, eb))
    vec = _vadd_scaled({}, Fraction(1) / a.lc, sa, a.vec)
    vec = _vadd_scaled(vec, Fraction(-1) / b.lc, sb, b.vec)
    rep = None
    if track:
        rep = _vadd_scaled({}, Fraction(1) / a.lc, sa, a.rep)
        rep = _vadd_scaled(rep, Fraction(-1) / b.lc, sb, b.rep)
    return vec, rep, (comp, lcm), (sa, sb)


def _buchberger(cols, ambient, nvars, key, track=False):
    items = []
    for j, col in enumerate(cols):
        vec = _to_vec(col)
        if not vec:
            continue
        rep = {(j, (0,) * nvars): Fraction(1)} if track else None
        items.append(_Item(vec, key, rep).monic())

    def lcm_term(i, j):
        (ci, ei), (cj, ej) = items[i].lt, items[j].lt
        if ci != cj:
            return None
        return (ci, tuple(max(a, b) for a, b in zip(ei, ej)))

    pairs = set()
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if lcm_term(i, j) is not None:
                pairs.add((i, j))
    handled = set()

    while pairs:
        # normal selection: smallest lcm in the module order
        best = min(pairs, key=lambda ij: key(lcm_term(*ij)))
        pairs.discard(best)
        handled.add(best)
        i, j = best
        a, b = items[i], items[j]
        comp, lcm = lcm_term(i, j)
        # coprimality criterion, sound for ideals only
        if ambient == 1 and all(min(x, y) == 0 for x, y in zip(a.lt[1], b.lt[1])):
            continue
        # chain criterion
        skip = False
        for k in range(len(items)):
            if k == i or k == j:
                continue
            (kc, ke) = items[k].lt
            if kc == comp and _divides(ke, lcm):
                pik = (min(i, k), max(i, k))
                pjk = (min(j, k), max(j, k))
                if pik in handled and pjk in handled:
                    skip = True
                    break
        if skip:
            continue
        svec, srep, _, _ = _spair(a, b, nvars, track)
        nf, quots = _normal_form(svec, items, key, track)
        if not nf:
            continue
        rep = None
        if track:
            rep = srep
            for w, q in enumerate(quots):
                if q:
                    rep = _vsub_qmul(rep, q, items[w].rep)
        new = _Item(nf, key, rep).monic()
        items.append(new)
        n = len(items) - 1
        for w in range(n):
            if lcm_term(w, n) is not None:
                pairs.add((w, n))

    return _interreduce(items, key, track)


def _interreduce(items, key, track):
    # minimal basis: no leading term divides another's
    keep = []
    for i, it in enumerate(items):
        redundant = False
        for j, other in enumerate(items):
            if j == i or other.lt[0] != it.lt[0] or not _divides(other.lt[1], it.lt[1]):
                continue
            # duplicate inputs can tie on the leading term; keep the first
            if other.lt[1] != it.lt[1] or j < i:
                redundant = True
                break
        if redundant:
            continue
        keep.append(it)
    # tail reduction to a fixpoint
    changed = True
    while changed:
        changed = False
        for i, it in enumerate(keep):
            others = keep[:i] + keep[i + 1 :]
            if not others:
                continue
            nf, quots = _normal_form(it.vec, others, key, track)
            if nf != it.vec:
                changed = True
                rep = it.rep
                if track:
                    for w, q in enumerate(quots):
                        if q:
                            rep = _vsub_qmul(rep, q, others[w].rep)
                new = _Item(nf, key, rep).monic()
                keep[i] = new
    keep.sort(key=lambda it: key(it.lt), reverse=True)
    return keep


def _engine(basis: ModuleBasis, track=True):
    tag = ("gb", track)
    if tag in basis._cache:
        return basis._cache[tag]
    key = _term_key(basis.order)
    if basis.is_groebner:
        items = []
        for j, col in enumerate(basis.columns):
            vec = _to_vec(col)
            if not vec:
                continue
            rep = {(j, (0,) * len(basis.vars)): Fraction(1)} if track else None
            items.append(_Item(vec, key, rep).monic())
        items.sort(key=lambda it: key(it.lt), reverse=True)
    else:
        items = _buchberger(basis.columns, basis.ambient, len(basis.vars), key, track)
    basis._cache[tag] = (items, key)
    return items, key


# -- public operations ------------------------------------------------------------

def groebner_basis(basis: ModuleBasis) -> ModuleBasis:
    """The reduced, monic, sorted basis of the same submodule."""
    items, key = _engine(basis, track=False)
    cols = [_to_col(it.vec, basis.ambient, basis.vars) for it in items]
    return ModuleBasis(basis.vars, basis.ambient, cols, order=basis.order, is_groebner=True)


def _as_column(v, basis):
    if isinstance(v, Polynomial):
        if basis.ambient != 1:
            raise DomainError("bare polynomial against ambient rank %d" % basis.ambient)
        v = (v,)
    v = tuple(v)
    if len(v) != basis.ambient:
        raise DomainError("vector length %d does not match ambient rank %d" % (len(v), basis.ambient))
    for p in v:
        if not isinstance(p, Polynomial) or p.vars != basis.vars:
            raise DomainError("vector entries must be polynomials over %r" % (basis.vars,))
    return v


def module_member(v, basis: ModuleBasis) -> bool:
    col = _as_column(v, basis)
    items, key = _engine(basis, track=False)
    nf, _ = _normal_form(_to_vec(col), items, key)
    return not nf


def lift_combination(v, basis: ModuleBasis):
    """Coefficients lam with sum(lam_i * columns_i) == v, or None.  The
    returned combination is re-expanded and checked before it is returned."""
    col = _as_column(v, basis)
    items, key = _engine(basis, track=True)
    nf, quots = _normal_form(_to_vec(col), items, key, track=True)
    if nf:
        return None
    acc = {}
    for w, q in enumerate(quots):
        if q:
            acc = _vsub_qmul(acc, {s: -c for s, c in q.items()}, items[w].rep)
    lam = list(_to_col(acc, len(basis.columns), basis.vars))
    # re-expansion check
    check = [Polynomial.zero(basis.vars) for _ in range(basis.ambient)]
    for lam_j, gcol in zip(lam, basis.columns):
        for i in range(basis.ambient):
            check[i] = check[i] + lam_j * gcol[i]
    if tuple(check) != tuple(col):
        raise DomainError("internal lift verification failed")
    return lam


def radical_member(f: Polynomial, ideal: ModuleBasis) -> bool:
    """Is f in the radical of the ideal (Rabinowitsch: 1 in I + (1 - t*f))?"""
    if ideal.ambient != 1:
        raise DomainError("radical membership is an ideal operation")
    if f.vars != ideal.vars:
        raise DomainError("variable mismatch")
    fresh = "t"
    n = 0
    while fresh in ideal.vars:
        fresh = "t%d" % n
        n += 1
    evars = ideal.vars + (fresh,)
    gens = [p.extend(evars) for p in ideal.polys()]
    t = Polynomial.variable(evars, fresh)
    gens.append(Polynomial.one(evars) - t * f.extend(evars))
    ext = ModuleBasis.from_polys(gens, order=ideal.order)
    items, _ = _engine(ext, track=False)
    zero = (0,) * len(evars)
    return any(it.lt == (0, zero) for it in items)


def syzygies(basis: ModuleBasis) -> ModuleBasis:
    """Generators of {lam : sum lam_i columns_i = 0} in Q[x]^len(columns).

    Schreyer syzygies of the computed basis, pulled back through the
    division tracking, plus the division relations of the inputs, then
    canonicalized as a reduced basis.
    """
    items, key = _engine(basis, track=True)
    ngens = len(basis.columns)
    nvars = len(basis.vars)
    raw = []
    # Schreyer syzygy for every same-component pair of the finished basis
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i].lt[0] != items[j].lt[0]:
                continue
            svec, _, _, (sa, sb) = _spair(items[i], items[j], nvars, track=False)
            nf, quots = _normal_form(svec, items, key, track=True)
            if nf:
                raise DomainError("internal error: basis is not a Groebner basis")
            syz = {(i, sa): Fraction(1) / items[i].lc}
            syz = _vadd_scaled(syz, Fraction(-1) / items[j].lc, sb, {(j, (0,) * nvars): Fraction(1)})
            for w, q in enumerate(quots):
                if q:
                    syz = _vsub_qmul(syz, q, {(w, (0,) * nvars): Fraction(1)})
            # transport: basis-index coordinates -> generator coordinates
            out = {}
            for (w, e), c in syz.items():
                out = _vadd_scaled(out, c, e, items[w].rep)
            if out:
                raw.append(out)
    # division relations of the original generators
    for j, col in enumerate(basis.columns):
        vec = _to_vec(col)
        nf, quots = _normal_form(vec, items, key, track=True)
        if nf:
            raise DomainError("internal error: generator does not reduce to zero")
        rel = {(j, (0,) * nvars): Fraction(1)}
        for w, q in enumerate(quots):
            if q:
                rel = _vsub_qmul(rel, q, items[w].rep)
        if rel:
            raw.append(rel)
    if not raw:
        return ModuleBasis(basis.vars, ngens, [], order=basis.order, is_groebner=True)
    cols = [_to_col(v, ngens, basis.vars) for v in raw]
    return groebner_basis(ModuleBasis(basis.vars, ngens, cols, order=basis.order))


# -- univariate Smith normal form ----------------------------------------------

class SmithResult:
    """U * P * V = D with U, V unimodular over Q[x]; diag is the divisor
    chain d_1 | d_2 | ..., monic, zeros trailing."""

    __slots__ = ("U", "D", "V", "Uinv", "diag", "det_u", "det_v")

    def __init__(self, U, D, V, Uinv, diag, det_u, det_v):
        self.U, self.D, self.V, self.Uinv = U, D, V, Uinv
        self.diag = diag
        self.det_u, self.det_v = det_u, det_v


def _uni_deg(p: Polynomial):
    return -1 if p.is_zero else max(e[0] for e in p.terms)


def smith_normal_form(P: PolyMatrix) -> SmithResult:
    if len(P.vars) != 1:
        raise DomainError("Smith normal form requires a univariate matrix")
    variables = P.vars
    one = Polynomial.one(variables)
    zero = Polynomial.zero(variables)
    nr, nc = P.rows, P.cols
    A = [list(row) for row in P.entries]
    U = [[one if i == j else zero for j in range(nr)] for i in range(nr)]
    Uinv = [[one if i == j else zero for j in range(nr)] for i in range(nr)]
    V = [[one if i == j else zero for j in range(nc)] for i in range(nc)]
    det_u = Fraction(1)
    det_v = Fraction(1)

    def swap_rows(i, j):
        nonlocal det_u
        if i == j:
            return
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]
        for r in Uinv:
            r[i], r[j] = r[j], r[i]
        det_u = -det_u

    def swap_cols(i, j):
        nonlocal det_v
        if i == j:
            return
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]
        det_v = -det_v

    def row_op(i, t, q):
        # row_i -= q * row_t
        A[i] = [a - q * b for a, b in zip(A[i], A[t])]
        U[i] = [a - q * b for a, b in zip(U[i], U[t])]
        for r in Uinv:
            r[t] = r[t] + q * r[i]

    def row_add(i, t):
        # row_t += row_i  (divisibility repair)
        A[t] = [a + b for a, b in zip(A[t], A[i])]
        U[t] = [a + b for a, b in zip(U[t], U[i])]
        for r in Uinv:
            r[i] = r[i] - r[t]

    def col_op(j, t, q):
        # col_j -= q * col_t
        for r in A:
            r[j] = r[j] - q * r[t]
        for r in V:
            r[j] = r[j] - q * r[t]

    def scale_row(i, c):
        nonlocal det_u
        A[i] = [c * a for a in A[i]]
        U[i] = [c * a for a in U[i]]
        inv = Fraction(1) / c
        for r in Uinv:
            r[i] = inv * r[i]
        det_u = det_u * c

    for t in range(min(nr, nc)):
        while True:
            best = None
            for i in range(t, nr):
                for j in range(t, nc):
                    if not A[i][j].is_zero:
                        d = _uni_deg(A[i][j])
                        if best is None or d < best[0]:
                            best = (d, i, j)
            if best is None:
                break
            _, bi, bj = best
            swap_rows(t, bi)
            swap_cols(t, bj)
            dirty = False
            for i in range(t + 1, nr):
                if not A[i][t].is_zero:
                    q, _ = divmod_uni(A[i][t], A[t][t])
                    row_op(i, t, q)
                    if not A[i][t].is_zero:
                        dirty = True
            for j in range(t + 1, nc):
                if not A[t][j].is_zero:
                    q, _ = divmod_uni(A[t][j], A[t][t])
                    col_op(j, t, q)
                    if not A[t][j].is_zero:
                        dirty = True
            if dirty:
                continue
            # pivot divides its row and column; enforce chain on the rest
            repair = None
            for i in range(t + 1, nr):
                for j in range(t + 1, nc):
                    _, r = divmod_uni(A[i][j], A[t][t])
                    if not r.is_zero:
                        repair = i
                        break
                if repair is not None:
                    break
            if repair is None:
                break
            row_add(repair, t)
        if t < min(nr, nc) and not A[t][t].is_zero:
            lead = A[t][t].terms[max(A[t][t].terms, key=lambda e: e[0])]
            if lead != 1:
                scale_row(t, Fraction(1) / lead)

    diag = [A[i][i] for i in range(min(nr, nc))]
    # verification: transforms are unimodular and recompose P
    if det_u == 0 or det_v == 0:
        raise DomainError("internal error: transform is singular")
    Um = PolyMatrix(variables, U)
    Vm = PolyMatrix(variables, V)
    Dm = PolyMatrix(variables, A)
    if Um * P * Vm != Dm:
        raise DomainError("internal error: Smith decomposition does not recompose")
    for a, b in zip(diag, diag[1:]):
        if not a.is_zero:
            if not b.is_zero:
                _, r = divmod_uni(b, a)
                if not r.is_zero:
                    raise DomainError("internal error: divisor chain broken")
        elif not b.is_zero:
            raise DomainError("internal error: zero before nonzero in divisor chain")
    return SmithResult(Um, Dm, Vm, PolyMatrix(variables, Uinv), diag, det_u, det_v)
