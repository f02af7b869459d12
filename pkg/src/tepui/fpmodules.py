"""Finitely presented modules Q = coker(P) over Q[x1..xn], their fibers,
and invisibility: elements that vanish in every real fiber Q / I_m Q.

The symbolic certificate works over the complex points (Nullstellensatz),
which implies invisibility over the reals; when it fails, a deterministic
candidate hunt plus seeded rational sampling either exhibits a visible
witness point or reports an uncertified sampled verdict.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .bundle import SubbundlePresentation
from .config import DEFAULTS
from .errors import DomainError
from .grobner import ModuleBasis, groebner_basis, module_member, radical_member, smith_normal_form
from .polyalg import Polynomial, PolyMatrix, determinant, minors
from .realroots import irreducible_factors, has_real_root, rational_roots

CERTIFIED_INVISIBLE = "certified_invisible"
CERTIFIED_VISIBLE = "certified_visible"
SAMPLED_UNCERTIFIED = "sampled_invisible_uncertified"


class FPModule:
    """coker of presentation: Q[x]^free_rank / col-span(presentation)."""

    __slots__ = ("vars", "free_rank", "presentation")

    def __init__(self, variables, free_rank, presentation: PolyMatrix):
        variables = tuple(variables)
        if presentation.vars != variables:
            raise DomainError("presentation variables do not match")
        if presentation.rows != free_rank:
            raise DomainError(
                "presentation has %d rows, free rank is %d" % (presentation.rows, free_rank)
            )
        object.__setattr__(self, "vars", variables)
        object.__setattr__(self, "free_rank", int(free_rank))
        object.__setattr__(self, "presentation", presentation)

    def __setattr__(self, *a):
        raise AttributeError("FPModule is immutable")

    @classmethod
    def cyclic(cls, ideal_gens):
        """Q[x]/(g1..gk) as a rank-1 cokernel."""
        gens = list(ideal_gens)
        if not gens:
            raise DomainError("cyclic module needs at least one ideal generator")
        variables = gens[0].vars
        return cls(variables, 1, PolyMatrix(variables, [gens]))

    def column_module(self) -> ModuleBasis:
        return ModuleBasis.from_matrix(self.presentation)

    def __eq__(self, other):
        return (
            isinstance(other, FPModule)
            and self.vars == other.vars
            and self.free_rank == other.free_rank
            and self.presentation == other.presentation
        )


def fp_fiber_dim(module: FPModule, point) -> int:
    """dim over R of Q / I_m Q = R^p / col-span P(m)."""
    if len(point) != len(module.vars):
        raise DomainError("point dimension does not match")
    return module.free_rank - module.presentation.rank_at(point)


class InvisibilityVerdict:
    __slots__ = ("status", "witness", "certificate", "samples_used")

    def __init__(self, status, witness=None, certificate=None, samples_used=0):
        self.status = status
        self.witness = witness
        self.certificate = certificate
        self.samples_used = samples_used

    @property
    def certified(self):
        return self.status in (CERTIFIED_INVISIBLE, CERTIFIED_VISIBLE)

    def __repr__(self):
        return "InvisibilityVerdict(%s, witness=%r)" % (self.status, self.witness)


def _augmented(P: PolyMatrix, v):
    cols = P.columns() + [list(v)]
    return PolyMatrix.from_columns(P.vars, cols, rows=P.rows)


def _as_vector(module: FPModule, v):
    if isinstance(v, Polynomial):
        if module.free_rank != 1:
            raise DomainError("bare polynomial element needs free rank 1")
        v = (v,)
    v = tuple(v)
    if len(v) != module.free_rank:
        raise DomainError("element length does not match free rank")
    for p in v:
        if not isinstance(p, Polynomial) or p.vars != module.vars:
            raise DomainError("element entries must be polynomials over the module variables")
    return v


def _rank_jump_at(module, v, point):
    P = module.presentation
    pr = P.rank_at(point)
    ar = _augmented(P, v).rank_at(point)
    return ar > pr


def _certificate(module: FPModule, v) -> bool:
    """True iff v(m) lies in col-span P(m) at every complex point: every
    k-minor of [P | v] that uses the v column lies in the radical of the
    k-minor ideal of P."""
    P = module.presentation
    p, q = P.rows, P.cols
    aug = _augmented(P, v)
    for k in range(1, min(p, q + 1) + 1):
        # k can exceed q by one: [P | v] has one extra column, P has no such minors
        pk = [m for m in minors(P, k) if not m.is_zero] if k <= min(p, q) else []
        ideal = ModuleBasis.from_polys(pk) if pk else None
        for rows_sel in itertools.combinations(range(p), k):
            for cols_sel in itertools.combinations(range(q + 1), k):
                if q not in cols_sel:
                    continue  # only minors that involve the candidate column
                sub = PolyMatrix(
                    module.vars,
                    [[aug.entries[i][j] for j in cols_sel] for i in rows_sel],
                )
                d = determinant(sub)
                if d.is_zero:
                    continue
                if ideal is None:
                    return False  # nonzero minor against the zero ideal
                if not radical_member(d, ideal):
                    return False
    return True


def _candidate_points(module: FPModule):
    """Deterministic points where the rank of P may drop: the origin, plus
    (univariate case) every rational root of every stratification minor."""
    n = len(module.vars)
    cands = [tuple(Fraction(0) for _ in range(n))]
    if n == 1:
        P = module.presentation
        seen = {Fraction(0)}
        for k in range(1, min(P.rows, P.cols) + 1):
            for m in minors(P, k):
                if m.is_zero:
                    continue
                for r in rational_roots(m):
                    if r not in seen:
                        seen.add(r)
                        cands.append((r,))
    return cands


def invisible_test(module: FPModule, v, samples=None, seed=None) -> InvisibilityVerdict:
    """Three-valued invisibility verdict for the class of v in coker(P)."""
    v = _as_vector(module, v)
    samples = DEFAULTS.invisible_samples if samples is None else samples
    seed = DEFAULTS.seed if seed is None else seed
    if _certificate(module, v):
        return InvisibilityVerdict(CERTIFIED_INVISIBLE, certificate="radical-membership of augmented minors")
    used = 0
    for pt in _candidate_points(module):
        used += 1
        if _rank_jump_at(module, v, pt):
            return InvisibilityVerdict(CERTIFIED_VISIBLE, witness=pt, samples_used=used)
    rng = random.Random(seed)
    n = len(module.vars)
    for _ in range(samples):
        pt = tuple(Fraction(rng.randint(-400, 400), rng.randint(1, 40)) for _ in range(n))
        used += 1
        if _rank_jump_at(module, v, pt):
            return InvisibilityVerdict(CERTIFIED_VISIBLE, witness=pt, samples_used=used)
    return InvisibilityVerdict(SAMPLED_UNCERTIFIED, samples_used=used)


class FiberDetermination:
    __slots__ = ("invisible_generators", "quotient", "smith_diag", "rho")

    def __init__(self, invisible_generators, quotient, smith_diag, rho):
        self.invisible_generators = invisible_generators
        self.quotient = quotient
        self.smith_diag = smith_diag
        self.rho = rho


def fiber_determination_univariate(module: FPModule) -> FiberDetermination:
    """Split a univariate module into its invisible part and its
    fiber-determined quotient via the Smith form: with U P V = diag(d_i), the
    invisible submodule is generated by Uinv * (rho_i e_i) where rho_i is the
    monic square-free product of the real-rooted irreducible factors of d_i;
    free coordinates contribute nothing."""
    if len(module.vars) != 1:
        raise DomainError("fiber determination requires one variable")
    P = module.presentation
    s = smith_normal_form(P)
    variables = module.vars
    inv_gens = []
    rhos = []
    for i, d in enumerate(s.diag):
        if d.is_zero or d.is_constant():
            rhos.append(None)
            continue
        rho = Polynomial.one(variables)
        for f, _ in irreducible_factors(d):
            if has_real_root(f):
                rho = rho * f
        rhos.append(rho)
        if rho.is_constant():
            # no real zeros: the whole cyclic piece is invisible
            rho = Polynomial.one(variables)
        col = [Polynomial.zero(variables)] * module.free_rank
        col[i] = rho
        lifted = s.Uinv.mul_vector(col + [Polynomial.zero(variables)] * (s.Uinv.cols - len(col)))
        inv_gens.append(tuple(lifted))
    # drop generators that are already relations (zero classes)
    pres_mod = module.column_module()
    kept = []
    for g in inv_gens:
        if not module_member(list(g), pres_mod):
            kept.append(g)
    if kept:
        canon = groebner_basis(ModuleBasis(variables, module.free_rank, [list(g) for g in kept]))
        kept = [tuple(c) for c in canon.columns]
    quot_cols = [list(c) for c in P.columns()] + [list(g) for g in kept]
    if quot_cols:
        canon_q = groebner_basis(ModuleBasis(variables, module.free_rank, quot_cols))
        qp = PolyMatrix.from_columns(variables, [list(c) for c in canon_q.columns], rows=module.free_rank)
    else:
        qp = PolyMatrix(variables, [[] for _ in range(module.free_rank)])
    quotient = FPModule(variables, module.free_rank, qp)
    return FiberDetermination(kept, quotient, list(s.diag), rhos)


def module_to_bundle(module: FPModule) -> SubbundlePresentation:
    """Present coker(P) as a quotient bundle: generators are the reduced
    basis of the column module, so fibers match fp_fiber_dim at every
    rational point."""
    gb = groebner_basis(module.column_module())
    cols = [list(c) for c in gb.columns]
    mat = PolyMatrix.from_columns(module.vars, cols, rows=module.free_rank)
    return SubbundlePresentation(module.vars, module.free_rank, mat)
