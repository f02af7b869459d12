"""Singular quotient-bundle presentations over polynomial and
semialgebraic-cellwise data.

A presentation gives, at each base point m, the fiber R^N / col-span G(m);
fiber_dim is N - rank G(m).  Cellwise bundles carry one generator matrix per
sign-condition cell; the cells must partition the domain, which is enforced
on a seeded sample at construction time.
"""

from __future__ import annotations

import itertools
import random
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from .config import DEFAULTS
from .errors import DomainError, PartitionError
from .polyalg import (
    Polynomial,
    PolyMatrix,
    generic_rank_matrix,
    is_exact_point,
    minors,
)

RELATIONS = (">", ">=", "==", "<=", "<")

_SAMPLE_CLIP = Fraction(10)


class Box:
    """Axis-aligned domain box; None bounds mean unbounded."""

    __slots__ = ("bounds",)

    def __init__(self, bounds):
        bs = []
        for lo, hi in bounds:
            if lo is not None and hi is not None and lo > hi:
                raise DomainError("empty box interval [%s, %s]" % (lo, hi))
            bs.append((lo, hi))
        object.__setattr__(self, "bounds", tuple(bs))

    def __setattr__(self, *a):
        raise AttributeError("Box is immutable")

    @classmethod
    def unbounded(cls, n):
        return cls([(None, None)] * n)

    @property
    def dim(self):
        return len(self.bounds)

    def is_finite(self):
        return all(lo is not None and hi is not None for lo, hi in self.bounds)

    def contains(self, point):
        if len(point) != self.dim:
            raise DomainError("point dimension %d vs box dimension %d" % (len(point), self.dim))
        for c, (lo, hi) in zip(point, self.bounds):
            if lo is not None and c < lo:
                return False
            if hi is not None and c > hi:
                return False
        return True

    def sample(self, rng: random.Random):
        """A random rational point; unbounded sides are clipped to +-10.
        Denominators are bounded so cell membership stays exact."""
        pt = []
        for lo, hi in self.bounds:
            lo = -_SAMPLE_CLIP if lo is None else Fraction(lo)
            hi = _SAMPLE_CLIP if hi is None else Fraction(hi)
            den = rng.randint(1, 64)
            num = rng.randint(0, 64 * den)
            pt.append(lo + (hi - lo) * Fraction(num, 64 * den))
        return tuple(pt)

    def __eq__(self, other):
        return isinstance(other, Box) and self.bounds == other.bounds

    def __repr__(self):
        return "Box(%r)" % (list(self.bounds),)


class SignCondition:
    __slots__ = ("poly", "relation")

    def __init__(self, poly: Polynomial, relation: str):
        if relation not in RELATIONS:
            raise DomainError("unknown relation %r" % relation)
        object.__setattr__(self, "poly", poly)
        object.__setattr__(self, "relation", relation)

    def __setattr__(self, *a):
        raise AttributeError("SignCondition is immutable")

    def holds(self, point) -> bool:
        v = self.poly.evaluate(point)
        r = self.relation
        if r == ">":
            return v > 0
        if r == ">=":
            return v >= 0
        if r == "==":
            return v == 0
        if r == "<=":
            return v <= 0
        return v < 0

    def closure_holds(self, point) -> bool:
        v = self.poly.evaluate(point)
        r = self.relation
        if r in (">", ">="):
            return v >= 0
        if r in ("<", "<="):
            return v <= 0
        return v == 0

    def __eq__(self, other):
        return (
            isinstance(other, SignCondition)
            and self.poly == other.poly
            and self.relation == other.relation
        )

    def __repr__(self):
        return "SignCondition(%s %s 0)" % (self.poly.text(), self.relation)


class Cell:
    """Conjunction of polynomial sign conditions; empty list means the whole
    domain."""

    __slots__ = ("conditions",)

    def __init__(self, conditions):
        object.__setattr__(self, "conditions", tuple(conditions))

    def __setattr__(self, *a):
        raise AttributeError("Cell is immutable")

    def contains(self, point):
        return all(c.holds(point) for c in self.conditions)

    def closure_contains(self, point):
        return all(c.closure_holds(point) for c in self.conditions)

    def conjoin(self, other: "Cell"):
        return Cell(self.conditions + other.conditions)

    def __eq__(self, other):
        return isinstance(other, Cell) and self.conditions == other.conditions

    def __repr__(self):
        return "Cell(%r)" % (list(self.conditions),)


class SubbundlePresentation:
    """Global polynomial presentation: ambient rank N, generator matrix G
    (N rows, one column per generator)."""

    __slots__ = ("vars", "ambient_rank", "generators", "domain")

    def __init__(self, variables, ambient_rank, generators: PolyMatrix, domain: Box | None = None):
        variables = tuple(variables)
        if generators.vars != variables:
            raise DomainError("generator matrix variables do not match")
        if generators.rows != ambient_rank:
            raise DomainError(
                "generator matrix has %d rows, ambient rank is %d" % (generators.rows, ambient_rank)
            )
        object.__setattr__(self, "vars", variables)
        object.__setattr__(self, "ambient_rank", int(ambient_rank))
        object.__setattr__(self, "generators", generators)
        object.__setattr__(self, "domain", domain or Box.unbounded(len(variables)))
        if self.domain.dim != len(variables):
            raise DomainError("domain dimension does not match variables")

    def __setattr__(self, *a):
        raise AttributeError("SubbundlePresentation is immutable")

    def matrix_at(self, point) -> PolyMatrix:
        return self.generators

    def pieces_view(self):
        return [(Cell([]), self.generators)]

    def __eq__(self, other):
        return (
            isinstance(other, SubbundlePresentation)
            and self.vars == other.vars
            and self.ambient_rank == other.ambient_rank
            and self.generators == other.generators
            and self.domain == other.domain
        )


class CellwiseBundle:
    """Semialgebraic-cellwise presentation: one generator matrix per cell.
    Construction samples the domain and insists every sampled point lies in
    exactly one cell."""

    __slots__ = ("vars", "ambient_rank", "pieces", "domain")

    def __init__(self, variables, ambient_rank, pieces, domain: Box | None = None,
                 validate=True, samples=None, seed=None):
        variables = tuple(variables)
        object.__setattr__(self, "vars", variables)
        object.__setattr__(self, "ambient_rank", int(ambient_rank))
        ps = []
        for cell, mat in pieces:
            if not isinstance(cell, Cell):
                raise DomainError("piece cell must be a Cell")
            if mat.vars != variables or mat.rows != ambient_rank:
                raise DomainError("piece matrix shape/variables do not match the bundle")
            ps.append((cell, mat))
        if not ps:
            raise DomainError("cellwise bundle needs at least one piece")
        object.__setattr__(self, "pieces", tuple(ps))
        object.__setattr__(self, "domain", domain or Box.unbounded(len(variables)))
        if self.domain.dim != len(variables):
            raise DomainError("domain dimension does not match variables")
        if validate:
            self.validate_partition(samples=samples, seed=seed)

    def __setattr__(self, *a):
        raise AttributeError("CellwiseBundle is immutable")

    def validate_partition(self, samples=None, seed=None):
        samples = DEFAULTS.partition_samples if samples is None else samples
        seed = DEFAULTS.seed if seed is None else seed
        rng = random.Random(seed)
        for _ in range(samples):
            pt = self.domain.sample(rng)
            hits = sum(1 for cell, _ in self.pieces if cell.contains(pt))
            if hits != 1:
                raise PartitionError(
                    "sampled point %s lies in %d cells (want exactly 1)"
                    % (tuple(str(c) for c in pt), hits)
                )

    def piece_at(self, point):
        hits = [(cell, mat) for cell, mat in self.pieces if cell.contains(point)]
        if not hits:
            raise DomainError("point lies in no cell")
        if len(hits) > 1:
            raise PartitionError("point lies in %d cells; boundary assignment is ambiguous" % len(hits))
        return hits[0]

    def matrix_at(self, point) -> PolyMatrix:
        return self.piece_at(point)[1]

    def pieces_view(self):
        return [(cell, mat) for cell, mat in self.pieces]


def fiber_dim(bundle, point, tol=None) -> int:
    """dim of the fiber R^N / col-span G(m).  Exact at rational points."""
    if len(point) != len(bundle.vars):
        raise DomainError("point dimension does not match bundle base")
    if not bundle.domain.contains(point):
        raise DomainError("point outside the bundle domain")
    mat = bundle.matrix_at(point)
    return bundle.ambient_rank - mat.rank_at(point, DEFAULTS.float_tol if tol is None else tol)


def generic_rank(bundle) -> int:
    """Max k with a nonzero k x k minor of the generator matrix (rank over
    the rational function field).  Polynomial presentations only."""
    if isinstance(bundle, CellwiseBundle):
        raise DomainError("generic_rank applies to global polynomial presentations")
    return generic_rank_matrix(bundle.generators)


def generic_fiber_dim(bundle) -> int:
    return bundle.ambient_rank - generic_rank(bundle)


def rank_strata(bundle):
    """[(k, generators of the k-minor ideal I_k)] for k = 1..min dims.
    rank G(m) < k exactly on the common zeros of I_k."""
    if isinstance(bundle, CellwiseBundle):
        raise DomainError("rank_strata applies to global polynomial presentations")
    G = bundle.generators
    out = []
    for k in range(1, min(G.rows, G.cols) + 1):
        gens = [m for m in minors(G, k) if not m.is_zero]
        out.append((k, gens))
    return out


def _grid_axis(lo, hi, step):
    vals = []
    v = Fraction(lo)
    hi = Fraction(hi)
    step = Fraction(step)
    if step <= 0:
        raise DomainError("grid step must be positive")
    while v <= hi:
        vals.append(v)
        v = v + step
    return vals


class GridReport:
    __slots__ = ("vars", "nodes", "dims", "semicontinuity_pass", "checked_pairs")

    def __init__(self, variables, nodes, dims, ok, checked_pairs):
        self.vars = tuple(variables)
        self.nodes = nodes
        self.dims = dims
        self.semicontinuity_pass = ok
        self.checked_pairs = checked_pairs

    def csv(self) -> str:
        lines = [",".join(list(self.vars) + ["fiber_dim"])]
        for node, d in zip(self.nodes, self.dims):
            lines.append(",".join([str(c) for c in node] + [str(d)]))
        return "\n".join(lines) + "\n"


def mrank_grid(bundle, box: Box, step, threads=None) -> GridReport:
    """Fiber dims on a rational grid, plus the exact semicontinuity
    certificate check: at every node the rank from elimination must agree
    with the largest k whose minor ideal has a nonvanishing generator there,
    and any neighbor holding a nonvanishing k-minor must carry rank >= k."""
    if not box.is_finite():
        raise DomainError("grid box must be finite")
    if box.dim != len(bundle.vars):
        raise DomainError("grid box dimension does not match the bundle")
    axes = [_grid_axis(lo, hi, step) for lo, hi in box.bounds]
    shape = [len(a) for a in axes]
    index_nodes = list(itertools.product(*[range(s) for s in shape]))
    nodes = [tuple(axes[d][i] for d, i in enumerate(idx)) for idx in index_nodes]

    minor_cache: dict[int, dict[int, list[Polynomial]]] = {}

    def matrix_minors(mat: PolyMatrix):
        key = id(mat)
        if key not in minor_cache:
            table = {}
            for k in range(1, min(mat.rows, mat.cols) + 1):
                table[k] = [m for m in minors(mat, k) if not m.is_zero]
            minor_cache[key] = table
        return minor_cache[key]

    def node_info(pt):
        if not bundle.domain.contains(pt):
            raise DomainError("grid node outside the bundle domain")
        mat = bundle.matrix_at(pt)
        rank = mat.rank_at(pt)
        return mat, rank

    threads = DEFAULTS.threads if threads is None else max(1, threads)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            infos = list(pool.map(node_info, nodes))
    else:
        infos = [node_info(pt) for pt in nodes]

    dims = [bundle.ambient_rank - rank for _, rank in infos]

    ok = True
    # certificate consistency at each node
    cert_rank = {}
    for pt, (mat, rank) in zip(nodes, infos):
        best = 0
        for k, gens in matrix_minors(mat).items():
            if any(g.evaluate(pt) != 0 for g in gens):
                best = max(best, k)
        cert_rank[pt] = best
        if best != rank:
            ok = False
    # neighborhood claims: a nonvanishing k-minor at the neighbor forces
    # rank >= k there
    pos = {idx: i for i, idx in enumerate(index_nodes)}
    offsets = [o for o in itertools.product((-1, 0, 1), repeat=len(shape)) if any(o)]
    checked = 0
    for idx in index_nodes:
        i = pos[idx]
        mat_i, rank_i = infos[i]
        for off in offsets:
            nidx = tuple(a + b for a, b in zip(idx, off))
            if nidx not in pos:
                continue
            j = pos[nidx]
            mat_j, rank_j = infos[j]
            if mat_j is not mat_i:
                continue
            checked += 1
            for k, gens in matrix_minors(mat_j).items():
                if rank_j >= k:
                    continue
                if any(g.evaluate(nodes[j]) != 0 for g in gens):
                    ok = False
    return GridReport(bundle.vars, nodes, dims, ok, checked)
