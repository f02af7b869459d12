"""Numerical flows of polynomial vector fields and Bott-style transport.

Everything here is floating point on purpose: flows compose fixed-step
Runge-Kutta integration, leaves are explored by flowing along signed
generators breadth-first, and transport integrates the linearized flow
alongside the base curve.  Exactness lives in the algebra modules; this
one reports tolerances and residuals instead of certificates.
"""

import math
from fractions import Fraction

from .config import DEFAULTS
from .errors import DomainError, RankDropError
from .polyalg import Polynomial, float_rank

__all__ = [
    "FPath",
    "LeafCloud",
    "TransportResult",
    "flow",
    "leaf_explore",
    "rank_constancy_along",
    "bott_transport",
]


def _check_field(field):
    comps = tuple(field)
    if not comps:
        raise DomainError("a vector field needs at least one component")
    names = comps[0].vars
    for p in comps:
        if not isinstance(p, Polynomial) or p.vars != names:
            raise DomainError("field components must share one variable tuple")
    if len(comps) != len(names):
        raise DomainError(
            "field has %d components for %d variables" % (len(comps), len(names))
        )
    return comps, names


def _eval_field(comps, x):
    return [float(p.evaluate(tuple(x))) for p in comps]


def _guard(x, domain):
    for c in x:
        if not math.isfinite(c):
            raise DomainError("flow produced a non-finite coordinate")
    if domain is not None and not domain.contains(tuple(x)):
        raise DomainError("trajectory left the domain box")


def _rk4_walk(deriv, state, duration, step, guard):
    """Advance state by `duration` (signed); fixed step, last step shortened."""
    remaining = abs(duration)
    direction = 1.0 if duration >= 0 else -1.0

    def d(s):
        # float exponent overflow in a stage evaluation is a blowup, not a crash
        try:
            return deriv(s)
        except OverflowError:
            raise DomainError("flow produced a non-finite coordinate") from None

    while remaining > 1e-15:
        h = direction * min(step, remaining)
        k1 = d(state)
        k2 = d([s + 0.5 * h * k for s, k in zip(state, k1)])
        k3 = d([s + 0.5 * h * k for s, k in zip(state, k2)])
        k4 = d([s + h * k for s, k in zip(state, k3)])
        state = [
            s + h / 6.0 * (a + 2.0 * b + 2.0 * c + d)
            for s, a, b, c, d in zip(state, k1, k2, k3, k4)
        ]
        guard(state)
        remaining -= min(step, remaining)
    return state


def flow(field, start, t, step=None, domain=None):
    """Integrate x' = X(x) for time t (may be negative) from start.

    Classical fourth-order Runge-Kutta with a fixed step; the final
    partial step is shortened to land on t exactly.
    """
    comps, names = _check_field(field)
    step = DEFAULTS.rk4_step if step is None else float(step)
    if step <= 0:
        raise DomainError("step must be positive")
    x = [float(c) for c in start]
    if len(x) != len(names):
        raise DomainError("start point has %d coordinates for %d variables" % (len(x), len(names)))
    _guard(x, domain)
    out = _rk4_walk(
        lambda s: _eval_field(comps, s),
        x,
        float(t),
        step,
        lambda s: _guard(s, domain),
    )
    return tuple(out)


def _check_generators(gens):
    fields = [
        _check_field(g)[0] for g in gens
    ]
    if not fields:
        raise DomainError("need at least one generator")
    names = fields[0][0].vars
    for f in fields:
        if f[0].vars != names:
            raise DomainError("generators must share one variable tuple")
    return fields, names


def _span_rank(fields, x, tol):
    rows = [[float(f[d].evaluate(tuple(x))) for f in fields] for d in range(len(x))]
    return float_rank(rows, tol)


class LeafCloud:
    """Visited points of a breadth-first flow exploration, with fiber ranks."""

    __slots__ = ("points", "ranks", "rank_constant", "depth")

    def __init__(self, points, ranks, rank_constant, depth):
        self.points = points
        self.ranks = ranks
        self.rank_constant = rank_constant
        self.depth = depth

    def rows(self):
        """CSV-ready rows: coordinates then the rank at that point."""
        return [tuple(p) + (r,) for p, r in zip(self.points, self.ranks)]

    def __repr__(self):
        return "LeafCloud(points=%d, rank_constant=%r)" % (len(self.points), self.rank_constant)


def leaf_explore(gens, start, step_time, max_depth, step=None, domain=None, dedup_tol=None):
    """Breadth-first leaf exploration by composing signed generator flows.

    From every frontier point each generator is flowed for +step_time
    and -step_time; new points further than dedup_tol from all visited
    points (max-coordinate distance) join the next frontier.  Traversal
    order is deterministic: frontier order, generator order, then sign.
    """
    fields, names = _check_generators(gens)
    if max_depth < 0:
        raise DomainError("depth must be nonnegative")
    dedup_tol = DEFAULTS.dedup_tol if dedup_tol is None else float(dedup_tol)
    x0 = tuple(float(c) for c in start)
    if len(x0) != len(names):
        raise DomainError("start point does not match the generator variables")

    def near(p, q):
        return max(abs(a - b) for a, b in zip(p, q)) <= dedup_tol

    visited = [x0]
    frontier = [x0]
    depth_reached = 0
    for depth in range(1, max_depth + 1):
        nxt = []
        for p in frontier:
            for f in fields:
                for sign in (1.0, -1.0):
                    q = flow(f, p, sign * step_time, step=step, domain=domain)
                    if any(near(q, v) for v in visited):
                        continue
                    visited.append(q)
                    nxt.append(q)
        if not nxt:
            break
        frontier = nxt
        depth_reached = depth
    ranks = [_span_rank(fields, p, DEFAULTS.float_tol) for p in visited]
    constant = len(set(ranks)) <= 1
    return LeafCloud(visited, ranks, constant, depth_reached)


class FPath:
    """Piecewise path data: a start point and (coefficient vector, duration) segments.

    On each segment the driving field is the fixed combination
    sum(lambda_i * g_i) of the foliation generators supplied to the
    operation that walks the path.
    """

    __slots__ = ("start", "segments")

    def __init__(self, start, segments):
        st = tuple(float(c) for c in start)
        segs = []
        width = None
        for lam, t in segments:
            lam = tuple(Fraction(c) for c in lam)
            t = float(t)
            if t <= 0:
                raise DomainError("segment durations must be positive")
            if width is None:
                width = len(lam)
            elif len(lam) != width:
                raise DomainError("all segments must weight the same generator count")
            segs.append((lam, t))
        object.__setattr__(self, "start", st)
        object.__setattr__(self, "segments", tuple(segs))

    def __setattr__(self, *a):
        raise AttributeError("FPath is immutable")

    @property
    def total_time(self):
        return sum(t for _, t in self.segments)

    def __repr__(self):
        return "FPath(start=%r, segments=%d, time=%g)" % (self.start, len(self.segments), self.total_time)


def _segment_field(fields, lam, names):
    if len(lam) != len(fields):
        raise DomainError("segment weights %d generators, got %d" % (len(lam), len(fields)))
    out = []
    for d in range(len(names)):
        s = Polynomial.zero(names)
        for c, f in zip(lam, fields):
            if c:
                s = s + f[d] * c
        out.append(s)
    return tuple(out)


def _walk_nodes(fields, names, path, nodes, step, domain, visit):
    """Call visit(t, x) on a uniform time grid while integrating the path."""
    total = path.total_time
    if nodes < 2 or total == 0.0:
        times = [0.0]
    else:
        times = [total * i / (nodes - 1) for i in range(nodes)]
    seg_fields = [_segment_field(fields, lam, names) for lam, _ in path.segments]
    bounds = []
    acc = 0.0
    for _, t in path.segments:
        acc += t
        bounds.append(acc)
    x = [float(c) for c in path.start]
    _guard(x, domain)
    cur = 0.0
    seg = 0
    for target in times:
        while target - cur > 1e-13:
            while seg < len(bounds) - 1 and bounds[seg] - cur <= 1e-13:
                seg += 1
            room = bounds[seg] - cur
            d = min(room, target - cur)
            x = list(flow(seg_fields[seg], x, d, step=step, domain=domain))
            cur += d
        visit(cur, tuple(x))
    return tuple(x)


def rank_constancy_along(path, gens, nodes=100, step=None, domain=None, driving=None):
    """Sample the generator-span rank along the path on a uniform grid.

    `driving` optionally names the fields the path coefficients weight;
    by default the path is driven by `gens` themselves.  Returns
    (constant, trace) with trace a list of (time, rank) pairs.
    """
    fields, names = _check_generators(gens)
    drive_fields = fields if driving is None else _check_generators(driving)[0]
    trace = []
    _walk_nodes(
        drive_fields,
        names,
        path,
        nodes,
        step,
        domain,
        lambda t, x: trace.append((t, _span_rank(fields, x, DEFAULTS.float_tol))),
    )
    constant = len({r for _, r in trace}) <= 1
    return constant, trace


def _orthonormal_frame(columns, pivots=None, tol=1e-6):
    """Orthonormal basis of the column span by pivoted Gram-Schmidt.

    A supplied pivot order is reused as long as every reused pivot keeps
    a residual above tol relative to its original norm; otherwise the
    frame falls back to greedy largest-residual pivoting.
    """
    res = [list(map(float, c)) for c in columns]
    norms = [math.sqrt(sum(c * c for c in col)) for col in res]
    scale = max(norms) if norms else 0.0
    if scale == 0.0:
        return [], []

    def build(order, strict):
        basis = []
        used = []
        work = [col[:] for col in res]
        for idx in order:
            col = work[idx]
            for q in basis:
                dot = sum(a * b for a, b in zip(col, q))
                col = [a - dot * b for a, b in zip(col, q)]
            nrm = math.sqrt(sum(c * c for c in col))
            if nrm <= tol * max(norms[idx], scale * tol, 1e-300):
                if strict:
                    return None, None
                continue
            basis.append([c / nrm for c in col])
            used.append(idx)
        return basis, used

    if pivots is not None:
        order = [i for i in pivots if 0 <= i < len(res)]
        basis, used = build(order, strict=True)
        if basis is not None:
            # confirm the reused pivots still exhaust the span
            rest, _ = build(used + [i for i in range(len(res)) if i not in used], strict=False)
            if len(rest) == len(basis):
                return basis, used
    # greedy: repeatedly take the column with the largest residual
    remaining = list(range(len(res)))
    order = []
    work = [col[:] for col in res]
    basis = []
    while remaining:
        best = None
        best_nrm = -1.0
        for idx in remaining:
            nrm = math.sqrt(sum(c * c for c in work[idx]))
            if nrm > best_nrm:
                best, best_nrm = idx, nrm
        if best_nrm <= tol * scale:
            break
        col = work[best]
        q = [c / best_nrm for c in col]
        basis.append(q)
        order.append(best)
        remaining.remove(best)
        for idx in remaining:
            dot = sum(a * b for a, b in zip(work[idx], q))
            work[idx] = [a - dot * b for a, b in zip(work[idx], q)]
    return basis, order


def _project_out(frame, w):
    out = list(map(float, w))
    for q in frame:
        dot = sum(a * b for a, b in zip(out, q))
        out = [a - dot * b for a, b in zip(out, q)]
    return out


class TransportResult:
    """Endpoint, complement representative of the transported vector, residual."""

    __slots__ = ("point", "representative", "raw", "residual", "rank")

    def __init__(self, point, representative, raw, residual, rank):
        self.point = point
        self.representative = representative
        self.raw = raw
        self.residual = residual
        self.rank = rank

    def __repr__(self):
        return "TransportResult(point=%r, representative=%r, residual=%.3g)" % (
            self.point,
            self.representative,
            self.residual,
        )


def bott_transport(gens, path, w0, step=None, nodes=100, domain=None):
    """Transport a normal-class representative along a constant-rank path.

    The path must keep the generator-span rank constant (checked on the
    node grid; RankDropError otherwise).  The vector w and a control
    vector taken from the fiber span at the start are both integrated
    through w' = J_X(x) w, where J_X is the Jacobian of the driving
    field.  The returned representative is w(1) projected onto the
    orthogonal complement of the final fiber span; the residual is the
    part of the transported control vector that escaped the span, a
    direct accuracy check on the class.
    """
    fields, names = _check_generators(gens)
    n = len(names)
    w0 = [float(c) for c in w0]
    if len(w0) != n:
        raise DomainError("transported vector has %d coordinates for %d variables" % (len(w0), n))

    # precheck the rank along the grid, reusing frame pivots between nodes
    state = {"pivots": None, "frame": None, "ranks": set(), "trace": []}

    def inspect(t, x):
        cols = [[float(f[d].evaluate(x)) for d in range(n)] for f in fields]
        state["ranks"].add(_span_rank(fields, x, DEFAULTS.float_tol))
        frame, pivots = _orthonormal_frame(cols, state["pivots"])
        state["pivots"] = pivots if pivots else state["pivots"]
        state["frame"] = frame
        state["trace"].append((t, len(frame)))

    _walk_nodes(fields, names, path, nodes, step, domain, inspect)
    if len(state["ranks"]) > 1:
        raise RankDropError(
            "fiber rank is not constant along the path: observed %s"
            % sorted(state["ranks"])
        )
    rank = state["ranks"].pop() if state["ranks"] else 0

    # control vector from the start fiber, used only for the residual
    x0 = [float(c) for c in path.start]
    cols0 = [[float(f[d].evaluate(tuple(x0))) for d in range(n)] for f in fields]
    frame0, _ = _orthonormal_frame(cols0)
    u0 = list(frame0[0]) if frame0 else [0.0] * n

    x = x0[:]
    w = list(w0)
    u = u0[:]
    step_val = DEFAULTS.rk4_step if step is None else float(step)
    if step_val <= 0:
        raise DomainError("step must be positive")
    for lam, t in path.segments:
        comps = _segment_field(fields, lam, names)
        jac = [[comps[d].differentiate(nm) for nm in names] for d in range(n)]

        def deriv(s):
            pt = tuple(s[:n])
            dx = [float(p.evaluate(pt)) for p in comps]
            jv = [[float(jac[d][e].evaluate(pt)) for e in range(n)] for d in range(n)]
            dw = [sum(jv[d][e] * s[n + e] for e in range(n)) for d in range(n)]
            du = [sum(jv[d][e] * s[2 * n + e] for e in range(n)) for d in range(n)]
            return dx + dw + du

        joint = _rk4_walk(
            deriv,
            x + w + u,
            t,
            step_val,
            lambda s: _guard(s[:n], domain),
        )
        x, w, u = joint[:n], joint[n : 2 * n], joint[2 * n :]

    cols_end = [[float(f[d].evaluate(tuple(x))) for d in range(n)] for f in fields]
    frame_end, _ = _orthonormal_frame(cols_end, state["pivots"])
    representative = _project_out(frame_end, w)
    residual = math.sqrt(sum(c * c for c in _project_out(frame_end, u))) if frame0 else 0.0
    return TransportResult(tuple(x), tuple(representative), tuple(w), residual, rank)
