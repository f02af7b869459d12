"""Bridges between wire payloads (plain dicts) and core objects.

Every *_from_dict validates shape and raises ParseError on malformed
input; the *_to_dict functions invert them.  canonical_json prints a
stable representation: sorted keys, compact separators, floats at up to
17 significant digits, exact rationals as "a/b" strings.
"""

import json
from fractions import Fraction

from .algebroid import AnchoredBracket
from .bundle import Box, Cell, CellwiseBundle, SignCondition, SubbundlePresentation
from .constructions import FlatQuotient, PolyMap
from .dynamics import FPath
from .errors import ParseError
from .fpmodules import FPModule
from .grobner import ModuleBasis
from .polyalg import Polynomial, PolyMatrix, parse_coordinate, parse_point, parse_polynomial

__all__ = [
    "canonical_json",
    "bundle_from_dict",
    "bundle_to_dict",
    "fpmodule_from_dict",
    "fpmodule_to_dict",
    "module_basis_from_dict",
    "module_basis_to_dict",
    "algebroid_from_dict",
    "algebroid_to_dict",
    "polymap_from_dict",
    "polymap_to_dict",
    "fpath_from_dict",
    "fpath_to_dict",
    "jet_factor_from_dict",
    "point_from_list",
]


def _fail(msg):
    raise ParseError(msg)


def _get(data, key, kind=None):
    if not isinstance(data, dict) or key not in data:
        _fail("missing field %r" % key)
    v = data[key]
    if kind is not None and not isinstance(v, kind):
        _fail("field %r has the wrong shape" % key)
    return v


def _var_names(data):
    names = _get(data, "vars", list)
    for v in names:
        if not isinstance(v, str) or not v:
            _fail("variable names must be nonempty strings")
    if len(set(names)) != len(names):
        _fail("variable names must be distinct")
    return tuple(names)


def _poly(text, names):
    if isinstance(text, (int, float)):
        text = str(text)
    if not isinstance(text, str):
        _fail("expected a polynomial string, got %r" % (text,))
    return parse_polynomial(text, names)


def point_from_list(values):
    if not isinstance(values, (list, tuple)):
        _fail("a point must be a list of coordinates")
    return parse_point(values)


# ---------------------------------------------------------------- bundles

def _cell_from_list(conds, names):
    if not isinstance(conds, list):
        _fail("a cell must be a list of [lhs, relation, rhs] triples")
    out = []
    for item in conds:
        if not isinstance(item, (list, tuple)) or len(item) != 3:
            _fail("cell conditions are [lhs, relation, rhs] triples")
        lhs, rel, rhs = item
        poly = _poly(lhs, names) - _poly(rhs, names)
        out.append(SignCondition(poly, rel))
    return Cell(out)


def _cell_to_list(cell):
    return [[c.poly.text(), c.relation, "0"] for c in cell.conditions]


def _columns_from_list(cols, names, ambient):
    if not isinstance(cols, list):
        _fail("generators must be a list of columns")
    parsed = []
    for col in cols:
        if not isinstance(col, (list, tuple)) or len(col) != ambient:
            _fail("each generator column needs %d entries" % ambient)
        parsed.append([_poly(t, names) for t in col])
    return PolyMatrix.from_columns(names, parsed, rows=ambient)


def _box_from_list(bounds, n):
    if bounds is None:
        return None
    if not isinstance(bounds, list) or len(bounds) != n:
        _fail("domain must list one [lo, hi] pair per variable")
    out = []
    for pair in bounds:
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            _fail("domain entries are [lo, hi] pairs")
        lo, hi = pair
        out.append(
            (
                None if lo is None else parse_coordinate(lo),
                None if hi is None else parse_coordinate(hi),
            )
        )
    return Box(out)


def _box_to_list(box):
    if box is None or not any(lo is not None or hi is not None for lo, hi in box.bounds):
        return None
    return [[None if b is None else str(b) for b in pair] for pair in box.bounds]


def bundle_from_dict(data):
    """Bundle payload -> SubbundlePresentation or CellwiseBundle."""
    names = _var_names(data)
    ambient = _get(data, "ambient_rank", int)
    pieces = _get(data, "pieces", list)
    if not pieces:
        _fail("a bundle needs at least one piece")
    domain = _box_from_list(data.get("domain"), len(names))
    parsed = []
    for piece in pieces:
        cell = _cell_from_list(_get(piece, "cell"), names)
        mat = _columns_from_list(_get(piece, "generators"), names, ambient)
        parsed.append((cell, mat))
    if len(parsed) == 1 and not parsed[0][0].conditions:
        return SubbundlePresentation(names, ambient, parsed[0][1], domain=domain)
    return CellwiseBundle(names, ambient, parsed, domain=domain)


def bundle_to_dict(bundle):
    out = {
        "vars": list(bundle.vars),
        "ambient_rank": bundle.ambient_rank,
        "pieces": [
            {
                "cell": _cell_to_list(cell),
                "generators": [[p.text() for p in col] for col in mat.columns()],
            }
            for cell, mat in bundle.pieces_view()
        ],
    }
    domain = _box_to_list(bundle.domain)
    if domain is not None:
        out["domain"] = domain
    return out


# ---------------------------------------------------------------- modules

def fpmodule_from_dict(data):
    names = _var_names(data)
    free_rank = _get(data, "free_rank", int)
    rows = _get(data, "presentation", list)
    if len(rows) != free_rank:
        _fail("presentation needs %d rows" % free_rank)
    parsed = []
    for row in rows:
        if not isinstance(row, (list, tuple)):
            _fail("presentation rows must be lists")
        parsed.append([_poly(t, names) for t in row])
    widths = {len(r) for r in parsed}
    if len(widths) > 1:
        _fail("presentation rows must share one length")
    return FPModule(names, free_rank, PolyMatrix(names, parsed))


def fpmodule_to_dict(mod):
    return {
        "vars": list(mod.vars),
        "free_rank": mod.free_rank,
        "presentation": mod.presentation.text_rows(),
    }


def module_basis_from_dict(data):
    names = _var_names(data)
    ambient = _get(data, "ambient", int)
    cols = _get(data, "columns", list)
    parsed = []
    for col in cols:
        if not isinstance(col, (list, tuple)) or len(col) != ambient:
            _fail("each column needs %d entries" % ambient)
        parsed.append(tuple(_poly(t, names) for t in col))
    return ModuleBasis(names, ambient, parsed)


def module_basis_to_dict(basis):
    return {
        "vars": list(basis.vars),
        "ambient": basis.ambient,
        "columns": [[p.text() for p in col] for col in basis.columns],
    }


# -------------------------------------------------------------- algebroids

def algebroid_from_dict(data):
    names = _var_names(data)
    rank = _get(data, "rank", int)
    anchor_rows = _get(data, "anchor", list)
    if len(anchor_rows) != len(names):
        _fail("anchor needs one row per variable")
    parsed_rows = []
    for row in anchor_rows:
        if not isinstance(row, (list, tuple)) or len(row) != rank:
            _fail("anchor rows need %d entries" % rank)
        parsed_rows.append([_poly(t, names) for t in row])
    anchor = PolyMatrix(names, parsed_rows)
    structure = {}
    zero = Polynomial.zero(names)
    for item in data.get("c", []):
        if not isinstance(item, (list, tuple)) or len(item) != 4:
            _fail("structure entries are [i, j, k, poly] quadruples")
        i, j, k, text = item
        if not all(isinstance(v, int) for v in (i, j, k)):
            _fail("structure indices must be integers")
        if not (0 <= i < j < rank and 0 <= k < rank):
            _fail("structure indices out of range (stored pairs need i < j)")
        vec = structure.setdefault((i, j), [zero] * rank)
        vec[k] = vec[k] + _poly(text, names)
    return AnchoredBracket(names, rank, anchor, structure)


def algebroid_to_dict(L):
    sparse = []
    for (i, j), vec in sorted(L.table.items()):
        for k, p in enumerate(vec):
            if not p.is_zero:
                sparse.append([i, j, k, p.text()])
    return {
        "vars": list(L.vars),
        "rank": L.rank,
        "anchor": L.anchor.text_rows(),
        "c": sparse,
    }


# ------------------------------------------------------------- maps, paths

def polymap_from_dict(data):
    source = tuple(v for v in _get(data, "source_vars", list))
    target = tuple(v for v in _get(data, "target_vars", list))
    comps = _get(data, "components", list)
    if len(comps) != len(target):
        _fail("map needs one component per target variable")
    return PolyMap(source, target, [_poly(t, source) for t in comps])


def polymap_to_dict(f):
    return {
        "source_vars": list(f.source_vars),
        "target_vars": list(f.target_vars),
        "components": [p.text() for p in f.components],
    }


def fpath_from_dict(data):
    start = _get(data, "start", list)
    segments = []
    for seg in _get(data, "segments", list):
        lam = _get(seg, "lambda", list)
        t = _get(seg, "t")
        segments.append(([Fraction(str(c)) if isinstance(c, str) else c for c in lam], t))
    return FPath([float(c) for c in start], segments)


def fpath_to_dict(path):
    return {
        "start": list(path.start),
        "segments": [
            {"lambda": [str(c) for c in lam], "t": t} for lam, t in path.segments
        ],
    }


def jet_factor_from_dict(data):
    """Jet tensor factor: kind "module" (presented module) or "flat" (cell germ)."""
    kind = _get(data, "kind", str)
    if kind == "module":
        return fpmodule_from_dict(data)
    if kind == "flat":
        names = _var_names(data)
        return FlatQuotient(names, _cell_from_list(_get(data, "cell"), names))
    _fail("factor kind must be 'module' or 'flat'")


# ----------------------------------------------------------- stable output

def _emit(value):
    if value is None or value is True or value is False:
        return json.dumps(value)
    if isinstance(value, Fraction):
        return json.dumps(str(value))
    if isinstance(value, int):
        return json.dumps(value)
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            _fail("non-finite float in output payload")
        return format(value, ".17g")
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        items = sorted(value.items(), key=lambda kv: str(kv[0]))
        return "{" + ",".join(json.dumps(str(k)) + ":" + _emit(v) for k, v in items) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_emit(v) for v in value) + "]"
    _fail("cannot serialize %r" % (value,))


def canonical_json(payload) -> str:
    """Deterministic JSON text: fixed key order and float formatting."""
    return _emit(payload)
