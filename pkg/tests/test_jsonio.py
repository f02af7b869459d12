import json
from fractions import Fraction

import pytest

from tepui.bundle import CellwiseBundle, SubbundlePresentation
from tepui.constructions import FlatQuotient
from tepui.errors import DomainError, ParseError
from tepui.fpmodules import FPModule
from tepui.jsonio import (
    algebroid_from_dict,
    algebroid_to_dict,
    bundle_from_dict,
    bundle_to_dict,
    canonical_json,
    fpath_from_dict,
    fpath_to_dict,
    fpmodule_from_dict,
    fpmodule_to_dict,
    jet_factor_from_dict,
    module_basis_from_dict,
    module_basis_to_dict,
    point_from_list,
    polymap_from_dict,
    polymap_to_dict,
)


def cross_payload():
    return {
        "vars": ["x"],
        "ambient_rank": 1,
        "pieces": [{"cell": [], "generators": [["x"]]}],
    }


def halfline_payload():
    return {
        "vars": ["x"],
        "ambient_rank": 1,
        "pieces": [
            {"cell": [["x", ">=", "0"]], "generators": []},
            {"cell": [["x", "<", "0"]], "generators": [["1"]]},
        ],
    }


def test_bundle_round_trip_polynomial():
    b = bundle_from_dict(cross_payload())
    assert isinstance(b, SubbundlePresentation)
    d = bundle_to_dict(b)
    assert d == cross_payload()
    assert bundle_from_dict(d) == b


def test_bundle_round_trip_cellwise():
    b = bundle_from_dict(halfline_payload())
    assert isinstance(b, CellwiseBundle)
    d = bundle_to_dict(b)
    assert bundle_to_dict(bundle_from_dict(d)) == d
    assert d["pieces"][0]["cell"] == [["x", ">=", "0"]]


def test_bundle_domain_round_trip():
    payload = dict(cross_payload(), domain=[["-1", "1/2"]])
    b = bundle_from_dict(payload)
    assert b.domain.bounds == ((Fraction(-1), Fraction(1, 2)),)
    assert bundle_to_dict(b)["domain"] == [["-1", "1/2"]]
    open_payload = dict(cross_payload(), domain=[[None, "2"]])
    b2 = bundle_from_dict(open_payload)
    assert b2.domain.bounds == ((None, Fraction(2)),)
    assert bundle_to_dict(b2)["domain"] == [[None, "2"]]


def test_bundle_parse_errors():
    with pytest.raises(ParseError):
        bundle_from_dict({"vars": ["x"], "ambient_rank": 1})
    with pytest.raises(ParseError):
        bundle_from_dict(dict(cross_payload(), pieces=[]))
    bad_col = dict(cross_payload(), pieces=[{"cell": [], "generators": [["x", "1"]]}])
    with pytest.raises(ParseError):
        bundle_from_dict(bad_col)
    bad_cell = {
        "vars": ["x"],
        "ambient_rank": 1,
        "pieces": [{"cell": [["x", ">="]], "generators": [["x"]]}],
    }
    with pytest.raises(ParseError):
        bundle_from_dict(bad_cell)
    with pytest.raises(ParseError):
        bundle_from_dict(dict(cross_payload(), domain=[["0"]]))
    with pytest.raises(ParseError):
        bundle_from_dict({"vars": ["x", "x"], "ambient_rank": 1, "pieces": []})


def test_bundle_bad_relation_is_rejected():
    bad = {
        "vars": ["x"],
        "ambient_rank": 1,
        "pieces": [{"cell": [["x", "!=", "0"]], "generators": [["x"]]}],
    }
    with pytest.raises(DomainError):
        bundle_from_dict(bad)


def test_fpmodule_round_trip():
    payload = {"vars": ["x"], "free_rank": 1, "presentation": [["x^2"]]}
    m = fpmodule_from_dict(payload)
    assert isinstance(m, FPModule)
    assert fpmodule_to_dict(m) == payload
    free = fpmodule_from_dict({"vars": ["x"], "free_rank": 2, "presentation": [[], []]})
    assert free.presentation.cols == 0
    assert fpmodule_to_dict(free)["presentation"] == [[], []]


def test_fpmodule_parse_errors():
    with pytest.raises(ParseError):
        fpmodule_from_dict({"vars": ["x"], "free_rank": 2, "presentation": [["x"]]})
    with pytest.raises(ParseError):
        fpmodule_from_dict(
            {"vars": ["x"], "free_rank": 2, "presentation": [["x"], ["x", "1"]]}
        )
    with pytest.raises(ParseError):
        fpmodule_from_dict({"vars": ["x"], "free_rank": 1, "presentation": [["x +"]]})


def test_module_basis_round_trip():
    payload = {"vars": ["y"], "ambient": 2, "columns": [["0", "y"]]}
    b = module_basis_from_dict(payload)
    assert module_basis_to_dict(b) == payload
    with pytest.raises(ParseError):
        module_basis_from_dict({"vars": ["y"], "ambient": 2, "columns": [["y"]]})


def test_algebroid_round_trip():
    payload = {
        "vars": ["x"],
        "rank": 2,
        "anchor": [["1", "0"]],
        "c": [[0, 1, 0, "x"], [0, 1, 1, "1"]],
    }
    L = algebroid_from_dict(payload)
    assert algebroid_to_dict(L) == payload
    assert [p.text() for p in L.structure(0, 1)] == ["x", "1"]


def test_algebroid_structure_entries_accumulate():
    payload = {
        "vars": ["x"],
        "rank": 2,
        "anchor": [["1", "0"]],
        "c": [[0, 1, 0, "x"], [0, 1, 0, "1"]],
    }
    L = algebroid_from_dict(payload)
    assert [p.text() for p in L.structure(0, 1)] == ["x + 1", "0"]


def test_algebroid_parse_errors():
    base = {"vars": ["x"], "rank": 2, "anchor": [["1", "0"]]}
    with pytest.raises(ParseError):
        algebroid_from_dict(dict(base, anchor=[["1"]]))
    with pytest.raises(ParseError):
        algebroid_from_dict(dict(base, c=[[1, 0, 0, "1"]]))
    with pytest.raises(ParseError):
        algebroid_from_dict(dict(base, c=[[0, 1, 5, "1"]]))
    with pytest.raises(ParseError):
        algebroid_from_dict(dict(base, c=[[0, 1, 0]]))
    with pytest.raises(ParseError):
        algebroid_from_dict({"vars": ["x"], "rank": 2, "anchor": [["1", "0"], ["0", "1"]]})


def test_polymap_round_trip():
    payload = {"source_vars": ["y"], "target_vars": ["x"], "components": ["y^2"]}
    f = polymap_from_dict(payload)
    assert polymap_to_dict(f) == payload
    with pytest.raises(ParseError):
        polymap_from_dict(
            {"source_vars": ["y"], "target_vars": ["x", "z"], "components": ["y"]}
        )


def test_fpath_round_trip():
    payload = {
        "start": [1.0, 0.0],
        "segments": [{"lambda": ["1/2", "-1"], "t": 2.0}, {"lambda": ["0", "1"], "t": 0.5}],
    }
    p = fpath_from_dict(payload)
    assert p.start == (1.0, 0.0)
    assert p.segments[0][0] == (Fraction(1, 2), Fraction(-1))
    assert fpath_to_dict(p) == payload
    with pytest.raises(ParseError):
        fpath_from_dict({"start": [0.0]})


def test_jet_factor_kinds():
    m = jet_factor_from_dict(
        {"kind": "module", "vars": ["x"], "free_rank": 1, "presentation": [["x^2"]]}
    )
    assert isinstance(m, FPModule)
    f = jet_factor_from_dict({"kind": "flat", "vars": ["x"], "cell": [["x", "<=", "0"]]})
    assert isinstance(f, FlatQuotient)
    with pytest.raises(ParseError):
        jet_factor_from_dict({"kind": "germ", "vars": ["x"]})


def test_point_from_list():
    pt = point_from_list(["1/2", 2])
    assert pt == (Fraction(1, 2), Fraction(2))
    with pytest.raises(ParseError):
        point_from_list("0,0")


def test_canonical_json_is_deterministic():
    a = {"beta": [1, 2], "alpha": {"z": 1.5, "a": None}}
    b = {"alpha": {"a": None, "z": 1.5}, "beta": [1, 2]}
    assert canonical_json(a) == canonical_json(b)
    assert canonical_json(a) == '{"alpha":{"a":null,"z":1.5},"beta":[1,2]}'


def test_canonical_json_scalar_forms():
    assert canonical_json(Fraction(1, 2)) == '"1/2"'
    assert canonical_json(True) == "true"
    assert canonical_json((1, 2)) == "[1,2]"
    out = canonical_json(0.1)
    assert float(json.loads(out)) == 0.1
    assert canonical_json(1e300) == format(1e300, ".17g")


def test_canonical_json_rejects_bad_values():
    with pytest.raises(ParseError):
        canonical_json(float("nan"))
    with pytest.raises(ParseError):
        canonical_json(float("inf"))
    with pytest.raises(ParseError):
        canonical_json(object())


def test_canonical_json_parses_back():
    payload = {"dims": [0, 1], "pass": True, "tol": 1e-9, "point": ["1/2"]}
    text = canonical_json(payload)
    again = json.loads(text)
    assert again["dims"] == [0, 1]
    assert again["pass"] is True
    assert again["point"] == ["1/2"]
