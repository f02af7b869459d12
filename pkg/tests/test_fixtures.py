import json
import shutil
from importlib import resources

import pytest

from tepui.errors import FileAccessError, ParseError
from tepui.fixtures import fixture_names, run_fixtures


def test_suite_is_green():
    rows = run_fixtures()
    assert len(rows) == 15
    for name, ok, detail in rows:
        assert ok, "%s: %s" % (name, detail)


def test_names_match_registry_order():
    names = fixture_names()
    assert names[0] == "fiber_pinch_at_origin"
    assert [r[0] for r in run_fixtures()] == names


def test_subset_selection():
    rows = run_fixtures(["transport_rotation_loop", "fiber_pinch_at_origin"])
    # registry order wins over request order
    assert [r[0] for r in rows] == [
        "fiber_pinch_at_origin",
        "transport_rotation_loop",
    ]


def test_unknown_name_raises():
    with pytest.raises(ParseError):
        run_fixtures(["fiber_pinch_at_origin", "nope"])


def _copy_data(tmp_path):
    src = resources.files("tepui").joinpath("fixtures_data")
    for entry in src.iterdir():
        shutil.copyfile(str(entry), str(tmp_path / entry.name))
    return str(tmp_path)


def test_corrupted_data_fails_row_not_suite(tmp_path):
    d = _copy_data(tmp_path)
    path = tmp_path / "cross.json"
    doc = json.loads(path.read_text())
    doc["pieces"][0]["generators"] = [["0"]]
    path.write_text(json.dumps(doc))
    rows = {name: (ok, detail) for name, ok, detail in run_fixtures(data_dir=d)}
    ok, detail = rows["fiber_pinch_at_origin"]
    assert not ok
    assert "FixtureFailure" in detail
    assert rows["transport_rotation_loop"][0]


def test_unreadable_data_fails_row(tmp_path):
    d = _copy_data(tmp_path)
    (tmp_path / "q_dual_numbers.json").unlink()
    rows = {name: (ok, detail) for name, ok, detail in run_fixtures(data_dir=d)}
    ok, detail = rows["invisible_nilpotent_class"]
    assert not ok
    assert "FileAccessError" in detail


def test_invalid_json_fails_row(tmp_path):
    d = _copy_data(tmp_path)
    (tmp_path / "rotation_fields.json").write_text("nope")
    rows = {name: (ok, detail) for name, ok, detail in run_fixtures(data_dir=d)}
    assert rows["transport_rotation_loop"] == rows["transport_rotation_loop"]
    ok, detail = rows["transport_rotation_loop"]
    assert not ok
    assert "ParseError" in detail
