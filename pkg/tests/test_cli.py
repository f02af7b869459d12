import json
import math

import pytest

from tepui.cli import main


@pytest.fixture()
def files(tmp_path):
    def write(name, payload):
        p = tmp_path / name
        p.write_text(json.dumps(payload))
        return str(p)

    return write


def cross_payload():
    return {
        "vars": ["x"],
        "ambient_rank": 1,
        "pieces": [{"cell": [], "generators": [["x"]]}],
    }


def test_fiber_prints_dimension(files, capsys):
    f = files("cross.json", cross_payload())
    assert main(["fiber", f, "--point", "0"]) == 0
    assert capsys.readouterr().out.strip() == "1"
    assert main(["fiber", f, "--point", "1/2"]) == 0
    assert capsys.readouterr().out.strip() == "0"


def test_fiber_json_flag_is_canonical(files, capsys):
    f = files("cross.json", cross_payload())
    assert main(["fiber", f, "--point", "0", "--json"]) == 0
    first = capsys.readouterr().out
    assert first == '{"dim":1}\n'
    assert main(["fiber", f, "--point", "0", "--json"]) == 0
    assert capsys.readouterr().out == first


def test_fiber_validate_only(files, capsys):
    f = files("cross.json", cross_payload())
    assert main(["fiber", f, "--point", "0", "--validate"]) == 0
    assert capsys.readouterr().out.strip() == "valid"


def test_rankmap_csv_and_verdict(files, capsys):
    f = files("cross.json", cross_payload())
    assert main(["rankmap", f, "--box=-1:1", "--step", "1/2"]) == 0
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert lines[0] == "x,fiber_dim"
    assert lines[3] == "0,1"
    assert lines[-1] == "semicontinuity: pass"


def test_rankmap_out_file(files, capsys, tmp_path):
    f = files("cross.json", cross_payload())
    target = tmp_path / "grid.csv"
    assert main(["rankmap", f, "--box=-1:1", "--step", "1/2", "--out", str(target)]) == 0
    assert target.read_text().splitlines()[0] == "x,fiber_dim"
    assert "semicontinuity: pass" in capsys.readouterr().out


def test_tensor_prints_bundle_json(files, capsys):
    f = files("cross.json", cross_payload())
    assert main(["tensor", f, f]) == 0
    bundle = json.loads(capsys.readouterr().out)
    assert bundle["ambient_rank"] == 1
    assert bundle["pieces"][0]["generators"] == [["x"], ["x"]]


def test_pullback_command(files, capsys):
    f = files("cross.json", cross_payload())
    m = files(
        "square.json",
        {"source_vars": ["y"], "target_vars": ["x"], "components": ["y^2"]},
    )
    assert main(["pullback", f, m]) == 0
    bundle = json.loads(capsys.readouterr().out)
    assert bundle["vars"] == ["y"]
    assert bundle["pieces"][0]["generators"] == [["y^2"]]


def test_invisible_command(files, capsys):
    mod = files(
        "dual.json", {"vars": ["x"], "free_rank": 1, "presentation": [["x^2"]]}
    )
    assert main(["invisible", mod, "--element", "x"]) == 0
    out = capsys.readouterr().out
    assert "status: certified_invisible" in out
    assert main(["invisible", mod, "--element", "1"]) == 0
    out = capsys.readouterr().out
    assert "status: certified_visible" in out
    assert "witness: 0" in out


def test_fibdet_emits_json(files, capsys):
    mod = files(
        "dual.json", {"vars": ["x"], "free_rank": 1, "presentation": [["x^2"]]}
    )
    assert main(["fibdet", mod]) == 0
    body = json.loads(capsys.readouterr().out)
    assert body["invisible_generators"] == [["x"]]
    assert body["smith_diag"] == ["x^2"]


def test_check_exit_flips_on_failed_ideal(files, capsys):
    alg = files(
        "twisted.json", {"vars": ["y"], "rank": 2, "anchor": [["1", "0"]], "c": []}
    )
    ideal = files(
        "blocker.json", {"vars": ["y"], "ambient": 2, "columns": [["0", "y"]]}
    )
    assert main(["check", alg]) == 0
    capsys.readouterr()
    assert main(["check", alg, "--ideal", ideal]) == 1
    body = json.loads(capsys.readouterr().out)
    assert body["leibniz"] is True
    assert body["ideal"] is False
    assert main(["check", alg, "--ideal", ideal, "--obstruction"]) == 1
    body = json.loads(capsys.readouterr().out)
    assert body["obstruction_witness"]["section"] == ["0", "y"]


def test_check_obstruction_without_ideal_is_parse_error(files, capsys):
    alg = files(
        "twisted.json", {"vars": ["y"], "rank": 2, "anchor": [["1", "0"]], "c": []}
    )
    assert main(["check", alg, "--obstruction"]) == 2
    assert "error:" in capsys.readouterr().err


def test_synthesize_command(files, capsys):
    anchor = files("scaling.json", {"vars": ["x"], "anchor": [["1", "x"]]})
    assert main(["synthesize", anchor]) == 0
    body = json.loads(capsys.readouterr().out)
    assert body["algebroid"]["c"] == [[0, 1, 0, "1"]]
    assert body["leibniz"] is True


def test_synthesize_shear_exits_one(files, capsys):
    anchor = files("shear.json", {"vars": ["x", "y"], "anchor": [["1", "0"], ["0", "x"]]})
    assert main(["synthesize", anchor]) == 1
    assert "error:" in capsys.readouterr().err


def test_basechange_command(files, capsys):
    sub = files("line.json", {"vars": ["x"], "ambient": 1, "columns": [["x"]]})
    m = files(
        "square.json",
        {"source_vars": ["y"], "target_vars": ["x"], "components": ["y^2"]},
    )
    code = main(
        ["basechange", sub, m, "--rank", "1", "--point", "0", "--order", "1"]
    )
    assert code == 0
    body = json.loads(capsys.readouterr().out)
    assert body["alpha_D_surjective_at_order_k"] is False
    assert body["ker_alpha_nontrivial"] is True


def test_jettensor_command(files, capsys):
    left = files("flat_left.json", {"kind": "flat", "vars": ["x"], "cell": [["x", "<=", "0"]]})
    right = files("flat_right.json", {"kind": "flat", "vars": ["x"], "cell": [["x", ">=", "0"]]})
    assert main(["jettensor", left, right, "--point", "0", "--order", "3"]) == 0
    assert capsys.readouterr().out.strip() == "4"


def test_leaf_command(files, capsys):
    gens = files("rotation.json", {"vars": ["x", "y"], "gens": [["-y", "x"]]})
    code = main(["leaf", gens, "--start", "1,0", "--time", "0.5", "--depth", "4"])
    assert code == 0
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert lines[0] == "x,y,rank"
    assert lines[-1] == "rank constant: yes"


def test_transport_command(files, capsys):
    gens = files("rotation.json", {"vars": ["x", "y"], "gens": [["-y", "x"]]})
    path = files(
        "loop.json",
        {"start": [1.0, 0.0], "segments": [{"lambda": ["1"], "t": 2 * math.pi}]},
    )
    assert main(["transport", gens, "--path", path, "--w0", "1,0"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0].startswith("point: ")
    assert "rank: 1" in out


def test_transport_rank_drop_exits_one(files, capsys):
    gens = files("shear.json", {"vars": ["x", "y"], "gens": [["1", "0"], ["0", "x"]]})
    path = files(
        "crossing.json",
        {"start": [-1.0, 0.0], "segments": [{"lambda": ["1", "0"], "t": 2.0}]},
    )
    code = main(
        ["transport", gens, "--path", path, "--w0", "0,1", "--nodes", "101"]
    )
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_fixtures_list_and_subset(capsys):
    assert main(["fixtures", "--list"]) == 0
    names = capsys.readouterr().out.split()
    assert "fiber_pinch_at_origin" in names
    assert len(names) == 15
    assert main(["fixtures", "fiber_pinch_at_origin"]) == 0
    out = capsys.readouterr().out
    assert "ok   fiber_pinch_at_origin" in out
    assert "passed 1/1" in out


def test_fixtures_unknown_name_is_parse_error(capsys):
    assert main(["fixtures", "nope"]) == 2
    assert "error:" in capsys.readouterr().err


def test_missing_file_exits_four(capsys):
    assert main(["fiber", "/nonexistent/bundle.json", "--point", "0"]) == 4
    assert "error:" in capsys.readouterr().err


def test_invalid_json_exits_two(tmp_path, capsys):
    bad = tmp_path / "broken.json"
    bad.write_text("nope")
    assert main(["fiber", str(bad), "--point", "0"]) == 2
    assert "error:" in capsys.readouterr().err


def test_domain_error_exits_three(files, capsys):
    f = files("cross.json", cross_payload())
    assert main(["fiber", f, "--point", "0,0"]) == 3
    assert "error:" in capsys.readouterr().err


def test_schema_violation_exits_two(files, capsys):
    notabundle = files("odd.json", {"vars": ["x"]})
    assert main(["fiber", notabundle, "--point", "0"]) == 2
    assert "error:" in capsys.readouterr().err


def test_out_flag_writes_json(files, tmp_path, capsys):
    mod = files(
        "dual.json", {"vars": ["x"], "free_rank": 1, "presentation": [["x^2"]]}
    )
    target = tmp_path / "report.json"
    assert main(["fibdet", mod, "--out", str(target)]) == 0
    assert capsys.readouterr().out == ""
    body = json.loads(target.read_text())
    assert body["smith_diag"] == ["x^2"]


def test_dead_server_exits_four(files, capsys):
    f = files("cross.json", cross_payload())
    code = main(
        ["fiber", f, "--point", "0", "--server", "http://127.0.0.1:59999"]
    )
    assert code == 4
    assert "error:" in capsys.readouterr().err
