"""Built-in counterexample suite.

Each fixture replays one of the phenomena the toolkit exists to detect:
pinched fibers, non-monoidal tensor sections, invisible module classes,
pullbacks that change the section module, quotient-bracket obstructions,
and holonomy of leafwise transport.  Fixtures go through the same request
handlers the server and command line use, so a passing suite also
exercises the wire formats.

run_fixtures returns (name, ok, detail) rows; any exception inside a
fixture is a failure of that row, never a crash of the suite.
"""

import json
import os
from importlib import resources

from . import schemas
from .errors import FileAccessError, ParseError


class FixtureFailure(AssertionError):
    pass


class _Data:
    """Loads fixture description files, from the packaged data by default
    or from an override directory (used to test corrupted inputs)."""

    def __init__(self, data_dir=None):
        self.data_dir = data_dir

    def load(self, name):
        if self.data_dir is not None:
            path = os.path.join(self.data_dir, name)
            try:
                with open(path, "r", encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise FileAccessError("cannot read %s: %s" % (path, exc))
        else:
            try:
                text = (
                    resources.files("tepui")
                    .joinpath("fixtures_data", name)
                    .read_text(encoding="utf-8")
                )
            except OSError as exc:
                raise FileAccessError("missing packaged fixture %s: %s" % (name, exc))
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError("%s is not valid JSON: %s" % (name, exc))


def _run(name, payload):
    from .service.handlers import HANDLERS

    req = schemas.REQUEST_MODELS[name].model_validate(payload)
    return HANDLERS[name](req)


def _expect(cond, msg):
    if not cond:
        raise FixtureFailure(msg)


def _fiber(bundle, point):
    return _run("fiber", {"bundle": bundle, "point": point}).dim


# ----------------------------------------------------------------- fixtures

def _fx_fiber_pinch_at_origin(data):
    bundle = data.load("cross.json")
    for point, want in ((["0"], 1), (["1/2"], 0), (["-1/3"], 0)):
        got = _fiber(bundle, point)
        _expect(got == want, "fiber at %s: %d, wanted %d" % (point, got, want))


def _fx_fiber_free_rank_two(data):
    bundle = data.load("free2.json")
    got = _fiber(bundle, ["1"])
    _expect(got == 2, "free bundle fiber: %d, wanted 2" % got)


def _fx_rank_grid_semicontinuity(data):
    resp = _run(
        "rankmap",
        {"bundle": data.load("cross.json"), "box": [["-1", "1"]], "step": "1/2"},
    )
    _expect(resp.dims == [0, 0, 1, 0, 0], "grid dims %r" % (resp.dims,))
    _expect(resp.semicontinuity == "pass", "semicontinuity verdict %s" % resp.semicontinuity)


def _fx_tensor_meeting_halflines(data):
    product = _run(
        "tensor",
        {"left": data.load("halfline_right.json"), "right": data.load("halfline_left.json")},
    ).bundle
    resp = _run(
        "rankmap",
        {
            "bundle": product.model_dump(exclude_none=True),
            "box": [["-1", "1"]],
            "step": "1/2",
        },
    )
    _expect(resp.dims == [0, 0, 1, 0, 0], "tensor grid dims %r" % (resp.dims,))
    _expect(resp.semicontinuity == "pass", "semicontinuity verdict %s" % resp.semicontinuity)


def _fx_jet_divergence_of_flat_tensor(data):
    left = {"kind": "flat", "vars": ["x"], "cell": [["x", "<=", "0"]]}
    right = {"kind": "flat", "vars": ["x"], "cell": [["x", ">=", "0"]]}
    module_side = [
        _run(
            "jettensor",
            {"left": left, "right": right, "point": ["0"], "order": k},
        ).dim
        for k in range(4)
    ]
    _expect(module_side == [1, 2, 3, 4], "module-side jet dims %r" % (module_side,))

    from . import jsonio
    from .constructions import section_jet_dim, tensor

    product = tensor(
        jsonio.bundle_from_dict(data.load("halfline_right.json")),
        jsonio.bundle_from_dict(data.load("halfline_left.json")),
    )
    bundle_side = [section_jet_dim(product, ["0"], k) for k in range(4)]
    _expect(bundle_side == [1, 1, 1, 1], "bundle-side jet dims %r" % (bundle_side,))


def _fx_invisible_nilpotent_class(data):
    module = data.load("q_dual_numbers.json")
    resp = _run("invisible", {"module": module, "element": ["x"]})
    _expect(resp.status == "certified_invisible", "status %s for x" % resp.status)
    resp = _run("invisible", {"module": module, "element": ["1"]})
    _expect(resp.status == "certified_visible", "status %s for 1" % resp.status)
    _expect(resp.witness is not None, "missing visibility witness")


def _fx_fiber_split_of_nilpotent(data):
    resp = _run("fibdet", {"module": data.load("q_dual_numbers.json")})
    _expect(resp.smith_diag == ["x^2"], "smith diagonal %r" % (resp.smith_diag,))
    _expect(resp.rho == ["x"], "real-root factors %r" % (resp.rho,))
    _expect(resp.invisible_generators == [["x"]],
            "invisible generators %r" % (resp.invisible_generators,))
    _expect(resp.quotient.presentation == [["x"]],
            "quotient presentation %r" % (resp.quotient.presentation,))


def _fx_pullback_membrane_dims(data):
    f = data.load("y2_map.json")
    pulled = _run(
        "pullback", {"bundle": data.load("open_halfline_right.json"), "map": f}
    ).bundle.model_dump(exclude_none=True)
    for point, want in ((["0"], 0), (["1/2"], 1), (["-1/2"], 1)):
        got = _fiber(pulled, point)
        _expect(got == want, "open-right pullback fiber at %s: %d, wanted %d" % (point, got, want))
    pulled = _run(
        "pullback", {"bundle": data.load("halfline_left.json"), "map": f}
    ).bundle.model_dump(exclude_none=True)
    for point, want in ((["0"], 1), (["1/2"], 0), (["-1/2"], 0)):
        got = _fiber(pulled, point)
        _expect(got == want, "left pullback fiber at %s: %d, wanted %d" % (point, got, want))


def _fx_base_change_jet_comparison(data):
    resp = _run(
        "basechange",
        {
            "v_rank": 1,
            "subbundle": data.load("sub_line_module.json"),
            "map": data.load("y2_map.json"),
            "point": ["0"],
            "order": 1,
        },
    )
    _expect(resp.alpha_D_surjective_at_order_k is False, "comparison map reported surjective")
    _expect(resp.ker_alpha_nontrivial is True, "quotient kernel reported trivial")
    _expect(resp.witness is not None, "missing failing generator")


def _fx_bracket_of_twisted_sections(data):
    payload = data.load("twisted_sections.json")
    resp = _run("check", {"algebroid": payload})
    _expect(resp.leibniz, "Leibniz rule failed")
    _expect(resp.jacobi_zero, "Jacobi defect %r" % (resp.jacobi,))
    _expect(resp.weak_jacobi, "anchored Jacobi failed")

    from . import jsonio
    from .algebroid import SectionExpr, bracket
    from .polyalg import parse_polynomial

    L = jsonio.algebroid_from_dict(payload)
    x = parse_polynomial("x", ("x",))
    br = bracket(L.frame_section(0), L.frame_section(1).scale(x), L)
    _expect(br == L.frame_section(1), "[e1, x e2] gave %s" % br.text())
    _expect(
        bracket(L.frame_section(0), L.frame_section(1), L) == SectionExpr.zero(("x",), 2),
        "[e1, e2] is not zero",
    )


def _fx_quotient_bracket_blocker(data):
    resp = _run(
        "check",
        {
            "algebroid": data.load("quotient_blocker.json"),
            "ideal": data.load("blocker_module.json"),
            "obstruction": True,
        },
    )
    _expect(resp.leibniz and resp.weak_jacobi, "base bracket checks failed")
    _expect(resp.ideal is False, "the blocker module passed as a bracket ideal")
    iw = resp.ideal_witness
    _expect(iw is not None and iw.generator == ["0", "y"] and iw.frame == 0,
            "ideal witness %r" % (iw,))
    _expect(resp.obstruction_checked, "obstruction search did not run")
    w = resp.obstruction_witness
    _expect(w is not None, "no obstruction witness found")
    _expect(w.frame == 0, "witness frame %d" % w.frame)
    _expect(w.section == ["0", "y"], "witness section %r" % (w.section,))
    _expect(w.bracket == ["0", "1"], "witness bracket %r" % (w.bracket,))
    _expect(w.point == ["0"], "witness point %r" % (w.point,))


def _fx_synthesized_scaling_frame(data):
    resp = _run("synthesize", {"vars": ["x"], "anchor": [["1", "x"]]})
    _expect(resp.algebroid.c == [[0, 1, 0, "1"]],
            "structure entries %r" % (resp.algebroid.c,))
    _expect(resp.leibniz and resp.weak_jacobi, "synthesized bracket fails its checks")


def _fx_noninvolutive_anchor_rejected(data):
    from .errors import InvolutivityError

    try:
        _run("synthesize", {"vars": ["x", "y"], "anchor": [["1", "0"], ["0", "x"]]})
    except InvolutivityError:
        return
    raise FixtureFailure("shear frame was accepted as involutive")


def _fx_closure_of_shear_frame(data):
    from .algebroid import AnchoredBracket, foliation_of
    from .polyalg import PolyMatrix, parse_polynomial

    names = ("x", "y")
    anchor = PolyMatrix(
        names,
        [
            [parse_polynomial("1", names), parse_polynomial("0", names)],
            [parse_polynomial("0", names), parse_polynomial("x", names)],
        ],
    )
    L = AnchoredBracket(names, 2, anchor, {})
    result = foliation_of(L)
    _expect(not result.involutive, "shear frame reported involutive")
    _expect(result.closed, "closure did not stabilize")
    cols = {tuple(p.text() for p in col) for col in result.closure}
    _expect(("0", "1") in cols, "closure misses the adjoined field: %r" % (cols,))
    _expect(cols >= {("1", "0"), ("0", "x")}, "closure dropped an original column: %r" % (cols,))


def _fx_transport_rotation_loop(data):
    fields = data.load("rotation_fields.json")
    base = {"vars": fields["vars"], "gens": fields["gens"], "w0": [1.0, 0.0]}
    full = _run("transport", dict(base, path=data.load("rotation_path_full.json")))
    _expect(
        max(abs(a - b) for a, b in zip(full.representative, [1.0, 0.0])) < 1e-5,
        "full loop returned %r" % (full.representative,),
    )
    half = _run("transport", dict(base, path=data.load("rotation_path_half.json")))
    _expect(
        max(abs(a + b) for a, b in zip(half.representative, [1.0, 0.0])) < 1e-5,
        "half loop returned %r" % (half.representative,),
    )


FIXTURES = {
    "fiber_pinch_at_origin": _fx_fiber_pinch_at_origin,
    "fiber_free_rank_two": _fx_fiber_free_rank_two,
    "rank_grid_semicontinuity": _fx_rank_grid_semicontinuity,
    "tensor_meeting_halflines": _fx_tensor_meeting_halflines,
    "jet_divergence_of_flat_tensor": _fx_jet_divergence_of_flat_tensor,
    "invisible_nilpotent_class": _fx_invisible_nilpotent_class,
    "fiber_split_of_nilpotent": _fx_fiber_split_of_nilpotent,
    "pullback_membrane_dims": _fx_pullback_membrane_dims,
    "base_change_jet_comparison": _fx_base_change_jet_comparison,
    "bracket_of_twisted_sections": _fx_bracket_of_twisted_sections,
    "quotient_bracket_blocker": _fx_quotient_bracket_blocker,
    "synthesized_scaling_frame": _fx_synthesized_scaling_frame,
    "noninvolutive_anchor_rejected": _fx_noninvolutive_anchor_rejected,
    "closure_of_shear_frame": _fx_closure_of_shear_frame,
    "transport_rotation_loop": _fx_transport_rotation_loop,
}


def fixture_names():
    return list(FIXTURES)


def run_fixtures(names=None, data_dir=None):
    """Run the suite (or a subset); returns (name, passed, detail) rows."""
    if names:
        unknown = [n for n in names if n not in FIXTURES]
        if unknown:
            raise ParseError("unknown fixtures: %s" % ", ".join(sorted(unknown)))
        selected = [n for n in FIXTURES if n in set(names)]
    else:
        selected = list(FIXTURES)
    data = _Data(data_dir)
    rows = []
    for name in selected:
        try:
            FIXTURES[name](data)
        except Exception as exc:
            detail = "%s: %s" % (type(exc).__name__, exc)
            rows.append((name, False, detail[:200]))
        else:
            rows.append((name, True, ""))
    return rows
