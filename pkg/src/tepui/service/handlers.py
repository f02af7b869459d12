"""One handler per operation, shared by the HTTP app and the CLI.

Each handler takes its request model and returns its response model;
anything invalid raises a TepuiError subclass.  The CLI calls these
directly when no server is configured, so the two front ends cannot
drift apart.
"""

from fractions import Fraction

from .. import jsonio
from ..algebroid import (
    check_ideal,
    check_jacobi,
    check_leibniz,
    check_weak_jacobi,
    quotient_obstruction,
    synthesize_bracket,
)
from ..bundle import Box, fiber_dim, mrank_grid
from ..config import DEFAULTS
from ..constructions import base_change_comparison, jet_module_tensor, pullback, tensor
from ..dynamics import bott_transport, leaf_explore
from ..errors import ParseError
from ..fpmodules import fiber_determination_univariate, invisible_test
from ..polyalg import PolyMatrix, parse_coordinate, parse_polynomial
from .. import schemas


def _bundle(payload):
    return jsonio.bundle_from_dict(payload.model_dump(exclude_none=True))


def _coord(value):
    return parse_coordinate(value)


def handle_fiber(req: schemas.FiberRequest) -> schemas.FiberResponse:
    bundle = _bundle(req.bundle)
    point = jsonio.point_from_list(req.point)
    return schemas.FiberResponse(dim=fiber_dim(bundle, point))


def handle_rankmap(req: schemas.RankMapRequest) -> schemas.RankMapResponse:
    bundle = _bundle(req.bundle)
    box = Box([(_coord(lo), _coord(hi)) for lo, hi in req.box])
    report = mrank_grid(bundle, box, _coord(req.step), threads=DEFAULTS.threads)
    return schemas.RankMapResponse(
        nodes=[[str(c) for c in node] for node in report.nodes],
        dims=report.dims,
        semicontinuity="pass" if report.semicontinuity_pass else "fail",
        csv=report.csv(),
    )


def handle_tensor(req: schemas.TensorRequest) -> schemas.BundleResponse:
    out = tensor(_bundle(req.left), _bundle(req.right))
    return schemas.BundleResponse(bundle=schemas.BundlePayload(**jsonio.bundle_to_dict(out)))


def handle_pullback(req: schemas.PullbackRequest) -> schemas.BundleResponse:
    bundle = _bundle(req.bundle)
    f = jsonio.polymap_from_dict(req.map.model_dump())
    source_domain = None
    if req.source_domain is not None:
        source_domain = Box(
            [
                (None if lo is None else _coord(lo), None if hi is None else _coord(hi))
                for lo, hi in req.source_domain
            ]
        )
    out = pullback(bundle, f, source_domain=source_domain, samples=req.samples, seed=req.seed)
    return schemas.BundleResponse(bundle=schemas.BundlePayload(**jsonio.bundle_to_dict(out)))


def handle_invisible(req: schemas.InvisibleRequest) -> schemas.InvisibleResponse:
    mod = jsonio.fpmodule_from_dict(req.module.model_dump())
    if len(req.element) != mod.free_rank:
        raise ParseError("element needs %d entries" % mod.free_rank)
    v = [parse_polynomial(t, mod.vars) for t in req.element]
    verdict = invisible_test(mod, v, samples=req.samples, seed=req.seed)
    return schemas.InvisibleResponse(
        status=verdict.status,
        witness=None if verdict.witness is None else [str(c) for c in verdict.witness],
        certificate=verdict.certificate,
        samples_used=verdict.samples_used,
    )


def handle_fibdet(req: schemas.FibdetRequest) -> schemas.FibdetResponse:
    mod = jsonio.fpmodule_from_dict(req.module.model_dump())
    fd = fiber_determination_univariate(mod)
    return schemas.FibdetResponse(
        invisible_generators=[[p.text() for p in col] for col in fd.invisible_generators],
        quotient=schemas.FPModulePayload(**jsonio.fpmodule_to_dict(fd.quotient)),
        smith_diag=[p.text() for p in fd.smith_diag],
        rho=[None if p is None else p.text() for p in fd.rho],
    )


def handle_check(req: schemas.CheckRequest) -> schemas.CheckResponse:
    L = jsonio.algebroid_from_dict(req.algebroid.model_dump())
    leib_ok, leib_w = check_leibniz(L)
    jac = check_jacobi(L)
    out = schemas.CheckResponse(
        leibniz=leib_ok,
        leibniz_witness=None
        if leib_w is None
        else schemas.LeibnizWitness(
            frame_a=leib_w[0],
            frame_b=leib_w[1],
            function=leib_w[2].text(),
            defect=[p.text() for p in leib_w[3].coeffs],
        ),
        jacobi_zero=not jac,
        jacobi=[
            schemas.JacobiEntry(triple=list(t), section=[p.text() for p in s.coeffs])
            for t, s in sorted(jac.items())
        ],
        weak_jacobi=check_weak_jacobi(L),
    )
    D = None
    if req.ideal is not None:
        D = jsonio.module_basis_from_dict(req.ideal.model_dump())
        ideal_ok, ideal_w = check_ideal(D, L)
        out.ideal = ideal_ok
        if ideal_w is not None:
            out.ideal_witness = schemas.IdealWitness(
                generator=[p.text() for p in ideal_w[0]],
                frame=ideal_w[1],
                bracket=[p.text() for p in ideal_w[2]],
            )
    if req.obstruction:
        if D is None:
            raise ParseError("the obstruction search needs a section module (ideal payload)")
        witness = quotient_obstruction(D, L, bound=req.bound)
        out.obstruction_checked = True
        if witness is not None:
            out.obstruction_witness = schemas.ObstructionWitnessPayload(
                frame=witness.frame,
                section=[p.text() for p in witness.section.coeffs],
                bracket=[p.text() for p in witness.bracket.coeffs],
                point=[str(c) for c in witness.point],
            )
    return out


def handle_synthesize(req: schemas.SynthesizeRequest) -> schemas.SynthesizeResponse:
    names = tuple(req.vars)
    if len(req.anchor) != len(names):
        raise ParseError("anchor needs one row per variable")
    rows = [[parse_polynomial(t, names) for t in row] for row in req.anchor]
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise ParseError("anchor rows must share one length")
    L = synthesize_bracket(PolyMatrix(names, rows))
    return schemas.SynthesizeResponse(
        algebroid=schemas.AlgebroidPayload(**jsonio.algebroid_to_dict(L)),
        leibniz=check_leibniz(L)[0],
        weak_jacobi=check_weak_jacobi(L),
    )


def handle_basechange(req: schemas.BaseChangeRequest) -> schemas.BaseChangeResponse:
    sub = jsonio.module_basis_from_dict(req.subbundle.model_dump())
    f = jsonio.polymap_from_dict(req.map.model_dump())
    point = jsonio.point_from_list(req.point)
    model = None
    if req.pointwise_model is not None:
        model = [
            [parse_polynomial(t, f.source_vars) for t in col] for col in req.pointwise_model
        ]
    report = base_change_comparison(
        req.v_rank, sub, f, point, req.order, pointwise_model=model
    )
    return schemas.BaseChangeResponse(**report)


def handle_jettensor(req: schemas.JetTensorRequest) -> schemas.JetTensorResponse:
    left = jsonio.jet_factor_from_dict(req.left.model_dump(exclude_none=True))
    right = jsonio.jet_factor_from_dict(req.right.model_dump(exclude_none=True))
    point = jsonio.point_from_list(req.point)
    return schemas.JetTensorResponse(dim=jet_module_tensor(left, right, point, req.order))


def _parse_gens(var_names, gens):
    names = tuple(var_names)
    out = []
    for comps in gens:
        if len(comps) != len(names):
            raise ParseError("each generator needs one component per variable")
        out.append(tuple(parse_polynomial(t, names) for t in comps))
    return out


def _leaf_csv(names, cloud):
    lines = [",".join(list(names) + ["rank"])]
    for row in cloud.rows():
        lines.append(",".join(format(c, ".17g") if isinstance(c, float) else str(c) for c in row))
    return "\n".join(lines) + "\n"


def handle_leaf(req: schemas.LeafRequest) -> schemas.LeafResponse:
    gens = _parse_gens(req.vars, req.gens)
    cloud = leaf_explore(
        gens,
        req.start,
        req.step_time,
        req.depth,
        step=req.step,
        dedup_tol=req.dedup_tol,
    )
    return schemas.LeafResponse(
        points=[list(p) for p in cloud.points],
        ranks=cloud.ranks,
        rank_constant=cloud.rank_constant,
        csv=_leaf_csv(req.vars, cloud),
    )


def handle_transport(req: schemas.TransportRequest) -> schemas.TransportResponse:
    gens = _parse_gens(req.vars, req.gens)
    path = jsonio.fpath_from_dict(req.path.model_dump(by_alias=True))
    result = bott_transport(gens, path, req.w0, step=req.step, nodes=req.nodes)
    return schemas.TransportResponse(
        point=list(result.point),
        representative=list(result.representative),
        raw=list(result.raw),
        residual=result.residual,
        rank=result.rank,
    )


def handle_fixtures(req: schemas.FixturesRequest) -> schemas.FixturesResponse:
    from ..fixtures import run_fixtures

    rows = run_fixtures(names=req.names, data_dir=req.data_dir)
    return schemas.FixturesResponse(
        results=[schemas.FixtureRow(name=n, ok=ok, detail=d) for n, ok, d in rows],
        ok=all(ok for _, ok, _ in rows),
    )


HANDLERS = {
    "fiber": handle_fiber,
    "rankmap": handle_rankmap,
    "tensor": handle_tensor,
    "pullback": handle_pullback,
    "invisible": handle_invisible,
    "fibdet": handle_fibdet,
    "check": handle_check,
    "synthesize": handle_synthesize,
    "basechange": handle_basechange,
    "jettensor": handle_jettensor,
    "leaf": handle_leaf,
    "transport": handle_transport,
    "fixtures": handle_fixtures,
}
