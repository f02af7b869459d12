"""Command line front end.

One binary, one subcommand per operation.  Requests are built from JSON
description files plus flags, validated against the wire schemas, and
dispatched either in-process or to a running server (--server or
TEPUI_SERVER).  JSON output is canonical: fixed key order, floats with 17
significant digits, so identical invocations are byte-identical.

Exit codes: 0 success, 1 check or fixture failure, 2 parse, 3 domain, 4 IO.
"""

import argparse
import json
import os
import sys

from pydantic import ValidationError

from . import schemas
from .config import DEFAULTS
from .errors import DomainError, FileAccessError, ParseError, TepuiError
from .jsonio import canonical_json

_KIND_TO_ERROR = {
    "parse": ParseError,
    "domain": DomainError,
    "io": FileAccessError,
    "check": TepuiError,
}


# ------------------------------------------------------------- file helpers

def _read_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise FileAccessError("cannot read %s: %s" % (path, exc))
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("%s is not valid JSON: %s" % (path, exc))


def _write_text(path, text):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise FileAccessError("cannot write %s: %s" % (path, exc))


def _split_coords(text):
    parts = [p.strip() for p in text.split(",")]
    if any(not p for p in parts):
        raise ParseError("empty coordinate in %r" % text)
    return parts


def _split_floats(text):
    out = []
    for part in _split_coords(text):
        try:
            out.append(float(part))
        except ValueError:
            raise ParseError("not a number: %r" % part)
    return out


def _split_ranges(text, allow_open=False):
    """'lo:hi,lo:hi' -> [[lo, hi], ...]; '*' means unbounded when allowed."""
    out = []
    for part in text.split(","):
        side = part.split(":")
        if len(side) != 2:
            raise ParseError("range %r is not lo:hi" % part)
        lo, hi = side[0].strip(), side[1].strip()
        if allow_open:
            out.append([None if lo == "*" else lo, None if hi == "*" else hi])
        else:
            if lo == "*" or hi == "*":
                raise ParseError("this command needs finite ranges")
            out.append([lo, hi])
    return out


# ---------------------------------------------------------------- dispatch

def _dispatch(name, payload, args):
    model = schemas.REQUEST_MODELS[name]
    try:
        req = model.model_validate(payload)
    except ValidationError as exc:
        raise ParseError(str(exc))
    if args.validate:
        return None
    if args.server:
        return _remote(args.server, name, req)
    from .service.handlers import HANDLERS

    return HANDLERS[name](req)


def _remote(base, name, req):
    import httpx

    url = base.rstrip("/") + "/v1/" + name
    try:
        resp = httpx.post(url, json=req.model_dump(mode="json", by_alias=True),
                          timeout=600.0)
    except httpx.HTTPError as exc:
        raise FileAccessError("server request failed: %s" % exc)
    if resp.status_code >= 400:
        try:
            body = resp.json()
        except ValueError:
            raise FileAccessError("server error %d: %s" % (resp.status_code, resp.text[:200]))
        cls = _KIND_TO_ERROR.get(body.get("error"), TepuiError)
        raise cls(body.get("detail", "server error %d" % resp.status_code))
    from .service import RESPONSE_MODELS

    return RESPONSE_MODELS[name].model_validate(resp.json())


def _emit(resp, args):
    text = canonical_json(resp.model_dump(mode="json"))
    out = getattr(args, "out", None)
    if out:
        _write_text(out, text + "\n")
    else:
        print(text)


def _finish_validated():
    print("valid")
    return 0


# ------------------------------------------------------------- subcommands

def _cmd_fiber(args):
    payload = {"bundle": _read_json(args.file), "point": _split_coords(args.point)}
    resp = _dispatch("fiber", payload, args)
    if resp is None:
        return _finish_validated()
    if args.json:
        _emit(resp, args)
    else:
        print(resp.dim)
    return 0


def _cmd_rankmap(args):
    payload = {
        "bundle": _read_json(args.file),
        "box": _split_ranges(args.box),
        "step": args.step,
    }
    resp = _dispatch("rankmap", payload, args)
    if resp is None:
        return _finish_validated()
    if args.json:
        _emit(resp, args)
    else:
        if args.out:
            _write_text(args.out, resp.csv)
        else:
            sys.stdout.write(resp.csv)
        print("semicontinuity: %s" % resp.semicontinuity)
    return 0 if resp.semicontinuity == "pass" else 1


def _cmd_tensor(args):
    payload = {"left": _read_json(args.left), "right": _read_json(args.right)}
    resp = _dispatch("tensor", payload, args)
    if resp is None:
        return _finish_validated()
    if args.json:
        _emit(resp, args)
    else:
        text = canonical_json(resp.bundle.model_dump(mode="json", exclude_none=True))
        if args.out:
            _write_text(args.out, text + "\n")
        else:
            print(text)
    return 0


def _cmd_pullback(args):
    payload = {"bundle": _read_json(args.file), "map": _read_json(args.map)}
    if args.domain:
        payload["source_domain"] = _split_ranges(args.domain, allow_open=True)
    if args.samples is not None:
        payload["samples"] = args.samples
    if args.seed is not None:
        payload["seed"] = args.seed
    resp = _dispatch("pullback", payload, args)
    if resp is None:
        return _finish_validated()
    if args.json:
        _emit(resp, args)
    else:
        text = canonical_json(resp.bundle.model_dump(mode="json", exclude_none=True))
        if args.out:
            _write_text(args.out, text + "\n")
        else:
            print(text)
    return 0


def _cmd_invisible(args):
    payload = {"module": _read_json(args.file), "element": _split_coords(args.element)}
    if args.samples is not None:
        payload["samples"] = args.samples
    if args.seed is not None:
        payload["seed"] = args.seed
    resp = _dispatch("invisible", payload, args)
    if resp is None:
        return _finish_validated()
    if args.json:
        _emit(resp, args)
        return 0
    print("status: %s" % resp.status)
    if resp.certificate:
        print("certificate: %s" % resp.certificate)
    if resp.witness is not None:
        print("witness: %s" % ", ".join(resp.witness))
    if resp.samples_used:
        print("samples used: %d" % resp.samples_used)
    return 0


def _cmd_fibdet(args):
    payload = {"module": _read_json(args.file)}
    resp = _dispatch("fibdet", payload, args)
    if resp is None:
        return _finish_validated()
    _emit(resp, args)
    return 0


def _cmd_check(args):
    payload = {"algebroid": _read_json(args.file)}
    if args.ideal:
        payload["ideal"] = _read_json(args.ideal)
    if args.obstruction:
        payload["obstruction"] = True
        payload["bound"] = args.bound
    resp = _dispatch("check", payload, args)
    if resp is None:
        return _finish_validated()
    _emit(resp, args)
    code = 0
    if not resp.leibniz or not resp.weak_jacobi:
        code = 1
    if resp.ideal is False:
        code = 1
    if resp.obstruction_checked and resp.obstruction_witness is not None:
        code = 1
    return code


def _cmd_synthesize(args):
    data = _read_json(args.file)
    resp = _dispatch("synthesize", data, args)
    if resp is None:
        return _finish_validated()
    _emit(resp, args)
    return 0


def _cmd_basechange(args):
    payload = {
        "v_rank": args.rank,
        "subbundle": _read_json(args.file),
        "map": _read_json(args.map),
        "point": _split_coords(args.point),
        "order": args.order,
    }
    if args.model:
        payload["pointwise_model"] = _read_json(args.model)
    resp = _dispatch("basechange", payload, args)
    if resp is None:
        return _finish_validated()
    _emit(resp, args)
    return 0


def _cmd_jettensor(args):
    payload = {
        "left": _read_json(args.left),
        "right": _read_json(args.right),
        "point": _split_coords(args.point),
        "order": args.order,
    }
    resp = _dispatch("jettensor", payload, args)
    if resp is None:
        return _finish_validated()
    if args.json:
        _emit(resp, args)
    else:
        print(resp.dim)
    return 0


def _cmd_leaf(args):
    data = _read_json(args.file)
    payload = {
        "vars": data.get("vars"),
        "gens": data.get("gens"),
        "start": _split_floats(args.start),
        "step_time": args.time,
        "depth": args.depth,
    }
    if args.step is not None:
        payload["step"] = args.step
    if args.dedup_tol is not None:
        payload["dedup_tol"] = args.dedup_tol
    resp = _dispatch("leaf", payload, args)
    if resp is None:
        return _finish_validated()
    if args.json:
        _emit(resp, args)
        return 0
    if args.out:
        _write_text(args.out, resp.csv)
    else:
        sys.stdout.write(resp.csv)
    print("rank constant: %s" % ("yes" if resp.rank_constant else "no"))
    return 0


def _cmd_transport(args):
    data = _read_json(args.file)
    payload = {
        "vars": data.get("vars"),
        "gens": data.get("gens"),
        "path": _read_json(args.path),
        "w0": _split_floats(args.w0),
        "nodes": args.nodes,
    }
    if args.step is not None:
        payload["step"] = args.step
    resp = _dispatch("transport", payload, args)
    if resp is None:
        return _finish_validated()
    if args.json:
        _emit(resp, args)
        return 0
    print("point: %s" % ", ".join(format(c, ".12g") for c in resp.point))
    print("class: %s" % ", ".join(format(c, ".12g") for c in resp.representative))
    print("raw: %s" % ", ".join(format(c, ".12g") for c in resp.raw))
    print("residual: %s" % format(resp.residual, ".6g"))
    print("rank: %d" % resp.rank)
    return 0


def _cmd_fixtures(args):
    if args.list:
        from .fixtures import fixture_names

        for name in fixture_names():
            print(name)
        return 0
    payload = {}
    if args.names:
        payload["names"] = args.names
    if args.data_dir:
        payload["data_dir"] = args.data_dir
    resp = _dispatch("fixtures", payload, args)
    if resp is None:
        return _finish_validated()
    if args.json:
        _emit(resp, args)
    else:
        for row in resp.results:
            line = "%-4s %s" % ("ok" if row.ok else "FAIL", row.name)
            if row.detail:
                line += "  (%s)" % row.detail
            print(line)
        passed = sum(1 for r in resp.results if r.ok)
        print("passed %d/%d" % (passed, len(resp.results)))
    return 0 if resp.ok else 1


# ------------------------------------------------------------------ parser

def _build_parser():
    top = argparse.ArgumentParser(
        prog="tepui",
        description="Singular vector bundles, section modules, anchored "
                    "brackets, and leafwise transport from JSON descriptions.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true",
                        help="emit the full response as canonical JSON")
    common.add_argument("--server", default=os.environ.get("TEPUI_SERVER"),
                        help="dispatch to a running server instead of in-process")
    common.add_argument("--validate", action="store_true",
                        help="only check the request against the schema")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fiber", parents=[common], help="fiber dimension at a point")
    p.add_argument("file", help="bundle JSON")
    p.add_argument("--point", required=True, help="comma-separated coordinates")
    p.set_defaults(func=_cmd_fiber)

    p = sub.add_parser("rankmap", parents=[common],
                       help="fiber dimensions on a grid, with semicontinuity verdict")
    p.add_argument("file", help="bundle JSON")
    p.add_argument("--box", required=True, help="per-variable ranges lo:hi, comma-separated")
    p.add_argument("--step", required=True, help="grid step (rational text)")
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.set_defaults(func=_cmd_rankmap)

    p = sub.add_parser("tensor", parents=[common], help="tensor product of two bundles")
    p.add_argument("left", help="bundle JSON")
    p.add_argument("right", help="bundle JSON")
    p.add_argument("--out", help="write the resulting bundle here")
    p.set_defaults(func=_cmd_tensor)

    p = sub.add_parser("pullback", parents=[common], help="pull a bundle back along a map")
    p.add_argument("file", help="bundle JSON")
    p.add_argument("map", help="polynomial map JSON")
    p.add_argument("--domain", help="source box, ranges lo:hi with * for unbounded")
    p.add_argument("--samples", type=int, help="sample count for cell membership scans")
    p.add_argument("--seed", type=int, help="override the sampling seed")
    p.add_argument("--out", help="write the resulting bundle here")
    p.set_defaults(func=_cmd_pullback)

    p = sub.add_parser("invisible", parents=[common],
                       help="decide whether a module element vanishes in every fiber")
    p.add_argument("file", help="finitely presented module JSON")
    p.add_argument("--element", required=True,
                   help="comma-separated polynomial components")
    p.add_argument("--samples", type=int, help="sampling budget")
    p.add_argument("--seed", type=int, help="override the sampling seed")
    p.set_defaults(func=_cmd_invisible)

    p = sub.add_parser("fibdet", parents=[common],
                       help="split a one-variable module into invisible part and quotient")
    p.add_argument("file", help="finitely presented module JSON")
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(func=_cmd_fibdet)

    p = sub.add_parser("check", parents=[common],
                       help="verify bracket laws, and optionally an ideal or obstruction")
    p.add_argument("file", help="anchored bracket JSON")
    p.add_argument("--ideal", help="section module JSON to test as a bracket ideal")
    p.add_argument("--obstruction", action="store_true",
                   help="search for a quotient-bracket obstruction (needs --ideal)")
    p.add_argument("--bound", type=int, default=DEFAULTS.degree_bound,
                   help="degree bound for the obstruction search")
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("synthesize", parents=[common],
                       help="build structure functions for an involutive anchor")
    p.add_argument("file", help="JSON with vars and an anchor matrix (row-major)")
    p.add_argument("--out", help="write the resulting bracket here")
    p.set_defaults(func=_cmd_synthesize)

    p = sub.add_parser("basechange", parents=[common],
                       help="compare pulled-back sections against the pointwise model")
    p.add_argument("file", help="section module JSON (target side)")
    p.add_argument("map", help="polynomial map JSON")
    p.add_argument("--rank", type=int, required=True, help="ambient bundle rank")
    p.add_argument("--point", required=True, help="source point, comma-separated")
    p.add_argument("--order", type=int, required=True, help="jet order")
    p.add_argument("--model", help="JSON list of pointwise-model columns")
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(func=_cmd_basechange)

    p = sub.add_parser("jettensor", parents=[common],
                       help="jet-space dimension of a tensor of module factors")
    p.add_argument("left", help="jet factor JSON (kind module or flat)")
    p.add_argument("right", help="jet factor JSON")
    p.add_argument("--point", required=True, help="base point, comma-separated")
    p.add_argument("--order", type=int, required=True, help="jet order")
    p.set_defaults(func=_cmd_jettensor)

    p = sub.add_parser("leaf", parents=[common],
                       help="explore a leaf by composing generator flows")
    p.add_argument("file", help="JSON with vars and generator fields")
    p.add_argument("--start", required=True, help="start point, comma-separated floats")
    p.add_argument("--time", type=float, required=True, help="flow time per move")
    p.add_argument("--depth", type=int, required=True, help="search depth")
    p.add_argument("--step", type=float, help="integrator step")
    p.add_argument("--dedup-tol", type=float, help="point dedup tolerance")
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.set_defaults(func=_cmd_leaf)

    p = sub.add_parser("transport", parents=[common],
                       help="transport a normal class along a piecewise flow path")
    p.add_argument("file", help="JSON with vars and generator fields")
    p.add_argument("--path", required=True, help="path JSON (start and segments)")
    p.add_argument("--w0", required=True, help="initial vector, comma-separated floats")
    p.add_argument("--step", type=float, help="integrator step")
    p.add_argument("--nodes", type=int, default=100, help="rank-audit grid size")
    p.set_defaults(func=_cmd_transport)

    p = sub.add_parser("fixtures", parents=[common],
                       help="run the built-in counterexample suite")
    p.add_argument("names", nargs="*", help="subset of fixtures to run")
    p.add_argument("--list", action="store_true", help="list fixture names and exit")
    p.add_argument("--data-dir", help="load fixture data files from here")
    p.set_defaults(func=_cmd_fixtures)

    return top


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TepuiError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return exc.exit_code
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
