"""``gamma-persist`` command line.

Exit status: 0 on success, 1 when the library rejects the input on
mathematical grounds (an error object is printed to stderr), 2 when the input
cannot be parsed.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

from . import cellular1d, convolution1d, gamma_geometry, pipeline, render, stratify_nd
from .barcodes1d import GradedBarcode
from .foundations import DomainError, format_rat, rat

SCHEMA = "gamma-persist/1"
_RATIONAL = re.compile(r"^-?\d+(/\d+)?$")


class MalformedInput(Exception):
    pass


def _read_text(path: str) -> str:
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc.strerror}") from exc


def _read_json(path: str) -> Any:
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def _parse(path: str, loader: Callable[[Any], Any]) -> Any:
    data = _read_json(path)
    try:
        return loader(data)
    except (KeyError, TypeError, ValueError, IndexError, ZeroDivisionError) as exc:
        raise MalformedInput(f"{path}: {type(exc).__name__}: {exc}") from exc


def _barcode(path: str) -> GradedBarcode:
    return _parse(path, GradedBarcode.from_json)


def _modules(data: Any) -> dict[int, cellular1d.ZigzagModule]:
    if "modules" in data:
        return {int(k): cellular1d.ZigzagModule.from_json(v) for k, v in data["modules"].items()}
    return {0: cellular1d.ZigzagModule.from_json(data)}


def _decimal_fields(obj: Any) -> Any:
    """Add a lossy ``<key>_decimal`` float next to every exact rational string."""
    if isinstance(obj, list):
        return [_decimal_fields(x) for x in obj]
    if not isinstance(obj, dict):
        return obj
    out = {}
    for k, v in obj.items():
        out[k] = _decimal_fields(v)
        if isinstance(v, str) and _RATIONAL.match(v):
            out[f"{k}_decimal"] = float(Fraction(v))
    return out


def _emit(args: argparse.Namespace, payload: dict) -> None:
    body = {"schema": SCHEMA}
    body.update(payload)
    if getattr(args, "decimal", False):
        body = _decimal_fields(body)
    text = json.dumps(body, indent=2, ensure_ascii=False) + "\n"
    if getattr(args, "output", None):
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


# verbs -------------------------------------------------------------------


def cmd_decompose(args):
    modules = _parse(args.input, _modules)
    _emit(args, cellular1d.decompose_graded(modules).to_json())


def cmd_convolve(args):
    f = _barcode(args.first)
    if args.kernel is not None:
        g = convolution1d.kernel(rat(args.kernel))
    elif args.second:
        g = _barcode(args.second)
    else:
        raise MalformedInput("convolve needs a second barcode or --kernel")
    _emit(args, convolution1d.convolve(f, g).to_json())


def cmd_distance(args):
    f, g = _barcode(args.first), _barcode(args.second)
    d = convolution1d.distance_bounds(f, g)
    _emit(args, {"lower": d.lower.to_json(), "upper": d.upper.to_json(), "exact": d.exact})


def cmd_interleave(args):
    f, g = _barcode(args.first), _barcode(args.second)
    decision, witness = convolution1d.is_a_isomorphic(f, g, rat(args.a))
    out = {"a": format_rat(rat(args.a)), "decision": decision}
    if witness is not None:
        out["witness"] = witness.to_json()
    _emit(args, out)


def cmd_dualize(args):
    f = _barcode(args.input)
    _emit(args, cellular1d.dualize(f, args.variant).to_json())


def cmd_gammafy(args):
    _emit(args, cellular1d.gammafy(_barcode(args.input)).to_json())


def cmd_cone(args):
    cone = _parse(args.cone, gamma_geometry.Cone.from_json)
    out: dict = {
        "cone": cone.to_json(),
        "polar": cone.polar().to_json(),
        "proper": cone.is_proper(),
        "solid": cone.is_solid(),
    }
    if args.set:
        p = _parse(args.set, gamma_geometry.HPolyhedron.from_json)
        out["predicates"] = gamma_geometry.gamma_predicates(p, cone).to_json()
        if args.to_z:
            out["z"] = gamma_geometry.omega_to_z(p, cone).to_json()
        if args.to_omega:
            out["omega"] = gamma_geometry.z_to_omega(p, cone).to_json()
    _emit(args, out)


def cmd_stratify(args):
    cone = _parse(args.cone, gamma_geometry.Cone.from_json) if args.cone else None
    spec = _parse(args.spec, lambda d: stratify_nd.PLGammaSheafSpec.from_json(d, cone))
    strata = stratify_nd.stratify(spec)
    report = stratify_nd.validate_stratification(strata, spec.support, spec.cone)
    _emit(args, {"strata": strata.to_json(), "validation": report.to_json()})


def _mesh_function(args) -> pipeline.MeshFunction:
    if args.input.endswith(".csv"):
        if not args.mesh:
            raise MalformedInput("a point cloud needs --mesh")
        text = _read_text(args.input)
        try:
            cloud = pipeline.PointCloud.parse_csv(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedInput(f"{args.input}: {exc}") from exc
        mesh = _parse(args.mesh, pipeline.SimplicialMesh.from_json)
        return pipeline.distance_function(cloud, mesh, args.metric)
    return _parse(args.input, pipeline.MeshFunction.from_json)


def cmd_persist(args):
    f = _mesh_function(args)
    _emit(args, pipeline.sublevel_persistence(f).to_json())


def cmd_stability(args):
    if args.trials:
        reports = pipeline.stability_trials(args.trials, rat(args.eps), args.vertices, args.seed)
        _emit(
            args,
            {
                "epsilon": format_rat(rat(args.eps)),
                "trials": len(reports),
                "passed": sum(r.passed for r in reports),
                "pass": all(r.passed for r in reports),
            },
        )
        return
    if not (args.first and args.second):
        raise MalformedInput("stability needs two mesh functions or --trials")
    f1 = _parse(args.first, pipeline.MeshFunction.from_json)
    f2 = _parse(args.second, pipeline.MeshFunction.from_json)
    _emit(args, pipeline.stability_experiment(f1, f2, with_distance=True).to_json())


def cmd_render(args):
    data = _read_json(args.input)
    try:
        if isinstance(data, dict) and "strata" in data:
            strata = [gamma_geometry.HPolyhedron.from_json(z) for z in data["strata"]]
            window = tuple(rat(v) for v in args.window.split(",")) if args.window else (-3, 3, -3, 3)
            svg = render.strata_svg(strata, window, args.title)
        else:
            svg = render.barcode_svg(GradedBarcode.from_json(data), args.title)
    except (KeyError, TypeError, IndexError) as exc:
        raise MalformedInput(f"{args.input}: {type(exc).__name__}: {exc}") from exc
    if args.output:
        Path(args.output).write_text(svg)
    else:
        sys.stdout.write(svg)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gamma-persist", description="Exact barcodes, convolution distance and cone-topology tools.")
    parser.add_argument("--decimal", action="store_true", help="add lossy decimal fields next to exact numbers")
    sub = parser.add_subparsers(dest="verb", required=True)

    def verb(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("-o", "--output", help="write the result here instead of stdout")
        p.add_argument("--decimal", action="store_true", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
        return p

    p = verb("decompose", cmd_decompose, "barcode of a zigzag module (or {'modules': {degree: module}})")
    p.add_argument("input")
    p = verb("convolve", cmd_convolve, "convolution of two barcodes")
    p.add_argument("first")
    p.add_argument("second", nargs="?")
    p.add_argument("--kernel", help="convolve with the ball kernel K_a instead")
    p = verb("distance", cmd_distance, "lower and upper bounds on the convolution distance")
    p.add_argument("first")
    p.add_argument("second")
    p = verb("interleave", cmd_interleave, "decide a-isomorphism")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--a", required=True)
    p = verb("dualize", cmd_dualize, "Verdier dual of a barcode")
    p.add_argument("input")
    p.add_argument("--variant", choices=("D", "D_prime"), default="D")
    p = verb("gammafy", cmd_gammafy, "cone-sheaf replacement of a barcode")
    p.add_argument("input")
    p = verb("cone", cmd_cone, "cone data, set predicates and the open/locally-closed correspondence")
    p.add_argument("cone")
    p.add_argument("--set", help="polyhedron JSON to classify")
    p.add_argument("--to-z", action="store_true", help="map an open flat set to its locally closed partner")
    p.add_argument("--to-omega", action="store_true", help="map a locally closed set to its interior")
    p = verb("stratify", cmd_stratify, "stratify a support along a compatible arrangement")
    p.add_argument("--spec", required=True)
    p.add_argument("--cone")
    p = verb("persist", cmd_persist, "sublevel persistence of a mesh function or a point-cloud distance")
    p.add_argument("input", help="mesh function JSON, or point cloud CSV with --mesh")
    p.add_argument("--mesh")
    p.add_argument("--metric", choices=("linf", "l1", "l2sq"), default="linf")
    p = verb("stability", cmd_stability, "check the stability bound on a pair or on random trials")
    p.add_argument("first", nargs="?")
    p.add_argument("second", nargs="?")
    p.add_argument("--trials", type=int, default=0)
    p.add_argument("--eps", default="1/10")
    p.add_argument("--vertices", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p = verb("render", cmd_render, "draw a barcode or planar strata as SVG")
    p.add_argument("input")
    p.add_argument("--title")
    p.add_argument("--window", help="xmin,xmax,ymin,ymax for strata")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except MalformedInput as exc:
        sys.stderr.write(json.dumps({"error": "malformed_input", "message": str(exc)}) + "\n")
        return 2
    except DomainError as exc:
        sys.stderr.write(json.dumps({"error": "domain", "type": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
