"""Command-line interface: ``improj <command> [options]``.

Exit codes: 0 success, 1 usage error (bad flags, malformed polynomial,
unreadable input), 2 computational failure.  Every JSON document written
carries a ``config`` echo and is validated against the schema shipped in
``improj/schemas``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from importlib import resources

import jsonschema

from improj import realroots as rr
from improj.asymptotics import empirical_limit_directions, limit_set
from improj.geometry import components, raster_amoeba, raster_coamoeba, raster_improj, raster_json, write_pgm
from improj.oracle import compile_plan, member
from improj.parse import ParseError, format_poly, parse, parse_factors, read_corpus
from improj.polycore import Poly, Q
from improj.quadric import QuadricForm
from improj.stability import (
    direct_root_stability,
    hermite_biehler,
    hyperbolicity,
    multilinear_stability,
    stable_via_projection,
)

COMMANDS = ("member", "classify", "raster", "components", "limits", "stability", "amoeba", "coamoeba")
# options a config file may set (flag precedence applies)
CONFIG_KEYS = {
    "poly", "corpus", "point", "box", "res", "seed", "workers", "out", "report", "numeric_starts",
    "root_margin", "delta_samples", "hyper_trials", "convexity_pairs", "min_cells", "radius", "bins",
    "samples", "method", "direction", "empirical",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p: argparse.ArgumentParser, point=False, box=False):
    src = p.add_argument_group("input")
    src.add_argument("--poly", help="polynomial expression")
    src.add_argument("--factor", action="append", help="factor of a product (repeatable)")
    src.add_argument("--corpus", help="file with one expression per line ('#' comments)")
    if point:
        p.add_argument("--point", help="comma-separated rationals, e.g. 1/2,-3")
    if box:
        p.add_argument("--box", default="-4:4,-4:4", help="lo:hi per axis, comma separated (default -4:4,-4:4)")
        p.add_argument("--res", type=int, default=200, help="cells per axis (default 200)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None, help="worker processes (default $IMPROJ_WORKERS or 1)")
    p.add_argument("--out", help="primary artifact path")
    p.add_argument("--report", help="JSON report path")
    p.add_argument("--config", help="key=value file merged under explicit flags")
    tol = p.add_argument_group("tolerances")
    tol.add_argument("--numeric-starts", type=int, default=24, help="multistarts of the numeric fiber search")
    tol.add_argument("--root-margin", type=float, default=1e-8, help="realness margin for root-based stability")
    tol.add_argument("--delta-samples", type=int, default=100_000, help="samples per Delta_jk test")
    tol.add_argument("--hyper-trials", type=int, default=200, help="random lines in the hyperbolicity test")
    tol.add_argument("--convexity-pairs", type=int, default=2000, help="cell pairs per convexity check")
    tol.add_argument("--min-cells", type=int, default=2, help="components below this size count as fragments")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="improj", description="Imaginary projections of complex polynomials.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _common(sub.add_parser("member", help="decide y in I(f)"), point=True)
    _common(sub.add_parser("classify", help="shape, closed form and quadric normal form"))
    _common(sub.add_parser("raster", help="raster I(f) to PGM with a component report"), box=True)
    _common(sub.add_parser("components", help="complement components of I(f)"), box=True)
    lim = sub.add_parser("limits", help="limit directions at infinity (CSV)")
    _common(lim)
    lim.add_argument("--empirical", action="store_true", help="also sweep the circle of radius --radius")
    lim.add_argument("--radius", type=float, default=100.0)
    lim.add_argument("--bins", type=int, default=720)
    lim.add_argument("--samples", type=int, default=20000)
    st = sub.add_parser("stability", help="stability certificates")
    _common(st)
    st.add_argument(
        "--method",
        default="auto",
        choices=["auto", "hermite-biehler", "roots", "delta", "projection", "hyperbolicity"],
    )
    st.add_argument("--direction", help="hyperbolicity direction, comma separated")
    for name in ("amoeba", "coamoeba"):
        a = sub.add_parser(name, help=f"forward-sampled {name} raster")
        _common(a, box=name == "amoeba")
        if name == "coamoeba":
            a.add_argument("--res", type=int, default=200)
        a.add_argument("--samples", type=int, default=None, help="sampled points per chart")
    return parser


def read_config(path) -> dict:
    cfg = {}
    try:
        text = open(path).read()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for num, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{num}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{num}: unknown key {key!r}")
        cfg[key] = value
    return cfg


_VALUE_FLAGS = ("--box", "--point", "--direction")


def _glue_values(argv) -> list:
    """``--box -4:4`` would read as a flag; rewrite it as ``--box=-4:4``."""
    out, it = [], iter(argv)
    for a in it:
        if a in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(a if nxt is None else f"{a}={nxt}")
        else:
            out.append(a)
    return out


def parse_args(argv):
    parser = build_parser()
    argv = _glue_values(list(argv))
    args = parser.parse_args(argv)
    if args.config:
        cfg = read_config(args.config)
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = set(cfg) - known
        if unknown:
            raise UsageError(f"config keys not valid for {args.command}: {sorted(unknown)}")
        if "empirical" in cfg:
            cfg["empirical"] = cfg["empirical"].lower() in ("1", "true", "yes", "on")
        sub.set_defaults(**cfg)
        args = parser.parse_args(argv)
    return args


# -- inputs ------------------------------------------------------------------------------


def _inputs(args) -> list:
    """List of (label, Poly or list of factors)."""
    given = [x for x in (args.poly, args.factor, args.corpus) if x]
    if len(given) != 1:
        raise UsageError("give exactly one of --poly, --factor, --corpus")
    if args.poly:
        return [(args.poly, parse(args.poly))]
    if args.factor:
        return [(" ; ".join(args.factor), parse_factors(";".join(args.factor)))]
    try:
        lines = read_corpus(args.corpus)
    except OSError as exc:
        raise UsageError(f"cannot read corpus {args.corpus}: {exc}") from None
    out = []
    for line in lines:
        out.append((line, parse_factors(line) if ";" in line else parse(line)))
    return out


def _nvars(f) -> int:
    return f.nvars if isinstance(f, Poly) else f[0].nvars


def _lift(f, n):
    if isinstance(f, Poly):
        return f if f.nvars == n else f.extend(n)
    return [g if g.nvars == n else g.extend(n) for g in f]


def _point(text):
    if not text:
        raise UsageError("--point is required")
    try:
        return tuple(Q(s.strip()) for s in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad point {text!r}: {exc}") from None


def _config(args) -> dict:
    skip = {"config", "factor"}
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}
    if args.factor:
        cfg["factor"] = list(args.factor)
    return cfg


# -- output ------------------------------------------------------------------------------


def _schema(name: str) -> dict:
    text = resources.files("improj").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def emit_json(doc: dict, schema: str, path=None) -> None:
    jsonschema.validate(doc, _schema(schema))
    text = json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _label(f) -> str:
    return format_poly(f) if isinstance(f, Poly) else " ; ".join(format_poly(g) for g in f)


# -- commands -----------------------------------------------------------------------------


def cmd_member(args) -> int:
    y = _point(args.point)
    results = []
    for text, f in _inputs(args):
        f = _lift(f, len(y)) if _nvars(f) < len(y) else f
        v = member(f, y, numeric_starts=args.numeric_starts)
        results.append({"poly": _label(f), "point": [str(c) for c in y], **v.to_json()})
    doc = {"results": results, "config": _config(args)}
    if len(results) == 1:
        doc.update(results[0])
    emit_json(doc, "member", args.report or args.out)
    return 0


def _classify_one(f: Poly) -> dict:
    plan = compile_plan(f)
    out = {"poly": format_poly(f), "nvars": f.nvars, "degree": f.degree(), "plan": plan.kind, "method": plan.method}
    if plan.region is not None:
        out["region"] = plan.region.describe()
    shape = plan.shape
    if isinstance(shape, QuadricForm):
        out["quadric"] = {
            "family": shape.family,
            "kind": shape.kind,
            "signature": {"p": shape.p, "r": shape.r},
            "weights": [str(w) for w in shape.weights],
            "scale": str(shape.scale),
            "normal_form": format_poly(shape.normal_form()),
            "matrix": [[str(v) for v in row] for row in shape.map.matrix],
            "shift": [str(v) for v in shape.map.real_shift],
        }
    elif shape is not None:
        out["shape"] = type(shape).__name__
    return out


def cmd_classify(args) -> int:
    results = []
    for _, f in _inputs(args):
        if not isinstance(f, Poly):
            raise UsageError("classify takes a single polynomial")
        results.append(_classify_one(f))
    emit_json({"results": results, "config": _config(args)}, "classify", args.report or args.out)
    return 0


def _raster_doc(r, rep, args) -> dict:
    doc = {"raster": raster_json(r), "config": _config(args)}
    if rep is not None:
        doc["components"] = rep.to_json()
    return doc


def cmd_raster(args, with_image=True) -> int:
    inputs = _inputs(args)
    if len(inputs) != 1:
        raise UsageError("raster takes one polynomial or factor list")
    _, f = inputs[0]
    n = _nvars(f)
    if n == 1:
        f, n = _lift(f, 2), 2
    r = raster_improj(f, args.box, args.res, workers=args.workers, numeric_starts=args.numeric_starts, seed=args.seed)
    rep = components(r, convexity_pairs=args.convexity_pairs, seed=args.seed, min_cells=args.min_cells)
    if with_image and args.out:
        write_pgm(r, args.out)
    doc = _raster_doc(r, rep, args)
    emit_json(doc, "raster", args.report if with_image else (args.report or args.out))
    return 0


def cmd_components(args) -> int:
    return cmd_raster(args, with_image=False)


def cmd_forward(args, kind) -> int:
    inputs = _inputs(args)
    if len(inputs) != 1 or not isinstance(inputs[0][1], Poly):
        raise UsageError(f"{kind} takes a single polynomial")
    f = _lift(inputs[0][1], 2)
    if kind == "amoeba":
        r = raster_amoeba(f, args.box, args.res, samples=args.samples, seed=args.seed)
    else:
        r = raster_coamoeba(f, args.res, samples=args.samples, seed=args.seed)
    rep = components(r, convexity_pairs=args.convexity_pairs, seed=args.seed, min_cells=args.min_cells)
    if args.out:
        write_pgm(r, args.out)
    emit_json(_raster_doc(r, rep, args), "raster", args.report)
    return 0


def cmd_limits(args) -> int:
    inputs = _inputs(args)
    if len(inputs) != 1 or not isinstance(inputs[0][1], Poly):
        raise UsageError("limits takes a single polynomial")
    f = inputs[0][1]
    if f.nvars == 1:
        f = f.extend(2)
    ls = limit_set(f)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"y{j + 1}" for j in range(ls.n)])
    for d in ls.directions:
        w.writerow([repr(float(x)) for x in d])
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    if args.report:
        doc = {"poly": format_poly(f), "limit_set": ls.to_json(), "config": _config(args)}
        if args.empirical:
            emp = empirical_limit_directions(f, args.radius, args.bins, args.samples, seed=args.seed)
            doc["empirical"] = {
                "radius": emp.radius,
                "bins": emp.bins,
                "coverage": emp.coverage,
                "clusters": [
                    {"from": lo, "to": hi, "direction": list(d) if d is not None else None} for lo, hi, d in emp.clusters
                ],
            }
        emit_json(doc, "limits", args.report)
    if ls.kind == "FullSphere":
        print("# every direction is a limit direction (FullSphere)", file=sys.stderr)
    elif ls.certified != "exact":
        print(f"# {ls.certified}: further limit directions are possible", file=sys.stderr)
    return 0


def _stability_one(f, args):
    method = args.method
    if method == "auto":
        if isinstance(f, Poly) and f.nvars == 1:
            method = "hermite-biehler"
        else:
            method = "projection"
    if method == "hermite-biehler":
        return hermite_biehler(f)
    if method == "roots":
        return direct_root_stability(f, margin=args.root_margin, seed=args.seed)
    if method == "delta":
        return multilinear_stability(f, samples=args.delta_samples, seed=args.seed)
    if method == "projection":
        return stable_via_projection(f)
    if not args.direction:
        raise UsageError("--direction is required for the hyperbolicity test")
    e = [Q(s.strip()) for s in args.direction.split(",")]
    h = hyperbolicity(f, e, trials=args.hyper_trials, seed=args.seed)
    return h


def cmd_stability(args) -> int:
    results = []
    for _, f in _inputs(args):
        v = _stability_one(f, args)
        entry = {"poly": _label(f)}
        if hasattr(v, "to_json"):
            entry.update(v.to_json())
        else:  # hyperbolicity
            entry.update(
                {
                    "state": v.state,
                    "method": "hyperbolicity",
                    "detail": {"direction": [str(c) for c in v.direction], "trials": v.trials},
                }
            )
            if v.witness is not None:
                entry["witness"] = [str(c) for c in v.witness]
        results.append(entry)
    doc = {"results": results, "config": _config(args)}
    if len(results) == 1:
        doc.update(results[0])
    emit_json(doc, "stability", args.report or args.out)
    return 0


def run(argv=None) -> int:
    try:
        args = parse_args(sys.argv[1:] if argv is None else argv)
        if args.command == "member":
            return cmd_member(args)
        if args.command == "classify":
            return cmd_classify(args)
        if args.command == "raster":
            return cmd_raster(args)
        if args.command == "components":
            return cmd_components(args)
        if args.command == "limits":
            return cmd_limits(args)
        if args.command == "stability":
            return cmd_stability(args)
        return cmd_forward(args, args.command)
    except (UsageError, ParseError) as exc:
        print(f"improj: error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"improj: error: {exc}", file=sys.stderr)
        return 1
    except (ArithmeticError, RuntimeError, rr.RootFindingError, jsonschema.ValidationError) as exc:
        print(f"improj: computation failed: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
