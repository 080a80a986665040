"""Command line front end.

Commands ``build``, ``dual``, ``metrics``, ``check`` and ``render`` read a
JSON shape spec and write deterministic JSON (or SVG + CSV for ``render``).
Exit status: 0 success, 1 a check failed, 2 input or geometry error.
"""

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import checks as ck
from . import metrics as mt
from . import presets as ps
from . import region as rg
from . import wulff as wf
from .errors import GeometryError, SpecError

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

KIND_KEYS = {
    "constant": ("c",),
    "ellipse": ("a", "b"),
    "polygon_gamma": ("vertices",),
    "sampled": ("samples",),
    "preset": ("name",),
}

CONFIG_KEYS = ("seed", "trials", "k", "tolerances", "checks", "workers", "interior_samples",
               "boundary_samples", "tol")


class ParseError(SpecError):
    code = "malformed-json"


# ---------------------------------------------------------------- deterministic JSON


def _format_float(x):
    x = float(x) + 0.0  # no negative zero
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    if "e" not in text and "." not in text and "n" not in text:
        text += ".0"
    return text


def _plain(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def dumps(obj, indent=0):
    """JSON text with sorted keys and 17-significant-digit floats."""
    obj = _plain(obj)
    pad = "  " * (indent + 1)
    end = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=True)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(obj[k], indent + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(_plain(x), (int, float)) and not isinstance(x, bool) for x in obj):
            return "[" + ", ".join(dumps(x) for x in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(x, indent + 1) for x in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_text(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def emit_report(reports, path=None):
    """Write check reports as deterministic JSON (``"[]\\n"`` for none)."""
    text = dumps([r.to_dict() for r in reports]) + "\n"
    write_text(text, path)
    return text


# ---------------------------------------------------------------- shape specs


@dataclass
class ShapeSpec:
    kind: str
    params: dict = field(default_factory=dict)
    k: int = wf.DEFAULT_K

    def to_dict(self):
        return {"kind": self.kind, "k": self.k, **self.params}

    def support_function(self):
        p = self.params
        if self.kind == "constant":
            return wf.Constant(p["c"])
        if self.kind == "ellipse":
            return wf.Ellipse(p["a"], p["b"])
        if self.kind == "polygon_gamma":
            return wf.PolygonGamma(p["vertices"])
        if self.kind == "sampled":
            s = np.asarray(p["samples"], dtype=float)
            return wf.Sampled(s[:, 0], s[:, 1])
        raise SpecError("presets have no support function", "kind")


def _number(value, name, positive=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecError("expected a number", name)
    if not math.isfinite(value):
        raise SpecError("expected a finite number", name)
    if positive and value <= 0:
        raise SpecError("must be positive", name)
    return float(value)


def _pairs(value, name):
    if not isinstance(value, list):
        raise SpecError("expected a list of pairs", name)
    out = []
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != 2:
            raise SpecError("expected a pair", f"{name}[{i}]")
        out.append([_number(x, f"{name}[{i}][{j}]") for j, x in enumerate(row)])
    return out


def parse_shape_spec(text):
    """Validate a JSON shape spec; errors name the offending field."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise SpecError("a shape spec is a JSON object", "")
    kind = data.get("kind")
    if kind not in KIND_KEYS:
        raise SpecError(f"kind must be one of {', '.join(KIND_KEYS)}", "kind")
    allowed = set(KIND_KEYS[kind]) | {"kind", "k"}
    for key in data:
        if key not in allowed:
            raise SpecError("unknown key", key)
    for key in KIND_KEYS[kind]:
        if key not in data:
            raise SpecError("missing key", key)
    k = data.get("k", wf.DEFAULT_K)
    if isinstance(k, bool) or not isinstance(k, int) or k < wf.MIN_K:
        raise SpecError(f"k must be an integer >= {wf.MIN_K}", "k")
    if kind == "constant":
        params = {"c": _number(data["c"], "c", positive=True)}
    elif kind == "ellipse":
        params = {"a": _number(data["a"], "a", positive=True),
                  "b": _number(data["b"], "b", positive=True)}
    elif kind == "polygon_gamma":
        params = {"vertices": _pairs(data["vertices"], "vertices")}
    elif kind == "sampled":
        params = {"samples": _pairs(data["samples"], "samples")}
        for i, (_, g) in enumerate(params["samples"]):
            if g <= 0:
                raise SpecError("must be positive", f"samples[{i}][1]")
    else:
        name = data["name"]
        if not isinstance(name, str):
            raise SpecError("expected a preset name", "name")
        params = {"name": name}
    spec = ShapeSpec(kind, params, k)
    try:
        if kind == "preset":
            _check_preset_name(name)
        else:
            spec.support_function()
    except GeometryError as exc:
        raise SpecError(str(exc), KIND_KEYS[kind][0]) from None
    return spec


def _check_preset_name(name):
    fixed = [n for n in ps.PRESET_NAMES if not n.endswith(">")]
    if name in fixed:
        return
    if name.startswith("cap_"):
        ps.parse_cap_radius(name[4:])
        return
    raise SpecError(f"unknown preset (choose from {', '.join(ps.PRESET_NAMES)})", "name")


def emit_shape_spec(spec):
    return dumps(spec.to_dict()) + "\n"


@dataclass
class Shape:
    """A resolved spec: planar Wulff shape and spherical lift."""

    label: str
    planar: object
    spherical: object


def resolve(spec):
    if spec.kind == "preset":
        p = ps.get_preset(spec.params["name"], spec.k)
        planar = p.planar
        if planar is None:
            # the octant seen from its centre
            planar = wf.planar_chart(ps.centered_octant())
        return Shape(p.name, planar, p.spherical)
    w = wf.wulff_shape(spec.support_function(), spec.k)
    return Shape(spec.kind, w, wf.spherical_wulff(w))


# ---------------------------------------------------------------- commands


def _vertices(body):
    return [list(map(float, v)) for v in np.asarray(body.vertices)]


def cmd_build(spec):
    shape = resolve(spec)
    return {"shape": shape.label, "k": spec.k, "vertices": _vertices(shape.planar)}


def cmd_dual(spec):
    shape = resolve(spec)
    pair = wf.is_self_dual(shape.planar)
    return {"shape": shape.label, "k": spec.k, "primal": _vertices(pair.primal),
            "dual": _vertices(pair.dual), "hausdorff": pair.hausdorff_distance,
            "self_dual": bool(pair.self_dual), "tolerance": pair.tolerance}


def cmd_metrics(spec, tol=1e-6):
    shape = resolve(spec)
    body = shape.spherical
    w = mt.is_constant_width(body, tol)
    d = mt.diameter(body)
    cd = mt.is_constant_diameter(body, tol)
    return {
        "shape": shape.label,
        "width": {"min": w.min_width, "max": w.max_width, "constant": bool(w.constant),
                  "delta": w.delta, "argmin_center": w.argmin_center,
                  "argmax_center": w.argmax_center},
        "thickness": mt.thickness(body),
        "diameter": {"value": d.diameter, "witness_p": d.witness_p, "witness_q": d.witness_q,
                     "constant": bool(cd.constant), "min_farthest": cd.min_farthest},
        "tolerance": tol,
    }


def load_config(text=None, **overrides):
    """``RunConfig`` from optional JSON text plus command-line overrides."""
    data = {}
    if text:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
        if not isinstance(data, dict):
            raise SpecError("a run config is a JSON object", "")
        for key in data:
            if key not in CONFIG_KEYS:
                raise SpecError("unknown key", key)
    data.update({k: v for k, v in overrides.items() if v is not None})
    for key in ("seed", "trials", "k", "workers", "interior_samples", "boundary_samples"):
        if key in data and (isinstance(data[key], bool) or not isinstance(data[key], int)):
            raise SpecError("expected an integer", key)
    if data.get("trials", 1) < 1 or data.get("workers", 1) < 1:
        raise SpecError("must be positive", "trials" if data.get("trials", 1) < 1 else "workers")
    if data.get("k", wf.DEFAULT_K) < wf.MIN_K:
        raise SpecError(f"must be at least {wf.MIN_K}", "k")
    tols = data.get("tolerances", {})
    if not isinstance(tols, dict):
        raise SpecError("expected an object", "tolerances")
    for key, v in tols.items():
        if key not in ck.DEFAULT_TOLERANCES:
            raise SpecError("unknown tolerance", f"tolerances.{key}")
        if _number(v, f"tolerances.{key}") <= 0:
            raise SpecError("must be positive", f"tolerances.{key}")
    if "tol" in data and _number(data["tol"], "tol") < 0:
        raise SpecError("must be non-negative", "tol")
    checks = data.get("checks", [])
    if not isinstance(checks, list) or any(c not in ck.CHECK_NAMES for c in checks):
        raise SpecError(f"checks must be a list drawn from {', '.join(ck.CHECK_NAMES)}", "checks")
    data["checks"] = tuple(checks)
    return ck.RunConfig(**data)


def cmd_check(cfg):
    reports = ck.run_all(cfg)
    return reports, (EXIT_OK if ck.all_passed(reports) else EXIT_FAIL)


def boundary_curves(shape, k):
    primal = shape.planar
    dual = wf.dual_wulff(primal)
    return {"primal": np.asarray(primal.boundary(k)), "dual": np.asarray(dual.boundary(k))}


def cmd_render(spec, svg_path, csv_path=None):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    shape = resolve(spec)
    curves = boundary_curves(shape, spec.k)
    with matplotlib.rc_context({"svg.hashsalt": "wulffdual", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(5, 5))
        for name, style in (("primal", "-"), ("dual", "--")):
            c = curves[name]
            closed = np.vstack([c, c[:1]])
            ax.plot(closed[:, 0], closed[:, 1], style, color="k" if name == "primal" else "C3",
                    lw=1.2, label=name, gid=name)
        ax.plot([0.0], [0.0], "+", color="k", ms=8, gid="origin")
        ax.set_aspect("equal")
        ax.set_title(shape.label)
        ax.legend(loc="upper right", frameon=False)
        fig.savefig(svg_path, format="svg", metadata={"Date": None})
        plt.close(fig)
    if csv_path:
        with open(csv_path, "w", newline="", encoding="utf-8") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(["curve", "u", "v"])
            for name in ("primal", "dual"):
                for u, v in curves[name]:
                    out.writerow([name, _format_float(u), _format_float(v)])
    return {"shape": shape.label, "svg": svg_path, "csv": csv_path,
            "samples": {k: len(v) for k, v in curves.items()}}


# ---------------------------------------------------------------- entry point


def build_parser():
    parser = argparse.ArgumentParser(prog="wulffdual", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def shape_command(name, help_text):
        p = sub.add_parser(name, help=help_text)
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--spec", help="JSON shape spec file ('-' for stdin)")
        g.add_argument("--preset", help="preset name, shorthand for a preset spec")
        p.add_argument("--k", type=int, help="direction count (overrides the spec)")
        p.add_argument("--out", help="output JSON path (default stdout)")
        return p

    shape_command("build", "Wulff shape vertices")
    shape_command("dual", "dual Wulff shape and self-duality verdict")
    m = shape_command("metrics", "width, thickness and diameter of the spherical lift")
    m.add_argument("--tol", type=float, default=1e-6, help="constant width/diameter tolerance")
    r = shape_command("render", "SVG overlay of the shape and its dual, plus CSV samples")
    r.add_argument("--svg", required=True, help="SVG output path")
    r.add_argument("--csv", help="CSV output path")

    c = sub.add_parser("check", help="run the numerical checks")
    c.add_argument("--spec", help="JSON run config file")
    c.add_argument("--k", type=int)
    c.add_argument("--seed", type=int)
    c.add_argument("--trials", type=int)
    c.add_argument("--tol", type=float, help="one tolerance for every check")
    c.add_argument("--workers", type=int)
    c.add_argument("--checks", nargs="+", metavar="NAME", choices=ck.CHECK_NAMES)
    c.add_argument("--out", help="report path (default stdout)")
    return parser


def _read(path):
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror}", "spec") from None


def _shape_spec(args):
    if args.preset is not None:
        spec = parse_shape_spec(json.dumps({"kind": "preset", "name": args.preset}))
    else:
        spec = parse_shape_spec(_read(args.spec))
    if args.k is not None:
        if args.k < wf.MIN_K:
            raise SpecError(f"k must be an integer >= {wf.MIN_K}", "k")
        spec.k = args.k
    return spec


def _error(exc):
    payload = {"code": getattr(exc, "code", "error"), "message": str(exc)}
    if getattr(exc, "field", None):
        payload["field"] = exc.field
    sys.stderr.write(dumps(payload) + "\n")


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        if args.command == "check":
            cfg = load_config(_read(args.spec) if args.spec else None, seed=args.seed,
                              trials=args.trials, k=args.k, tol=args.tol, workers=args.workers,
                              checks=args.checks)
            reports, status = cmd_check(cfg)
            emit_report(reports, args.out)
            return status
        spec = _shape_spec(args)
        if args.command == "build":
            result = cmd_build(spec)
        elif args.command == "dual":
            result = cmd_dual(spec)
        elif args.command == "metrics":
            result = cmd_metrics(spec, args.tol)
        else:
            result = cmd_render(spec, args.svg, args.csv)
        write_text(dumps(result) + "\n", args.out)
        return EXIT_OK
    except (SpecError, GeometryError) as exc:
        _error(exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
