"""Command-line front end.

Exit codes: 0 success, 1 a verification ran but failed its tolerance,
2 malformed input or flags, 3 mathematical precondition failure,
4 I/O failure, 5 internal error.  Every failure prints a JSON object
``{"error": {"kind": ..., "message": ..., "path": ...}}``.
"""

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import schemas
from .area import DEFAULT_OUTER, growth_scan
from .classify import (classification_json, classify, normal_form_from_json, pushforward,
                       roundtrip_residual)
from .devmap import (FLATNESS_TOL, DevelopingMap, MetricDensity, density_of,
                     flatness_residual)
from .errors import FlatsingError, SchemaError
from .sampling import random_change
from .symmetry import (SymmetryElement, composition_profile, compose_elements, element_to_change,
                       invariance_report, verify_composition, verify_invariance)

COMMANDS = ("classify", "normalize", "area-scan", "symmetry-compose",
            "symmetry-verify", "flatness", "roundtrip")

# coefficients compared by roundtrip; higher ones carry the growth of 1/h
ROUNDTRIP_UPTO = 16

EXIT_FAIL, EXIT_SCHEMA, EXIT_MATH, EXIT_IO, EXIT_INTERNAL = 1, 2, 3, 4, 5


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise SchemaError(message, path="argv")


def build_parser():
    p = _Parser(prog="flatsing", description="Normal forms of isolated flat singularities.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("input_path", help="JSON input file, or - for stdin")
    p.add_argument("--order", type=int, default=32)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default=None)
    p.add_argument("--root-index", type=int, default=0)
    p.add_argument("--r-min", type=float, default=10.0)
    p.add_argument("--r-max", type=float, default=1e4)
    p.add_argument("--r-count", type=int, default=40)
    p.add_argument("--outer", type=float, default=DEFAULT_OUTER, help="outer radius R of the scanned annuli")
    return p


def _cj(z):
    return [float(z.real), float(z.imag)]


def _dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write_atomic(path, text):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=".flatsing-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_json(path):
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg} at line {exc.lineno}", path="") from None


def _load_map(obj):
    schemas.validate(obj, schemas.DEVMAP)
    return DevelopingMap.from_json(obj)


def _load_metric(obj, order):
    """A density from a developing map, a density, or a normal-form description."""
    if not isinstance(obj, dict):
        raise SchemaError("expected a JSON object", path="")
    if "psi" in obj:
        return density_of(_load_map(obj))
    if "G" in obj:
        schemas.validate(obj, schemas.DENSITY)
        return MetricDensity.from_json(obj)
    schemas.validate(obj, schemas.FORM)
    return normal_form_from_json(obj).density(order)


def _same_invariants(f1, f2, tol):
    if f1.tag != f2.tag:
        return False
    a, b = f1.to_json(), f2.to_json()
    for key in a:
        if key == "form":
            continue
        if key == "n" and a[key] != b[key]:
            return False
        if abs(a[key] - b[key]) > tol * max(1.0, abs(a[key])):
            return False
    return True


def run(args):
    """Execute one job; returns ``(exit_code, stdout_text, extra_files)``."""
    if args.order < 4:
        raise SchemaError("order must be at least 4", path="--order")
    if not args.tol > 0:
        raise SchemaError("tol must be positive", path="--tol")
    obj = _read_json(args.input_path)
    files = {}
    code = 0
    cmd = args.command

    if cmd == "classify":
        form, ch = classify(_load_map(obj), args.order, args.root_index)
        out = classification_json(form, ch)

    elif cmd == "normalize":
        fmap = _load_map(obj)
        form, ch = classify(fmap, args.order, args.root_index)
        out = classification_json(form, ch)
        out["inverse"] = ch.inverse().h.to_json()
        out["density"] = pushforward(density_of(fmap), ch).to_json()
        out["normal_density"] = form.density(args.order).to_json()

    elif cmd == "roundtrip":
        fmap = _load_map(obj)
        form, ch = classify(fmap, args.order, args.root_index)
        upto = min(args.order, ROUNDTRIP_UPTO)
        rt = roundtrip_residual(fmap, form, ch, upto=upto)
        rng = np.random.default_rng(args.seed)
        k = random_change(rng, fmap.psi.order)
        form2, ch2 = classify(fmap.substitute(k.h), args.order, args.root_index)
        rt2 = roundtrip_residual(fmap.substitute(k.h), form2, ch2, upto=upto)
        match = _same_invariants(form, form2, 1e-8)
        ok = rt.residual < args.tol and rt2.residual < args.tol and match
        out = {
            "form": form.to_json(),
            "forward": rt.forward,
            "backward": rt.backward,
            "inverse_scale": rt.inverse_scale,
            "residual": rt.residual,
            "perturbed": {"form": form2.to_json(), "residual": rt2.residual,
                          "change": k.h.to_json()},
            "invariants_match": match,
            "tol": args.tol,
            "upto": upto,
            "pass": bool(ok),
        }
        code = 0 if ok else EXIT_FAIL

    elif cmd == "flatness":
        res = flatness_residual(_load_metric(obj, args.order))
        out = {"residual": res, "threshold": FLATNESS_TOL, "pass": bool(res < FLATNESS_TOL)}
        code = 0 if out["pass"] else EXIT_FAIL

    elif cmd == "area-scan":
        if args.r_count < 3:
            raise SchemaError("r-count must be at least 3", path="--r-count")
        d = _load_metric(obj, args.order)
        r_values = np.logspace(np.log10(args.r_min), np.log10(args.r_max), args.r_count)
        scan = growth_scan(d, args.outer, r_values)
        out = scan.to_json()
        if args.output:
            files[args.output] = scan.to_csv()
            files[str(Path(args.output).with_suffix(".json"))] = _dumps(out)
            return code, _dumps(out), files
        out["samples"] = [[r, a] for r, a in scan.samples]

    elif cmd == "symmetry-compose":
        schemas.validate(obj, schemas.COMPOSE_JOB)
        form = normal_form_from_json(obj["form"])
        g1, g2 = SymmetryElement.from_json(obj["g1"]), SymmetryElement.from_json(obj["g2"])
        res = verify_composition(g1, g2, form, args.order)
        g = compose_elements(g1, g2, form)
        out = {
            "composed": g.to_json(),
            "residual": res,
            "profile_max": float(np.max(composition_profile(g1, g2, form, args.order))),
            "pass": bool(res < args.tol),
        }
        if g.family == "M3":
            # series coordinates (h(0), h^(n)(0)/n!) of the composed element
            h = element_to_change(g, form, args.order).h
            out["series_coordinates"] = {"h0": _cj(h.coeff(0)), "hn": _cj(h.coeff(form.n))}
        code = 0 if out["pass"] else EXIT_FAIL

    elif cmd == "symmetry-verify":
        schemas.validate(obj, schemas.VERIFY_JOB)
        form = normal_form_from_json(obj["form"])
        g = SymmetryElement.from_json(obj["element"])
        raw, scale = invariance_report(form, g, args.order)
        res = verify_invariance(form, g, args.order)
        out = {"residual": res, "raw_residual": raw, "coefficient_scale": scale,
               "pass": bool(res < args.tol)}
        code = 0 if out["pass"] else EXIT_FAIL

    text = _dumps(out)
    if args.output:
        files[args.output] = text
    return code, text, files


def _error(kind, exc, path=""):
    return _dumps({"error": {"kind": kind, "message": str(exc), "path": path}})


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        code, text, files = run(args)
        for path, body in files.items():
            _write_atomic(path, body)
        sys.stdout.write(text)
        return code
    except SchemaError as exc:
        sys.stdout.write(_error("schema", exc, exc.path))
        return EXIT_SCHEMA
    except FlatsingError as exc:
        sys.stdout.write(_error("math", exc))
        return EXIT_MATH
    except OSError as exc:
        sys.stdout.write(_error("io", exc, getattr(exc, "filename", "") or ""))
        return EXIT_IO
    except Exception as exc:  # structured report instead of a traceback
        sys.stdout.write(_error("internal", f"{type(exc).__name__}: {exc}"))
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
