"""Command-line interface.

Subcommands map one-to-one onto the library pipelines:

    entropy       boundary-set file -> entropy and complementary-arc table
    construct     boundary-set file -> weight grid CSV + map spec JSON
    detect        map spec + lambda list -> derivative reports
    clark         map spec -> Clark density / arc-mass report
    disintegrate  map spec + test function -> disintegration identity gap
    forward       map spec + arc -> outer function with prescribed modulus
    levelsets     weight grid + thresholds + candidates -> level-set report
    verify        boundary-set file -> end-to-end verification report

Exit codes: 0 all asserted checks passed, 2 inconclusive verdicts present,
1 failure or error.  Reports embed the resolved configuration and contain
no wall-clock data unless --timing is passed, so identical inputs produce
byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
from fractions import Fraction

import numpy as np

from .angular import RefinementControl, detect_many, reports_to_csv
from .characterize import (
    construct_from_set,
    forward_outer,
    level_sets,
    verify_characterization,
)
from .circle import (
    ArcInterval,
    CirclePoint,
    ValidationError,
    complementary_arcs,
    entropy,
    load_boundary_set,
)
from .clark import clark_density, disintegration_check, measure_of_arc, total_mass
from .discmap import ConstantMap, load_map, map_to_json
from .harmonic import GridFunction, grid_from_function

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2


def _parse_turn_arg(text: str) -> CirclePoint:
    return CirclePoint.from_string(text)


def _parse_arc(text: str) -> ArcInterval:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValidationError("arc must be 'start_p/q,length_p/q'")
    start = CirclePoint.from_string(parts[0])
    length = Fraction(parts[1])
    return ArcInterval(start, length)


def _parse_radii(text: str) -> list[float]:
    if text.startswith("dyadic:"):
        parts = text.split(":")
        if len(parts) != 3:
            raise ValidationError("dyadic radii spec is 'dyadic:J_MIN:J_MAX'")
        j0, j1 = int(parts[1]), int(parts[2])
        if not (0 < j0 <= j1 <= 40):
            raise ValidationError("dyadic ladder exponents out of range")
        return [1.0 - 2.0 ** -j for j in range(j0, j1 + 1)]
    radii = [float(x) for x in text.split(",")]
    return radii


def _atomic_write(path: str, data: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".clarkkit-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, doc: dict, csv_text: str | None = None) -> None:
    if args.format == "csv" and csv_text is not None:
        payload = csv_text
    else:
        payload = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        _atomic_write(args.out, payload)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(payload)


def _config_block(args) -> dict:
    return {
        "grid_log2": args.grid_log2,
        "depth": args.depth,
        "tol": args.tol,
        "radii": args.radii,
        "alpha": args.alpha,
        "mode": getattr(args, "mode", None),
        "format": args.format,
    }


def _control(args) -> RefinementControl:
    return RefinementControl(max_depth=args.depth, base_grid_log2=args.grid_log2)


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_entropy(args) -> int:
    S = load_boundary_set(args.setfile)
    arcs = complementary_arcs(S)
    value = entropy(S)
    doc = {
        "command": "entropy",
        "config": _config_block(args),
        "entropy": value,
        "arc_count": len(arcs),
        "arcs": [
            {"start": str(a.start), "length": f"{a.length.numerator}/{a.length.denominator}"}
            for a in arcs
        ],
    }
    if not args.out and args.format == "json":
        print(f"{value:.6f}")
        for a in arcs:
            print(f"  arc start {a.start}  length {a.length}")
        return EXIT_OK
    csv_text = "start,length\n" + "\n".join(f"{a.start},{a.length}" for a in arcs) + "\n"
    _emit(args, doc, csv_text)
    return EXIT_OK


def _cmd_construct(args) -> int:
    S = load_boundary_set(args.setfile)
    result = construct_from_set(S, mode=args.mode or "auto", k=args.grid_log2)
    base = args.out or "construction"
    phi_csv = base + "_phi.csv"
    density_csv = base + "_density.csv"
    map_json = base + "_map.json"
    result.phi_boundary.save_csv(phi_csv)
    result.density().save_csv(density_csv)
    if isinstance(result.map, ConstantMap):
        spec = map_to_json(result.map)
    else:
        spec = map_to_json(result.map, grid_csv=os.path.basename(density_csv))
    _atomic_write(map_json, json.dumps(spec, indent=2, sort_keys=True) + "\n")
    doc = {
        "command": "construct",
        "config": _config_block(args),
        "mode": result.mode,
        "phi_norm": result.phi_norm,
        "map_f0": [float(np.real(result.map.eval(0.0))), float(np.imag(result.map.eval(0.0)))],
        "files": {"phi_csv": phi_csv, "density_csv": density_csv, "map_json": map_json},
    }
    sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def _cmd_detect(args) -> int:
    f = load_map(args.mapfile)
    lambdas = [_parse_turn_arg(t) for t in args.lam.split(",")]
    ctrl = _control(args)
    alpha = _parse_turn_arg(args.alpha)
    reports = detect_many(f, lambdas, alpha, ctrl)
    doc = {
        "command": "detect",
        "config": _config_block(args),
        "reports": [r.to_dict() for r in reports],
    }
    _emit(args, doc, reports_to_csv(reports))
    if any(r.verdict.kind == "undetermined" for r in reports):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _cmd_clark(args) -> int:
    f = load_map(args.mapfile)
    alpha = _parse_turn_arg(args.alpha)
    radii = _parse_radii(args.radii)
    dens = clark_density(f, alpha, r=radii[-1], k=args.grid_log2)
    doc = {
        "command": "clark",
        "config": _config_block(args),
        "alpha": str(alpha),
        "total_mass": total_mass(f, alpha),
        "density": {
            "r": dens.r,
            "mean": float(np.mean(dens.density.values)),
            "min": float(np.min(dens.density.values)),
            "max": float(np.max(dens.density.values)),
            "flagged_nodes": list(dens.flagged),
        },
    }
    status = EXIT_OK
    if args.arc:
        arc = _parse_arc(args.arc)
        report = measure_of_arc(f, alpha, arc, r_ladder=radii, k=args.grid_log2)
        doc["arc"] = {
            "start": str(arc.start),
            "length": f"{arc.length.numerator}/{arc.length.denominator}",
            "total": report.total,
            "ac_mass": report.ac_mass,
            "singular_mass": report.singular_mass,
            "ladder": [[r, v] for r, v in report.ladder],
            "verdict": report.verdict,
        }
        if report.verdict != "converged":
            status = EXIT_INCONCLUSIVE
    if args.density_out:
        dens.density.save_csv(args.density_out)
        doc["files"] = {"density_csv": args.density_out}
    _emit(args, doc)
    return status


_BUILTIN_H = {
    "one": lambda t: np.ones_like(t),
    "cos": np.cos,
    "sin": np.sin,
    "cos2": lambda t: np.cos(2 * t),
    "sin2": lambda t: np.sin(2 * t),
}


def _cmd_disintegrate(args) -> int:
    f = load_map(args.mapfile)
    if args.h_csv:
        h = GridFunction.load_csv(args.h_csv)
    else:
        if args.h not in _BUILTIN_H:
            raise ValidationError(f"unknown test function {args.h!r}; use one of {sorted(_BUILTIN_H)}")
        h = grid_from_function(_BUILTIN_H[args.h], args.grid_log2)
    report = disintegration_check(f, h, k_alpha=args.k_alpha, allow_ac_only=args.allow_ac_only)
    doc = {
        "command": "disintegrate",
        "config": _config_block(args),
        "h": args.h_csv or args.h,
        "k_alpha": args.k_alpha,
        "lhs": report.lhs,
        "rhs": report.rhs,
        "gap": report.gap,
        "method": report.method,
        "within_tol": bool(report.gap <= args.tol),
    }
    _emit(args, doc)
    return EXIT_OK if report.gap <= args.tol else EXIT_ERROR


def _cmd_forward(args) -> int:
    f = load_map(args.mapfile)
    arc = _parse_arc(args.arc)
    alpha = _parse_turn_arg(args.alpha)
    result = forward_outer(f, arc, k=args.grid_log2, alpha=alpha)
    base = args.out or "forward"
    out_csv = base + "_F.csv"
    result.boundary.save_csv(out_csv)
    doc = {
        "command": "forward",
        "config": _config_block(args),
        "alpha_used": str(result.alpha_used),
        "arc_singular_mass": result.singular_mass,
        "nonextremality": {
            "verdict": result.nonextremality.verdict,
            "value": result.nonextremality.value,
        },
        "F_origin": [float(np.real(result.evaluator(0.0))), float(np.imag(result.evaluator(0.0)))],
        "files": {"F_csv": out_csv},
    }
    sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def _cmd_levelsets(args) -> int:
    phi = GridFunction.load_csv(args.phicsv)
    thresholds = [float(x) for x in args.thresholds.split(",")]
    candidates = [_parse_turn_arg(t) for t in args.lam.split(",")]
    reports = level_sets(phi, thresholds, candidates, _control(args))
    doc = {
        "command": "levelsets",
        "config": _config_block(args),
        "levels": [
            {
                "n": rep.n,
                "members": [[str(p), est] for p, est in rep.members],
                "non_members": [[str(p), v] for p, v in rep.non_members_sampled],
                "undetermined": [str(p) for p in rep.undetermined],
            }
            for rep in reports
        ],
    }
    _emit(args, doc)
    if any(rep.undetermined for rep in reports):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _cmd_verify(args) -> int:
    S = load_boundary_set(args.setfile)
    offsets = []
    if args.probe_offsets:
        offsets = [Fraction(x) for x in args.probe_offsets.split(",")]
    report = verify_characterization(S, offsets, _control(args), mode=args.mode or "auto")
    doc = {"command": "verify", "config": _config_block(args)}
    doc.update(report.to_dict())
    _emit(args, doc)
    if report.overall == "pass":
        return EXIT_OK
    if report.overall == "inconclusive":
        return EXIT_INCONCLUSIVE
    return EXIT_ERROR


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clarkkit",
        description="Clark measures, boundary entropy, and angular-derivative detection.",
    )
    parser.add_argument("--grid-log2", type=int, default=12, dest="grid_log2",
                        help="log2 of the boundary grid size (default 12)")
    parser.add_argument("--depth", type=int, default=14,
                        help="dyadic refinement depth (default 14)")
    parser.add_argument("--tol", type=float, default=1e-6,
                        help="tolerance for asserted checks (default 1e-6)")
    parser.add_argument("--radii", default="dyadic:4:10",
                        help="radial ladder: 'dyadic:J_MIN:J_MAX' or comma floats")
    parser.add_argument("--alpha", default="0/1",
                        help="spectral parameter as a rational turn p/q (default 0/1, i.e. alpha = 1)")
    parser.add_argument("--out", default=None, help="output file (written atomically)")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--timing", action="store_true",
                        help="append wall-clock timing to the report")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="entropy and complementary arcs of a boundary set")
    p.add_argument("setfile")
    p.set_defaults(func=_cmd_entropy, mode=None)

    p = sub.add_parser("construct", help="build the outer weight and self-map for a set")
    p.add_argument("setfile")
    p.add_argument("--mode", choices=("polynomial", "distance", "auto"), default="auto")
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("detect", help="angular-derivative detection at given points")
    p.add_argument("mapfile")
    p.add_argument("--lambda", dest="lam", required=True,
                   help="comma-separated rational turns, e.g. 0/1,1/4,1/2")
    p.set_defaults(func=_cmd_detect, mode=None)

    p = sub.add_parser("clark", help="Clark density and arc masses")
    p.add_argument("mapfile")
    p.add_argument("--arc", default=None, help="arc as 'start_p/q,length_p/q'")
    p.add_argument("--density-out", dest="density_out", default=None,
                   help="write the density grid to this CSV")
    p.set_defaults(func=_cmd_clark, mode=None)

    p = sub.add_parser("disintegrate", help="disintegration identity check")
    p.add_argument("mapfile")
    p.add_argument("--h", default="cos", help=f"test function: {sorted(_BUILTIN_H)}")
    p.add_argument("--h-csv", dest="h_csv", default=None, help="test function as a grid CSV")
    p.add_argument("--k-alpha", dest="k_alpha", type=int, default=10)
    p.add_argument("--allow-ac-only", dest="allow_ac_only", action="store_true")
    p.set_defaults(func=_cmd_disintegrate, mode=None)

    p = sub.add_parser("forward", help="outer function with prescribed arc modulus")
    p.add_argument("mapfile")
    p.add_argument("--arc", required=True, help="arc as 'start_p/q,length_p/q'")
    p.set_defaults(func=_cmd_forward, mode=None)

    p = sub.add_parser("levelsets", help="criterion-norm level sets of a weight")
    p.add_argument("phicsv")
    p.add_argument("--thresholds", default="1,2,4,8")
    p.add_argument("--lambda", dest="lam", required=True)
    p.set_defaults(func=_cmd_levelsets, mode=None)

    p = sub.add_parser("verify", help="end-to-end verification of a boundary set")
    p.add_argument("setfile")
    p.add_argument("--mode", choices=("polynomial", "distance", "auto"), default="auto")
    p.add_argument("--probe-offsets", dest="probe_offsets", default=None,
                   help="comma-separated rational offsets from members")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.monotonic()
    try:
        code = args.func(args)
    except (ValidationError, OSError, ValueError) as exc:
        error_doc = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        sys.stdout.write(json.dumps(error_doc, indent=2, sort_keys=True) + "\n")
        return EXIT_ERROR
    if args.timing:
        sys.stderr.write(f"elapsed: {time.monotonic() - start:.3f} s\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
