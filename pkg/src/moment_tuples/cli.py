"""Command-line front end: derive, analyze, estimate, refine, gen.

Every command echoes its resolved configuration inside the JSON output, so
a run can be reproduced from its own report.  Exit codes: 0 success,
2 argument or input error, 3 degenerate input, 4 ambiguity.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from . import io as geo_io
from .derivation import derive_tuples, load_tuples, save_tuples
from .errors import AmbiguityError, DegenerateInputError
from .estimation import (
    MODE_ALLOW_REFLECTION,
    MODE_ROTATION_ONLY,
    estimate_orthogonal,
    estimate_reflection_composition,
)
from .generators import BasisSpec
from .moments import image_to_cloud
from .pipeline import analyze_cloud, tuple_rows_csv, tuple_set_of_cloud
from .refinement import RefinementConfig, refine_planes
from .shapes import RECT_VARIANTS, SHAPE_NAMES, make_shape
from .symmetry import CLASS_AXIAL, Thresholds

ENV_PREFIX = "MOMENT_TUPLES_"

EXIT_OK = 0
EXIT_ARGUMENT = 2
EXIT_DEGENERATE = 3
EXIT_AMBIGUOUS = 4


def _env_default(name: str, fallback: float) -> float:
    raw = os.environ.get(ENV_PREFIX + name)
    return float(raw) if raw else fallback


@dataclasses.dataclass
class RunConfig:
    """Resolved parameters of one CLI invocation (fully serializable)."""

    subcommand: str
    inputs: list[str]
    dimension: int | None = None
    specs: list[str] | None = None
    tuples_file: str | None = None
    tau_plane: float | None = None
    tau_axis: float | None = None
    tau_point: float | None = None
    threshold: float | None = None
    mode: str | None = None
    axis: list[float] | None = None
    refinement: dict | None = None
    b_max: int | None = None
    output: str | None = None
    csv: str | None = None
    seed: int | None = None
    points: int | None = None
    variant: str | None = None

    def as_dict(self) -> dict:
        return {k: v for k, v in dataclasses.asdict(self).items() if v is not None}


def _emit(doc: dict, out_path: str | None) -> None:
    text = json.dumps(doc, indent=1)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)


def _load_input_cloud(path: str, dimension: int | None, threshold: float):
    if path.lower().endswith(".pgm"):
        return image_to_cloud(geo_io.load_pgm(path), threshold)
    return geo_io.load_cloud(path, dimension)


def _thresholds(args) -> Thresholds:
    return Thresholds(
        tau_plane=args.tau_plane, tau_axis=args.tau_axis, tau_point=args.tau_point
    )


def cmd_derive(args) -> int:
    specs = [BasisSpec.parse(args.dim, s) for s in args.spec]
    config = RunConfig(
        subcommand="derive",
        inputs=[],
        dimension=args.dim,
        specs=[s.key() for s in specs],
        output=args.out,
    )
    definitions = []
    dims = {}
    for spec in specs:
        derived = derive_tuples(spec)
        dims[spec.key()] = len(derived)
        print(f"spec {spec}: nullspace dimension {len(derived)}", file=sys.stderr)
        definitions.extend(derived)
    if not definitions:
        print("warning: no tuples derivable from the requested specs", file=sys.stderr)
    save_tuples(args.out, definitions)
    _emit(
        {
            "config": config.as_dict(),
            "nullspace_dimensions": dims,
            "tuples_written": len(definitions),
            "path": args.out,
        },
        None,
    )
    return EXIT_OK


def _battery_defs(args, dimension: int):
    if args.tuples:
        return load_tuples(args.tuples, dimension)
    from .pipeline import battery_definitions

    specs = (
        [BasisSpec.parse(dimension, s).factors for s in args.spec]
        if args.spec
        else None
    )
    return battery_definitions(dimension, specs)


def cmd_analyze(args) -> int:
    cloud = _load_input_cloud(args.input, args.dim, args.threshold)
    defs = _battery_defs(args, cloud.dimension)
    report, tuple_set = analyze_cloud(cloud, defs, _thresholds(args))
    config = RunConfig(
        subcommand="analyze",
        inputs=[args.input],
        dimension=cloud.dimension,
        specs=sorted({k for k, _ in tuple_set.provenance}),
        tuples_file=args.tuples,
        tau_plane=args.tau_plane,
        tau_axis=args.tau_axis,
        tau_point=args.tau_point,
        threshold=args.threshold,
        output=args.out,
        csv=args.csv,
    )
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(tuple_rows_csv(tuple_set))
    _emit({"config": config.as_dict(), "report": report.to_dict()}, args.out)
    return EXIT_OK


def cmd_estimate(args) -> int:
    cloud_a = _load_input_cloud(args.input_a, args.dim, args.threshold)
    cloud_b = _load_input_cloud(args.input_b, args.dim, args.threshold)
    defs = _battery_defs(args, cloud_a.dimension)
    set_a = tuple_set_of_cloud(cloud_a, defs)
    set_b = tuple_set_of_cloud(cloud_b, defs)
    config = RunConfig(
        subcommand="estimate",
        inputs=[args.input_a, args.input_b],
        dimension=cloud_a.dimension,
        tuples_file=args.tuples,
        mode=args.mode,
        output=args.out,
    )
    if args.mode == MODE_ALLOW_REFLECTION:
        rotation, reflection, estimate = estimate_reflection_composition(set_a, set_b)
        doc = estimate.to_dict()
        doc["rotation_factor"] = [[float(v) for v in row] for row in rotation]
        doc["reflection_factor"] = [[float(v) for v in row] for row in reflection]
    else:
        estimate = estimate_orthogonal(set_a, set_b, MODE_ROTATION_ONLY)
        doc = estimate.to_dict()
        if estimate.det_conflict:
            print(
                "warning: data is better explained by a reflection; "
                "rerun with --mode allow_reflection",
                file=sys.stderr,
            )
    _emit({"config": config.as_dict(), "estimate": doc}, args.out)
    return EXIT_OK


def cmd_refine(args) -> int:
    cloud = _load_input_cloud(args.input, 3, args.threshold)
    if args.axis:
        axis = np.array([float(v) for v in args.axis.split(",")])
        if axis.shape != (3,):
            raise ValueError("--axis expects three comma-separated numbers")
    elif args.report:
        with open(args.report, encoding="utf-8") as fh:
            rep = json.load(fh).get("report", {})
        if rep.get("classification") != CLASS_AXIAL or not rep.get("axis"):
            raise ValueError(
                "report does not carry an axial classification; pass --axis explicitly"
            )
        axis = np.array(rep["axis"], dtype=float)
    else:
        raise ValueError("refine requires --axis or --report")
    cfg = RefinementConfig(
        grid_step_deg=args.grid_step,
        min_angular_separation_deg=args.min_separation,
        accept_residual=args.accept_residual,
        max_iters=args.max_iters,
    )
    from .moments import center_cloud

    centered, _ = center_cloud(cloud)
    result = refine_planes(centered, axis, args.b_max, cfg)
    config = RunConfig(
        subcommand="refine",
        inputs=[args.input],
        dimension=3,
        axis=[float(v) for v in axis],
        refinement=cfg.to_dict(),
        b_max=args.b_max,
        output=args.out,
    )
    _emit({"config": config.as_dict(), "result": result.to_dict()}, args.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    shape = make_shape(args.shape, n_points=args.points, seed=args.seed, variant=args.variant)
    config = RunConfig(
        subcommand="gen",
        inputs=[],
        output=args.out,
        seed=args.seed,
        points=args.points,
        variant=args.variant if args.shape == "rect" else None,
    )
    if args.shape == "rect":
        geo_io.save_pgm(args.out, shape)
    else:
        geo_io.save_xyz(args.out, shape)
    _emit({"config": config.as_dict(), "shape": args.shape, "path": args.out}, None)
    return EXIT_OK


def _add_threshold_args(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--tau-plane",
        type=float,
        default=_env_default("TAU_PLANE", 100.0),
        help="sigma1/sigma_n ratio above which symmetry is planar",
    )
    p.add_argument(
        "--tau-axis",
        type=float,
        default=_env_default("TAU_AXIS", 100.0),
        help="sigma1/sigma2 ratio above which symmetry is axial (3-D)",
    )
    p.add_argument(
        "--tau-point",
        type=float,
        default=_env_default("TAU_POINT", 1.0),
        help="multiplier on the point-symmetry floor",
    )


def _add_battery_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tuples", help="tuple-definition JSON file (from derive)")
    p.add_argument(
        "--spec",
        action="append",
        help="derive this battery spec on the fly (p:k[,p:k...]); repeatable",
    )
    p.add_argument("--dim", type=int, default=None, help="cloud dimension for XYZ input")
    p.add_argument(
        "--threshold", type=float, default=0.5, help="binarization threshold for images"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="moment-tuples",
        description="Equivariant moment n-tuples: symmetry detection and "
        "orthogonal transform estimation.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("derive", help="derive tuple coefficient sets")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--spec", action="append", required=True, help="p:k[,p:k...]; repeatable")
    p.add_argument("--out", required=True, help="output tuple JSON path")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("analyze", help="classify the symmetry of a cloud or image")
    p.add_argument("input", help="point cloud (.xyz/.ply) or image (.pgm)")
    _add_battery_args(p)
    _add_threshold_args(p)
    p.add_argument("--out", help="write the JSON report here as well as stdout")
    p.add_argument("--csv", help="write evaluated tuple rows as CSV")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("estimate", help="estimate the orthogonal transform between two poses")
    p.add_argument("input_a")
    p.add_argument("input_b")
    _add_battery_args(p)
    p.add_argument(
        "--mode",
        choices=[MODE_ROTATION_ONLY, MODE_ALLOW_REFLECTION],
        default=MODE_ROTATION_ONLY,
    )
    p.add_argument("--out")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("refine", help="find discrete mirror planes around an axis")
    p.add_argument("input")
    p.add_argument("--axis", help="axis as 'x,y,z'")
    p.add_argument("--report", help="analyze report JSON with an axial classification")
    p.add_argument("--b-max", type=int, default=8)
    p.add_argument("--grid-step", type=float, default=2.0)
    p.add_argument("--min-separation", type=float, default=5.0)
    p.add_argument("--accept-residual", type=float, default=0.02)
    p.add_argument("--max-iters", type=int, default=20)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--out")
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("gen", help="generate a synthetic benchmark shape")
    p.add_argument("shape", choices=SHAPE_NAMES)
    p.add_argument("--out", required=True)
    p.add_argument("--points", type=int, default=6000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--variant", choices=RECT_VARIANTS, default="mirror-x")
    p.set_defaults(func=cmd_gen)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DegenerateInputError as exc:
        print(f"error: degenerate input: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except AmbiguityError as exc:
        print(f"error: ambiguous: {exc}", file=sys.stderr)
        return EXIT_AMBIGUOUS
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGUMENT


if __name__ == "__main__":
    sys.exit(main())
