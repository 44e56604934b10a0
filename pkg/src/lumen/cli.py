"""Command-line frontend: generate synthetic scenes, estimate disparity,
and evaluate results against ground truth.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
Verbosity is controlled by the LUMEN_LOG environment variable (DEBUG, INFO,
WARNING, ...).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from .core import ColorSpace, ContractViolation, DataError, DisparityField, LumenError, NumericalError
from .lfio import load_lightfield, read_pfm, render_disparity_png, save_lightfield, write_pfm
from .metrics import relative_error_report
from .pipeline import Diagnostics, PipelineConfig, estimate
from .postproc import GuidedMedianConfig
from .solver import Penalizer, SolverConfig
from .synth import Plane, SceneSpec, Slope, Step, generate

logger = logging.getLogger("lumen.cli")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3

# alpha/gamma have no universal defaults (they are tuned per dataset);
# profiles ship two documented starting points.
PROFILES = {
    "synthetic": {"alpha": 0.02, "gamma": 0.5},
    "lytro-like": {"alpha": 4.0, "gamma": 2.0},
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _parse_pair(text: str, sep: str, what: str) -> tuple[int, int]:
    parts = text.lower().split(sep)
    if len(parts) != 2:
        raise _UsageError(f"bad {what} {text!r}, expected e.g. 64{sep}64")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise _UsageError(f"bad {what} {text!r}") from exc


def _parse_scene(kind: str, disparity: str, width: int):
    parts = [p for p in disparity.split(",") if p != ""]
    try:
        nums = [float(p) for p in parts]
    except ValueError as exc:
        raise _UsageError(f"bad --disparity {disparity!r}") from exc
    if kind == "plane":
        if len(nums) != 1:
            raise _UsageError("plane scene takes --disparity D")
        return Plane(nums[0])
    if kind == "step":
        if len(nums) == 2:
            return Step(nums[0], nums[1], width // 2)
        if len(nums) == 3:
            return Step(nums[0], nums[1], int(nums[2]))
        raise _UsageError("step scene takes --disparity LEFT,RIGHT[,EDGE]")
    if len(nums) != 2:
        raise _UsageError("slope scene takes --disparity MIN,MAX")
    return Slope(nums[0], nums[1])


def _build_parser() -> _Parser:
    parser = _Parser(prog="lumen", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="render a synthetic light-field with ground truth")
    gen.add_argument("--out", required=True, help="output light-field directory")
    gen.add_argument("--scene", required=True, choices=["plane", "step", "slope"])
    gen.add_argument("--disparity", required=True,
                     help="plane: D; step: LEFT,RIGHT[,EDGE]; slope: MIN,MAX")
    gen.add_argument("--views", default="3x3", help="directional grid, e.g. 3x3")
    gen.add_argument("--size", default="64x64", help="spatial size, e.g. 64x64")
    gen.add_argument("--seed", type=int, default=0)

    est = sub.add_parser("estimate", help="estimate a disparity map from a light-field")
    est.add_argument("--input", required=True, help="light-field directory")
    est.add_argument("--out", required=True, help="output directory")
    est.add_argument("--alpha", type=float, help="smoothness weight")
    est.add_argument("--gamma", type=float, help="gradient-constancy weight")
    est.add_argument("--profile", choices=sorted(PROFILES),
                     help="named alpha/gamma starting point")
    est.add_argument("--sigma", type=float, default=0.5)
    est.add_argument("--eta", type=float, default=0.8)
    est.add_argument("--levels", type=int, default=11)
    est.add_argument("--color-space", choices=["rgb", "hsv"], default="hsv")
    est.add_argument("--penalizer", choices=["tvl1", "tvl2", "image"], default="tvl1")
    est.add_argument("--sor", type=float, default=1.88)
    est.add_argument("--iters", type=int, default=10, help="SOR sweeps per lag step")
    est.add_argument("--lag-steps", type=int, default=10)
    est.add_argument("--postproc", action="store_true",
                     help="enable occlusion-aware guided median filtering")
    est.add_argument("--occ-threshold", type=float, default=0.01)
    est.add_argument("--median-radius", type=int, default=7)
    est.add_argument("--threads", type=int, default=1)

    ev = sub.add_parser("evaluate", help="compare a disparity map against ground truth")
    ev.add_argument("--est", required=True, help="estimated disparity PFM")
    ev.add_argument("--gt", required=True, help="ground-truth disparity PFM")
    ev.add_argument("--threshold", type=float, default=0.002,
                    help="relative-error threshold for the bad-pixel rate")
    ev.add_argument("--out", help="also write the report as JSON to this file")
    return parser


def _cmd_generate(args) -> int:
    views_s, views_t = _parse_pair(args.views, "x", "--views")
    width, height = _parse_pair(args.size, "x", "--size")
    scene = _parse_scene(args.scene, args.disparity, width)
    spec = SceneSpec(
        scene=scene, width=width, height=height,
        views_s=views_s, views_t=views_t, texture_seed=args.seed,
    )
    lf, gt = generate(spec)
    save_lightfield(lf, args.out)
    write_pfm(gt.values, os.path.join(args.out, "gt.pfm"))
    logger.info("wrote %dx%d light-field with %d views to %s",
                width, height, len(lf.views), args.out)
    return EXIT_OK


def _write_diagnostics(path: str, args, diag: Diagnostics) -> None:
    lines = ["run=estimate", f"input={args.input}", f"out={args.out}",
             f"threads={args.threads}"]
    lines += [f"{k}={v}" for k, v in diag.config.items()]
    lines += [f"warning={w}" for w in diag.warnings]
    for r in diag.records:
        entry = (
            f"level={r.level} width={r.width} height={r.height} "
            f"residual={r.residual:.6e} mean_abs_increment={r.mean_abs_increment:.6e} "
            f"sweeps={r.sweeps}"
        )
        if r.mae_vs_gt is not None:
            entry += f" mae_vs_gt={r.mae_vs_gt:.6e}"
        lines.append(entry)
    with open(path, "a", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _cmd_estimate(args) -> int:
    if args.profile is not None:
        profile = PROFILES[args.profile]
        if args.alpha is None:
            args.alpha = profile["alpha"]
        if args.gamma is None:
            args.gamma = profile["gamma"]
    if args.alpha is None or args.gamma is None:
        raise _UsageError(
            "estimate needs --alpha and --gamma (explicitly or via --profile); "
            "they are tuned per dataset"
        )
    if args.threads < 1:
        raise _UsageError("--threads must be >= 1")
    solver = SolverConfig(
        alpha=args.alpha,
        inner_iterations=args.iters,
        lag_steps=args.lag_steps,
        sor_omega=args.sor,
        penalizer=Penalizer(args.penalizer),
    )
    cfg = PipelineConfig(
        alpha=args.alpha,
        gamma=args.gamma,
        sigma=args.sigma,
        eta=args.eta,
        levels=args.levels,
        color_space=ColorSpace(args.color_space),
        solver=solver,
        postproc_enabled=args.postproc,
        postproc=GuidedMedianConfig(
            window_radius=args.median_radius,
            occlusion_threshold=args.occ_threshold,
        ),
    )
    lf = load_lightfield(args.input)
    omega, diag = estimate(lf, cfg)
    os.makedirs(args.out, exist_ok=True)
    write_pfm(omega.values, os.path.join(args.out, "disparity.pfm"))
    render_disparity_png(omega, None, os.path.join(args.out, "disparity.png"))
    _write_diagnostics(os.path.join(args.out, "diagnostics.txt"), args, diag)
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    est_grid = read_pfm(args.est).astype(np.float64)
    gt_grid = read_pfm(args.gt).astype(np.float64)
    report = relative_error_report(
        DisparityField(est_grid), DisparityField(gt_grid), args.threshold
    )
    print(report.to_text())
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2)
            fh.write("\n")
    return EXIT_OK


def run(argv: list[str]) -> int:
    """Parse and execute one invocation; returns the process exit code."""
    level_name = os.environ.get("LUMEN_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level_name, logging.WARNING))
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "generate":
            return _cmd_generate(args)
        if args.command == "estimate":
            return _cmd_estimate(args)
        return _cmd_evaluate(args)
    except _UsageError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"error: data: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ContractViolation as exc:
        print(f"error: data: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericalError, FloatingPointError) as exc:
        print(f"error: numerical: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except LumenError as exc:
        print(f"error: internal: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
