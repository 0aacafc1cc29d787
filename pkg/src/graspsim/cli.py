"""Command line entry point: ``graspsim run | estimate | render``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

import numpy as np

from .geometry import camera_to_robot
from .harness import (ConfigError, ExperimentConfig, emit_results, load_config, parse_method,
                      parse_mode, run_experiment, seed_from_env)
from .perception import crop_roi, detect_handle, estimate_edge
from .scene import PoseMode, load_cloud, render_cloud, sample_drift, save_cloud
from .task import PERCEPTION_ERRORS

EXIT_CONFIG = 2
EXIT_PERCEPTION = 3


def _config(args) -> ExperimentConfig:
    return load_config(args.config) if args.config else ExperimentConfig()


def cmd_run(args) -> int:
    config = seed_from_env(_config(args))
    overrides = {}
    if args.trials is not None:
        overrides["trials_per_cell"] = args.trials
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.method:
        overrides["methods"] = tuple(dict.fromkeys(parse_method(m) for m in args.method))
    if args.mode:
        overrides["modes"] = (parse_mode(args.mode),)
    if args.dump_clouds:
        overrides["dump_clouds"] = args.dump_clouds
    config = replace(config, **overrides)
    out = args.out or config.output or "results.csv"

    table = run_experiment(config, workers=args.workers)
    emit_results(table, out)
    for mode, method, cell in table.rows():
        print(f"{mode.value:<9} {method.value:<14} {cell.successes:>4}/{cell.trials:<4} "
              f"{cell.success_rate:.2f}  {cell.top_failure_cause().value}")
    print(f"wrote {out}")
    return 0


def cmd_estimate(args) -> int:
    config = _config(args)
    cloud, frame = load_cloud(args.cloud)
    if frame == "camera":
        cloud = camera_to_robot(cloud, config.scene.camera)
    cloud = crop_roi(cloud, config.settings.roi)
    try:
        edge = estimate_edge(cloud, config.settings.ransac)
        print(f"omega_deg {np.degrees(edge.angle):.4f}")
        print(f"standoff_m {edge.standoff_distance:.4f}")
        print(f"inliers {edge.inlier_count}")
        if abs(edge.angle) > config.tolerances.align_tolerance:
            print("warning: robot not aligned with the edge; handle estimate unreliable", file=sys.stderr)
        handle = detect_handle(cloud, min_margin=config.settings.handle_protrusion_min)
    except PERCEPTION_ERRORS as exc:
        print(f"perception error: {exc}", file=sys.stderr)
        return EXIT_PERCEPTION
    x, y, z = handle.position
    print(f"handle_m {x:.4f} {y:.4f} {z:.4f}")
    print(f"handle_margin_m {handle.margin:.4f}")
    return 0


def cmd_render(args) -> int:
    config = seed_from_env(_config(args))
    scene = config.scene if args.seed is None else replace(config.scene, seed=args.seed)
    mode = parse_mode(args.mode)
    drift = sample_drift(scene, args.trial, mode)
    cloud, truth = render_cloud(scene, drift, trial_index=args.trial)
    if args.frame == "robot":
        cloud = camera_to_robot(cloud, scene.camera)
    save_cloud(args.out, cloud, args.frame)
    print(f"wrote {len(cloud)} points to {args.out}")
    print(f"true_standoff_m {truth.true_plane_distance:.4f}")
    print(f"true_yaw_deg {np.degrees(truth.true_plane_yaw):.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graspsim", description="Visual + tactile door-opening simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the Monte Carlo comparison and write a CSV")
    run.add_argument("--config", help="YAML path or shipped config name (e.g. paper_repro)")
    run.add_argument("--trials", type=int, help="trials per (mode, method) cell")
    run.add_argument("--seed", type=int, help="master seed (overrides GRASPSIM_SEED and the config)")
    run.add_argument("--method", action="append", help="restrict to a method; repeatable")
    run.add_argument("--mode", choices=["constant", "random"])
    run.add_argument("--out", help="CSV output path")
    run.add_argument("--dump-clouds", metavar="DIR", help="write every rendered cloud to DIR")
    run.add_argument("--workers", type=int, default=1)
    run.set_defaults(func=cmd_run)

    est = sub.add_parser("estimate", help="edge + handle estimate on a dumped cloud")
    est.add_argument("--cloud", required=True)
    est.add_argument("--config", help="config providing extrinsics, ROI and RANSAC settings")
    est.set_defaults(func=cmd_estimate)

    ren = sub.add_parser("render", help="dump one synthetic cloud")
    ren.add_argument("--config")
    ren.add_argument("--out", required=True)
    ren.add_argument("--mode", choices=["constant", "random"], default="random")
    ren.add_argument("--trial", type=int, default=0)
    ren.add_argument("--seed", type=int)
    ren.add_argument("--frame", choices=["camera", "robot"], default="camera")
    ren.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
