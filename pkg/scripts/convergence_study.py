#!/usr/bin/env python3
"""Multi-start convergence study against the bundled single-waypoint goal.

Runs N seeded starts from two rings around the waypoint (bearings swept
across +/-15 degrees of the goal heading, start headings uniform over
the circle), then prints per-run reach times and the convergence rate.
Equivalent to `serpent batch scenarios/single_waypoint.cfg --starts N`
but keeps everything in-process for quick parameter experiments.
"""

import argparse
import math
import sys
import time
from pathlib import Path

from serpent.scenario import load_scenario
from serpent.sim import batch_start_poses, run_scenario


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--starts", type=int, default=13)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--config",
        type=Path,
        default=Path(__file__).resolve().parent.parent
        / "scenarios"
        / "single_waypoint.cfg",
    )
    args = parser.parse_args()

    cfg = load_scenario(args.config)
    wp = cfg.waypoints[0]
    poses = batch_start_poses(
        args.starts,
        seed=args.seed,
        waypoint_xy=wp.position,
        center_bearing=wp.target_yaw,
    )

    t0 = time.perf_counter()
    n_ok = 0
    for i, pose in enumerate(poses, start=1):
        log = run_scenario(
            cfg.waypoints[:1],
            cfg.tracker,
            cfg.plant,
            cfg.gaits,
            duration=cfg.duration,
            start=pose,
            stop_radius=cfg.stop_radius,
        )
        d = math.hypot(log.x[-1] - wp.position[0], log.y[-1] - wp.position[1])
        ab = abs(math.degrees(log.status_rows[-1].psi_e_abs))
        ok = (not log.timed_out) and d <= cfg.stop_radius + 1e-9
        n_ok += ok
        reach = next(
            (r.t for r in log.status_rows if r.kind == "waypoint_reached"), None
        )
        print(
            f"run {i:2d}: start=({pose.x:+.3f}, {pose.y:+.3f}, "
            f"{math.degrees(pose.yaw):+7.1f} deg)  "
            f"{'ok  ' if ok else 'FAIL'}  reach="
            f"{f'{reach:5.1f} s' if reach else '  none'}  "
            f"final d={d:.3f} m  |psi_e_abs|={ab:4.1f} deg"
        )
    wall = time.perf_counter() - t0
    print(f"{n_ok}/{args.starts} converged in {wall:.2f} s wall")
    return 0 if n_ok == args.starts else 2


if __name__ == "__main__":
    sys.exit(main())
