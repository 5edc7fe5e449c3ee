"""Command-line front end.

Three subcommands: ``run`` executes one scenario file and writes the
CSV/plot/summary artifact set, ``eval`` compares two trajectory CSVs,
and ``batch`` sweeps seeded start poses against a scenario's first
waypoint. Exit codes: 0 success, 1 input error, 2 ran-but-did-not-
converge. The SERPENT_OUTPUT_DIR environment variable overrides the
output directory named in the config.
"""

from __future__ import annotations

import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import argparse
import numpy as np

from .metrics import (
    AssociationError,
    align_trajectory,
    associate,
    error_stats,
    tracking_summary,
)
from .plots import save_eval_plot, save_run_plots
from .scenario import ScenarioConfig, ScenarioError, load_scenario
from .sim import FAST_DT_S, batch_start_poses, read_trajectory_csv, run_scenario
from .tracker import Pose2D

__all__ = ["main", "cmd_run", "cmd_eval", "cmd_batch"]

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NO_CONVERGENCE = 2


class _InputError(Exception):
    """CLI-level input problem; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad arguments, which collides with
    # the non-convergence code; route argument errors to exit 1 instead.
    def error(self, message):
        raise _InputError(message)


def _resolve_output_dir(cfg: ScenarioConfig) -> Path:
    env = os.environ.get("SERPENT_OUTPUT_DIR")
    if env:
        out = Path(env)
    elif cfg.output_dir is not None:
        out = cfg.output_dir
    elif cfg.source is not None:
        out = Path(f"{cfg.source.stem}_out")
    else:
        out = Path("run_out")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _run_config(cfg: ScenarioConfig, start: Pose2D | None = None):
    return run_scenario(
        cfg.waypoints if start is None else cfg.waypoints[:1],
        cfg.tracker,
        cfg.plant,
        cfg.gaits,
        cfg.disturbances if start is None else (),
        cfg.duration,
        start=start if start is not None else cfg.start,
        stop_radius=cfg.stop_radius,
    )


def _summary_text(cfg: ScenarioConfig, log) -> str:
    lines = [
        f"scenario: {cfg.source.name if cfg.source else '<memory>'}",
        f"simulated: {log.t[-1]:.1f} s of {cfg.duration:.1f} s",
        f"outcome: {'timed out' if log.timed_out else 'converged'}",
    ]
    for row in tracking_summary(log, len(cfg.waypoints)):
        if row.reached:
            lines.append(
                f"wp{row.waypoint}: reached t={row.time_to_reach:.1f} s, "
                f"final d_e={row.final_distance:.3f} m, "
                f"final |psi_e_abs|={abs(math.degrees(row.final_abs_yaw_error)):.1f} deg, "
                f"mode switches={row.mode_switches}"
            )
        else:
            lines.append(f"wp{row.waypoint}: NOT reached")
    return "\n".join(lines) + "\n"


def cmd_run(config_path) -> int:
    """Run one scenario; write trajectory/status CSVs, summary, plots."""
    cfg = load_scenario(config_path)
    out = _resolve_output_dir(cfg)
    log = _run_config(cfg)
    log.write_trajectory_csv(out / "trajectory.csv")
    log.write_status_csv(out / "tracking_status.csv")
    (out / "summary.txt").write_text(_summary_text(cfg, log))
    save_run_plots(log, cfg.waypoints, out / "plots.png", cfg.stop_radius)
    print(f"wrote {out}/trajectory.csv, tracking_status.csv, summary.txt, plots.png")
    return EXIT_NO_CONVERGENCE if log.timed_out else EXIT_OK


def cmd_eval(est_csv, ref_csv, max_dt: float = 0.02, align: bool = False) -> int:
    """Compare two trajectory CSVs; print stats, write per-axis plot."""
    try:
        est = read_trajectory_csv(est_csv)
        ref = read_trajectory_csv(ref_csv)
    except (OSError, ValueError, KeyError) as exc:
        raise _InputError(f"cannot read trajectory CSV: {exc}") from None
    result = associate(est, ref, max_dt=max_dt)
    if align:
        est = align_trajectory(est, ref, result.pairs)
    report = error_stats(result.pairs, est, ref)
    for line in report.summary_lines():
        print(line)
    print(f"dropped (no reference within {max_dt} s): {result.dropped}")
    series = np.asarray(report.per_axis_series)
    plot_path = Path(est_csv).with_name("eval_errors.png")
    save_eval_plot(series[:, 0], series[:, 1:4], plot_path)
    print(f"wrote {plot_path}")
    return EXIT_OK


def _batch_one(args) -> dict:
    cfg, pose, idx = args
    log = _run_config(cfg, start=pose)
    wp = cfg.waypoints[0]
    rows = log.status_rows
    ticks = [round(r.t / FAST_DT_S) - 1 for r in rows]
    reach = [r.t for r in rows if r.kind == "waypoint_reached"]
    final_d = math.hypot(log.x[-1] - wp.position[0], log.y[-1] - wp.position[1])
    final_abs = abs(rows[-1].psi_e_abs) if rows else math.nan
    return {
        "run": idx,
        "start": pose,
        "converged": (not log.timed_out) and final_d <= cfg.stop_radius + 1e-9,
        "time_to_reach": reach[0] if reach else None,
        "final_distance": final_d,
        "final_abs_yaw_error": final_abs,
        "t": [r.t for r in rows],
        "x": [float(log.x[i]) for i in ticks],
        "y": [float(log.y[i]) for i in ticks],
        "yaw": [float(log.yaw[i]) for i in ticks],
        "d_e": [r.d_e for r in rows],
        "psi_e_rel": [r.psi_e_rel for r in rows],
        "psi_e_abs": [r.psi_e_abs for r in rows],
        "psi_e": [r.psi_e for r in rows],
    }


def _write_batch_csv(path: Path, results: list[dict]) -> None:
    cols = ("t", "x", "y", "yaw_rad", "d_e", "psi_e_rel", "psi_e_abs", "psi_e")
    with open(path, "w", newline="") as fh:
        fh.write("run," + ",".join(cols) + "\n")
        for res in results:
            for j in range(len(res["t"])):
                vals = (
                    res["t"][j], res["x"][j], res["y"][j], res["yaw"][j],
                    res["d_e"][j], res["psi_e_rel"][j], res["psi_e_abs"][j],
                    res["psi_e"][j],
                )
                fh.write(str(res["run"]) + "," + ",".join(f"{v:.9g}" for v in vals) + "\n")


def _batch_plots(path: Path, results: list[dict], wp) -> None:
    import matplotlib.pyplot as plt

    fig, (ax_xy, ax_d, ax_psi) = plt.subplots(1, 3, figsize=(15, 4.6))
    for res in results:
        ax_xy.plot(res["x"], res["y"], lw=0.9, alpha=0.8)
        ax_xy.plot(res["x"][0], res["y"][0], "o", ms=3, color="#2e7d32")
        ax_d.plot(res["t"], res["d_e"], lw=0.9, alpha=0.8)
        ax_psi.plot(res["t"], np.degrees(res["psi_e_abs"]), lw=0.9, alpha=0.8)
    ax_xy.plot(*wp.position, "x", ms=10, color="#b23b3b")
    ax_xy.set_xlabel("x [m]")
    ax_xy.set_ylabel("y [m]")
    ax_xy.set_title("trajectories")
    ax_xy.axis("equal")
    ax_d.set_xlabel("t [s]")
    ax_d.set_ylabel("distance error [m]")
    ax_d.set_title("convergence")
    ax_psi.set_xlabel("t [s]")
    ax_psi.set_ylabel("|goal heading error| [deg]")
    ax_psi.set_title("final-heading alignment")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def cmd_batch(config_path, starts: int, jobs: int = 1) -> int:
    """Sweep seeded start poses against the scenario's first waypoint."""
    if starts < 1:
        raise _InputError("--starts must be at least 1")
    if jobs < 1:
        raise _InputError("--jobs must be at least 1")
    cfg = load_scenario(config_path)
    out = _resolve_output_dir(cfg)
    wp = cfg.waypoints[0]
    poses = batch_start_poses(
        starts,
        seed=cfg.seed,
        waypoint_xy=wp.position,
        center_bearing=wp.target_yaw,
    )
    work = [(cfg, pose, i + 1) for i, pose in enumerate(poses)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_batch_one, work))
    else:
        results = [_batch_one(w) for w in work]

    _write_batch_csv(out / "batch_convergence.csv", results)
    n_ok = sum(r["converged"] for r in results)
    lines = [f"batch: {starts} starts against wp1, {n_ok}/{starts} converged"]
    for res in results:
        p = res["start"]
        reach = f"t={res['time_to_reach']:.1f} s" if res["time_to_reach"] else "never"
        lines.append(
            f"run {res['run']}: start=({p.x:.3f}, {p.y:.3f}, {math.degrees(p.yaw):.1f} deg) "
            f"{'converged' if res['converged'] else 'DID NOT CONVERGE'} "
            f"reach {reach}, final d_e={res['final_distance']:.3f} m, "
            f"final |psi_e_abs|={math.degrees(res['final_abs_yaw_error']):.1f} deg"
        )
    (out / "batch_summary.txt").write_text("\n".join(lines) + "\n")
    _batch_plots(out / "batch_plots.png", results, wp)
    print(lines[0])
    print(f"wrote {out}/batch_convergence.csv, batch_summary.txt, batch_plots.png")
    return EXIT_OK if n_ok == starts else EXIT_NO_CONVERGENCE


def main(argv=None) -> int:
    parser = _Parser(
        prog="serpent",
        description="Snake-robot waypoint tracking: scenario runs and evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario config")
    p_run.add_argument("config", help="scenario .cfg path")

    p_eval = sub.add_parser("eval", help="compare two trajectory CSVs")
    p_eval.add_argument("est_csv")
    p_eval.add_argument("ref_csv")
    p_eval.add_argument("--max-dt", type=float, default=0.02,
                        help="association tolerance in seconds (default 0.02)")
    p_eval.add_argument("--align", action="store_true",
                        help="rigidly fit est onto ref before computing stats")

    p_batch = sub.add_parser("batch", help="multi-start convergence study")
    p_batch.add_argument("config", help="scenario .cfg path")
    p_batch.add_argument("--starts", type=int, required=True,
                         help="number of seeded start poses")
    p_batch.add_argument("--jobs", type=int, default=1,
                         help="parallel worker processes (default 1)")

    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            return cmd_run(args.config)
        if args.command == "eval":
            return cmd_eval(args.est_csv, args.ref_csv, args.max_dt, args.align)
        return cmd_batch(args.config, args.starts, args.jobs)
    except (_InputError, ScenarioError, AssociationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
