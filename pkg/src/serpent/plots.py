"""Static figure emission for scenario runs and evaluations.

Headless-only: the Agg backend is forced before pyplot is imported so
runs behave the same under CI, cron, and interactive shells. Figures
are diagnostic artifacts, not part of the numeric contract; tests only
assert that the files appear.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["save_run_plots", "save_eval_plot"]

_SHADE = ("#d8e5f2", "#f2e3d0")


def save_run_plots(log, waypoints, path, stop_radius: float = 0.2) -> Path:
    """Write the three standard panels for one run into a single image.

    Panels: XY trajectory with waypoints and their commanded headings,
    distance error over time shaded by active waypoint, and the three
    heading-error signals over time.
    """
    path = Path(path)
    fig, (ax_xy, ax_d, ax_psi) = plt.subplots(1, 3, figsize=(15, 4.6))

    ax_xy.plot(log.x, log.y, lw=1.2, color="#1f4e79", label="trajectory")
    ax_xy.plot(log.x[0], log.y[0], "o", color="#2e7d32", label="start")
    for k, wp in enumerate(waypoints, start=1):
        ax_xy.plot(*wp.position, "x", ms=9, color="#b23b3b")
        ax_xy.annotate(f"wp{k}", wp.position, textcoords="offset points", xytext=(5, 5))
        ax_xy.arrow(
            wp.position[0],
            wp.position[1],
            0.25 * math.cos(wp.target_yaw),
            0.25 * math.sin(wp.target_yaw),
            head_width=0.05,
            color="#b23b3b",
            alpha=0.7,
        )
        circle = plt.Circle(wp.position, stop_radius, fill=False, ls=":", color="#b23b3b", alpha=0.5)
        ax_xy.add_patch(circle)
    ax_xy.set_xlabel("x [m]")
    ax_xy.set_ylabel("y [m]")
    ax_xy.set_title("trajectory")
    ax_xy.axis("equal")
    ax_xy.legend(loc="best", fontsize=8)

    rows = log.status_rows
    if rows:
        ts = np.array([r.t for r in rows])
        de = np.array([r.d_e for r in rows])
        wp_idx = np.array([r.wp_index for r in rows])
        ax_d.plot(ts, de, lw=1.2, color="#1f4e79")
        lo = 0
        for j in range(1, len(rows) + 1):
            if j == len(rows) or wp_idx[j] != wp_idx[lo]:
                ax_d.axvspan(
                    ts[lo], ts[j - 1], color=_SHADE[wp_idx[lo] % 2], alpha=0.5, lw=0
                )
                lo = j
        for r in rows:
            if r.kind == "waypoint_reached":
                ax_d.axvline(r.t, color="#2e7d32", ls="--", lw=0.8, alpha=0.7)
        ax_d.axhline(stop_radius, color="#b23b3b", ls=":", lw=0.8)
        ax_d.set_xlabel("t [s]")
        ax_d.set_ylabel("distance error [m]")
        ax_d.set_title("distance to active waypoint")

        deg = np.degrees
        ax_psi.plot(ts, deg([r.psi_e_rel for r in rows]), lw=1.0, label="rel")
        ax_psi.plot(ts, deg([r.psi_e_abs for r in rows]), lw=1.0, label="abs")
        ax_psi.plot(ts, deg([r.psi_e for r in rows]), lw=1.4, label="blended")
        ax_psi.set_xlabel("t [s]")
        ax_psi.set_ylabel("heading error [deg]")
        ax_psi.set_title("heading errors")
        ax_psi.legend(loc="best", fontsize=8)

    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def save_eval_plot(times, per_axis_series, path) -> Path:
    """Per-axis trajectory error over time plus the 3D error norm."""
    path = Path(path)
    per_axis = np.asarray(per_axis_series)
    times = np.asarray(times)
    fig, ax = plt.subplots(figsize=(8, 4.2))
    for i, label in enumerate("xyz"):
        ax.plot(times, per_axis[:, i], lw=1.0, label=f"{label} error")
    ax.plot(times, np.linalg.norm(per_axis, axis=1), lw=1.5, color="k", label="norm")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("error [m]")
    ax.set_title("trajectory error by axis")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path
