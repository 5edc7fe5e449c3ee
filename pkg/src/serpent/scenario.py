"""Scenario definition files and their strict loader.

A scenario is an INI-style text file with flat key-value sections.
Angles in the file are degrees (hand-editable); everything is converted
to radians here, once, so the rest of the package never sees degrees.
Unknown sections or keys are rejected with a file:line anchored
message, as are duplicate keys, so a typo cannot silently fall back to
a default.

Sections::

    [scenario]      duration_s (required), seed, start ("x y yaw_deg"),
                    stop_radius_m, output_dir
    [waypoints]     wp1 .. wpN = "x y yaw_deg", contiguous from wp1
    [tracker]       threshold/gain overrides, all optional
    [plant]         surrogate plant overrides, all optional
    [gaits]         amplitude/frequency overrides, all optional
    [disturbances]  jumpK = "t_s dx_m dy_m", twistK = "t_s angle_deg"
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .gaits import GaitSet, sidewinding_gait, turn_in_place_gait
from .sim import (
    DEFAULT_STOP_RADIUS_M,
    DisturbanceEvent,
    PlantParams,
    PositionJump,
    YawTwist,
)
from .tracker import Pose2D, TrackerConfig, Waypoint

__all__ = ["ScenarioError", "ScenarioConfig", "load_scenario"]


class ScenarioError(ValueError):
    """Malformed scenario file; message carries path and line number."""


_SCENARIO_KEYS = {"duration_s", "seed", "start", "stop_radius_m", "output_dir"}
_TRACKER_KEYS = {
    "distance_threshold_m",
    "yaw_threshold_waypoint_deg",
    "yaw_threshold_turn_deg",
    "delta0_deg",
    "delta_limit_deg",
    "k_p",
    "turn_exit_delta_deg",
    "rel_error_deadband_m",
}
_PLANT_KEYS = {
    "v_sidewind_m_s",
    "crab_angle_deg",
    "omega_turn_deg_s",
    "delta0_deg",
    "k_turn",
    "l_postural_m",
    "drift_rate_deg_s",
    "noise_std_pos_m",
    "noise_std_yaw_deg",
}
_GAIT_KEYS = {
    "frequency_hz",
    "sidewind_pitch_deg",
    "sidewind_yaw_deg",
    "turn_pitch_deg",
    "turn_yaw_deg",
}
_SECTIONS = ("scenario", "waypoints", "tracker", "plant", "gaits", "disturbances")


@dataclass(frozen=True)
class ScenarioConfig:
    """A fully parsed scenario, in radians/SI, ready for run_scenario."""

    waypoints: list[Waypoint]
    tracker: TrackerConfig
    plant: PlantParams
    gaits: GaitSet
    disturbances: list[DisturbanceEvent]
    duration: float
    seed: int
    output_dir: Path | None
    start: Pose2D = Pose2D(0.0, 0.0, 0.0)
    stop_radius: float = DEFAULT_STOP_RADIUS_M
    source: Path | None = field(default=None, compare=False)


def _anchor(path: Path, lines: list[str], section: str, key: str | None) -> str:
    """Best-effort file:line prefix for an error inside one section."""
    in_section = False
    for i, raw in enumerate(lines, start=1):
        text = raw.strip()
        if text.startswith("[") and text.endswith("]"):
            in_section = text[1:-1].strip() == section
            if in_section and key is None:
                return f"{path}:{i}"
            continue
        if in_section and key is not None:
            name = text.split("=", 1)[0].split(":", 1)[0].strip()
            if name == key:
                return f"{path}:{i}"
    return str(path)


def _floats(value: str, n: int, where: str) -> list[float]:
    parts = value.split()
    if len(parts) != n:
        raise ScenarioError(f"{where}: expected {n} values, got {len(parts)!r}")
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise ScenarioError(f"{where}: {exc}") from None


class _Section:
    """One config section with anchored scalar accessors."""

    def __init__(self, path: Path, lines: list[str], name: str, raw: dict):
        self.path, self.lines, self.name, self.raw = path, lines, name, raw

    def where(self, key: str) -> str:
        return _anchor(self.path, self.lines, self.name, key)

    def scalar(self, key: str, cast, default):
        if key not in self.raw:
            return default
        try:
            return cast(self.raw[key])
        except ValueError as exc:
            raise ScenarioError(f"{self.where(key)}: {exc}") from None

    def angle(self, key: str, default: float) -> float:
        deg = self.scalar(key, float, None)
        return default if deg is None else math.radians(deg)


def _parse_waypoints(sec: _Section) -> list[Waypoint]:
    keys = list(sec.raw)
    expected = [f"wp{i}" for i in range(1, len(keys) + 1)]
    if keys != expected:
        raise ScenarioError(
            f"{sec.where(keys[0]) if keys else sec.path}: waypoint keys must be "
            f"wp1..wpN in order, got {keys}"
        )
    wps = []
    for key in keys:
        x, y, yaw_deg = _floats(sec.raw[key], 3, sec.where(key))
        try:
            wps.append(Waypoint(np.array([x, y]), math.radians(yaw_deg)))
        except ValueError as exc:
            raise ScenarioError(f"{sec.where(key)}: {exc}") from None
    return wps


def _parse_disturbances(sec: _Section) -> list[DisturbanceEvent]:
    events = []
    for key, value in sec.raw.items():
        where = sec.where(key)
        if key.startswith("jump"):
            t, dx, dy = _floats(value, 3, where)
            effect = PositionJump(np.array([dx, dy]))
        elif key.startswith("twist"):
            t, angle_deg = _floats(value, 2, where)
            effect = YawTwist(math.radians(angle_deg))
        else:
            raise ScenarioError(
                f"{where}: disturbance keys must start with 'jump' or 'twist'"
            )
        try:
            events.append(DisturbanceEvent(t, effect))
        except ValueError as exc:
            raise ScenarioError(f"{where}: {exc}") from None
    return sorted(events, key=lambda e: e.time)


def load_scenario(path) -> ScenarioConfig:
    """Parse and validate a scenario file. Raises ScenarioError."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"{path}: {exc}") from None
    lines = text.splitlines()

    parser = configparser.ConfigParser(
        strict=True, interpolation=None, delimiters=("=",)
    )
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        lineno = getattr(exc, "lineno", None)
        where = f"{path}:{lineno}" if lineno else str(path)
        raise ScenarioError(f"{where}: {exc.message}") from None

    for name in parser.sections():
        if name not in _SECTIONS:
            raise ScenarioError(
                f"{_anchor(path, lines, name, None)}: unknown section [{name}]"
            )
    for name, allowed in (
        ("scenario", _SCENARIO_KEYS),
        ("tracker", _TRACKER_KEYS),
        ("plant", _PLANT_KEYS),
        ("gaits", _GAIT_KEYS),
    ):
        if parser.has_section(name):
            for key in parser[name]:
                if key not in allowed:
                    raise ScenarioError(
                        f"{_anchor(path, lines, name, key)}: unknown key "
                        f"{key!r} in [{name}]"
                    )
    if not parser.has_section("scenario"):
        raise ScenarioError(f"{path}: missing [scenario] section")
    if not parser.has_section("waypoints") or not parser["waypoints"]:
        raise ScenarioError(f"{path}: missing or empty [waypoints] section")

    def section(name: str) -> _Section:
        raw = dict(parser[name]) if parser.has_section(name) else {}
        return _Section(path, lines, name, raw)

    sc = section("scenario")
    if "duration_s" not in sc.raw:
        raise ScenarioError(f"{sc.where('duration_s')}: duration_s is required")
    duration = sc.scalar("duration_s", float, None)
    if duration <= 0:
        raise ScenarioError(f"{sc.where('duration_s')}: duration_s must be positive")
    seed = sc.scalar("seed", int, 0)
    stop_radius = sc.scalar("stop_radius_m", float, DEFAULT_STOP_RADIUS_M)
    if stop_radius <= 0:
        raise ScenarioError(f"{sc.where('stop_radius_m')}: stop_radius_m must be positive")
    out = sc.raw.get("output_dir")
    output_dir = Path(out) if out else None
    if "start" in sc.raw:
        x, y, yaw_deg = _floats(sc.raw["start"], 3, sc.where("start"))
        start = Pose2D(x, y, math.radians(yaw_deg))
    else:
        start = Pose2D(0.0, 0.0, 0.0)

    waypoints = _parse_waypoints(section("waypoints"))

    tr = section("tracker")
    try:
        tracker = TrackerConfig(
            distance_threshold=tr.scalar("distance_threshold_m", float, 0.35),
            yaw_threshold_waypoint=tr.angle("yaw_threshold_waypoint_deg", math.radians(30.0)),
            yaw_threshold_turn=tr.angle("yaw_threshold_turn_deg", math.radians(40.0)),
            delta0=tr.angle("delta0_deg", math.radians(14.0)),
            delta_limit=tr.angle("delta_limit_deg", math.radians(7.0)),
            k_p=tr.scalar("k_p", float, 1.0),
            turn_exit_delta=tr.angle("turn_exit_delta_deg", math.radians(20.0)),
            rel_error_deadband=tr.scalar("rel_error_deadband_m", float, 0.01),
        )
    except ValueError as exc:
        raise ScenarioError(f"{tr.where(next(iter(tr.raw), ''))}: {exc}") from None

    pl = section("plant")
    defaults = PlantParams()
    try:
        plant = PlantParams(
            v_sidewind=pl.scalar("v_sidewind_m_s", float, defaults.v_sidewind),
            crab_angle=pl.angle("crab_angle_deg", defaults.crab_angle),
            omega_turn=pl.angle("omega_turn_deg_s", defaults.omega_turn),
            delta0=pl.angle("delta0_deg", defaults.delta0),
            k_turn=pl.scalar("k_turn", float, defaults.k_turn),
            l_postural=pl.scalar("l_postural_m", float, defaults.l_postural),
            drift_rate=pl.angle("drift_rate_deg_s", defaults.drift_rate),
            noise_std_pos=pl.scalar("noise_std_pos_m", float, defaults.noise_std_pos),
            noise_std_yaw=pl.angle("noise_std_yaw_deg", defaults.noise_std_yaw),
            seed=seed,
        )
    except ValueError as exc:
        raise ScenarioError(f"{pl.where(next(iter(pl.raw), ''))}: {exc}") from None

    ga = section("gaits")
    freq = ga.scalar("frequency_hz", float, 1.0)
    if freq <= 0:
        raise ScenarioError(f"{ga.where('frequency_hz')}: frequency_hz must be positive")
    gaits = GaitSet(
        sidewind=sidewinding_gait(
            frequency_hz=freq,
            pitch_amplitude=ga.angle("sidewind_pitch_deg", math.radians(15.0)),
            yaw_amplitude=ga.angle("sidewind_yaw_deg", math.radians(45.0)),
        ),
        turn_left=turn_in_place_gait(
            "left",
            frequency_hz=freq,
            pitch_amplitude=ga.angle("turn_pitch_deg", math.radians(15.0)),
            yaw_amplitude=ga.angle("turn_yaw_deg", math.radians(30.0)),
        ),
        turn_right=turn_in_place_gait(
            "right",
            frequency_hz=freq,
            pitch_amplitude=ga.angle("turn_pitch_deg", math.radians(15.0)),
            yaw_amplitude=ga.angle("turn_yaw_deg", math.radians(30.0)),
        ),
    )

    disturbances = _parse_disturbances(section("disturbances"))

    return ScenarioConfig(
        waypoints=waypoints,
        tracker=tracker,
        plant=plant,
        gaits=gaits,
        disturbances=disturbances,
        duration=duration,
        seed=seed,
        output_dir=output_dir,
        start=start,
        stop_radius=stop_radius,
        source=path,
    )
