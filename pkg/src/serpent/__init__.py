"""Reduced-order snake robot control and simulation toolkit.

Submodules: kinematics (serial-chain pose math, virtual chassis),
cpg (coupled-oscillator joint pattern generator), gaits (sidewinding
and turn presets), steering (amplitude modulation), tracker (waypoint
state machine), estimation (yaw filtering, staleness), sim (surrogate
planar plant and the closed-loop runner), metrics (trajectory error
statistics), scenario (config files), plots, cli.
"""

from .cpg import Cpg, CpgConfig, CpgState, GaitParams, coupling_matrices
from .estimation import StalenessMonitor, YawFilter, wrap_angle
from .gaits import GaitSet, sidewinding_gait, turn_in_place_gait
from .kinematics import (
    KinematicConstants,
    LinkPoses,
    ReducedState,
    RigidTransform,
    RobotState,
    bounding_box,
    center_of_mass,
    forward_kinematics,
    reduce_state,
    virtual_chassis,
)
from .metrics import (
    AssociationError,
    TimedTrajectory,
    align_trajectory,
    associate,
    error_stats,
    tracking_summary,
)
from .scenario import ScenarioConfig, ScenarioError, load_scenario
from .sim import (
    DisturbanceEvent,
    PlantParams,
    PlantState,
    PositionJump,
    SimSnapshot,
    TrajectoryLog,
    YawTwist,
    batch_start_poses,
    plant_step,
    read_trajectory_csv,
    run_scenario,
)
from .steering import SteeringConfig, clamp_steering, modify_amplitudes, turning_rate
from .tracker import (
    Mode,
    Pose2D,
    TrackerCommand,
    TrackerConfig,
    TrackerState,
    Waypoint,
    compute_errors,
)
from .tracker import tick as tracker_tick

__version__ = "0.1.0"
