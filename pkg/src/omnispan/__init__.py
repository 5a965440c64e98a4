"""Deterministic simulation stack for a variable-span omnidirectional robot.

The platform drives four collinear Mecanum wheels in two groups whose
spacing is itself a controlled degree of freedom: the lateral speed
difference of the groups widens or narrows the stance while the usual
omnidirectional twist remains available.  This package provides the
closed-form drive kinematics, the two-point-mass planar dynamics, the
wheel-level rig kinematics, the cascaded control loops, a deterministic
simulator with scripted bench studies, and a real-time teleoperation
service.
"""

from .drive import (
    BodyRates,
    BodyTwist,
    GroupRates,
    WheelPair,
    dd_forward,
    dd_inverse,
    od_forward,
    od_inverse,
    span_forward,
    span_inverse,
    wrap_angle,
)
from .dynamics import (
    BodyAccel,
    DynState,
    MassPair,
    PseudoForces,
    WheelGroupForces,
    center_of_mass_offset,
    forward_dynamics,
    inverse_dynamics,
    moment_of_inertia,
    pseudo_forces,
)
from .mecanum import (
    RigGeometry,
    SigmaTerms,
    WheelSpeeds,
    forward_kinematics,
    group_velocities_from_wheels,
    inverse_kinematics,
    sigma_terms,
    singularity_metric,
)
from .control import (
    ControllerSuite,
    PidGains,
    PidMemory,
    SensorFrame,
    SuiteGains,
    mix_commands,
    pid_step,
)
from .sim import (
    Disturbance,
    RobotState,
    SensorNoise,
    SimConfig,
    Simulator,
    apply_pitch_dynamics,
    make_initial_state,
    sense,
    step,
)
from .scripts import (
    BUILTIN_NAMES,
    CommandScript,
    RunMetrics,
    Segment,
    builtin_script,
    compute_metrics,
    run_script,
)
from .trajlog import TrajectoryLog, export_log, import_log
from .config import config_from_mapping, load_config

__version__ = "0.1.0"
