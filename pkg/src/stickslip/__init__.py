"""Deterministic stick-slip pseudo-haptic friction engine.

A 1-D Coulomb stick-slip model couples the user's input point to a
displayed pointer through a critically damped spring-damper, so the
pointer visibly sticks and breaks away; a virtual string drawn between
the two preserves the sense of agency. On top of the simulator sit a
two-protocol psychophysics experiment engine (forced-choice
discrimination and magnitude-ratio estimation), simulated participants
for headless end-to-end runs, and an analysis suite (psychometric and
power-law fits, repeated-measures ANOVA, Tukey HSD).
"""

from .analysis import (
    AnovaResult,
    PowerLawFit,
    PsychometricFit,
    TukeyPair,
    fit_power_law,
    fit_psychometric,
    jnd,
    pse,
    rm_anova,
    tukey_hsd,
)
from .display import DisplayState, compose_display, string_length
from .exceptions import (
    InputError,
    InvalidParameterError,
    StickSlipError,
    TraceParseError,
    TraceValidationError,
    UndefinedJndError,
    UnsupportedDfError,
)
from .experiment import (
    Press,
    SessionConfig,
    SessionRecord,
    Stage,
    StimulusOrder,
    Study,
    TrialPhase,
    TrialRecord,
    advance_trial,
    apply_adjustment,
    build_schedule,
    discrimination_config,
    load_results,
    magnitude_config,
    read_session_config,
    tally_jnd_proportions,
    write_results,
    write_session_config,
)
from .friction import (
    FrictionParams,
    InputSample,
    Phase,
    SimState,
    derived_mass,
    initial_state,
    step,
)
from .robot import (
    ConstantResponder,
    IdealLogisticResponder,
    PowerLawResponder,
    parse_behavior,
    run_robot_session,
)
from .traces import (
    TrajectoryTrace,
    TraceRow,
    load_trace,
    load_trajectory,
    save_trace,
    save_trajectory,
    simulate_trace,
    synth_constant_velocity,
)

__version__ = "0.1.0"

__all__ = [
    "AnovaResult",
    "PowerLawFit",
    "PsychometricFit",
    "TukeyPair",
    "fit_power_law",
    "fit_psychometric",
    "jnd",
    "pse",
    "rm_anova",
    "tukey_hsd",
    "DisplayState",
    "compose_display",
    "string_length",
    "InputError",
    "InvalidParameterError",
    "StickSlipError",
    "TraceParseError",
    "TraceValidationError",
    "UndefinedJndError",
    "UnsupportedDfError",
    "Press",
    "SessionConfig",
    "SessionRecord",
    "Stage",
    "StimulusOrder",
    "Study",
    "TrialPhase",
    "TrialRecord",
    "advance_trial",
    "apply_adjustment",
    "build_schedule",
    "discrimination_config",
    "load_results",
    "magnitude_config",
    "read_session_config",
    "tally_jnd_proportions",
    "write_results",
    "write_session_config",
    "FrictionParams",
    "InputSample",
    "Phase",
    "SimState",
    "derived_mass",
    "initial_state",
    "step",
    "ConstantResponder",
    "IdealLogisticResponder",
    "PowerLawResponder",
    "parse_behavior",
    "run_robot_session",
    "TrajectoryTrace",
    "TraceRow",
    "load_trace",
    "load_trajectory",
    "save_trace",
    "save_trajectory",
    "simulate_trace",
    "synth_constant_velocity",
    "__version__",
]
