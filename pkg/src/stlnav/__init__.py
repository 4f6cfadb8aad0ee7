"""STL navigation specifications compiled to exactly solved MILPs.

Parse a textual specification of goals and obstacles, encode it
together with discrete double-integrator dynamics as a mixed-integer
linear program, solve that with the built-in simplex / branch-and-bound
solver, drive the plan with a shrinking-horizon controller, and
certify trajectories with a quantitative robustness monitor.
"""

from .errors import (
    DegenerateRegion,
    EmptyAfterShrink,
    HorizonUnderrun,
    InfeasibleAtStep,
    InitialStateOutOfBounds,
    NodeLimitExceeded,
    NumericalBreakdown,
    OverlappingWindows,
    ScenarioFormatError,
    SpecSyntaxError,
    StepConversionError,
    StlNavError,
    UnsupportedFragment,
    UnsupportedNegation,
    VelocitySingularity,
)
from .formula import (
    Always,
    And,
    Atom,
    Eventually,
    Formula,
    Implies,
    Interval,
    Not,
    Or,
    StepInterval,
    Top,
    Until,
    clip_to_duration,
    formula_horizon,
    nnf,
    to_step_interval,
)
from .monitor import (
    RobustnessProfile,
    RobustnessReport,
    Trajectory,
    boolean_sat,
    critical_info,
    robustness,
    robustness_profile,
)
from .regions import Polytope, box, inflate, region_from_coords, signed_margin
from .specparse import ParsedSpec, format_spec, parse

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
