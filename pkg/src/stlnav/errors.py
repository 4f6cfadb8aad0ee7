"""Exception types shared across the package.

Everything raised on a user-visible failure path derives from
:class:`StlNavError` so callers (and the command line front end) can
catch one base class and map specific types to exit codes.
"""


class StlNavError(Exception):
    """Base class for all errors raised by this package."""


class StepConversionError(StlNavError):
    """A time window is not an integer multiple of the sampling period."""


class UnsupportedNegation(StlNavError):
    """Negation normal form does not cover this operator (until)."""


class UnsupportedFragment(StlNavError):
    """Formula falls outside the encodable navigation fragment."""


class SpecSyntaxError(StlNavError):
    """Malformed specification text.

    Carries the character offset of the failure and a description of
    what the parser expected there.
    """

    def __init__(self, message: str, position: int, expected: str = ""):
        self.position = position
        self.expected = expected
        detail = f"{message} at position {position}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)


class DegenerateRegion(StlNavError):
    """Region coordinates collapse to zero width along some axis."""


class EmptyAfterShrink(StlNavError):
    """Shrinking a region by the robustness margin leaves nothing."""


class OverlappingWindows(StlNavError):
    """Two goal windows share steps; the encoding would be infeasible."""


class HorizonUnderrun(StlNavError):
    """Trajectory too short for the formula horizon at this step."""


class NumericalBreakdown(StlNavError):
    """Simplex pivot too small to trust; solve aborted."""


class NodeLimitExceeded(StlNavError):
    """Branch and bound hit its node cap before closing the gap."""


class InitialStateOutOfBounds(StlNavError):
    """Initial state violates the state box."""


class InfeasibleAtStep(StlNavError):
    """Planner found no input sequence at some closed-loop step.

    ``step`` is the step at which planning failed and ``report`` the
    most recent robustness diagnosis, when one exists.
    """

    def __init__(self, step: int, message: str, report=None):
        self.step = step
        self.report = report
        super().__init__(f"step {step}: {message}")


class VelocitySingularity(StlNavError):
    """Feedback linearization inversion at standstill with no fallback."""


class ScenarioFormatError(StlNavError):
    """Scenario file rejected; message names the offending field."""
