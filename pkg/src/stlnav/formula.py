"""Signal temporal logic formulas over named planar regions.

AST nodes are immutable dataclasses; structural operations (negation
normal form, horizon computation, window clipping) are module-level
functions that recurse on node type.  Time windows are written in
seconds and converted to step counts against a sampling period, which
must divide them exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    HorizonUnderrun,
    StepConversionError,
    UnsupportedFragment,
    UnsupportedNegation,
)

STEP_REL_TOL = 1e-9


@dataclass(frozen=True)
class Interval:
    """Closed time window [a, b] in seconds, 0 <= a <= b."""

    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError(f"interval bounds must be finite, got [{self.a}, {self.b}]")
        if not 0.0 <= self.a <= self.b:
            raise ValueError(f"need 0 <= a <= b, got [{self.a}, {self.b}]")


@dataclass(frozen=True)
class StepInterval:
    """Closed step window [a, b], integers with 0 <= a <= b."""

    a: int
    b: int

    def __post_init__(self):
        if not 0 <= self.a <= self.b:
            raise ValueError(f"need 0 <= a <= b, got [{self.a}, {self.b}]")


def to_step_interval(interval: Interval, ts: float) -> StepInterval:
    """Convert a window in seconds to steps of size ``ts``.

    Both endpoints must be integer multiples of ``ts`` to a relative
    tolerance of 1e-9; anything else raises StepConversionError rather
    than silently rounding.
    """
    if ts <= 0.0:
        raise StepConversionError(f"sampling period must be positive, got {ts}")
    steps = []
    for bound in (interval.a, interval.b):
        ratio = bound / ts
        k = round(ratio)
        if abs(ratio - k) > STEP_REL_TOL * max(1.0, abs(ratio)):
            raise StepConversionError(
                f"window bound {bound} is not a multiple of the sampling period {ts}"
            )
        steps.append(int(k))
    return StepInterval(steps[0], steps[1])


@dataclass(frozen=True)
class Top:
    """The always-true formula."""


@dataclass(frozen=True)
class Atom:
    """Membership of the position in a named region."""

    region_id: str


@dataclass(frozen=True)
class Not:
    child: "Formula"


@dataclass(frozen=True)
class And:
    children: tuple["Formula", ...]

    def __post_init__(self):
        if len(self.children) == 0:
            raise ValueError("conjunction needs at least one child")


@dataclass(frozen=True)
class Or:
    children: tuple["Formula", ...]

    def __post_init__(self):
        if len(self.children) == 0:
            raise ValueError("disjunction needs at least one child")


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Always:
    interval: Interval
    child: "Formula"


@dataclass(frozen=True)
class Eventually:
    interval: Interval
    child: "Formula"


@dataclass(frozen=True)
class Until:
    interval: Interval
    left: "Formula"
    right: "Formula"


Formula = Top | Atom | Not | And | Or | Implies | Always | Eventually | Until


def nnf(f: Formula) -> Formula:
    """Negation normal form: negations pushed down to atoms.

    Implication is rewritten as not(left) or right.  A negated top is
    kept as a literal.  Negated until has no dual in this grammar and
    raises UnsupportedNegation.
    """
    if isinstance(f, (Top, Atom)):
        return f
    if isinstance(f, And):
        return And(tuple(nnf(c) for c in f.children))
    if isinstance(f, Or):
        return Or(tuple(nnf(c) for c in f.children))
    if isinstance(f, Implies):
        return Or((nnf(Not(f.left)), nnf(f.right)))
    if isinstance(f, Always):
        return Always(f.interval, nnf(f.child))
    if isinstance(f, Eventually):
        return Eventually(f.interval, nnf(f.child))
    if isinstance(f, Until):
        return Until(f.interval, nnf(f.left), nnf(f.right))
    if isinstance(f, Not):
        g = f.child
        if isinstance(g, (Top, Atom)):
            return f
        if isinstance(g, Not):
            return nnf(g.child)
        if isinstance(g, And):
            return Or(tuple(nnf(Not(c)) for c in g.children))
        if isinstance(g, Or):
            return And(tuple(nnf(Not(c)) for c in g.children))
        if isinstance(g, Implies):
            return And((nnf(g.left), nnf(Not(g.right))))
        if isinstance(g, Always):
            return Eventually(g.interval, nnf(Not(g.child)))
        if isinstance(g, Eventually):
            return Always(g.interval, nnf(Not(g.child)))
        if isinstance(g, Until):
            raise UnsupportedNegation("negated until has no supported normal form")
    raise TypeError(f"not a formula node: {f!r}")


def formula_horizon(f: Formula, ts: float) -> int:
    """Number of future steps a formula inspects beyond its base step.

    Atoms look only at the current sample (horizon 0); bounded temporal
    operators add their window end to the child horizon; connectives
    take the maximum over their children.
    """
    if isinstance(f, (Top, Atom)):
        return 0
    if isinstance(f, Not):
        return formula_horizon(f.child, ts)
    if isinstance(f, (And, Or)):
        return max(formula_horizon(c, ts) for c in f.children)
    if isinstance(f, Implies):
        return max(formula_horizon(f.left, ts), formula_horizon(f.right, ts))
    if isinstance(f, (Always, Eventually)):
        w = to_step_interval(f.interval, ts)
        return w.b + formula_horizon(f.child, ts)
    if isinstance(f, Until):
        w = to_step_interval(f.interval, ts)
        return w.b + max(formula_horizon(f.left, ts), formula_horizon(f.right, ts))
    raise TypeError(f"not a formula node: {f!r}")


def atoms(f: Formula) -> list[Atom]:
    """All atoms in the formula, left to right, duplicates kept."""
    if isinstance(f, Top):
        return []
    if isinstance(f, Atom):
        return [f]
    if isinstance(f, Not):
        return atoms(f.child)
    if isinstance(f, (And, Or)):
        return [a for c in f.children for a in atoms(c)]
    if isinstance(f, Implies):
        return atoms(f.left) + atoms(f.right)
    if isinstance(f, (Always, Eventually)):
        return atoms(f.child)
    if isinstance(f, Until):
        return atoms(f.left) + atoms(f.right)
    raise TypeError(f"not a formula node: {f!r}")


def clip_to_duration(f: Formula, duration_s: float) -> Formula:
    """Clip temporal windows so the formula fits ``duration_s`` seconds.

    Used to evaluate a specification over a finished run whose length
    the windows may exceed: an always over [a, b] becomes an always
    over [a, min(b, duration)], and likewise for eventually and until.
    Only formulas whose temporal operators have instantaneous children
    are supported; for anything deeper the clip would change the
    semantics in an unsound way, so UnsupportedFragment is raised.
    A window starting after the duration cannot be evaluated at all
    and raises HorizonUnderrun.
    """
    if duration_s < 0.0:
        raise HorizonUnderrun(f"negative duration {duration_s}")
    if isinstance(f, (Top, Atom)):
        return f
    if isinstance(f, Not):
        return Not(clip_to_duration(f.child, duration_s))
    if isinstance(f, And):
        return And(tuple(clip_to_duration(c, duration_s) for c in f.children))
    if isinstance(f, Or):
        return Or(tuple(clip_to_duration(c, duration_s) for c in f.children))
    if isinstance(f, Implies):
        return Implies(
            clip_to_duration(f.left, duration_s),
            clip_to_duration(f.right, duration_s),
        )
    if isinstance(f, (Always, Eventually, Until)):
        children = (f.left, f.right) if isinstance(f, Until) else (f.child,)
        for c in children:
            if not isinstance(c, (Top, Atom, Not)) or (
                isinstance(c, Not) and not isinstance(c.child, (Top, Atom))
            ):
                raise UnsupportedFragment(
                    "window clipping needs instantaneous temporal children"
                )
        iv = f.interval
        if iv.a > duration_s:
            raise HorizonUnderrun(
                f"window [{iv.a}, {iv.b}] starts beyond the available {duration_s} s"
            )
        clipped = Interval(iv.a, min(iv.b, duration_s))
        if isinstance(f, Always):
            return Always(clipped, f.child)
        if isinstance(f, Eventually):
            return Eventually(clipped, f.child)
        return Until(clipped, f.left, f.right)
    raise TypeError(f"not a formula node: {f!r}")
