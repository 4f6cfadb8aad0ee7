"""Translate navigation specifications into mixed-integer programs.

The encoding covers the conjunctive avoid/reach fragment: each
``alw (not ...)`` clause keeps the position outside an obstacle grown
by the robustness margin on its activated steps, each ``ev`` clause
forces entry into a goal shrunk by the margin at some step of its
window, and the objective is the 1-norm of the input sequence.

All step indices handed to and stored by this module are absolute
(counted from the start of the task), so a shrinking-horizon caller can
re-encode suffix problems without re-indexing its bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InitialStateOutOfBounds,
    OverlappingWindows,
    UnsupportedFragment,
)
from .formula import (
    Always,
    And,
    Atom,
    Eventually,
    Formula,
    Interval,
    Not,
    StepInterval,
    to_step_interval,
)
from .milp import MilpModel, MilpSolution
from .regions import Polytope, inflate
from .specparse import ParsedSpec
from .vehicle import discretize

BOUNDS_TOL = 1e-6

_STATE_COMPS = ("x", "y", "vx", "vy")
_INPUT_COMPS = ("x", "y")


@dataclass
class EncodingMap:
    """Where each trajectory quantity lives inside a model.

    ``state_ids[k]`` holds the four variable ids of the state at
    absolute step ``t0 + k``; ``input_ids`` and ``abs_ids`` (the 1-norm
    auxiliaries) are laid out the same way with one row per input step.
    ``avoid[(region, step)]`` lists the face-selection binaries for one
    activated obstacle step and ``reach[region][step]`` the goal-entry
    binary for one window step.
    """

    t0: int
    n_steps: int
    state_ids: np.ndarray
    input_ids: np.ndarray
    abs_ids: np.ndarray | None = None
    avoid: dict = field(default_factory=dict)
    reach: dict = field(default_factory=dict)

    def step_index(self, step: int) -> int:
        k = step - self.t0
        if not 0 <= k <= self.n_steps:
            raise IndexError(
                f"step {step} outside encoded range "
                f"[{self.t0}, {self.t0 + self.n_steps}]"
            )
        return k


def encode_dynamics_and_bounds(
    model: MilpModel,
    ts: float,
    x_start,
    n_steps: int,
    state_lo,
    state_hi,
    input_lo,
    input_hi,
    t0: int = 0,
) -> EncodingMap:
    """Add state/input variables, box bounds, and the dynamics rows.

    The state at ``t0`` is pinned to ``x_start`` through equal variable
    bounds after checking it sits inside the state box (within a small
    tolerance, so states handed back by a previous solve at feasibility
    precision do not trip the check).
    """
    x_start = np.asarray(x_start, dtype=float)
    state_lo = np.asarray(state_lo, dtype=float)
    state_hi = np.asarray(state_hi, dtype=float)
    input_lo = np.asarray(input_lo, dtype=float)
    input_hi = np.asarray(input_hi, dtype=float)
    for i, v in enumerate(x_start):
        if v < state_lo[i] - BOUNDS_TOL or v > state_hi[i] + BOUNDS_TOL:
            raise InitialStateOutOfBounds(
                f"initial state component {_STATE_COMPS[i]} = {v} outside "
                f"[{state_lo[i]}, {state_hi[i]}]"
            )

    A, B = discretize(ts)
    state_ids = np.empty((n_steps + 1, 4), dtype=int)
    input_ids = np.empty((n_steps, 2), dtype=int)
    for i in range(4):
        state_ids[0, i] = model.add_continuous(
            x_start[i], x_start[i], name=f"s{t0}_{_STATE_COMPS[i]}"
        )
    for k in range(1, n_steps + 1):
        for i in range(4):
            state_ids[k, i] = model.add_continuous(
                state_lo[i], state_hi[i], name=f"s{t0 + k}_{_STATE_COMPS[i]}"
            )
    for k in range(n_steps):
        for j in range(2):
            input_ids[k, j] = model.add_continuous(
                input_lo[j], input_hi[j], name=f"u{t0 + k}_{_INPUT_COMPS[j]}"
            )
    for k in range(n_steps):
        for i in range(4):
            coeffs = {int(state_ids[k + 1, i]): 1.0}
            for j in range(4):
                if A[i, j] != 0.0:
                    coeffs[int(state_ids[k, j])] = -A[i, j]
            for j in range(2):
                if B[i, j] != 0.0:
                    coeffs[int(input_ids[k, j])] = -B[i, j]
            model.add_constraint(
                coeffs, "==", 0.0, name=f"dyn{t0 + k}_{_STATE_COMPS[i]}"
            )
    return EncodingMap(
        t0=t0, n_steps=n_steps, state_ids=state_ids, input_ids=input_ids
    )


def encode_avoid(
    model: MilpModel,
    emap: EncodingMap,
    region_id: str,
    poly: Polytope,
    rho_min: float,
    steps,
) -> None:
    """Keep the position outside ``poly`` grown by ``rho_min``.

    For each activated step one binary per face selects a separating
    face; the big-M relaxation frees the non-selected rows and the
    cover constraint forces at least one selection.
    """
    grown = inflate(poly, rho_min)
    M = model.big_m
    for step in sorted(steps):
        k = emap.step_index(step)
        zs = []
        for f in range(grown.n_faces):
            z = model.add_binary(name=f"z_{region_id}_{step}_{f}")
            zs.append(z)
            coeffs = {
                int(emap.state_ids[k, 0]): float(grown.G[f, 0]),
                int(emap.state_ids[k, 1]): float(grown.G[f, 1]),
                z: -M,
            }
            model.add_constraint(
                coeffs, ">=", float(grown.l[f]) - M,
                name=f"avoid_{region_id}_{step}_{f}",
            )
        model.add_constraint(
            {z: 1.0 for z in zs}, ">=", 1.0, name=f"cover_{region_id}_{step}"
        )
        emap.avoid[(region_id, step)] = zs


def encode_reach(
    model: MilpModel,
    emap: EncodingMap,
    region_id: str,
    poly: Polytope,
    rho_min: float,
    steps,
) -> None:
    """Force entry into ``poly`` shrunk by ``rho_min`` at some step.

    One binary per window step marks the entry step; its big-M rows
    pin the position inside every shrunk face when selected.  An empty
    step list means the window has passed unsatisfied, encoded as a
    constraint no assignment can meet so the infeasibility surfaces
    through the solver like any other.
    """
    steps = sorted(steps)
    if not steps:
        model.add_constraint({}, ">=", 1.0, name=f"missed_{region_id}")
        emap.reach[region_id] = {}
        return
    shrunk = inflate(poly, -rho_min)
    M = model.big_m
    ws = {}
    for step in steps:
        k = emap.step_index(step)
        w = model.add_binary(name=f"w_{region_id}_{step}")
        ws[step] = w
        for f in range(shrunk.n_faces):
            coeffs = {
                int(emap.state_ids[k, 0]): float(shrunk.G[f, 0]),
                int(emap.state_ids[k, 1]): float(shrunk.G[f, 1]),
                w: M,
            }
            model.add_constraint(
                coeffs, "<=", float(shrunk.l[f]) + M,
                name=f"reach_{region_id}_{step}_{f}",
            )
    model.add_constraint(
        {w: 1.0 for w in ws.values()}, ">=", 1.0, name=f"enter_{region_id}"
    )
    emap.reach[region_id] = ws


def encode_objective(model: MilpModel, emap: EncodingMap, input_lo, input_hi) -> None:
    """Minimize the 1-norm of the inputs via nonnegative auxiliaries."""
    input_lo = np.asarray(input_lo, dtype=float)
    input_hi = np.asarray(input_hi, dtype=float)
    n = emap.n_steps
    abs_ids = np.empty((n, 2), dtype=int)
    cost = {}
    for k in range(n):
        for j in range(2):
            ub = max(abs(input_lo[j]), abs(input_hi[j]))
            a = model.add_continuous(
                0.0, ub, name=f"a{emap.t0 + k}_{_INPUT_COMPS[j]}"
            )
            abs_ids[k, j] = a
            u = int(emap.input_ids[k, j])
            model.add_constraint({a: 1.0, u: -1.0}, ">=", 0.0)
            model.add_constraint({a: 1.0, u: 1.0}, ">=", 0.0)
            cost[a] = 1.0
    emap.abs_ids = abs_ids
    model.set_objective(cost)


def _check_fragment(formula: Formula) -> None:
    """Reject formulas outside the conjunctive avoid/reach fragment."""
    clauses = formula.children if isinstance(formula, And) else (formula,)
    for clause in clauses:
        if isinstance(clause, Always) and isinstance(clause.child, Not):
            if isinstance(clause.child.child, Atom):
                continue
        if isinstance(clause, Eventually) and isinstance(clause.child, Atom):
            continue
        raise UnsupportedFragment(
            "the encoder covers conjunctions of alw(not(region)) and "
            f"ev(region) clauses only, got {type(clause).__name__}"
        )


def _windows_to_steps(windows, ts: float) -> list[tuple[str, StepInterval]]:
    return [(rid, to_step_interval(iv, ts)) for rid, iv in windows]


def build_milp(
    spec: ParsedSpec,
    scenario,
    active_obstacles=None,
    satisfied_goals=frozenset(),
    start_step: int = 0,
    x_start=None,
):
    """Assemble the complete program for a (suffix of a) task.

    ``scenario`` supplies sampling period, boxes, margin, and big-M.
    ``active_obstacles`` maps obstacle region ids to the absolute steps
    whose avoidance constraints should be present; ``None`` activates
    every step of every obstacle window.  Goals in ``satisfied_goals``
    are dropped; a pending goal whose window lies entirely before
    ``start_step`` renders the program infeasible.

    Returns the model together with its :class:`EncodingMap`.
    """
    _check_fragment(spec.formula)
    ts = scenario.ts
    N = to_step_interval(Interval(0.0, spec.task_end), ts).b

    goal_steps = _windows_to_steps(spec.goal_windows, ts)
    for i in range(len(goal_steps)):
        for j in range(i + 1, len(goal_steps)):
            ra, wa = goal_steps[i]
            rb, wb = goal_steps[j]
            if wa.a <= wb.b and wb.a <= wa.b:
                raise OverlappingWindows(
                    f"goal windows of {ra} (steps {wa.a}..{wa.b}) and "
                    f"{rb} (steps {wb.a}..{wb.b}) overlap; the goal "
                    "schedule needs disjoint windows"
                )
    if not 0 <= start_step <= N:
        raise ValueError(f"start step {start_step} outside [0, {N}]")

    model = MilpModel(name=spec_name(scenario), big_m=scenario.big_m)
    emap = encode_dynamics_and_bounds(
        model,
        ts,
        scenario.x0 if x_start is None else x_start,
        N - start_step,
        scenario.state_lo,
        scenario.state_hi,
        scenario.input_lo,
        scenario.input_hi,
        t0=start_step,
    )

    for rid, iv in spec.alw_windows:
        w = to_step_interval(iv, ts)
        lo, hi = max(w.a, start_step), min(w.b, N)
        window = set(range(lo, hi + 1)) if lo <= hi else set()
        if active_obstacles is None:
            steps = window
        else:
            steps = window & set(active_obstacles.get(rid, ()))
        if steps:
            encode_avoid(
                model, emap, rid, spec.regions[rid], scenario.rho_min, steps
            )

    for rid, w in goal_steps:
        if rid in satisfied_goals:
            continue
        lo = max(w.a, start_step)
        steps = range(lo, w.b + 1) if lo <= w.b else ()
        encode_reach(
            model, emap, rid, spec.regions[rid], scenario.rho_min, steps
        )

    encode_objective(model, emap, scenario.input_lo, scenario.input_hi)
    return model, emap


def spec_name(scenario) -> str:
    return getattr(scenario, "name", "milp")


def decode_states(emap: EncodingMap, solution: MilpSolution) -> np.ndarray:
    """Predicted states (n_steps + 1, 4) from a solved model."""
    return solution.values[emap.state_ids]


def decode_inputs(emap: EncodingMap, solution: MilpSolution) -> np.ndarray:
    """Planned inputs (n_steps, 2) from a solved model."""
    return solution.values[emap.input_ids]
