"""Quantitative robustness monitoring of sampled trajectories.

Robustness of an atom at a step is the signed margin of the position
against the atom's region; boolean connectives take min for
conjunction and max for disjunction; a bounded always is the window
minimum of its child and a bounded eventually the window maximum;
until takes the best window step of the right child guarded by the
running minimum of the left child from the base step.  A positive
value certifies satisfaction, a negative one violation, and the
magnitude is the margin in meters.

Windows that extend past the available samples are an error, never a
partial minimum: silent truncation would overstate safety.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import HorizonUnderrun
from .formula import (
    Always,
    And,
    Atom,
    Eventually,
    Formula,
    Implies,
    Not,
    Or,
    Top,
    Until,
    formula_horizon,
    to_step_interval,
)
from .regions import Polytope, signed_margin


@dataclass(frozen=True)
class Trajectory:
    """Sampled state sequence [x, y, vx, vy] at a fixed period.

    ``t0`` is the absolute step index of the first sample, so a
    prediction appended to a history can keep absolute step numbers.
    """

    states: np.ndarray
    ts: float
    t0: int = 0

    def __post_init__(self):
        states = np.asarray(self.states, dtype=float)
        if states.ndim != 2 or states.shape[1] != 4:
            raise ValueError(f"states must be (n, 4), got {states.shape}")
        if states.shape[0] < 1:
            raise ValueError("trajectory needs at least one sample")
        if self.ts <= 0.0:
            raise ValueError(f"sampling period must be positive, got {self.ts}")
        object.__setattr__(self, "states", states)

    def __len__(self) -> int:
        return self.states.shape[0]

    @property
    def positions(self) -> np.ndarray:
        return self.states[:, :2]

    @property
    def velocities(self) -> np.ndarray:
        return self.states[:, 2:]

    @property
    def last_step(self) -> int:
        return self.t0 + len(self) - 1

    def extended(self, tail: "Trajectory") -> "Trajectory":
        """Concatenate a later trajectory whose start overlaps our end."""
        if tail.t0 < self.t0 or tail.t0 > self.last_step + 1:
            raise ValueError(
                f"tail starts at step {tail.t0}, expected within [{self.t0}, {self.last_step + 1}]"
            )
        keep = tail.t0 - self.t0
        states = np.vstack([self.states[:keep], tail.states])
        return Trajectory(states, self.ts, self.t0)


@dataclass(frozen=True)
class RobustnessReport:
    """Robustness value with the sample and region that determined it."""

    value: float
    critical_step: int
    critical_region: str | None


@dataclass(frozen=True)
class RobustnessProfile:
    """Robustness evaluated at consecutive base steps.

    ``t_start`` is the absolute step of the first entry; entries whose
    formula window would run past the trajectory end are omitted.
    """

    t_start: int
    values: np.ndarray

    def __len__(self) -> int:
        return len(self.values)

    @property
    def steps(self) -> np.ndarray:
        return self.t_start + np.arange(len(self.values))


def _margin_array(region: Polytope, positions: np.ndarray) -> np.ndarray:
    return np.min(region.l[None, :] - positions @ region.G.T, axis=1)


def _eval_array(
    f: Formula, traj: Trajectory, regions: dict[str, Polytope]
) -> tuple[np.ndarray, int]:
    """Robustness of ``f`` at every base index with full window coverage.

    Returns (values, horizon) where values[i] is the robustness at
    sample index i and len(values) == len(traj) - horizon.  An empty
    array means no base index has enough lookahead.
    """
    n = len(traj)
    if isinstance(f, Top):
        return np.full(n, np.inf), 0
    if isinstance(f, Atom):
        if f.region_id not in regions:
            raise ValueError(f"unknown region {f.region_id!r}")
        return _margin_array(regions[f.region_id], traj.positions), 0
    if isinstance(f, Not):
        vals, h = _eval_array(f.child, traj, regions)
        return -vals, h
    if isinstance(f, (And, Or)):
        parts = [_eval_array(c, traj, regions) for c in f.children]
        h = max(hc for _, hc in parts)
        m = n - h
        if m <= 0:
            return np.empty(0), h
        stack = np.vstack([vals[:m] for vals, _ in parts])
        combined = stack.min(axis=0) if isinstance(f, And) else stack.max(axis=0)
        return combined, h
    if isinstance(f, Implies):
        lv, lh = _eval_array(f.left, traj, regions)
        rv, rh = _eval_array(f.right, traj, regions)
        h = max(lh, rh)
        m = n - h
        if m <= 0:
            return np.empty(0), h
        return np.maximum(-lv[:m], rv[:m]), h
    if isinstance(f, (Always, Eventually)):
        w = to_step_interval(f.interval, traj.ts)
        cv, ch = _eval_array(f.child, traj, regions)
        h = w.b + ch
        m = n - h
        if m <= 0:
            return np.empty(0), h
        out = cv[w.a : w.a + m].copy()
        op = np.minimum if isinstance(f, Always) else np.maximum
        for k in range(w.a + 1, w.b + 1):
            op(out, cv[k : k + m], out=out)
        return out, h
    if isinstance(f, Until):
        w = to_step_interval(f.interval, traj.ts)
        lv, lh = _eval_array(f.left, traj, regions)
        rv, rh = _eval_array(f.right, traj, regions)
        h = w.b + max(lh, rh)
        m = n - h
        if m <= 0:
            return np.empty(0), h
        out = np.empty(m)
        for i in range(m):
            guard = np.inf
            best = -np.inf
            for tp in range(i, i + w.b + 1):
                guard = min(guard, lv[tp])
                if tp >= i + w.a:
                    best = max(best, min(rv[tp], guard))
            out[i] = best
        return out, h
    raise TypeError(f"not a formula node: {f!r}")


def _check_base(f: Formula, traj: Trajectory, t: int) -> int:
    h = formula_horizon(f, traj.ts)
    i = t - traj.t0
    if i < 0 or t + h > traj.last_step:
        raise HorizonUnderrun(
            f"formula needs steps [{t}, {t + h}] but trajectory covers "
            f"[{traj.t0}, {traj.last_step}]"
        )
    return i


def robustness(
    f: Formula, traj: Trajectory, t: int, regions: dict[str, Polytope]
) -> float:
    """Robustness of ``f`` at absolute step ``t``.

    The trajectory must cover every sample the formula inspects from
    ``t``; otherwise HorizonUnderrun is raised.
    """
    i = _check_base(f, traj, t)
    vals, _ = _eval_array(f, traj, regions)
    return float(vals[i])


def robustness_profile(
    f: Formula,
    traj: Trajectory,
    t: int,
    h: int,
    H: int,
    regions: dict[str, Polytope],
) -> RobustnessProfile:
    """Robustness at each base step in [t - h, t + H] that is covered.

    The range is clipped to the trajectory start and to the last base
    step whose formula window still fits; if nothing remains,
    HorizonUnderrun is raised.
    """
    if h < 0 or H < 0:
        raise ValueError("history and lookahead lengths must be nonnegative")
    vals, hf = _eval_array(f, traj, regions)
    lo = max(t - h, traj.t0)
    hi = min(t + H, traj.last_step - hf)
    if hi < lo or len(vals) == 0:
        raise HorizonUnderrun(
            f"no base step in [{t - h}, {t + H}] fits horizon {hf} within "
            f"[{traj.t0}, {traj.last_step}]"
        )
    return RobustnessProfile(lo, vals[lo - traj.t0 : hi - traj.t0 + 1].copy())


def _key(step: int, region: str | None) -> tuple[int, str]:
    return (step, region if region is not None else "")


def _critical(
    f: Formula, traj: Trajectory, i: int, regions: dict[str, Polytope]
) -> tuple[float, int, str | None]:
    """(value, determining step index, determining region) at index i.

    Ties between equal values break toward the smallest step and then
    the lexicographically smallest region id, which keeps reports
    deterministic.
    """
    if isinstance(f, Top):
        return (np.inf, i, None)
    if isinstance(f, Atom):
        if f.region_id not in regions:
            raise ValueError(f"unknown region {f.region_id!r}")
        m = signed_margin(regions[f.region_id], traj.positions[i])
        return (m, i, f.region_id)
    if isinstance(f, Not):
        v, s, r = _critical(f.child, traj, i, regions)
        return (-v, s, r)
    if isinstance(f, (And, Or)):
        reports = [_critical(c, traj, i, regions) for c in f.children]
        pick = min if isinstance(f, And) else max
        best = reports[0]
        for rep in reports[1:]:
            if rep[0] == best[0]:
                if _key(rep[1], rep[2]) < _key(best[1], best[2]):
                    best = rep
            elif pick(rep[0], best[0]) == rep[0]:
                best = rep
        return best
    if isinstance(f, Implies):
        lv, ls, lr = _critical(f.left, traj, i, regions)
        neg = (-lv, ls, lr)
        rig = _critical(f.right, traj, i, regions)
        if neg[0] == rig[0]:
            return neg if _key(neg[1], neg[2]) < _key(rig[1], rig[2]) else rig
        return neg if neg[0] > rig[0] else rig
    if isinstance(f, (Always, Eventually)):
        w = to_step_interval(f.interval, traj.ts)
        pick_min = isinstance(f, Always)
        best = None
        for k in range(i + w.a, i + w.b + 1):
            rep = _critical(f.child, traj, k, regions)
            if best is None:
                best = rep
            elif rep[0] == best[0]:
                if _key(rep[1], rep[2]) < _key(best[1], best[2]):
                    best = rep
            elif (rep[0] < best[0]) == pick_min:
                best = rep
        return best
    if isinstance(f, Until):
        w = to_step_interval(f.interval, traj.ts)
        best = None
        for tp in range(i + w.a, i + w.b + 1):
            rep = _critical(f.right, traj, tp, regions)
            for tpp in range(i, tp + 1):
                guard = _critical(f.left, traj, tpp, regions)
                if guard[0] < rep[0] or (
                    guard[0] == rep[0]
                    and _key(guard[1], guard[2]) < _key(rep[1], rep[2])
                ):
                    rep = guard
            if best is None or rep[0] > best[0]:
                best = rep
            elif rep[0] == best[0] and _key(rep[1], rep[2]) < _key(best[1], best[2]):
                best = rep
        return best
    raise TypeError(f"not a formula node: {f!r}")


def critical_info(
    f: Formula, traj: Trajectory, t: int, regions: dict[str, Polytope]
) -> RobustnessReport:
    """Robustness at step ``t`` plus the sample and region attaining it."""
    i = _check_base(f, traj, t)
    v, s, r = _critical(f, traj, i, regions)
    return RobustnessReport(float(v), traj.t0 + s, r)


def boolean_sat(
    f: Formula, traj: Trajectory, t: int, regions: dict[str, Polytope]
) -> bool:
    """Classical satisfaction with atoms read as strict containment."""
    i = _check_base(f, traj, t)
    return _boolean(f, traj, i, regions)


def _boolean(
    f: Formula, traj: Trajectory, i: int, regions: dict[str, Polytope]
) -> bool:
    if isinstance(f, Top):
        return True
    if isinstance(f, Atom):
        if f.region_id not in regions:
            raise ValueError(f"unknown region {f.region_id!r}")
        return signed_margin(regions[f.region_id], traj.positions[i]) > 0.0
    if isinstance(f, Not):
        return not _boolean(f.child, traj, i, regions)
    if isinstance(f, And):
        return all(_boolean(c, traj, i, regions) for c in f.children)
    if isinstance(f, Or):
        return any(_boolean(c, traj, i, regions) for c in f.children)
    if isinstance(f, Implies):
        return (not _boolean(f.left, traj, i, regions)) or _boolean(
            f.right, traj, i, regions
        )
    if isinstance(f, Always):
        w = to_step_interval(f.interval, traj.ts)
        return all(
            _boolean(f.child, traj, k, regions) for k in range(i + w.a, i + w.b + 1)
        )
    if isinstance(f, Eventually):
        w = to_step_interval(f.interval, traj.ts)
        return any(
            _boolean(f.child, traj, k, regions) for k in range(i + w.a, i + w.b + 1)
        )
    if isinstance(f, Until):
        w = to_step_interval(f.interval, traj.ts)
        for tp in range(i + w.a, i + w.b + 1):
            if _boolean(f.right, traj, tp, regions) and all(
                _boolean(f.left, traj, k, regions) for k in range(i, tp + 1)
            ):
                return True
        return False
    raise TypeError(f"not a formula node: {f!r}")
