"""Vehicle models and the feedback-linearization bridge between them.

The planner works with the planar double integrator, sampled exactly
under zero-order hold; the physical vehicle is a kinematic unicycle.
Inverting the linearizing map turns planned accelerations into linear
acceleration and heading rate for the unicycle, which lets one compare
the trajectory the plan promises with the one the nonlinear model
drives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EPS_V = 1e-3


def discretize(ts: float) -> tuple[np.ndarray, np.ndarray]:
    """Exact zero-order-hold discretization of pos/vel integrators."""
    if ts <= 0.0:
        raise ValueError(f"sampling period must be positive, got {ts}")
    A = np.array(
        [
            [1.0, 0.0, ts, 0.0],
            [0.0, 1.0, 0.0, ts],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )
    B = np.array(
        [
            [ts * ts / 2.0, 0.0],
            [0.0, ts * ts / 2.0],
            [ts, 0.0],
            [0.0, ts],
        ]
    )
    return A, B


def rollout(x0, inputs, ts: float) -> np.ndarray:
    """States (n+1, 4) of the sampled double integrator under inputs (n, 2)."""
    A, B = discretize(ts)
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    states = np.empty((inputs.shape[0] + 1, 4))
    states[0] = np.asarray(x0, dtype=float)
    for k, u in enumerate(inputs):
        states[k + 1] = A @ states[k] + B @ u
    return states


def invert_feedback(
    u: np.ndarray, theta: float, v: float, last_omega: float, eps_v: float = EPS_V
) -> tuple[float, float]:
    """Planned acceleration (ux, uy) to unicycle (accel, heading rate).

    The linearizing map is u = R(theta) [dv, v*omega], so dv projects u
    onto the heading and omega divides the lateral part by the speed.
    At standstill (|v| < eps_v) the division is singular; the previous
    heading rate is held instead, which keeps startup from rest well
    defined.
    """
    c, s = math.cos(theta), math.sin(theta)
    accel = c * u[0] + s * u[1]
    if abs(v) < eps_v:
        omega = last_omega
    else:
        omega = (-s * u[0] + c * u[1]) / v
    return accel, omega


def _unicycle_rhs(state: np.ndarray, accel: float, omega: float) -> np.ndarray:
    x, y, theta, v = state
    return np.array([v * math.cos(theta), v * math.sin(theta), omega, accel])


def rk4_step(state: np.ndarray, accel: float, omega: float, ts: float) -> np.ndarray:
    """One classical fourth-order step with inputs held over the interval."""
    k1 = _unicycle_rhs(state, accel, omega)
    k2 = _unicycle_rhs(state + 0.5 * ts * k1, accel, omega)
    k3 = _unicycle_rhs(state + 0.5 * ts * k2, accel, omega)
    k4 = _unicycle_rhs(state + ts * k3, accel, omega)
    return state + (ts / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@dataclass
class ComparisonResult:
    """Per-sample distance between planned and driven positions.

    ``unicycle_states`` rows are (x, y, theta, v).  ``path_length`` is
    the polyline length of the planned trajectory, the yardstick the
    maximum deviation is usually quoted against.
    """

    deviations: np.ndarray
    max_deviation: float
    path_length: float
    unicycle_states: np.ndarray

    @property
    def relative_deviation(self) -> float:
        if self.path_length == 0.0:
            return 0.0 if self.max_deviation == 0.0 else math.inf
        return self.max_deviation / self.path_length


def simulate_unicycle(
    states_linear: np.ndarray, inputs: np.ndarray, ts: float, eps_v: float = EPS_V
) -> np.ndarray:
    """Drive the unicycle with the linearization inverse of ``inputs``.

    Start pose: planned position, heading from atan2(vy, vx) at the
    first sample whose planned speed reaches eps_v (zero heading if it
    never does), speed from the first sample.  Inputs are inverted
    against the unicycle's own state each step and held over the step.
    """
    states_linear = np.asarray(states_linear, dtype=float)
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    speeds = np.linalg.norm(states_linear[:, 2:], axis=1)
    moving = np.flatnonzero(speeds >= eps_v)
    if moving.size:
        k0 = moving[0]
        theta0 = math.atan2(states_linear[k0, 3], states_linear[k0, 2])
    else:
        theta0 = 0.0
    out = np.empty((inputs.shape[0] + 1, 4))
    out[0] = [states_linear[0, 0], states_linear[0, 1], theta0, speeds[0]]
    last_omega = 0.0
    for k, u in enumerate(inputs):
        accel, omega = invert_feedback(u, out[k, 2], out[k, 3], last_omega, eps_v)
        last_omega = omega
        out[k + 1] = rk4_step(out[k], accel, omega, ts)
    return out


def compare_models(run, eps_v: float = EPS_V) -> ComparisonResult:
    """Deviation report for a finished closed-loop run.

    ``run`` needs a ``trajectory`` (states and sampling period) and the
    applied ``inputs``; the returned report carries the driven unicycle
    states alongside the per-sample position error.
    """
    states = run.trajectory.states
    inputs = np.asarray(run.inputs, dtype=float)
    uni = simulate_unicycle(states, inputs, run.trajectory.ts, eps_v)
    deviations = np.linalg.norm(states[:, :2] - uni[:, :2], axis=1)
    steps = np.diff(states[:, :2], axis=0)
    path_length = float(np.linalg.norm(steps, axis=1).sum())
    return ComparisonResult(
        deviations=deviations,
        max_deviation=float(deviations.max()),
        path_length=path_length,
        unicycle_states=uni,
    )
