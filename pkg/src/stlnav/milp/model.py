"""Mixed-integer linear program container and debug dump.

A model collects variables (continuous or binary, with bounds), linear
constraints, and a linear objective to minimize.  Variable ids are
dense integers assigned in creation order; constraint coefficients are
kept sparse as (ids, coefficients) pairs.  ``to_arrays`` lowers the
model to the dense arrays the simplex core consumes.

``dump_lp`` writes the model in LP format for eyeballing::

    \\ Problem: <name>
    Minimize
     obj: 2 x0 - 3 x1 + 0.5
    Subject To
     c0: 1 x0 + 1 x1 <= 4
    Bounds
     -1 <= x0 <= 1
     x1 free
    Binaries
     z2
    End

One variable per Bounds line (``free`` when both bounds are infinite,
``= v`` when fixed); binaries are listed by name on one line.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

LEQ, EQ, GEQ = -1, 0, 1
_SENSES = {"<=": LEQ, "==": EQ, "=": EQ, ">=": GEQ}
_SENSE_TEXT = {LEQ: "<=", EQ: "=", GEQ: ">="}


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass
class SolveStats:
    nodes: int
    pivots: int
    wall_time: float


@dataclass
class MilpSolution:
    status: Status
    values: np.ndarray | None
    objective: float | None
    stats: SolveStats


@dataclass
class _Constraint:
    ids: np.ndarray
    coefs: np.ndarray
    sense: int
    rhs: float
    name: str


class MilpModel:
    """Minimization MILP built incrementally.

    ``big_m`` is the disjunction constant encoders use when relaxing a
    constraint against an inactive binary; it rides along on the model
    so every encoding step sees the same value.
    """

    def __init__(self, name: str = "milp", big_m: float = 1000.0):
        self.name = name
        self.big_m = big_m
        self.lo: list[float] = []
        self.hi: list[float] = []
        self.kinds: list[str] = []  # "c" or "b"
        self.var_names: list[str] = []
        self.constraints: list[_Constraint] = []
        self.obj_ids: np.ndarray = np.empty(0, dtype=int)
        self.obj_coefs: np.ndarray = np.empty(0)
        self.obj_const: float = 0.0

    @property
    def n_vars(self) -> int:
        return len(self.lo)

    @property
    def n_constraints(self) -> int:
        return len(self.constraints)

    @property
    def binary_ids(self) -> list[int]:
        return [i for i, k in enumerate(self.kinds) if k == "b"]

    def add_continuous(self, lo: float, hi: float, name: str = "") -> int:
        if not lo <= hi:
            raise ValueError(f"variable bounds [{lo}, {hi}] are empty")
        vid = self.n_vars
        self.lo.append(float(lo))
        self.hi.append(float(hi))
        self.kinds.append("c")
        self.var_names.append(name or f"x{vid}")
        return vid

    def add_binary(self, name: str = "") -> int:
        vid = self.n_vars
        self.lo.append(0.0)
        self.hi.append(1.0)
        self.kinds.append("b")
        self.var_names.append(name or f"z{vid}")
        return vid

    def add_constraint(self, coeffs, sense: str, rhs: float, name: str = "") -> int:
        if sense not in _SENSES:
            raise ValueError(f"unknown sense {sense!r}")
        items = sorted(coeffs.items()) if isinstance(coeffs, dict) else sorted(coeffs)
        ids = np.array([i for i, _ in items], dtype=int)
        if ids.size and (ids.min() < 0 or ids.max() >= self.n_vars):
            raise ValueError("constraint references an unknown variable id")
        if np.unique(ids).size != ids.size:
            raise ValueError("duplicate variable id in constraint")
        coefs = np.array([c for _, c in items], dtype=float)
        cid = len(self.constraints)
        self.constraints.append(
            _Constraint(ids, coefs, _SENSES[sense], float(rhs), name or f"c{cid}")
        )
        return cid

    def set_objective(self, coeffs, constant: float = 0.0):
        items = sorted(coeffs.items()) if isinstance(coeffs, dict) else sorted(coeffs)
        self.obj_ids = np.array([i for i, _ in items], dtype=int)
        self.obj_coefs = np.array([c for _, c in items], dtype=float)
        self.obj_const = float(constant)

    def to_arrays(self):
        """(A, senses, b, c, lo, hi) dense lowering for the simplex core."""
        m, n = self.n_constraints, self.n_vars
        A = np.zeros((m, n))
        senses = np.zeros(m, dtype=np.int8)
        b = np.zeros(m)
        for i, con in enumerate(self.constraints):
            A[i, con.ids] = con.coefs
            senses[i] = con.sense
            b[i] = con.rhs
        c = np.zeros(n)
        c[self.obj_ids] = self.obj_coefs
        return A, senses, b, c, np.array(self.lo), np.array(self.hi)


def _fmt_terms(ids, coefs, names) -> str:
    parts = []
    for vid, coef in zip(ids, coefs):
        if not parts:
            parts.append(f"{float(coef)!r} {names[vid]}")
        elif coef < 0:
            parts.append(f"- {float(-coef)!r} {names[vid]}")
        else:
            parts.append(f"+ {float(coef)!r} {names[vid]}")
    return " ".join(parts) if parts else "0"


def dump_lp(model: MilpModel, path: str):
    """Write the model to ``path`` in the LP layout documented above."""
    lines = [f"\\ Problem: {model.name}", "Minimize"]
    obj = _fmt_terms(model.obj_ids, model.obj_coefs, model.var_names)
    if model.obj_const:
        sign = "+" if model.obj_const > 0 else "-"
        obj += f" {sign} {float(abs(model.obj_const))!r}"
    lines.append(f" obj: {obj}")
    lines.append("Subject To")
    for con in model.constraints:
        terms = _fmt_terms(con.ids, con.coefs, model.var_names)
        lines.append(
            f" {con.name}: {terms} {_SENSE_TEXT[con.sense]} {float(con.rhs)!r}"
        )
    lines.append("Bounds")
    for vid in range(model.n_vars):
        lo, hi = model.lo[vid], model.hi[vid]
        name = model.var_names[vid]
        if lo == -np.inf and hi == np.inf:
            lines.append(f" {name} free")
        elif lo == hi:
            lines.append(f" {name} = {lo!r}")
        elif lo == -np.inf:
            lines.append(f" {name} <= {hi!r}")
        elif hi == np.inf:
            lines.append(f" {name} >= {lo!r}")
        else:
            lines.append(f" {lo!r} <= {name} <= {hi!r}")
    binaries = [model.var_names[i] for i in model.binary_ids]
    if binaries:
        lines.append("Binaries")
        lines.append(" " + " ".join(binaries))
    lines.append("End")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
