"""Branch and bound over binary variables, diving with a best-bound
restart heap.

Branching picks the most fractional binary (largest distance to the
nearest integer, ties to the lowest variable id).  From each expanded
node the search dives: it fixes the branching binary to zero, solves
that child, and keeps descending until the dive is fathomed
(infeasible, integral, or no better than the incumbent minus the
absolute gap of 1e-6), deferring the one-child of every level onto a
heap keyed on (parent LP bound, creation order).  When a dive ends the heap yields the deferred node with the
most promising bound and a new dive starts there, so the search is
best-bound across dives and depth-first inside one; the parent bound
is a valid bound for the deferred subtree, hence popping a bound
within the gap of the incumbent proves optimality.

One simplex instance lives for the whole search.  Consecutive dive
levels differ in a single variable bound, so each node re-solve loads
the node's box and repairs the previous optimal basis with dual
pivots, a handful of iterations instead of a cold solve; whenever the
warm path stalls the node is solved cold from scratch, so the answers
never depend on the warm path being clever, only the speed does.
Both paths are deterministic, hence so is the tree.

The node count in the returned statistics is the number of LP
relaxations solved, the root included; exceeding the cap raises
NodeLimitExceeded rather than returning a wrong status.  An unbounded
root relaxation is reported as Unbounded (with box-bounded binaries
the ray is purely continuous, so the integer problem inherits it
whenever it is feasible at all).  Before an optimum is returned its
incumbent is checked against every row and bound once more, and a
violation raises NumericalBreakdown instead of reporting a wrong
solution.
"""

from __future__ import annotations

import heapq
import time

import numpy as np

from ..errors import NodeLimitExceeded, NumericalBreakdown
from .model import GEQ, LEQ, MilpModel, MilpSolution, SolveStats, Status
from .simplex import _Simplex

INT_TOL = 1e-6
GAP_TOL = 1e-6
CHECK_TOL = 1e-5


def _feasibility_violation(A, senses, b, x, lo, hi) -> float:
    r = A @ x - b
    row_viol = np.where(
        senses == LEQ, r, np.where(senses == GEQ, -r, np.abs(r))
    )
    v = float(np.max(row_viol, initial=0.0))
    v = max(v, float(np.max(lo - x, initial=0.0)))
    v = max(v, float(np.max(x - hi, initial=0.0)))
    return v


def solve_milp(model: MilpModel, node_limit: int = 1_000_000) -> MilpSolution:
    t_start = time.perf_counter()
    A, senses, b, c, lo0, hi0 = model.to_arrays()
    binaries = model.binary_ids
    c = np.asarray(c, dtype=float)
    n = A.shape[1]
    state = {"nodes": 0, "pivots": 0, "sx": _Simplex(A, senses, b, lo0, hi0)}

    def stats() -> SolveStats:
        return SolveStats(
            nodes=state["nodes"],
            pivots=state["pivots"],
            wall_time=time.perf_counter() - t_start,
        )

    def lp(fixes: dict[int, int]):
        state["nodes"] += 1
        if state["nodes"] > node_limit:
            raise NodeLimitExceeded(
                f"exceeded {node_limit} nodes with the tree still open"
            )
        lo, hi = lo0.copy(), hi0.copy()
        for vid, val in fixes.items():
            lo[vid] = hi[vid] = float(val)
        sx = state["sx"]
        p0 = sx.pivots
        outcome = "stalled"
        if sx.phase == 2 and sx.last_outcome in ("optimal", "infeasible"):
            try:
                sx.set_bounds(lo, hi)
                outcome = sx.resolve()
            except NumericalBreakdown:
                outcome = "stalled"
        if outcome == "stalled":
            state["pivots"] += sx.pivots - p0
            cold = _Simplex(A, senses, b, lo, hi)
            p0 = 0
            try:
                outcome = cold.solve(c)
            except NumericalBreakdown:
                # one clean restart under Bland's rule, whose pivot
                # choices avoid the degenerate trap; a second failure
                # propagates rather than risking a wrong verdict
                state["pivots"] += cold.pivots
                cold = _Simplex(A, senses, b, lo, hi)
                cold.always_bland = True
                outcome = cold.solve(c)
            if outcome == "optimal" or state["sx"].phase != 2:
                # adopt the cold basis only when it rearms the warm
                # path; otherwise keep the previous dual-feasible one
                state["sx"] = cold
            sx = cold
        state["pivots"] += sx.pivots - p0
        if outcome == "infeasible":
            return Status.INFEASIBLE, None, None
        if outcome == "unbounded":
            return Status.UNBOUNDED, None, None
        x = np.clip(sx.x[:n], lo, hi)
        return Status.OPTIMAL, x, float(np.dot(c, x))

    def most_fractional(x) -> int | None:
        best, best_f = None, INT_TOL
        for vid in binaries:
            f = abs(x[vid] - round(x[vid]))
            if f > best_f:
                best, best_f = vid, f
        return best

    status, x, obj = lp({})
    if status is Status.UNBOUNDED:
        return MilpSolution(Status.UNBOUNDED, None, None, stats())
    if status is Status.INFEASIBLE:
        return MilpSolution(Status.INFEASIBLE, None, None, stats())

    incumbent, inc_obj = None, np.inf
    heap = []
    counter = 0

    def branch(fixes, x, obj):
        """Defer the one-child of a fractional node onto the heap and
        return the zero-child to dive into, or None when integral."""
        nonlocal counter
        j = most_fractional(x)
        if j is None:
            return None
        defer = dict(fixes)
        defer[j] = 1
        heapq.heappush(heap, (obj, counter, defer))
        counter += 1
        child = dict(fixes)
        child[j] = 0
        return child

    node = branch({}, x, obj)
    if node is None:
        incumbent, inc_obj = x, obj

    while True:
        if node is None:
            if not heap:
                break
            bound, _, node = heapq.heappop(heap)
            if bound >= inc_obj - GAP_TOL:
                break  # best open bound is within gap of the incumbent
        fixes = node
        node = None
        cstatus, cx, cobj = lp(fixes)
        if cstatus is Status.INFEASIBLE:
            continue
        if cstatus is Status.UNBOUNDED:
            return MilpSolution(Status.UNBOUNDED, None, None, stats())
        if cobj >= inc_obj - GAP_TOL:
            continue  # fathomed by bound
        child = branch(fixes, cx, cobj)
        if child is None:
            incumbent, inc_obj = cx, cobj
        else:
            node = child

    if incumbent is None:
        return MilpSolution(Status.INFEASIBLE, None, None, stats())
    viol = _feasibility_violation(A, senses, b, incumbent, lo0, hi0)
    if viol > CHECK_TOL:
        raise NumericalBreakdown(
            f"incumbent violates the model by {viol:.2e} on the final check"
        )
    return MilpSolution(
        Status.OPTIMAL, incumbent, inc_obj + model.obj_const, stats()
    )
