"""Bounded-variable simplex with an explicit basis inverse.

Constraints A x {<=,=,>=} b with box bounds l <= x <= u are brought to
equality form by one slack column per row (bounded [0, inf), [0, 0],
or (-inf, 0] according to the sense).  Phase one adds an artificial
column to every row whose slack cannot absorb the initial residual and
minimizes the artificial sum; phase two minimizes the real objective.
Slack and artificial columns are signed unit vectors, so they are
handled implicitly and never stored.

Pricing is Dantzig (most negative reduced cost, ties to the lowest
variable id); after 1000 consecutive degenerate pivots the rule
switches to Bland's smallest-index rule for the rest of the solve,
which guarantees termination.  Any pivot candidate smaller than 1e-11
in magnitude is never trusted: when only such pivots block an
otherwise unbounded direction, or the refactorized basis fails its
residual check, the solve aborts with NumericalBreakdown instead of
returning a wrong answer.

Beyond the cold primal path there is a warm path for callers that
re-solve the same program under changed variable bounds, which is
exactly what branching on binaries does.  An optimal basis stays dual
feasible when only bounds move, so ``set_bounds`` followed by
``resolve`` repairs primal feasibility with dual simplex pivots and
finishes with a primal cleanup, usually in a handful of iterations
instead of a full solve.  The warm path reports ``stalled`` whenever
it would have to trust a pivot it should not, and callers fall back to
a cold solve, so it is an accelerator, never an oracle.

Everything is deterministic: identical inputs take identical pivot
sequences.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg.blas import dger

from ..errors import NumericalBreakdown
from .model import EQ, GEQ, LEQ, MilpModel, Status

AT_LOWER, AT_UPPER, FREE = 0, 1, 2

PIVOT_TOL = 1e-11
DUAL_PIVOT_TOL = 1e-9
FEAS_TOL = 1e-7
DUAL_TOL = 1e-9
DEGEN_TOL = 1e-12
BLAND_TRIGGER = 1000
REFACTOR_EVERY = 256
RESIDUAL_TOL = 1e-6


class _Simplex:
    def __init__(self, A, senses, b, lo, hi):
        self.A = np.ascontiguousarray(A, dtype=float)
        self.A_F = np.asfortranarray(self.A)
        self.b = np.asarray(b, dtype=float)
        self.m, self.n = self.A.shape
        m, n = self.m, self.n
        self.nt = n + 2 * m
        slack_lo = np.where(senses == GEQ, -np.inf, 0.0)
        slack_hi = np.where(senses == LEQ, np.inf, 0.0)
        self.lo = np.concatenate([lo, slack_lo, np.zeros(m)])
        self.hi = np.concatenate([hi, slack_hi, np.full(m, np.inf)])
        self.art_sign = np.ones(m)
        self.x = np.zeros(self.nt)
        self.status = np.full(self.nt, AT_LOWER, dtype=np.int8)
        self.basis = np.empty(m, dtype=int)
        self.in_basis = np.zeros(self.nt, dtype=bool)
        self.Binv = np.eye(m)
        self.c = np.zeros(self.nt)
        self.pivots = 0
        self.bland = False
        self.always_bland = False
        self.degen_run = 0
        self.phase = 0
        self.last_outcome = ""
        self._since_refactor = 0
        self._d = np.empty(self.nt)
        self._alpha = np.empty(self.nt)
        self._cand = np.empty(m)

    # -- column access ------------------------------------------------

    def column_times_binv(self, j) -> np.ndarray:
        """w = Binv @ (column j of the equality-form matrix)."""
        n, m = self.n, self.m
        if j < n:
            return self.Binv @ self.A_F[:, j]
        if j < n + m:
            return self.Binv[:, j - n].copy()
        return self.art_sign[j - n - m] * self.Binv[:, j - n - m]

    def nonbasic_value(self, j) -> float:
        if self.status[j] == AT_LOWER:
            return self.lo[j]
        if self.status[j] == AT_UPPER:
            return self.hi[j]
        return 0.0

    # -- crash start --------------------------------------------------

    def crash(self):
        """Nonbasics to their bounds nearest zero, slacks absorb what
        they can, artificials cover the rest with a diagonal basis."""
        n, m = self.n, self.m
        self.x[:] = 0.0
        self.status[:] = AT_LOWER
        self.in_basis[:] = False
        self.art_sign[:] = 1.0
        self.hi[n + m :] = np.inf
        self.bland = self.always_bland
        self.degen_run = 0
        lo_s, hi_s = self.lo[:n], self.hi[:n]
        for j in range(n):
            lof, hif = np.isfinite(lo_s[j]), np.isfinite(hi_s[j])
            if lof and hif:
                st = AT_LOWER if abs(lo_s[j]) <= abs(hi_s[j]) else AT_UPPER
            elif lof:
                st = AT_LOWER
            elif hif:
                st = AT_UPPER
            else:
                st = FREE
            self.status[j] = st
            self.x[j] = self.nonbasic_value(j)
        r = self.b - self.A @ self.x[:n]
        slack_lo, slack_hi = self.lo[n : n + m], self.hi[n : n + m]
        clamped = np.clip(r, slack_lo, slack_hi)
        diag = np.ones(m)
        for i in range(m):
            if r[i] == clamped[i]:
                v = n + i
                self.basis[i] = v
                self.x[v] = r[i]
            else:
                v = n + i
                self.x[v] = clamped[i]
                self.status[v] = AT_LOWER if clamped[i] == slack_lo[i] else AT_UPPER
                a = n + m + i
                sign = 1.0 if r[i] > clamped[i] else -1.0
                self.art_sign[i] = sign
                self.x[a] = abs(r[i] - clamped[i])
                self.basis[i] = a
                diag[i] = sign
        self.in_basis[self.basis] = True
        self.Binv = np.diag(1.0 / diag)
        self._since_refactor = 0

    # -- factorization ------------------------------------------------

    def refactorize(self):
        n, m = self.n, self.m
        B = np.zeros((m, m))
        for k, v in enumerate(self.basis):
            if v < n:
                B[:, k] = self.A_F[:, v]
            elif v < n + m:
                B[v - n, k] = 1.0
            else:
                B[v - n - m, k] = self.art_sign[v - n - m]
        try:
            self.Binv = np.linalg.inv(B)
        except np.linalg.LinAlgError:
            raise NumericalBreakdown("singular basis at refactorization")
        resid = np.max(np.abs(B @ self.Binv - np.eye(m))) if m else 0.0
        if resid > RESIDUAL_TOL:
            raise NumericalBreakdown(
                f"basis inverse residual {resid:.2e} exceeds {RESIDUAL_TOL}"
            )
        self._since_refactor = 0
        self.recompute_basics()

    def recompute_basics(self):
        n, m = self.n, self.m
        xs = self.x[:n].copy()
        xs[self.in_basis[:n]] = 0.0
        rhs = self.b - self.A @ xs
        for i in range(m):
            if not self.in_basis[n + i]:
                rhs[i] -= self.x[n + i]
            if not self.in_basis[n + m + i]:
                rhs[i] -= self.art_sign[i] * self.x[n + m + i]
        self.x[self.basis] = self.Binv @ rhs

    # -- pricing ------------------------------------------------------

    def reduced_costs(self) -> np.ndarray:
        n, m = self.n, self.m
        y = self.Binv.T @ self.c[self.basis]
        d = self._d
        d[:n] = self.c[:n] - self.A.T @ y
        d[n : n + m] = self.c[n : n + m] - y
        d[n + m :] = self.c[n + m :] - self.art_sign * y
        return d

    def eligible_mask(self, d) -> np.ndarray:
        movable = ~self.in_basis & (self.lo != self.hi)
        movable[self.n + self.m :] = False  # artificials never re-enter
        down = (self.status == AT_LOWER) & (d < -DUAL_TOL)
        up = (self.status == AT_UPPER) & (d > DUAL_TOL)
        free = (self.status == FREE) & (np.abs(d) > DUAL_TOL)
        return movable & (down | up | free)

    # -- shared pivot bookkeeping -------------------------------------

    def _update_inverse(self, r, w):
        piv = w[r]
        Binv = self.Binv
        Binv[r, :] /= piv
        row = Binv[r, :].copy()
        wk = w.copy()
        wk[r] = 0.0
        # Binv -= outer(wk, row), fused through BLAS; Binv.T is the
        # Fortran view of the same memory so the update is in place
        dger(-1.0, row, wk, a=Binv.T, overwrite_a=1)
        self._since_refactor += 1
        if self._since_refactor >= REFACTOR_EVERY:
            self.refactorize()

    # -- primal loop --------------------------------------------------

    def iterate(self) -> str:
        """Run primal simplex with the current cost vector."""
        m = self.m
        while True:
            d = self.reduced_costs()
            elig = self.eligible_mask(d)
            if not elig.any():
                return "optimal"
            if self.bland:
                j = int(np.flatnonzero(elig)[0])
            else:
                score = np.where(elig, np.abs(d), -1.0)
                j = int(np.argmax(score))
            dirn = 1.0
            if self.status[j] == AT_UPPER or (self.status[j] == FREE and d[j] > 0):
                dirn = -1.0
            w = self.column_times_binv(j)
            delta = -dirn * w
            cand = self._cand
            cand[:] = np.inf
            if m:
                xb = self.x[self.basis]
                lob = self.lo[self.basis]
                hib = self.hi[self.basis]
                pos = delta > PIVOT_TOL
                cand[pos] = (hib[pos] - xb[pos]) / delta[pos]
                neg = delta < -PIVOT_TOL
                cand[neg] = (lob[neg] - xb[neg]) / delta[neg]
                np.maximum(cand, 0.0, out=cand)
            t_row = cand.min() if m else np.inf
            t_enter = self.hi[j] - self.lo[j] if self.status[j] != FREE else np.inf
            t = min(t_row, t_enter)
            if not np.isfinite(t):
                # an unbounded ray, unless an untrustworthy tiny pivot
                # is the only thing in the way
                tiny = (np.abs(delta) > 0) & (np.abs(delta) <= PIVOT_TOL)
                if m and tiny.any():
                    blocked_up = tiny & (delta > 0) & np.isfinite(self.hi[self.basis])
                    blocked_dn = tiny & (delta < 0) & np.isfinite(self.lo[self.basis])
                    if blocked_up.any() or blocked_dn.any():
                        raise NumericalBreakdown(
                            "direction blocked only by pivots below 1e-11"
                        )
                return "unbounded"
            self.pivots += 1
            if t <= DEGEN_TOL:
                self.degen_run += 1
                if self.degen_run >= BLAND_TRIGGER:
                    self.bland = True
            else:
                self.degen_run = 0
            if t_enter <= t_row:
                # bound flip, no basis change
                self.x[j] += dirn * t_enter
                self.status[j] = AT_UPPER if self.status[j] == AT_LOWER else AT_LOWER
                if m:
                    self.x[self.basis] += delta * t_enter
                continue
            ties = np.flatnonzero(cand == t_row)
            # among rows tied at the blocking ratio take the largest
            # pivot magnitude; a tiny pivot admitted here is how a
            # basis drifts toward singularity
            r = int(ties[np.argmax(np.abs(w[ties]))])
            if abs(w[r]) < PIVOT_TOL:
                raise NumericalBreakdown(
                    f"pivot magnitude {abs(w[r]):.2e} below {PIVOT_TOL}"
                )
            self.pivot(j, r, w, dirn, t, delta)

    def pivot(self, j, r, w, dirn, t, delta):
        leaving = self.basis[r]
        self.x[self.basis] += delta * t
        self.x[j] = self.nonbasic_value(j) + dirn * t
        if delta[r] < 0:
            self.x[leaving] = self.lo[leaving]
            self.status[leaving] = AT_LOWER
        else:
            self.x[leaving] = self.hi[leaving]
            self.status[leaving] = AT_UPPER
        self.in_basis[leaving] = False
        self.in_basis[j] = True
        self.basis[r] = j
        self._update_inverse(r, w)

    # -- dual loop ----------------------------------------------------

    def dual_iterate(self, max_pivots: int) -> str:
        """Repair primal feasibility from a dual-feasible basis.

        Picks the most bound-violating basic variable, prices the
        corresponding tableau row, and enters the column with the
        smallest dual ratio of the correct sign (ties to the lowest
        id).  Returns 'optimal' once every basic is within bounds,
        'infeasible' when a violated row has no usable column at all
        (a certificate of emptiness), and 'stalled' when the pivot
        budget runs out or only untrustworthy pivots remain.  The
        certificate and the give-up verdict are only issued off a
        freshly refactorized inverse: accumulated update error can
        flip the sign of small row entries, and an emptiness proof
        built on such a row would be wrong, not merely slow.
        """
        n, m = self.n, self.m
        done = 0
        # reduced costs are kept up to date across pivots with the
        # rank-one identity d' = d - (d_j / alpha_j) alpha and only
        # recomputed from scratch after a refactorization; any drift
        # can cost extra pivots but never a wrong verdict, because the
        # infeasibility certificate reads the row signs alone and the
        # primal cleanup re-prices from the inverse
        d = self.reduced_costs()
        while True:
            xb = self.x[self.basis]
            below = self.lo[self.basis] - xb
            above = xb - self.hi[self.basis]
            viol = np.maximum(below, above)
            r = int(np.argmax(viol))
            if viol[r] <= FEAS_TOL:
                return "optimal"
            if done >= max_pivots:
                return "stalled"
            to_lower = below[r] >= above[r]
            er = self.Binv[r]
            alpha = self._alpha
            alpha[:n] = er @ self.A_F
            alpha[n : n + m] = er
            alpha[n + m :] = self.art_sign * er
            movable = ~self.in_basis & (self.lo != self.hi)
            movable[n + m :] = False
            if to_lower:
                right_sign = np.where(self.status == AT_UPPER, alpha, -alpha)
            else:
                right_sign = np.where(self.status == AT_UPPER, -alpha, alpha)
            free_cols = self.status == FREE
            if free_cols.any():
                right_sign[free_cols] = np.abs(alpha[free_cols])
            can = movable & (right_sign > DUAL_PIVOT_TOL)
            if not can.any():
                if self._since_refactor:
                    self.refactorize()
                    d = self.reduced_costs()
                    continue
                gray = movable & (right_sign > PIVOT_TOL)
                if not gray.any():
                    return "infeasible"
                return "stalled"
            num = np.where(self.status == AT_UPPER, -d, d)
            ratios = np.full(self.nt, np.inf)
            ratios[can] = np.maximum(num[can], 0.0) / np.abs(alpha[can])
            tied = np.flatnonzero(ratios == ratios.min())
            j = int(tied[np.argmax(np.abs(alpha[tied]))])
            w = self.column_times_binv(j)
            if abs(w[r]) < DUAL_PIVOT_TOL:
                if self._since_refactor:
                    self.refactorize()
                    d = self.reduced_costs()
                    continue
                return "stalled"  # row and column disagree on a fresh basis
            d -= (d[j] / alpha[j]) * alpha
            target = self.lo[self.basis[r]] if to_lower else self.hi[self.basis[r]]
            step = (xb[r] - target) / w[r]
            leaving = self.basis[r]
            self.x[self.basis] -= step * w
            self.x[j] = self.nonbasic_value(j) + step
            self.x[leaving] = target
            self.status[leaving] = AT_LOWER if to_lower else AT_UPPER
            self.in_basis[leaving] = False
            self.in_basis[j] = True
            self.basis[r] = j
            self.pivots += 1
            done += 1
            self._update_inverse(r, w)
            if self._since_refactor == 0:
                d = self.reduced_costs()

    # -- phases -------------------------------------------------------

    def drive_out_artificials(self):
        n, m = self.n, self.m
        for r in range(m):
            v = self.basis[r]
            if v < n + m:
                continue
            row = self.Binv[r, :] @ self.A
            slack_row = self.Binv[r, :]
            best_j, best_mag = -1, 1e-7
            for j in range(n + m):
                if self.in_basis[j] or self.lo[j] == self.hi[j]:
                    continue
                mag = abs(row[j]) if j < n else abs(slack_row[j - n])
                if mag > best_mag:
                    best_mag, best_j = mag, j
            if best_j < 0:
                continue  # redundant row; artificial stays basic at zero
            w = self.column_times_binv(best_j)
            dirn = 1.0 if self.status[best_j] != AT_UPPER else -1.0
            self.pivot(best_j, r, w, dirn, 0.0, -dirn * w)

    def solve(self, c) -> str:
        """Cold solve: crash, phase one if needed, then phase two."""
        self.phase = 1
        self.crash()
        n, m = self.n, self.m
        if np.any(self.x[n + m :] != 0.0):
            self.c[:] = 0.0
            self.c[n + m :] = 1.0
            outcome = self.iterate()
            assert outcome == "optimal"  # phase-1 objective is bounded below
            infeas = float(self.x[n + m :].sum())
            if infeas > FEAS_TOL:
                self.last_outcome = "infeasible"
                return "infeasible"
            self.hi[n + m :] = 0.0
            self.x[n + m :][self.in_basis[n + m :]] = 0.0
            self.drive_out_artificials()
            self.recompute_basics()
        else:
            self.hi[n + m :] = 0.0
        self.phase = 2
        self.c[:] = 0.0
        self.c[:n] = c
        self.last_outcome = self.iterate()
        return self.last_outcome

    # -- warm path ----------------------------------------------------

    def set_bounds(self, lo, hi):
        """Replace the structural variable box, keeping the basis.

        Nonbasic variables snap to the bound their status names under
        the new box; basic values are then recomputed, which is where
        any new primal infeasibility shows up for ``resolve``.
        """
        self.lo[: self.n] = lo
        self.hi[: self.n] = hi
        vals = np.where(
            self.status == AT_LOWER,
            self.lo,
            np.where(self.status == AT_UPPER, self.hi, 0.0),
        )
        outside = ~self.in_basis
        self.x[outside] = vals[outside]
        self.recompute_basics()

    def resolve(self, max_dual_pivots: int | None = None) -> str:
        """Re-optimize after ``set_bounds`` from the previous basis.

        Requires a prior ``solve`` that reached phase two; the caller
        owns the fallback to a cold solve whenever 'stalled' comes
        back.
        """
        if self.phase != 2 or self.last_outcome not in ("optimal", "infeasible"):
            return "stalled"
        if max_dual_pivots is None:
            max_dual_pivots = max(200, 2 * self.m)
        out = self.dual_iterate(max_dual_pivots)
        if out != "optimal":
            if out == "infeasible":
                self.last_outcome = "infeasible"
            return out
        self.last_outcome = self.iterate()
        return self.last_outcome


def solve_arrays(A, senses, b, c, lo, hi):
    """(status, x, objective, pivots) for min c.x, A x ~ b, lo<=x<=hi."""
    sx = _Simplex(A, senses, b, lo, hi)
    outcome = sx.solve(np.asarray(c, dtype=float))
    n = sx.n
    if outcome == "infeasible":
        return Status.INFEASIBLE, None, None, sx.pivots
    if outcome == "unbounded":
        return Status.UNBOUNDED, None, None, sx.pivots
    x = np.clip(sx.x[:n], lo, hi)
    return Status.OPTIMAL, x, float(np.dot(c, x)), sx.pivots


def solve_lp(model: MilpModel):
    """(status, x, objective) for the LP relaxation of ``model``.

    Binaries participate with their [0, 1] box only; use solve_milp
    for integrality.  Optimal solutions are vertex solutions.
    """
    A, senses, b, c, lo, hi = model.to_arrays()
    status, x, obj, _ = solve_arrays(A, senses, b, c, lo, hi)
    if obj is not None:
        obj += model.obj_const
    return status, x, obj
