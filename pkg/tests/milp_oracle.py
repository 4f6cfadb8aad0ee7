"""Exhaustive reference solvers for small MILPs.

Deliberately independent of the package's simplex: LPs are solved by
enumerating every candidate vertex (each choice of n active planes
among constraint boundaries and bound planes), and MILPs by trying
every binary assignment.  Exponential, so only for tiny instances,
but hard to get wrong.

All variables must have finite bounds so the feasible set is a
polytope: then feasibility is equivalent to some candidate vertex
passing the feasibility check, and the optimum is attained at one.
With integer constraint coefficients the active-plane determinants
are integers, so the singularity filter at 0.5 is exact.
"""

import itertools

import numpy as np

FEAS_TOL = 1e-9


def lp_by_vertex_enumeration(A, senses, b, c, lo, hi):
    """('optimal', value, x) or ('infeasible', None, None)."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    c = np.asarray(c, dtype=float).reshape(-1)
    lo = np.asarray(lo, dtype=float).reshape(-1)
    hi = np.asarray(hi, dtype=float).reshape(-1)
    n = c.size
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise ValueError("the oracle needs finite variable bounds")
    if n == 0:
        ok = _feasible(A, senses, b, np.zeros((1, 0)), lo, hi)[0]
        return ("optimal", 0.0, np.zeros(0)) if ok else ("infeasible", None, None)

    normals = [A[i] for i in range(A.shape[0])]
    offsets = [b[i] for i in range(A.shape[0])]
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        normals.extend([e, e])
        offsets.extend([lo[j], hi[j]])
    normals = np.array(normals)
    offsets = np.array(offsets)

    combos = np.array(
        list(itertools.combinations(range(len(normals)), n)), dtype=int
    )
    mats = normals[combos]
    rhs = offsets[combos]
    dets = np.linalg.det(mats)
    good = np.abs(dets) > 0.5
    if not good.any():
        return ("infeasible", None, None)
    xs = np.linalg.solve(mats[good], rhs[good][..., None])[..., 0]
    feas = _feasible(A, senses, b, xs, lo, hi)
    if not feas.any():
        return ("infeasible", None, None)
    vals = xs[feas] @ c
    k = int(np.argmin(vals))
    return ("optimal", float(vals[k]), xs[feas][k])


def _feasible(A, senses, b, xs, lo, hi):
    ok = np.all(xs >= lo - FEAS_TOL, axis=1) & np.all(xs <= hi + FEAS_TOL, axis=1)
    if A.size:
        r = xs @ A.T
        for i, s in enumerate(senses):
            if s < 0:
                ok &= r[:, i] <= b[i] + FEAS_TOL
            elif s > 0:
                ok &= r[:, i] >= b[i] - FEAS_TOL
            else:
                ok &= np.abs(r[:, i] - b[i]) <= FEAS_TOL
    return ok


def milp_by_enumeration(A, senses, b, c, lo, hi, binary_ids):
    """('optimal', value, x) or ('infeasible', None, None).

    Tries every 0/1 assignment of the binaries, substitutes it into
    the constraints, and solves what remains by vertex enumeration.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    c = np.asarray(c, dtype=float).reshape(-1)
    lo = np.asarray(lo, dtype=float).reshape(-1)
    hi = np.asarray(hi, dtype=float).reshape(-1)
    binary_ids = list(binary_ids)
    cont_ids = [j for j in range(c.size) if j not in set(binary_ids)]
    best_val, best_x = None, None
    for assignment in itertools.product((0.0, 1.0), repeat=len(binary_ids)):
        zvec = np.array(assignment)
        b_eff = b - (A[:, binary_ids] @ zvec if A.size else 0.0)
        status, val, xc = lp_by_vertex_enumeration(
            A[:, cont_ids] if A.size else np.zeros((0, len(cont_ids))),
            senses,
            b_eff,
            c[cont_ids],
            lo[cont_ids],
            hi[cont_ids],
        )
        if status != "optimal":
            continue
        val += float(c[binary_ids] @ zvec)
        if best_val is None or val < best_val:
            best_val = val
            best_x = np.empty(c.size)
            best_x[cont_ids] = xc
            best_x[binary_ids] = zvec
    if best_val is None:
        return ("infeasible", None, None)
    return ("optimal", best_val, best_x)
