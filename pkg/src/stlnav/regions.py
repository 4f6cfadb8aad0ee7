"""Convex regions as halfspace intersections {x | G x <= l}.

Rows of G are normalized to unit norm at construction so face offsets
read as distances and the inflate operation means the same thing on
every face.  Regions parsed from specification text are axis-aligned
bounding boxes of the listed corner points; the state box of the
vehicle uses the same representation in four dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRegion, EmptyAfterShrink

DEGENERATE_TOL = 1e-12
OPPOSITE_TOL = 1e-9


@dataclass(frozen=True)
class Polytope:
    """Halfspace intersection G x <= l with unit-norm rows of G."""

    G: np.ndarray
    l: np.ndarray

    def __post_init__(self):
        G = np.atleast_2d(np.asarray(self.G, dtype=float))
        l = np.asarray(self.l, dtype=float).reshape(-1)
        if G.shape[0] != l.shape[0]:
            raise ValueError(f"{G.shape[0]} faces but {l.shape[0]} offsets")
        norms = np.linalg.norm(G, axis=1)
        if np.any(norms < DEGENERATE_TOL):
            raise DegenerateRegion("face normal with zero norm")
        object.__setattr__(self, "G", G / norms[:, None])
        object.__setattr__(self, "l", l / norms)

    @property
    def n_faces(self) -> int:
        return self.G.shape[0]

    @property
    def dim(self) -> int:
        return self.G.shape[1]


def region_from_coords(xs, ys) -> Polytope:
    """Axis-aligned bounding box of the given corner coordinates.

    Faces are ordered +x, -x, +y, -y.  Zero extent along either axis
    raises DegenerateRegion; boxes must have area.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size == 0 or xs.shape != ys.shape:
        raise ValueError("need matching, nonempty coordinate lists")
    xlo, xhi = float(xs.min()), float(xs.max())
    ylo, yhi = float(ys.min()), float(ys.max())
    if xhi - xlo < DEGENERATE_TOL or yhi - ylo < DEGENERATE_TOL:
        raise DegenerateRegion(
            f"box [{xlo}, {xhi}] x [{ylo}, {yhi}] has zero extent"
        )
    G = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    l = np.array([xhi, -xlo, yhi, -ylo])
    return Polytope(G, l)


def box(lo, hi) -> Polytope:
    """Axis-aligned box lo <= x <= hi in any dimension."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if lo.shape != hi.shape or lo.ndim != 1:
        raise ValueError("need matching 1-d bound vectors")
    if np.any(hi - lo < DEGENERATE_TOL):
        raise DegenerateRegion("box with zero extent along some axis")
    n = lo.size
    eye = np.eye(n)
    G = np.vstack([eye, -eye])
    l = np.concatenate([hi, -lo])
    return Polytope(G, l)


def signed_margin(p: Polytope, x) -> float:
    """min_i (l_i - g_i . x): positive inside, negative outside.

    The magnitude is the exact Euclidean distance to the boundary for
    interior points of a box; outside it is a lower bound on it (the
    worst single-face violation).
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != p.dim:
        raise ValueError(f"point has dimension {x.size}, region {p.dim}")
    return float(np.min(p.l - p.G @ x))


def inflate(p: Polytope, rho: float) -> Polytope:
    """Push every face outward by rho (inward for negative rho).

    Shrinking past the point where two opposite faces cross leaves an
    empty set and raises EmptyAfterShrink; for axis-aligned boxes the
    check is exact.
    """
    new_l = p.l + rho
    if rho < 0.0:
        for i in range(p.n_faces):
            for j in range(i + 1, p.n_faces):
                if np.linalg.norm(p.G[i] + p.G[j]) < OPPOSITE_TOL:
                    if new_l[i] + new_l[j] < 0.0:
                        raise EmptyAfterShrink(
                            f"faces {i} and {j} cross after shrinking by {-rho}"
                        )
    return Polytope(p.G.copy(), new_l)
