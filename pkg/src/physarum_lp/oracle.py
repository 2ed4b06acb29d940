"""Ground-truth LP solving by exhaustive basic-solution enumeration.

Desk-scale only: every column subset of size rank(A) is tried as a basis.
Since c > 0 and x >= 0 the objective is bounded below, so a feasible
instance attains its optimum at a vertex; "unbounded" cannot occur.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .linalg import numerical_rank
from .problem import PositiveLP, as_state

#: Two optimal values tie when they differ by at most this, relatively.
TIE_RTOL = 1e-9

#: Residual tolerance for accepting a basic solution as feasible.
RESIDUAL_RTOL = 1e-9


class EnumerationGuardError(ValueError):
    """The instance is too large for exhaustive enumeration."""


class InfeasibleError(ValueError):
    """The instance has no feasible point."""


@dataclass(frozen=True)
class OracleResult:
    feasible: bool
    optimal_value: float | None
    optimal_vertices: np.ndarray | None  # one vertex per row
    support_union: tuple[int, ...]  # the index set I
    xstar_interior: np.ndarray | None  # average of the optimal vertices


def solve_exhaustive(
    lp: PositiveLP, guard: int = 10**6, tie_rtol: float = TIE_RTOL
) -> OracleResult:
    """Enumerate all basic feasible solutions and return the optimal face."""
    n, m = lp.n, lp.m
    rank = numerical_rank(lp.A)
    if math.comb(m, rank) > guard:
        raise EnumerationGuardError(
            f"C({m},{rank}) = {math.comb(m, rank)} basis candidates exceeds {guard}"
        )
    b_scale = max(1.0, float(np.max(np.abs(lp.b))))
    vertices: list[np.ndarray] = []
    values: list[float] = []
    for cols in combinations(range(m), rank):
        sub = lp.A[:, cols]
        sol, _res, sub_rank, _sv = np.linalg.lstsq(sub, lp.b, rcond=None)
        if sub_rank < rank:
            continue
        residual = float(np.max(np.abs(sub @ sol - lp.b), initial=0.0))
        if residual > RESIDUAL_RTOL * b_scale:
            continue
        if np.any(sol < -RESIDUAL_RTOL * b_scale):
            continue
        x = np.zeros(m)
        x[list(cols)] = np.clip(sol, 0.0, None)
        if any(np.max(np.abs(x - v)) <= 1e-9 * max(1.0, np.max(np.abs(v))) for v in vertices):
            continue
        vertices.append(x)
        values.append(float(lp.c @ x))
    if not vertices:
        return OracleResult(
            feasible=False,
            optimal_value=None,
            optimal_vertices=None,
            support_union=(),
            xstar_interior=None,
        )
    best = min(values)
    tol = tie_rtol * max(1.0, abs(best))
    optimal = [v for v, val in zip(vertices, values) if val - best <= tol]
    stacked = np.array(optimal)
    interior = stacked.mean(axis=0)
    support = tuple(int(i) for i in np.flatnonzero(as_state(interior).x > 0))
    return OracleResult(
        feasible=True,
        optimal_value=best,
        optimal_vertices=stacked,
        support_union=support,
        xstar_interior=interior,
    )


def feasibility_distance(lp: PositiveLP, x, guard: int = 2**20) -> float:
    """Euclidean distance from x to F = {z : Az = b, z >= 0}.

    Exact brute-force projection: for every candidate zero set Z the affine
    projection onto {Az = b, z_Z = 0} is computed; the true projection is the
    affine minimizer of its own face, so the minimum over all faces with a
    nonnegative minimizer is the distance.
    """
    x = np.asarray(x, dtype=float).ravel()
    m = lp.m
    if 2**m > guard:
        raise EnumerationGuardError(f"2^{m} faces exceeds the guard of {guard}")
    b_scale = max(1.0, float(np.max(np.abs(lp.b))))
    best = None
    for mask in range(2**m):
        free = [j for j in range(m) if not (mask >> j) & 1]
        z = np.zeros(m)
        if free:
            A_f = lp.A[:, free]
            x_f = x[free]
            corr, _res, _rank, _sv = np.linalg.lstsq(A_f, lp.b - A_f @ x_f, rcond=None)
            z_f = x_f + corr
            if float(np.max(np.abs(A_f @ z_f - lp.b), initial=0.0)) > RESIDUAL_RTOL * b_scale:
                continue
            if np.any(z_f < -1e-9):
                continue
            z[free] = np.clip(z_f, 0.0, None)
        elif float(np.max(np.abs(lp.b), initial=0.0)) > RESIDUAL_RTOL * b_scale:
            continue
        dist = float(np.linalg.norm(z - x))
        if best is None or dist < best:
            best = dist
    if best is None:
        raise InfeasibleError("no feasible point: every face projection failed")
    return best
