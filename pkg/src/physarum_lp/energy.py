"""Minimum-energy solutions q(x), potentials, and subdeterminant bounds.

For a state x with support B, q(x) minimizes sum_{i in B} (c_i / x_i) f_i^2
over { f : A f = b, supp(f) subseteq B }.  With R_B = diag(c_i / x_i) and
A_B the support columns restricted to a maximal independent row set, the
KKT system gives

    L_B p_B = b_B,   L_B = A_B R_B^{-1} A_B^T,   q_B = R_B^{-1} A_B^T p_B,

and the dissipation identity b^T p = q^T R q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .linalg import independent_rows
from .problem import PositiveLP, StateVector, as_state

#: Relative residual above which a support is declared infeasible.
FEAS_RTOL = 1e-9

#: Condition-number estimate beyond which the SPD solve falls back to
#: least squares (near-boundary states make R_B^{-1} entries vanish).
CONDITION_LIMIT = 1e12


class EnergyError(ValueError):
    """Energy solve failed."""


class EmptySupportError(EnergyError):
    pass


class InfeasibleOnSupportError(EnergyError):
    """b is not in the column span of the support columns."""


class SubmatrixGuardError(ValueError):
    """Exact subdeterminant enumeration would be too large."""


@dataclass(frozen=True)
class EnergySolution:
    """q(x), zero-padded potentials p, and derived scalars."""

    q: np.ndarray
    p: np.ndarray
    btp: float
    energy: float
    support: tuple[int, ...]
    ill_conditioned: bool = False


def min_energy_solution(lp: PositiveLP, x) -> EnergySolution:
    """Solve for q(x) at a state x in G*.

    Raises :class:`EmptySupportError` for the all-zero state and
    :class:`InfeasibleOnSupportError` when b is inconsistent with the
    retained support columns.
    """
    state = as_state(x)
    if state.m != lp.m:
        raise EnergyError(f"state has {state.m} entries, instance has {lp.m}")
    support = state.support
    if not support:
        raise EmptySupportError("state has empty support")
    B = list(support)
    A_B = lp.A[:, B]
    rows = independent_rows(A_B)
    Ar = A_B[rows]
    conductance = state.x[B] / lp.c[B]  # 1 / r_i on the support
    L = (Ar * conductance) @ Ar.T
    b_r = lp.b[rows]
    ill = bool(np.linalg.cond(L) > CONDITION_LIMIT) if L.size else False
    if ill:
        p_r = np.linalg.lstsq(L, b_r, rcond=None)[0]
    else:
        p_r = np.linalg.solve(L, b_r)
    q = np.zeros(lp.m)
    q[B] = conductance * (Ar.T @ p_r)
    residual = float(np.max(np.abs(lp.A @ q - lp.b), initial=0.0))
    if residual > FEAS_RTOL * max(1.0, float(np.max(np.abs(lp.b)))):
        raise InfeasibleOnSupportError(
            f"residual {residual:.3e} on support {support}; "
            "b is not reachable with flows on these columns"
        )
    p = np.zeros(lp.n)
    p[rows] = p_r
    btp = float(lp.b @ p)
    r_support = lp.c[B] / state.x[B]
    energy = float(q[B] @ (r_support * q[B]))
    return EnergySolution(
        q=q, p=p, btp=btp, energy=energy, support=support, ill_conditioned=ill
    )


def subdeterminant_bound(lp: PositiveLP, guard: int = 10**6) -> tuple[float, float]:
    """Exact M = max |det| over all square submatrices of A, and beta = M ||b||_1.

    Enumerates every square submatrix, so the candidate count is guarded.
    """
    n, m = lp.n, lp.m
    total = sum(math.comb(n, k) * math.comb(m, k) for k in range(1, min(n, m) + 1))
    if total > guard:
        raise SubmatrixGuardError(
            f"{total} square submatrices exceeds the guard of {guard}"
        )
    A = lp.A
    M = float(np.max(np.abs(A)))
    for k in range(2, min(n, m) + 1):
        for rows in combinations(range(n), k):
            sub_rows = A[list(rows)]
            for cols in combinations(range(m), k):
                det = abs(np.linalg.det(sub_rows[:, list(cols)]))
                if det > M:
                    M = float(det)
    beta = M * float(np.sum(np.abs(lp.b)))
    return M, beta


@dataclass(frozen=True)
class PotentialBoundReport:
    lhs: float
    bound: float
    epsilon: float
    ok: bool


def potential_bound_check(
    lp: PositiveLP, x, y, M: float | None = None
) -> PotentialBoundReport:
    """Check ||A_B^T p_B||_inf <= ||c||_1 M / eps with eps = min_{i in supp(y)} x_i / y_i.

    y must be feasible with supp(y) a subset of supp(x).
    """
    state = as_state(x)
    y = np.asarray(y, dtype=float).ravel()
    if np.any(y < 0):
        raise EnergyError("y has negative entries")
    resid = float(np.max(np.abs(lp.A @ y - lp.b), initial=0.0))
    if resid > FEAS_RTOL * max(1.0, float(np.max(np.abs(lp.b)))):
        raise EnergyError(f"y is infeasible (residual {resid:.3e})")
    supp_y = np.flatnonzero(y > 0)
    if not set(supp_y.tolist()) <= set(state.support):
        raise EnergyError("supp(y) is not contained in supp(x)")
    if M is None:
        M, _ = subdeterminant_bound(lp)
    sol = min_energy_solution(lp, state)
    B = list(state.support)
    lhs = float(np.max(np.abs(lp.A[:, B].T @ sol.p), initial=0.0))
    eps = float(np.min(state.x[supp_y] / y[supp_y])) if supp_y.size else np.inf
    bound = float(np.sum(lp.c)) * M / eps
    return PotentialBoundReport(lhs=lhs, bound=bound, epsilon=eps, ok=lhs <= bound * (1 + 1e-12) + 1e-12)
