"""Lyapunov and barrier evaluation, and monotonicity audits of recorded runs.

With x* an optimal solution whose support equals I (the union of optimal
supports) the candidate Lyapunov function is

    V(x) = 2 c^T D^{-1} x - sum_{i in I} (c_i x*_i / d_i) ln x_i,

with the closed-form derivative along the flow

    Vdot(x) = 2 (c^T q - c^T x) + c^T x* - b^T p,

which contains no d.  The Cauchy-Schwarz chain

    c^T q <= sqrt(c^T x) sqrt(b^T p) <= (c^T x + b^T p) / 2

holds at every state.  Note Vdot <= 0 is guaranteed only where
c^T x >= c^T x*; on the strictly infeasible side with c^T x < c^T x* the
derivative can be positive (V then climbs toward V(x*)), see
``vdot_upper_bound`` for the inequality that does hold everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .energy import min_energy_solution
from .problem import PositiveLP, as_state


class BoundaryContactError(ValueError):
    """V or W is undefined because x vanishes on the optimal support."""


def _check_interior(x: np.ndarray, idx: np.ndarray) -> None:
    if np.any(x[idx] <= 0):
        bad = [int(i) for i in idx[x[idx] <= 0]]
        raise BoundaryContactError(f"x is zero on optimal-support coordinates {bad}")


def lyapunov_value(lp: PositiveLP, x, xstar) -> float:
    x = as_state(x).x
    xstar = np.asarray(xstar, dtype=float).ravel()
    idx = np.flatnonzero(xstar > 0)
    _check_interior(x, idx)
    linear = 2.0 * float((lp.c / lp.d) @ x)
    log_term = float(
        np.sum(lp.c[idx] * xstar[idx] / lp.d[idx] * np.log(x[idx]))
    )
    return linear - log_term


@dataclass(frozen=True)
class LyapunovPoint:
    """V, its closed-form derivative, and the Cauchy-Schwarz chain at one state."""

    V: float
    Vdot: float
    cs_chain: tuple[float, float, float]
    btp: float


def lyapunov_derivative(lp: PositiveLP, x, xstar) -> LyapunovPoint:
    state = as_state(x)
    xstar = np.asarray(xstar, dtype=float).ravel()
    sol = min_energy_solution(lp, state)
    ctx = float(lp.c @ state.x)
    ctq = float(lp.c @ sol.q)
    vdot = 2.0 * (ctq - ctx) + float(lp.c @ xstar) - sol.btp
    geo = math.sqrt(max(ctx, 0.0)) * math.sqrt(max(sol.btp, 0.0))
    chain = (ctq, geo, 0.5 * (ctx + sol.btp))
    return LyapunovPoint(
        V=lyapunov_value(lp, state, xstar), Vdot=vdot, cs_chain=chain, btp=sol.btp
    )


def vdot_upper_bound(lp: PositiveLP, x, xstar) -> float:
    """The bound Vdot <= c^T x* - c^T x - (sqrt(c^T x) - sqrt(b^T p))^2.

    This follows from the Cauchy-Schwarz chain alone and holds at every
    state; it is nonpositive whenever c^T x >= c^T x*.
    """
    state = as_state(x)
    sol = min_energy_solution(lp, state)
    ctx = float(lp.c @ state.x)
    gap = (math.sqrt(max(ctx, 0.0)) - math.sqrt(max(sol.btp, 0.0))) ** 2
    return float(lp.c @ np.asarray(xstar, dtype=float)) - ctx - gap


def barrier_value(lp: PositiveLP, x, y) -> float:
    """W(x) = sum_{j in supp(y)} (c_j y_j / d_j) ln x_j for an optimal y."""
    x = as_state(x).x
    y = np.asarray(y, dtype=float).ravel()
    idx = np.flatnonzero(y > 0)
    _check_interior(x, idx)
    return float(np.sum(lp.c[idx] * y[idx] / lp.d[idx] * np.log(x[idx])))


def finite_difference_slope(times: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Central differences on the interior, one-sided at the endpoints."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.size < 2:
        return np.zeros_like(values)
    return np.gradient(values, times)


@dataclass
class MonotonicityAudit:
    """Outcome of the V-monotonicity / derivative-consistency checks."""

    n_recorded: int
    increase_violations: int
    max_step_increase: float
    step_tolerance: float
    fd_max_discrepancy: float
    fd_tolerance: float
    vdot_final: float
    vdot_final_tolerance: float
    ok: bool

    def __str__(self) -> str:
        lines = [
            f"recorded states            : {self.n_recorded}",
            f"V increase violations      : {self.increase_violations}"
            f" (max step increase {self.max_step_increase:.3e},"
            f" tolerance {self.step_tolerance:.3e})",
            f"|Vdot_fd - Vdot_analytic|  : max {self.fd_max_discrepancy:.3e}"
            f" (tolerance {self.fd_tolerance:.3e})",
            f"|Vdot| at termination      : {abs(self.vdot_final):.3e}"
            f" (tolerance {self.vdot_final_tolerance:.3e})",
            f"audit                      : {'pass' if self.ok else 'FAIL'}",
        ]
        return "\n".join(lines)


def monotonicity_audit(
    trajectory,
    epsilon_gap: float = 1e-6,
    increase_constant: float = 10.0,
    fd_constant: float = 10.0,
) -> MonotonicityAudit:
    """Audit a recorded trajectory (its V / Vdot monitors must be populated).

    Checks, with scale s = max(1, |V(x_0)|):
      a) V non-increasing up to a per-step tolerance ``increase_constant * h^2 * s``
         (the Euler local error);
      b) the finite-difference slope of V matches the closed-form derivative to
         ``fd_constant * h * s`` on the interior of the run;
      c) |Vdot| at the final state is at most ``10 * epsilon_gap``.
    """
    V = np.asarray(trajectory.monitors["V"], dtype=float)
    Vdot = np.asarray(trajectory.monitors["Vdot"], dtype=float)
    times = np.asarray(trajectory.times, dtype=float)
    h = float(trajectory.h)
    if V.size == 0 or np.any(np.isnan(V)):
        raise ValueError("trajectory was recorded without Lyapunov monitors")
    scale = max(1.0, abs(V[0]))
    step_tol = increase_constant * h * h * scale
    increases = np.diff(V)
    stride = max(1, int(round((times[1] - times[0]) / h))) if times.size > 1 else 1
    per_record_tol = step_tol * stride
    violations = int(np.sum(increases > per_record_tol))
    max_inc = float(np.max(increases, initial=0.0))
    fd = finite_difference_slope(times, V)
    fd_tol = fd_constant * (h * stride) * scale
    if V.size > 2:
        fd_disc = float(np.max(np.abs(fd[1:-1] - Vdot[1:-1])))
    else:
        fd_disc = 0.0
    vdot_final = float(Vdot[-1])
    vdot_final_tol = 10.0 * epsilon_gap
    ok = (
        violations == 0
        and fd_disc <= fd_tol
        and abs(vdot_final) <= vdot_final_tol
    )
    return MonotonicityAudit(
        n_recorded=int(V.size),
        increase_violations=violations,
        max_step_increase=max_inc,
        step_tolerance=per_record_tol,
        fd_max_discrepancy=fd_disc,
        fd_tolerance=fd_tol,
        vdot_final=vdot_final,
        vdot_final_tolerance=vdot_final_tol,
        ok=ok,
    )
