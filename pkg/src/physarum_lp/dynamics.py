"""Forward-Euler integration of xdot = D (q(x) - x) with trajectory recording.

The discrete update is

    x_i(t+1) = (1 - h d_i) x_i(t) + h d_i q_i(t)      for i in supp(x),

and coordinates off the support stay exactly zero.  With h d_i <= 1 and
q >= 0 the iterate stays nonnegative; when q has negative entries the
update may cross zero, in which case the coordinate is clamped at the
zero threshold and dropped from the support (or, for protected indices,
kept positive and a step-size warning is emitted).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .energy import EnergySolution, SubmatrixGuardError, min_energy_solution, subdeterminant_bound
from .problem import PositiveLP, StateVector, as_state, zero_threshold
from . import lyapunov as _lyap

MONITOR_COLUMNS = ("ctx", "residual_inf", "V", "Vdot", "btp", "ctq")


class StepSizeWarning(UserWarning):
    """The discretization pushed a protected coordinate toward zero."""


class DivergenceError(RuntimeError):
    """Iterates left the theoretical bound by orders of magnitude."""


def default_step_size(lp: PositiveLP) -> float:
    return 1.0 / (2.0 * float(np.sum(np.abs(lp.c))))


@dataclass
class IntegratorConfig:
    """Step size, stopping rule, and recording stride.

    ``h`` defaults to 1 / (2 ||c||_1) and is clamped so that h d_i <= 1 for
    all i.  ``max_steps`` defaults to ceil((1/h) ln(||c||_1 / epsilon)).
    The run stops early once the feasibility residual and the gap
    |c^T x - c^T q| both fall below their tolerances.
    """

    h: float | None = None
    epsilon: float = 0.1
    max_steps: int | None = None
    record_every: int = 1
    epsilon_feas: float = 1e-6
    epsilon_gap: float = 1e-6

    def resolve(self, lp: PositiveLP) -> tuple[float, int]:
        h = self.h if self.h is not None else default_step_size(lp)
        if h <= 0:
            raise ValueError("step size must be positive")
        hd_max = h * float(np.max(lp.d))
        if hd_max > 1.0:
            warnings.warn(
                f"h = {h} makes h*max(d) = {hd_max:.3g} > 1; clamping h to 1/max(d)",
                StepSizeWarning,
                stacklevel=2,
            )
            h = 1.0 / float(np.max(lp.d))
        if self.max_steps is not None:
            max_steps = int(self.max_steps)
        else:
            norm_c1 = float(np.sum(np.abs(lp.c)))
            max_steps = math.ceil((1.0 / h) * math.log(norm_c1 / self.epsilon))
            max_steps = max(max_steps, 1)
        return h, max_steps


@dataclass
class Trajectory:
    """Recorded iterates and per-step monitors of one integration run.

    ``times[k] = steps[k] * h``.  Monitors are aligned with ``steps``; the
    Lyapunov columns are NaN when no reference optimum was supplied.
    """

    steps: np.ndarray
    times: np.ndarray
    xs: np.ndarray
    monitors: dict[str, np.ndarray]
    h: float
    converged: bool
    stop_reason: str
    n_steps: int
    clamped: tuple[int, ...] = ()
    warnings: list[str] = field(default_factory=list)

    @property
    def final_x(self) -> np.ndarray:
        return self.xs[-1]

    @property
    def final_state(self) -> StateVector:
        return StateVector.from_array(self.xs[-1])

    def __len__(self) -> int:
        return len(self.steps)

    def to_csv(self, path) -> None:
        m = self.xs.shape[1]
        header = ["step", "time"] + [f"x_{j + 1}" for j in range(m)] + list(MONITOR_COLUMNS)
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            for k in range(len(self.steps)):
                row = [f"{int(self.steps[k])}", f"{self.times[k]:.17g}"]
                row += [f"{v:.17g}" for v in self.xs[k]]
                row += [f"{self.monitors[c][k]:.17g}" for c in MONITOR_COLUMNS]
                fh.write(",".join(row) + "\n")


def rhs(lp: PositiveLP, x) -> np.ndarray:
    """Vector field d_i (q_i(x) - x_i) on the support, zero off it."""
    state = as_state(x)
    sol = min_energy_solution(lp, state)
    out = np.zeros(lp.m)
    B = list(state.support)
    out[B] = lp.d[B] * (sol.q[B] - state.x[B])
    return out


def _advance(
    lp: PositiveLP,
    x: np.ndarray,
    q: np.ndarray,
    h: float,
    protected: frozenset[int],
    clamped: set[int],
    messages: list[str],
) -> np.ndarray:
    """One Euler update with zero-crossing handling.  Mutates bookkeeping."""
    hd = h * lp.d
    new_x = np.where(x > 0, (1.0 - hd) * x + hd * q, 0.0)
    if np.any(~np.isfinite(new_x)):
        raise DivergenceError("Euler update produced non-finite entries")
    thr = zero_threshold(new_x)
    for i in np.flatnonzero((x > 0) & (new_x <= thr)):
        i = int(i)
        if i in protected:
            # strictly above the threshold so the coordinate survives rounding
            new_x[i] = 2.0 * thr if thr > 0 else np.finfo(float).tiny
            msg = f"coordinate {i} of the optimal support was clamped at the zero threshold; reduce h"
            messages.append(msg)
            warnings.warn(msg, StepSizeWarning, stacklevel=3)
        else:
            new_x[i] = 0.0
            clamped.add(i)
    return new_x


def euler_step(lp: PositiveLP, x, h: float, protected=()) -> StateVector:
    """Single discrete update from a state in G*."""
    state = as_state(x)
    sol = min_energy_solution(lp, state)
    clamped: set[int] = set()
    messages: list[str] = []
    new_x = _advance(lp, state.x, sol.q, h, frozenset(protected), clamped, messages)
    return StateVector.from_array(new_x)


def integrate(
    lp: PositiveLP,
    x0,
    cfg: IntegratorConfig | None = None,
    xstar=None,
) -> Trajectory:
    """Run the Euler iteration until convergence or the step cap.

    ``xstar`` (an optimal solution with support I, normally the oracle's
    relative-interior point) enables the Lyapunov monitors and protects the
    coordinates in I from zero-crossing clamps.
    """
    cfg = cfg or IntegratorConfig()
    h, max_steps = cfg.resolve(lp)
    state0 = as_state(x0)
    if state0.m != lp.m:
        raise ValueError(f"x0 has {state0.m} entries, instance has {lp.m}")
    x = state0.x.copy()
    protected: frozenset[int] = frozenset()
    if xstar is not None:
        xstar = np.asarray(xstar, dtype=float).ravel()
        protected = frozenset(int(i) for i in np.flatnonzero(xstar > 0))

    try:
        _, beta = subdeterminant_bound(lp, guard=200_000)
    except SubmatrixGuardError:
        beta = float(np.sum(np.abs(lp.b)))  # guard scale only, not a proven bound
    blow_up = 1e6 * max(float(np.max(np.abs(x), initial=0.0)), beta)

    steps: list[int] = []
    xs: list[np.ndarray] = []
    monitors: dict[str, list[float]] = {c: [] for c in MONITOR_COLUMNS}
    clamped: set[int] = set()
    messages: list[str] = []

    def observe(k: int, sol: EnergySolution) -> tuple[float, float, float]:
        ctx = float(lp.c @ x)
        ctq = float(lp.c @ sol.q)
        residual = float(np.max(np.abs(lp.A @ x - lp.b)))
        if xstar is not None:
            V = _lyap.lyapunov_value(lp, x, xstar)
            Vdot = 2.0 * (ctq - ctx) + float(lp.c @ xstar) - sol.btp
        else:
            V = Vdot = math.nan
        steps.append(k)
        xs.append(x.copy())
        for name, value in zip(
            MONITOR_COLUMNS, (ctx, residual, V, Vdot, sol.btp, ctq)
        ):
            monitors[name].append(value)
        return ctx, ctq, residual

    converged = False
    stop_reason = "max_steps"
    k = 0
    while True:
        sol = min_energy_solution(lp, StateVector.from_array(x))
        recorded = k % cfg.record_every == 0
        if recorded:
            ctx, ctq, residual = observe(k, sol)
        else:
            ctx = float(lp.c @ x)
            ctq = float(lp.c @ sol.q)
            residual = float(np.max(np.abs(lp.A @ x - lp.b)))
        if residual <= cfg.epsilon_feas and abs(ctx - ctq) <= cfg.epsilon_gap:
            if not recorded:
                observe(k, sol)
            converged = True
            stop_reason = "converged"
            break
        if k >= max_steps:
            if not recorded:
                observe(k, sol)
            break
        if float(np.max(np.abs(x))) > blow_up:
            raise DivergenceError(
                f"||x||_inf exceeded {blow_up:.3e} at step {k}; check h and d"
            )
        x = _advance(lp, x, sol.q, h, protected, clamped, messages)
        k += 1

    return Trajectory(
        steps=np.array(steps, dtype=int),
        times=np.array(steps, dtype=float) * h,
        xs=np.array(xs),
        monitors={name: np.array(vals) for name, vals in monitors.items()},
        h=h,
        converged=converged,
        stop_reason=stop_reason,
        n_steps=k,
        clamped=tuple(sorted(clamped)),
        warnings=messages,
    )


def flow_field(
    lp: PositiveLP,
    x1_range: tuple[float, float],
    x2_range: tuple[float, float],
    resolution: int = 20,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Evaluate the vector field on a planar grid (2-variable instances only)."""
    if lp.m != 2:
        raise ValueError(f"flow fields are only defined for m = 2, got m = {lp.m}")
    lo1, hi1 = x1_range
    lo2, hi2 = x2_range
    if lo1 <= 0 or lo2 <= 0:
        raise ValueError("grid must lie in the open positive quadrant")
    g1 = np.linspace(lo1, hi1, resolution)
    g2 = np.linspace(lo2, hi2, resolution)
    X1, X2 = np.meshgrid(g1, g2)
    F1 = np.zeros_like(X1)
    F2 = np.zeros_like(X2)
    for idx in np.ndindex(X1.shape):
        f = rhs(lp, np.array([X1[idx], X2[idx]]))
        F1[idx], F2[idx] = f[0], f[1]
    return X1, X2, F1, F2
