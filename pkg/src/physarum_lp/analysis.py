"""Entry-angle analytics for 2-variable, single-constraint instances.

For ``minimize c1 x1 + c2 x2  s.t.  x1 + x2 = 1`` with c2 > c1 > 0 the
optimum is (1, 0).  Writing x = (1 - eps1, eps2), the linearized flow gives
eps2 decay at rate (c2 - c1) d2 / c2 and eps1 decay at rate d1, so:

* d1 > (c2 - c1) d2 / c2 ("sloped"): both epsilons settle on the slow mode
  and the trajectory enters (1, 0) along a straight line of slope
  ((c2 - c1) d2 - c2 d1) / (c1 d1)  (e.g. -9/5 for c = (1, 2), d = (5, 1));
* d1 < (c2 - c1) d2 / c2 ("horizontal"): eps2 vanishes faster and the
  trajectory flattens onto the x1-axis;
* equality ("critical"): the linearization is inconclusive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class InsufficientTailError(ValueError):
    """Not enough recorded tail states inside the fit window."""


@dataclass(frozen=True)
class EntryPrediction:
    regime: str  # "horizontal" | "sloped" | "critical"
    slope: float | None  # d eps2 / d eps1 at entry, sloped regime only
    rate_eps1: float
    rate_eps2: float


def _check_cd(c, d) -> tuple[float, float, float, float]:
    c1, c2 = float(c[0]), float(c[1])
    d1, d2 = float(d[0]), float(d[1])
    if not (c2 > c1 > 0):
        raise ValueError(f"requires c2 > c1 > 0, got c = ({c1}, {c2})")
    if d1 <= 0 or d2 <= 0:
        raise ValueError(f"reactivities must be positive, got d = ({d1}, {d2})")
    return c1, c2, d1, d2


def predict_entry(c, d, critical_rtol: float = 1e-12) -> EntryPrediction:
    c1, c2, d1, d2 = _check_cd(c, d)
    rate_eps2 = (c2 - c1) * d2 / c2
    rate_eps1 = min(d1, rate_eps2)
    margin = d1 - rate_eps2
    if abs(margin) <= critical_rtol * max(d1, rate_eps2):
        return EntryPrediction("critical", None, rate_eps1, rate_eps2)
    if margin < 0:
        return EntryPrediction("horizontal", None, rate_eps1, rate_eps2)
    slope = ((c2 - c1) * d2 - c2 * d1) / (c1 * d1)
    return EntryPrediction("sloped", slope, rate_eps1, rate_eps2)


def closed_form_q2(c, x) -> np.ndarray:
    """Parallel-edge minimum-energy split q_i = x_i c_{3-i} / (x1 c2 + x2 c1)."""
    c = np.asarray(c, dtype=float)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("closed form requires x > 0 componentwise")
    N = x[0] * c[1] + x[1] * c[0]
    return np.array([x[0] * c[1] / N, x[1] * c[0] / N])


@dataclass(frozen=True)
class MeasuredSlope:
    slope: float
    regime: str  # "sloped" | "horizontal"
    n_points: int
    ratio_start: float
    ratio_end: float


def measure_entry_slope(
    trajectory,
    eps_lo: float = 1e-8,
    eps_hi: float = 1e-2,
    min_points: int = 20,
    horizontal_ratio: float = 0.05,
) -> MeasuredSlope:
    """Fit the entry direction from the tail of a converged (1, 0) run.

    Uses recorded states with eps1 = 1 - x1 and eps2 = x2 both inside
    (eps_lo, eps_hi); the slope is the through-origin least-squares fit of
    eps2 against eps1, reported as d eps2 / d eps1 (negative when entering
    from the feasible side).  Classified horizontal when the eps2/eps1
    ratio collapses by more than 1/horizontal_ratio across the window.
    """
    xs = np.asarray(trajectory.xs, dtype=float)
    if xs.ndim != 2 or xs.shape[1] != 2:
        raise ValueError("entry-slope measurement needs a 2-variable trajectory")
    eps1 = np.abs(1.0 - xs[:, 0])
    eps2 = xs[:, 1]
    mask = (eps1 > eps_lo) & (eps1 < eps_hi) & (eps2 > eps_lo) & (eps2 < eps_hi)
    n = int(mask.sum())
    if n < min_points:
        raise InsufficientTailError(
            f"only {n} tail states inside ({eps_lo}, {eps_hi}); need {min_points}"
        )
    e1, e2 = eps1[mask], eps2[mask]
    k = float((e1 @ e2) / (e1 @ e1))
    ratio_start = float(e2[0] / e1[0])
    ratio_end = float(e2[-1] / e1[-1])
    regime = "horizontal" if ratio_end < horizontal_ratio * ratio_start else "sloped"
    return MeasuredSlope(
        slope=-k, regime=regime, n_points=n, ratio_start=ratio_start, ratio_end=ratio_end
    )


def predicted_eps1_curve(c, d, C: float, t) -> np.ndarray:
    """Linearized eps1(t) with integration constant C.

    Returns NaN in the critical regime (d1 = (c2 - c1) d2 / c2), where the
    closed form degenerates and the linear analysis is inconclusive.
    """
    c1, c2, d1, d2 = _check_cd(c, d)
    t = np.asarray(t, dtype=float)
    denom = c2 * d1 - (c2 - c1) * d2
    if denom == 0.0:
        return np.full_like(t, math.nan)
    rate2 = (c2 - c1) * d2 / c2
    return (c1 * d1 / denom) * (np.exp(-rate2 * t) - np.exp(-d1 * t)) + C * np.exp(
        -d1 * t
    )
