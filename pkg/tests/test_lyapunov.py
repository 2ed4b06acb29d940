import numpy as np
import pytest

from _support import planted_instance, random_positive_state
from physarum_lp.dynamics import IntegratorConfig, integrate
from physarum_lp.lyapunov import (
    BoundaryContactError,
    barrier_value,
    finite_difference_slope,
    lyapunov_derivative,
    lyapunov_value,
    monotonicity_audit,
    vdot_upper_bound,
)
from physarum_lp.oracle import solve_exhaustive
from physarum_lp.problem import fig1, ladder_family

XSTAR = np.array([1.0, 0.0])


class TestLyapunovValue:
    def test_hand_values(self, fig1_lp):
        # V(x) = 2(x1 + 2 x2) - ln x1 for d = (1, 1), x* = (1, 0)
        assert lyapunov_value(fig1_lp, [1.0, 1.0], XSTAR) == pytest.approx(6.0)
        assert lyapunov_value(fig1_lp, [1.0, 0.5], XSTAR) == pytest.approx(4.0)
        assert lyapunov_value(fig1_lp, XSTAR, XSTAR) == pytest.approx(2.0)

    def test_d_rescales_value(self):
        lp = fig1(d=(2.0, 1.0))
        # 2(x1/2 + 2 x2) - (1/2) ln x1
        assert lyapunov_value(lp, [1.0, 1.0], XSTAR) == pytest.approx(5.0)

    def test_boundary_contact(self, fig1_lp):
        with pytest.raises(BoundaryContactError):
            lyapunov_value(fig1_lp, [0.0, 1.0], XSTAR)

    def test_minimized_at_xstar_over_feasible_set(self, fig1_lp):
        # V is not a global minimum at x*, but it is over {x1 + x2 = 1}
        v_star = lyapunov_value(fig1_lp, XSTAR, XSTAR)
        for x1 in np.linspace(0.01, 1.0, 100):
            x = np.array([x1, 1.0 - x1])
            assert lyapunov_value(fig1_lp, x, XSTAR) >= v_star - 1e-12


class TestLyapunovDerivative:
    def test_hand_value_at_uniform_state(self, fig1_lp):
        # 2(2/3 - 3) + 1 - 2/3 = -3 at x = (1, 1)
        point = lyapunov_derivative(fig1_lp, [1.0, 1.0], XSTAR)
        assert point.Vdot == pytest.approx(-3.0, abs=1e-12)

    def test_zero_at_optimum(self, fig1_lp):
        point = lyapunov_derivative(fig1_lp, XSTAR, XSTAR)
        assert point.Vdot == pytest.approx(0.0, abs=1e-12)

    def test_independent_of_d(self):
        a = lyapunov_derivative(fig1(d=(1.0, 1.0)), [0.7, 0.9], XSTAR)
        b = lyapunov_derivative(fig1(d=(5.0, 1.0)), [0.7, 0.9], XSTAR)
        assert a.Vdot == pytest.approx(b.Vdot, rel=1e-12)

    def test_cauchy_schwarz_chain(self):
        rng = np.random.default_rng(13)
        for _ in range(10):
            lp = planted_instance(rng)
            xstar = solve_exhaustive(lp).xstar_interior
            for _ in range(100):
                x = random_positive_state(rng, lp.m)
                ctq, geo, arith = lyapunov_derivative(lp, x, xstar).cs_chain
                scale = max(1.0, abs(arith))
                assert ctq <= geo + 1e-9 * scale
                assert geo <= arith + 1e-9 * scale

    def test_nonpositive_where_cost_exceeds_optimum(self, fig1_lp):
        rng = np.random.default_rng(29)
        hits = 0
        for _ in range(500):
            x = random_positive_state(rng, 2)
            if fig1_lp.c @ x >= 1.0:
                hits += 1
                assert lyapunov_derivative(fig1_lp, x, XSTAR).Vdot <= 1e-10
        assert hits > 100

    def test_positive_derivative_exists_below_optimal_cost(self, fig1_lp):
        # at x = (1/sqrt(2), eps) the closed form approaches 3 - 2 sqrt(2) > 0,
        # so the sign bound genuinely fails on part of the infeasible side
        point = lyapunov_derivative(fig1_lp, [2.0 ** -0.5, 1e-3], XSTAR)
        assert point.Vdot > 0.1
        # and the everywhere-valid upper bound still contains it
        assert point.Vdot <= vdot_upper_bound(fig1_lp, [2.0 ** -0.5, 1e-3], XSTAR) + 1e-12

    def test_upper_bound_dominates_everywhere(self):
        rng = np.random.default_rng(31)
        for _ in range(5):
            lp = planted_instance(rng)
            xstar = solve_exhaustive(lp).xstar_interior
            for _ in range(100):
                x = random_positive_state(rng, lp.m)
                vdot = lyapunov_derivative(lp, x, xstar).Vdot
                bound = vdot_upper_bound(lp, x, xstar)
                assert vdot <= bound + 1e-9 * max(1.0, abs(bound))


class TestBarrier:
    def test_hand_values(self, fig1_lp):
        assert barrier_value(fig1_lp, [np.e, 1.0], XSTAR) == pytest.approx(1.0)
        assert barrier_value(fig1_lp, [1.0, 0.5], XSTAR) == pytest.approx(0.0)

    def test_slope_bounded_along_converged_run(self, fig1_lp):
        traj = integrate(
            fig1_lp, [0.5, 0.5], IntegratorConfig(h=0.05, max_steps=100_000),
            xstar=XSTAR,
        )
        W = np.array([barrier_value(fig1_lp, x, XSTAR) for x in traj.xs])
        slopes = np.diff(W) / np.diff(traj.times)
        assert np.min(slopes) >= -float(fig1_lp.c @ XSTAR) - 1e-3


class TestFiniteDifference:
    def test_linear_values_recovered_exactly(self):
        t = np.linspace(0.0, 1.0, 11)
        assert finite_difference_slope(t, 3.0 * t + 1.0) == pytest.approx(3.0)

    def test_single_point(self):
        assert finite_difference_slope(np.array([0.0]), np.array([5.0])) == pytest.approx(
            [0.0]
        )


class TestMonotonicityAudit:
    def _run(self, lp, x0, h, xstar, max_steps=100_000, record_every=1,
             stop=1e-6):
        return integrate(
            lp,
            x0,
            IntegratorConfig(h=h, max_steps=max_steps, record_every=record_every,
                             epsilon_feas=stop, epsilon_gap=stop),
            xstar=xstar,
        )

    def test_fig1_run_passes(self, fig1_lp):
        traj = self._run(fig1_lp, [0.5, 0.5], 1.0 / 6.0, XSTAR)
        audit = monotonicity_audit(traj)
        assert audit.ok
        assert audit.increase_violations == 0
        assert audit.max_step_increase <= 1e-3

    def test_ladder_run_passes(self):
        lp = ladder_family(10, d_policy="diag-cost")
        result = solve_exhaustive(lp)
        # the gap threshold controls |Vdot| at termination only loosely on
        # this instance, so stop tighter than the audited 1e-6
        traj = self._run(lp, np.ones(lp.m), None, result.xstar_interior,
                         max_steps=100_000, record_every=10, stop=1e-8)
        assert traj.converged
        audit = monotonicity_audit(traj)
        assert audit.ok, str(audit)

    def test_final_derivative_small(self, fig1_lp):
        traj = self._run(fig1_lp, [0.5, 0.5], 0.05, XSTAR)
        audit = monotonicity_audit(traj)
        assert abs(audit.vdot_final) <= 1e-5

    def test_fd_discrepancy_halves_with_h(self, fig1_lp):
        def max_disc(h):
            traj = self._run(fig1_lp, [0.5, 0.5], h, XSTAR)
            return monotonicity_audit(traj).fd_max_discrepancy

        ratio = max_disc(0.025) / max_disc(0.05)
        assert 0.3 <= ratio <= 0.7  # first-order convergence of the Euler slope

    def test_requires_monitors(self, fig1_lp):
        traj = integrate(fig1_lp, [0.5, 0.5], IntegratorConfig(h=0.05, max_steps=5))
        with pytest.raises(ValueError, match="monitors"):
            monotonicity_audit(traj)

    def test_report_format(self, fig1_lp):
        traj = self._run(fig1_lp, [0.5, 0.5], 0.05, XSTAR)
        text = str(monotonicity_audit(traj))
        assert "audit" in text and "pass" in text
