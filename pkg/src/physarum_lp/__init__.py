"""Positive-LP solving via the non-uniform directed Physarum dynamics.

The library evolves a positive vector x under the ODE  xdot = D (q(x) - x),
where q(x) is the minimum-energy solution of A f = b with resistances c_i/x_i
and D is a positive diagonal reactivity matrix.  Forward-Euler integration of
this flow drives c^T x to the optimum of

    minimize c^T x  subject to  A x = b, x >= 0,   c > 0.

Subpackages:

* ``problem``   -- instance container, builders, text (de)serialization
* ``energy``    -- minimum-energy solutions, potentials, subdeterminant bounds
* ``dynamics``  -- forward-Euler integrator and trajectory recording
* ``lyapunov``  -- Lyapunov/barrier evaluation and trajectory audits
* ``oracle``    -- brute-force ground-truth LP solver
* ``analysis``  -- entry-angle analytics for 2-variable instances
* ``cli``       -- experiment command line (solve / compare / flowfield / slope)
"""

from .problem import (
    PositiveLP,
    StateVector,
    ValidationReport,
    validate,
    build_incidence_lp,
    ladder_family,
    fig1,
    read_problem,
    write_problem,
)
from .energy import EnergySolution, min_energy_solution, subdeterminant_bound
from .dynamics import IntegratorConfig, Trajectory, integrate, euler_step, rhs
from .oracle import OracleResult, solve_exhaustive, feasibility_distance
from .lyapunov import lyapunov_value, lyapunov_derivative, barrier_value
from .analysis import predict_entry, closed_form_q2, measure_entry_slope

__version__ = "0.1.0"

__all__ = [
    "PositiveLP",
    "StateVector",
    "ValidationReport",
    "validate",
    "build_incidence_lp",
    "ladder_family",
    "fig1",
    "read_problem",
    "write_problem",
    "EnergySolution",
    "min_energy_solution",
    "subdeterminant_bound",
    "IntegratorConfig",
    "Trajectory",
    "integrate",
    "euler_step",
    "rhs",
    "OracleResult",
    "solve_exhaustive",
    "feasibility_distance",
    "lyapunov_value",
    "lyapunov_derivative",
    "barrier_value",
    "predict_entry",
    "closed_form_q2",
    "measure_entry_slope",
]
