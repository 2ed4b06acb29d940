"""Shared helpers for the test suite."""

import numpy as np

from physarum_lp.problem import PositiveLP


def planted_instance(rng: np.random.Generator, n_max: int = 4, m_max: int = 7) -> PositiveLP:
    """Random instance with a planted strictly positive feasible point."""
    while True:
        n = int(rng.integers(1, n_max + 1))
        m = int(rng.integers(n + 1, m_max + 1))
        A = rng.integers(-2, 3, size=(n, m)).astype(float)
        if any(not np.any(A[:, j]) for j in range(m)):
            continue
        z = rng.uniform(0.5, 2.0, size=m)
        b = A @ z
        c = rng.uniform(0.5, 3.0, size=m)
        return PositiveLP(A, b, c, np.ones(m), name="planted")


def random_positive_state(rng: np.random.Generator, m: int) -> np.ndarray:
    return 10.0 ** rng.uniform(-2.0, 1.0, size=m)
