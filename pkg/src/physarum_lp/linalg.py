"""Shared rank / row-selection helpers.

Both the energy solver and the brute-force oracle classify degenerate
instances with the same factorization and the same thresholds, so they
agree on the rank of borderline matrices.
"""

from __future__ import annotations

import numpy as np

# Relative threshold below which a projected row counts as dependent.
DEPENDENCE_RTOL = 1e-10


def independent_rows(mat: np.ndarray, rtol: float = DEPENDENCE_RTOL) -> list[int]:
    """Greedy maximal independent row set, first eligible row wins.

    Deterministic by construction: rows are scanned in index order and a row
    is kept iff its residual after projecting out the kept rows exceeds
    ``rtol * max(1, largest row norm)``.
    """
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2:
        raise ValueError("expected a 2-D array")
    scale = max(1.0, float(np.max(np.linalg.norm(mat, axis=1), initial=0.0)))
    tol = rtol * scale
    kept: list[int] = []
    basis: list[np.ndarray] = []
    for i in range(mat.shape[0]):
        r = mat[i].astype(float, copy=True)
        for bvec in basis:
            r -= (r @ bvec) * bvec
        # second pass stabilizes near-dependent rows
        for bvec in basis:
            r -= (r @ bvec) * bvec
        nrm = np.linalg.norm(r)
        if nrm > tol:
            kept.append(i)
            basis.append(r / nrm)
    return kept


def numerical_rank(mat: np.ndarray, rtol: float = DEPENDENCE_RTOL) -> int:
    return len(independent_rows(mat, rtol=rtol))
