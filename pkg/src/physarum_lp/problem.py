"""Positive-LP instances: construction, validation, builders, text format.

An instance is ``minimize c^T x  s.t.  A x = b, x >= 0`` together with a
strictly positive reactivity vector ``d`` (the diagonal of the matrix D in
``xdot = D (q(x) - x)``).

File format (``physarum-lp v1``, line oriented, ``#`` starts a comment)::

    physarum-lp v1
    # name: <label>          (optional)
    n m
    <n rows of A, m space-separated decimals each>
    <b: n decimals>
    <c: m decimals>
    <d: m decimals>

Numbers are written with ``repr`` (shortest round-trip decimal), so
write -> read is the identity bit for bit.

Incidence convention for graph builders: column ``j`` of A has +1 at the
tail node of arc ``j`` and -1 at its head; demand vectors are positive at
sources and must sum to zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .linalg import numerical_rank

# x_i counts as zero iff x_i <= ZERO_RTOL * max(1, ||x||_inf).  The flow keeps
# the support of the initial state; the threshold only classifies supplied
# states and reported limits.
ZERO_RTOL = 1e-12


class ProblemError(ValueError):
    """Invalid instance data."""


class ParseError(ProblemError):
    """Malformed problem file."""


def zero_threshold(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    return ZERO_RTOL * max(1.0, float(np.max(np.abs(x), initial=0.0)))


@dataclass
class ValidationReport:
    valid: bool
    errors: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    rank: int | None = None

    def __str__(self) -> str:
        head = "valid" if self.valid else "invalid"
        lines = [f"{head} (rank {self.rank})"]
        lines += [f"error: {e}" for e in self.errors]
        lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines)


def validate(A, b, c, d) -> ValidationReport:
    """Report-only check of raw instance arrays.

    Never raises; construction of :class:`PositiveLP` raises on the same
    conditions that are reported as errors here.
    """
    report = ValidationReport(valid=True)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    c = np.asarray(c, dtype=float).ravel()
    d = np.asarray(d, dtype=float).ravel()
    n, m = A.shape
    if m < 1 or n < 1:
        report.errors.append("A must have at least one row and one column")
    if b.shape != (n,):
        report.errors.append(f"b has length {b.size}, expected {n}")
    if c.shape != (m,):
        report.errors.append(f"c has length {c.size}, expected {m}")
    if d.shape != (m,):
        report.errors.append(f"d has length {d.size}, expected {m}")
    if c.shape == (m,) and not np.all(c > 0):
        report.errors.append("cost not strictly positive")
    if d.shape == (m,) and not np.all(d > 0):
        report.errors.append("reactivity not strictly positive")
    if not np.all(np.isfinite(A)) or not np.all(np.isfinite(b)):
        report.errors.append("non-finite entries")
    zero_cols = [j for j in range(m) if not np.any(A[:, j])]
    if zero_cols:
        report.errors.append(f"all-zero columns {zero_cols}")
    if not report.errors:
        report.rank = numerical_rank(A)
        if report.rank < n:
            report.notes.append("redundant rows")
    report.valid = not report.errors
    return report


@dataclass(frozen=True)
class PositiveLP:
    """Immutable positive-LP instance (A, b, c, d).

    Safe to share across concurrent trajectory runs.
    """

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    name: str = ""

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.asarray(self.b, dtype=float).ravel()
        c = np.asarray(self.c, dtype=float).ravel()
        d = np.asarray(self.d, dtype=float).ravel()
        report = validate(A, b, c, d)
        if not report.valid:
            raise ProblemError("; ".join(report.errors))
        for key, val in (("A", A), ("b", b), ("c", c), ("d", d)):
            val.setflags(write=False)
            object.__setattr__(self, key, val)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.A.shape[1]

    def with_d(self, d) -> "PositiveLP":
        return PositiveLP(self.A, self.b, self.c, d, name=self.name)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PositiveLP):
            return NotImplemented
        return (
            self.name == other.name
            and self.A.shape == other.A.shape
            and np.array_equal(self.A, other.A)
            and np.array_equal(self.b, other.b)
            and np.array_equal(self.c, other.c)
            and np.array_equal(self.d, other.d)
        )


@dataclass(frozen=True)
class StateVector:
    """A nonnegative iterate together with its support set."""

    x: np.ndarray
    support: tuple[int, ...]

    @classmethod
    def from_array(cls, x) -> "StateVector":
        x = np.asarray(x, dtype=float).copy()
        if np.any(x < 0):
            raise ProblemError("state has negative entries")
        thr = zero_threshold(x)
        x[x <= thr] = 0.0
        x.setflags(write=False)
        support = tuple(int(i) for i in np.flatnonzero(x))
        return cls(x=x, support=support)

    @property
    def m(self) -> int:
        return self.x.size


def as_state(x) -> StateVector:
    return x if isinstance(x, StateVector) else StateVector.from_array(x)


def resolve_d_policy(c: np.ndarray, policy) -> np.ndarray:
    """Reactivity rule: 'uniform' (all ones), 'diag-cost' (d = c), or a vector."""
    c = np.asarray(c, dtype=float)
    if isinstance(policy, str):
        if policy == "uniform":
            return np.ones_like(c)
        if policy == "diag-cost":
            return c.copy()
        raise ProblemError(f"unknown d policy {policy!r}")
    d = np.asarray(policy, dtype=float).ravel()
    if d.shape != c.shape:
        raise ProblemError(f"d has length {d.size}, expected {c.size}")
    return d


def build_incidence_lp(
    arcs: Sequence[tuple],
    demands: dict,
    d_policy="uniform",
    name: str = "",
) -> PositiveLP:
    """Node-arc incidence instance from ``(tail, head, cost)`` triples.

    ``demands`` maps node -> supply (positive at sources) and must sum to
    zero.  Row order is the order of first appearance of the nodes in the
    arc list, then in the demand dict.
    """
    nodes: list = []
    for tail, head, _cost in arcs:
        for v in (tail, head):
            if v not in nodes:
                nodes.append(v)
    for v in demands:
        if v not in nodes:
            nodes.append(v)
    index = {v: i for i, v in enumerate(nodes)}
    n, m = len(nodes), len(arcs)
    A = np.zeros((n, m))
    c = np.zeros(m)
    for j, (tail, head, cost) in enumerate(arcs):
        if cost <= 0:
            raise ProblemError(f"arc {j} ({tail}->{head}) has non-positive cost {cost}")
        if tail == head:
            raise ProblemError(f"arc {j} is a self-loop at {tail}")
        A[index[tail], j] = 1.0
        A[index[head], j] = -1.0
        c[j] = cost
    b = np.zeros(n)
    for v, demand in demands.items():
        b[index[v]] = demand
    if abs(b.sum()) > 1e-12 * max(1.0, float(np.abs(b).max(initial=0.0))):
        raise ProblemError(f"demands sum to {b.sum()}, expected 0")
    return PositiveLP(A, b, c, resolve_d_policy(c, d_policy), name=name)


#: Column indices of the cheap path in :func:`ladder_family` instances.
LADDER_OPT_ARCS = (0, 1, 2, 3)


def ladder_family(f: int, d_policy="uniform") -> PositiveLP:
    """Two-path unit-demand network with parameterized costs.

    Source s, sink t, and two arc-disjoint s-t paths of four arcs each:
    the cheap path has costs (f, f, f, f-1), total 4f - 1 (the unique
    optimum, columns :data:`LADDER_OPT_ARCS`), the expensive one
    (f+1, f, f, f), total 4f + 1.  Requires f >= 2 so all costs stay
    strictly positive.
    """
    f = int(f)
    if f < 2:
        raise ProblemError("ladder_family requires f >= 2 (f = 1 makes a zero cost)")
    arcs = [
        ("s", "a1", f),
        ("a1", "a2", f),
        ("a2", "a3", f),
        ("a3", "t", f - 1),
        ("s", "b1", f + 1),
        ("b1", "b2", f),
        ("b2", "b3", f),
        ("b3", "t", f),
    ]
    return build_incidence_lp(
        arcs, {"s": 1.0, "t": -1.0}, d_policy=d_policy, name=f"ladder-f{f}"
    )


def fig1(d=(1.0, 1.0)) -> PositiveLP:
    """minimize x1 + 2 x2 subject to x1 + x2 = 1, x >= 0."""
    return PositiveLP([[1.0, 1.0]], [1.0], [1.0, 2.0], d, name="fig1")


def write_problem(lp: PositiveLP, path) -> None:
    lines = ["physarum-lp v1"]
    if lp.name:
        lines.append(f"# name: {lp.name}")
    lines.append(f"{lp.n} {lp.m}")
    for row in lp.A:
        lines.append(" ".join(repr(float(v)) for v in row))
    for vec in (lp.b, lp.c, lp.d):
        lines.append(" ".join(repr(float(v)) for v in vec))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_floats(line: str, count: int, lineno: int, what: str) -> np.ndarray:
    parts = line.split()
    if len(parts) != count:
        raise ParseError(f"line {lineno}: {what}: expected {count} values, got {len(parts)}")
    try:
        return np.array([float(p) for p in parts])
    except ValueError as exc:
        raise ParseError(f"line {lineno}: {what}: {exc}") from None


def read_problem(path) -> PositiveLP:
    with open(path, "r", encoding="ascii") as fh:
        raw = fh.read().splitlines()
    name = ""
    content: list[tuple[int, str]] = []
    for lineno, line in enumerate(raw, start=1):
        stripped = line.strip()
        if stripped.startswith("# name:"):
            name = stripped[len("# name:"):].strip()
            continue
        if not stripped or stripped.startswith("#"):
            continue
        content.append((lineno, stripped))
    if not content:
        raise ParseError("empty file")
    lineno, header = content[0]
    if header != "physarum-lp v1":
        raise ParseError(f"line {lineno}: bad header {header!r}")
    if len(content) < 2:
        raise ParseError("missing dimension line")
    lineno, dims = content[1]
    parts = dims.split()
    if len(parts) != 2:
        raise ParseError(f"line {lineno}: expected 'n m'")
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError(f"line {lineno}: expected integer dimensions") from None
    expected = 2 + n + 3
    if len(content) != expected:
        raise ParseError(f"expected {expected} content lines for n={n}, m={m}, got {len(content)}")
    rows = [
        _parse_floats(line, m, lineno, f"row {i} of A")
        for i, (lineno, line) in enumerate(content[2 : 2 + n])
    ]
    (lb, b_line), (lc, c_line), (ld, d_line) = content[2 + n : 2 + n + 3]
    b = _parse_floats(b_line, n, lb, "b")
    c = _parse_floats(c_line, m, lc, "c")
    d = _parse_floats(d_line, m, ld, "d")
    try:
        return PositiveLP(np.array(rows), b, c, d, name=name)
    except ProblemError as exc:
        raise ParseError(f"invalid instance: {exc}") from None
