"""Experiment command line.

Subcommands::

    physarum-lp solve     --builtin fig1 --d 1,1 --out results/
    physarum-lp compare   --f-list 10,50,100 --out results/
    physarum-lp flowfield --builtin fig1 --d 5,1 --out results/
    physarum-lp slope     --c 1,2 --d 5,1 --out results/

All artifacts are CSV (17 significant digits).  Identical configurations,
including --seed, produce byte-identical outputs.  Exit codes: 0 converged,
1 invalid input or infeasible instance, 2 iteration cap reached.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import analysis, dynamics, lyapunov, oracle
from .problem import (
    LADDER_OPT_ARCS,
    PositiveLP,
    ProblemError,
    StateVector,
    fig1,
    ladder_family,
    read_problem,
    resolve_d_policy,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_MAX_STEPS = 2


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row) + "\n")


def _parse_vector(text: str) -> np.ndarray:
    return np.array([float(v) for v in text.split(",")])


def _load_problem(args) -> PositiveLP:
    if args.problem:
        lp = read_problem(args.problem)
    elif args.builtin == "fig1":
        lp = fig1()
    elif args.builtin == "ladder":
        lp = ladder_family(args.f)
    else:
        raise ProblemError("specify --problem <path> or --builtin {fig1,ladder}")
    if args.d is not None:
        lp = lp.with_d(_parse_vector(args.d))
    elif args.d_policy is not None:
        lp = lp.with_d(resolve_d_policy(lp.c, args.d_policy))
    return lp


def _initial_state(lp: PositiveLP, args) -> np.ndarray:
    if args.x0 is not None:
        x0 = _parse_vector(args.x0)
        if x0.size != lp.m:
            raise ProblemError(f"--x0 has {x0.size} entries, instance has {lp.m}")
        return x0
    return np.ones(lp.m)


def cmd_solve(args) -> int:
    lp = _load_problem(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result = oracle.solve_exhaustive(lp)
    if not result.feasible:
        print("infeasible instance", file=sys.stderr)
        return EXIT_INVALID
    cfg = dynamics.IntegratorConfig(
        h=args.h,
        max_steps=args.max_steps,
        record_every=args.record_every,
        epsilon_feas=args.epsilon,
        epsilon_gap=args.epsilon,
    )
    traj = dynamics.integrate(lp, _initial_state(lp, args), cfg, xstar=result.xstar_interior)
    traj.to_csv(out / "trajectory.csv")
    audit = lyapunov.monotonicity_audit(traj, epsilon_gap=args.epsilon)
    (out / "audit.txt").write_text(str(audit) + "\n", encoding="ascii")
    final_ctx = float(lp.c @ traj.final_x)
    residual = float(traj.monitors["residual_inf"][-1])
    gap = final_ctx - result.optimal_value
    print(f"final c^T x      : {_fmt(final_ctx)}")
    print(f"residual         : {_fmt(residual)}")
    print(f"oracle optimum   : {_fmt(result.optimal_value)}")
    print(f"gap to optimum   : {_fmt(gap)}")
    print(f"steps            : {traj.n_steps} ({traj.stop_reason})")
    return EXIT_OK if traj.converged else EXIT_MAX_STEPS


def run_budgeted(lp: PositiveLP, x0, h: float, target: float, tol: float, budget: int):
    """Euler iteration for a fixed budget; returns (steps to |c^T x - target| <= tol
    or None, final c^T x)."""
    state = StateVector.from_array(x0)
    hit = None
    for step in range(budget + 1):
        ctx = float(lp.c @ state.x)
        if abs(ctx - target) <= tol:
            hit = step
            break
        if step == budget:
            break
        state = dynamics.euler_step(lp, state, h)
    return hit, float(lp.c @ state.x)


def compare_rows(f_values, epsilon: float) -> list[list]:
    rows = []
    for f in f_values:
        base = ladder_family(f)
        opt = 4.0 * f - 1.0
        norm_c1 = float(np.sum(base.c))
        h = 1.0 / (2.0 * norm_c1)
        budget = math.ceil((1.0 / h) * math.log(norm_c1 / epsilon))
        x0 = np.full(base.m, 100.0)
        x0[list(LADDER_OPT_ARCS)] = 0.01
        for policy in ("diag-cost", "uniform"):
            lp = base.with_d(resolve_d_policy(base.c, policy))
            hit, final_ctx = run_budgeted(lp, x0, h, opt, epsilon, budget)
            rows.append(
                [
                    f,
                    policy,
                    budget,
                    hit if hit is not None else "",
                    int(hit is not None),
                    final_ctx,
                    abs(final_ctx - opt),
                    opt,
                ]
            )
    return rows


COMPARE_HEADER = [
    "f",
    "policy",
    "budget",
    "steps_to_threshold",
    "converged_within_budget",
    "final_ctx",
    "final_gap",
    "optimal_value",
]


def cmd_compare(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    f_values = [int(v) for v in args.f_list.split(",")]
    rows = compare_rows(f_values, args.epsilon)
    _write_csv(out / "compare.csv", COMPARE_HEADER, rows)
    for row in rows:
        status = f"hit at step {row[3]}" if row[4] else "not within budget"
        print(f"f={row[0]:>4} D={row[1]:<9} budget={row[2]:>6} {status} final c^T x={_fmt(row[5])}")
    return EXIT_OK


def cmd_flowfield(args) -> int:
    lp = _load_problem(args)
    if lp.m != 2:
        print("flowfield requires a 2-variable instance", file=sys.stderr)
        return EXIT_INVALID
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    lo1, hi1, lo2, hi2 = (float(v) for v in args.grid.split(","))
    X1, X2, F1, F2 = dynamics.flow_field(lp, (lo1, hi1), (lo2, hi2), args.resolution)
    grid_rows = [
        [float(X1[i, j]), float(X2[i, j]), float(F1[i, j]), float(F2[i, j])]
        for i in range(X1.shape[0])
        for j in range(X1.shape[1])
    ]
    _write_csv(out / "flowfield.csv", ["x1", "x2", "dx1", "dx2"], grid_rows)

    overlay_rows: list[list] = []
    ts = np.linspace(0.0, 1.0, 51)
    for t in ts:
        overlay_rows.append(["feasible", float(t), float(1.0 - t)])
    prediction = analysis.predict_entry(lp.c, lp.d)
    if prediction.regime == "sloped":
        for e1 in np.linspace(0.0, 0.35, 51):
            overlay_rows.append(["entry_line", float(1.0 - e1), float(-prediction.slope * e1)])
    _write_csv(out / "overlay.csv", ["kind", "x1", "x2"], overlay_rows)

    result = oracle.solve_exhaustive(lp)
    starts = [
        (0.2, 0.2), (0.5, 0.5), (1.2, 1.2), (0.2, 1.2),
        (1.2, 0.2), (0.8, 1.4), (1.4, 0.6), (0.3, 0.9),
    ]
    cfg = dynamics.IntegratorConfig(h=args.h or 0.05, max_steps=args.max_steps)
    for k, start in enumerate(starts):
        traj = dynamics.integrate(lp, np.array(start), cfg, xstar=result.xstar_interior)
        traj.to_csv(out / f"trajectory_{k}.csv")
    print(f"wrote flow field, overlay, and {len(starts)} trajectories to {out}")
    return EXIT_OK


def slope_study(c, d, h: float = 0.05, max_steps: int = 200_000):
    """Run one (c, d) pair and measure the entry direction against prediction."""
    lp = fig1().with_d(d) if tuple(np.asarray(c, float)) == (1.0, 2.0) else PositiveLP(
        [[1.0, 1.0]], [1.0], c, d, name="entry-study"
    )
    prediction = analysis.predict_entry(lp.c, lp.d)
    cfg = dynamics.IntegratorConfig(h=h, max_steps=max_steps)
    traj = dynamics.integrate(lp, np.array([0.5, 0.5]), cfg, xstar=np.array([1.0, 0.0]))
    measured = analysis.measure_entry_slope(traj)
    return prediction, measured


SLOPE_HEADER = [
    "c1",
    "c2",
    "d1",
    "d2",
    "regime_predicted",
    "slope_predicted",
    "regime_measured",
    "slope_measured",
]


def cmd_slope(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    pairs: list[tuple[np.ndarray, np.ndarray]] = []
    if args.pairs:
        rng = np.random.default_rng(args.seed)
        while len(pairs) < args.pairs:
            c1 = 1.0
            c2 = float(rng.uniform(1.1, 10.0))
            d2 = float(rng.uniform(0.2, 3.0))
            rate2 = (c2 - c1) * d2 / c2
            d1 = float(rng.uniform(2.0, 8.0)) * rate2  # clear of the critical boundary
            pairs.append((np.array([c1, c2]), np.array([d1, d2])))
    else:
        pairs.append((_parse_vector(args.c), _parse_vector(args.d)))
    rows = []
    for c, d in pairs:
        prediction, measured = slope_study(c, d, h=args.h or 0.05)
        rows.append(
            [
                float(c[0]), float(c[1]), float(d[0]), float(d[1]),
                prediction.regime,
                prediction.slope if prediction.slope is not None else "",
                measured.regime,
                measured.slope,
            ]
        )
        print(
            f"c=({c[0]:g},{c[1]:g}) d=({d[0]:g},{d[1]:g}) "
            f"predicted {prediction.regime} {prediction.slope} "
            f"measured {measured.regime} {_fmt(measured.slope)}"
        )
    _write_csv(out / "slope.csv", SLOPE_HEADER, rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="physarum-lp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_problem=True):
        if needs_problem:
            p.add_argument("--builtin", choices=["fig1", "ladder"])
            p.add_argument("--problem", type=str)
            p.add_argument("--f", type=int, default=10, help="ladder parameter")
            p.add_argument("--d-policy", choices=["uniform", "diag-cost"], dest="d_policy")
            p.add_argument("--d", type=str, help="explicit reactivity vector, comma separated")
        p.add_argument("--h", type=float, default=None)
        p.add_argument("--max-steps", type=int, default=1_000_000, dest="max_steps")
        p.add_argument("--out", type=str, default="out")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--record-every", type=int, default=1, dest="record_every")

    p_solve = sub.add_parser("solve", help="integrate one instance and audit the run")
    common(p_solve)
    p_solve.add_argument("--epsilon", type=float, default=1e-6, help="stop tolerance")
    p_solve.add_argument("--x0", type=str, help="initial state, comma separated")
    p_solve.set_defaults(func=cmd_solve)

    p_cmp = sub.add_parser("compare", help="reactivity-policy convergence-time table")
    common(p_cmp, needs_problem=False)
    p_cmp.add_argument("--f-list", type=str, default="10,50,100", dest="f_list")
    p_cmp.add_argument("--epsilon", type=float, default=0.1, help="value threshold")
    p_cmp.set_defaults(func=cmd_compare)

    p_ff = sub.add_parser("flowfield", help="planar vector field + trajectory bundle")
    common(p_ff)
    p_ff.add_argument("--grid", type=str, default="0.05,1.5,0.05,1.5")
    p_ff.add_argument("--resolution", type=int, default=20)
    p_ff.set_defaults(func=cmd_flowfield)

    p_sl = sub.add_parser("slope", help="entry-slope prediction vs measurement")
    common(p_sl, needs_problem=False)
    p_sl.add_argument("--c", type=str, default="1,2")
    p_sl.add_argument("--d", type=str, default="1,1")
    p_sl.add_argument("--pairs", type=int, default=0, help="random pair count")
    p_sl.set_defaults(func=cmd_slope)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ProblemError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
