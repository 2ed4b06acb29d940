"""Batch figure rendering for physarum-lp CSV artifacts.

Usage::

    render flowfield   flowfield.csv overlay.csv trajectory_*.csv -o fig1.png
    render convergence trajectory_a.csv trajectory_b.csv ...      -o curves.png
    render convergence compare.csv                                -o steps.png
    render lyapunov    trajectory.csv                             -o audit.png
    render slope       slope.csv                                  -o slope.png

Inputs are the CSVs written by the ``physarum-lp`` command line; unknown
columns are ignored, missing required columns raise an error naming the
column.  Rendering never modifies its inputs, and identical inputs yield
byte-identical PNGs.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("flowfield", "convergence", "lyapunov", "slope")


class RenderError(ValueError):
    pass


class MissingColumnError(RenderError):
    def __init__(self, path, column: str):
        super().__init__(f"{path}: missing required column '{column}'")
        self.column = column


@dataclass
class PlotSpec:
    kind: str
    inputs: list[Path]
    output: Path
    xlim: tuple[float, float] | None = None
    ylim: tuple[float, float] | None = None
    dpi: int = 150


@dataclass
class Table:
    """One parsed CSV: column name -> list of raw strings."""

    path: Path
    columns: dict[str, list[str]] = field(default_factory=dict)

    def require(self, *names: str) -> None:
        for name in names:
            if name not in self.columns:
                raise MissingColumnError(self.path, name)

    def floats(self, name: str) -> np.ndarray:
        self.require(name)
        return np.array([float(v) if v else np.nan for v in self.columns[name]])

    def strings(self, name: str) -> list[str]:
        self.require(name)
        return self.columns[name]

    def __contains__(self, name: str) -> bool:
        return name in self.columns


def load_table(path) -> Table:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise RenderError(f"{path}: empty file") from None
        columns: dict[str, list[str]] = {name: [] for name in header}
        for row in reader:
            if not row:
                continue
            for name, value in zip(header, row):
                columns[name].append(value)
    return Table(path=path, columns=columns)


def _classify(tables: list[Table], *columns: str) -> tuple[list[Table], list[Table]]:
    """Split tables into (matching all columns, the rest)."""
    hits = [t for t in tables if all(c in t for c in columns)]
    hit_ids = {id(t) for t in hits}
    rest = [t for t in tables if id(t) not in hit_ids]
    return hits, rest


def _new_figure(spec: PlotSpec):
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    if spec.xlim:
        ax.set_xlim(*spec.xlim)
    if spec.ylim:
        ax.set_ylim(*spec.ylim)
    return fig, ax


def render_flowfield(spec: PlotSpec, tables: list[Table]):
    fields, rest = _classify(tables, "dx1", "dx2")
    overlays, rest = _classify(rest, "kind", "x1", "x2")
    trajectories, _ = _classify(rest, "x_1", "x_2")
    if not fields:
        raise MissingColumnError(spec.inputs[0], "dx1")
    fig, ax = _new_figure(spec)
    grid = fields[0]
    ax.quiver(
        grid.floats("x1"), grid.floats("x2"),
        grid.floats("dx1"), grid.floats("dx2"),
        angles="xy", color="0.6", width=0.003,
    )
    for overlay in overlays:
        kinds = np.array(overlay.strings("kind"))
        x1 = overlay.floats("x1")
        x2 = overlay.floats("x2")
        for name, style, label in (
            ("feasible", "k-", "feasible segment"),
            ("entry_line", "b--", "predicted entry line"),
        ):
            mask = kinds == name
            if np.any(mask):
                ax.plot(x1[mask], x2[mask], style, linewidth=1.5, label=label)
    for k, traj in enumerate(trajectories):
        ax.plot(
            traj.floats("x_1"), traj.floats("x_2"), "-", color="tab:red",
            linewidth=0.9, alpha=0.8,
            label="trajectories" if k == 0 else None,
        )
    ax.plot([1.0], [0.0], "ko", markersize=5)
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.set_title("flow field with trajectories")
    if overlays or trajectories:
        ax.legend(loc="upper right", fontsize=8)
    return fig


def render_convergence(spec: PlotSpec, tables: list[Table]):
    compares, rest = _classify(tables, "policy", "budget", "final_gap")
    trajectories, _ = _classify(rest, "time", "ctx")
    if not compares and not trajectories:
        raise MissingColumnError(spec.inputs[0], "ctx")
    fig, ax = _new_figure(spec)
    if compares:
        # per-f grouped bars: steps to threshold (budget where never hit)
        table = compares[0]
        table.require("f", "steps_to_threshold", "converged_within_budget")
        fs = sorted({int(v) for v in table.strings("f")})
        policies = sorted(set(table.strings("policy")))
        width = 0.8 / len(policies)
        for pi, policy in enumerate(policies):
            heights = []
            for f in fs:
                rows = [
                    i
                    for i, (fv, pv) in enumerate(
                        zip(table.strings("f"), table.strings("policy"))
                    )
                    if int(fv) == f and pv == policy
                ]
                i = rows[0]
                raw = table.strings("steps_to_threshold")[i]
                heights.append(float(raw) if raw else float(table.strings("budget")[i]))
            ax.bar(
                [j + pi * width for j in range(len(fs))],
                heights, width=width, label=policy,
            )
        ax.set_xticks([j + 0.4 - width / 2 for j in range(len(fs))])
        ax.set_xticklabels([str(f) for f in fs])
        ax.set_xlabel("f")
        ax.set_ylabel("steps to threshold (budget if not reached)")
        ax.set_yscale("log")
        ax.set_title("reactivity-policy comparison")
        ax.legend()
    else:
        for k, traj in enumerate(trajectories):
            ax.plot(traj.floats("time"), traj.floats("ctx"), label=f"run {k}")
        ax.set_xlabel("time")
        ax.set_ylabel("c^T x")
        ax.set_title("objective along trajectories")
        if len(trajectories) > 1:
            ax.legend(fontsize=8)
    return fig


def render_lyapunov(spec: PlotSpec, tables: list[Table]):
    if not tables:
        raise RenderError("lyapunov rendering needs a trajectory CSV")
    table = tables[0]
    table.require("time", "V", "Vdot")
    time = table.floats("time")
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6.4, 6.4), sharex=True)
    ax1.plot(time, table.floats("V"), "b-")
    ax1.set_ylabel("V")
    ax1.set_title("Lyapunov value and derivative along the run")
    ax2.plot(time, table.floats("Vdot"), "r-")
    ax2.axhline(0.0, color="0.5", linewidth=0.8)
    ax2.set_ylabel("Vdot")
    ax2.set_xlabel("time")
    return fig


def render_slope(spec: PlotSpec, tables: list[Table]):
    if not tables:
        raise RenderError("slope rendering needs a slope CSV")
    table = tables[0]
    table.require("slope_predicted", "slope_measured")
    predicted = table.floats("slope_predicted")
    measured = table.floats("slope_measured")
    fig, ax = _new_figure(spec)
    mask = np.isfinite(predicted)
    ax.scatter(predicted[mask], measured[mask], c="tab:blue", s=25)
    if np.any(mask):
        lo = min(predicted[mask].min(), measured[mask].min())
        hi = max(predicted[mask].max(), measured[mask].max())
        pad = 0.05 * (hi - lo + 1e-12)
        ax.plot([lo - pad, hi + pad], [lo - pad, hi + pad], "k--", linewidth=0.8)
    ax.set_xlabel("predicted entry slope")
    ax.set_ylabel("measured entry slope")
    ax.set_title("entry slope: prediction vs measurement")
    return fig


_RENDERERS = {
    "flowfield": render_flowfield,
    "convergence": render_convergence,
    "lyapunov": render_lyapunov,
    "slope": render_slope,
}


def render(spec: PlotSpec) -> Path:
    if spec.kind not in _RENDERERS:
        raise RenderError(f"unknown figure kind '{spec.kind}'; choose from {KINDS}")
    tables = [load_table(p) for p in spec.inputs]
    fig = _RENDERERS[spec.kind](spec, tables)
    spec.output.parent.mkdir(parents=True, exist_ok=True)
    # strip the version string so identical inputs give identical bytes
    fig.savefig(spec.output, dpi=spec.dpi, metadata={"Software": None})
    plt.close(fig)
    return spec.output


def _parse_range(text: str | None) -> tuple[float, float] | None:
    if text is None:
        return None
    lo, hi = (float(v) for v in text.split(","))
    return lo, hi


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="render", description=__doc__)
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("csvs", nargs="+", help="input CSV files")
    parser.add_argument("-o", "--output", required=True, help="output PNG path")
    parser.add_argument("--xlim", type=str, default=None, help="lo,hi")
    parser.add_argument("--ylim", type=str, default=None, help="lo,hi")
    parser.add_argument("--dpi", type=int, default=150)
    args = parser.parse_args(argv)
    spec = PlotSpec(
        kind=args.kind,
        inputs=[Path(p) for p in args.csvs],
        output=Path(args.output),
        xlim=_parse_range(args.xlim),
        ylim=_parse_range(args.ylim),
        dpi=args.dpi,
    )
    try:
        out = render(spec)
    except (RenderError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
