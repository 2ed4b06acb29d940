import pytest

from physarum_plots.render import MissingColumnError, PlotSpec, load_table, main, render


def flowfield_inputs(artifacts):
    base = artifacts / "flowfield"
    return [base / "flowfield.csv", base / "overlay.csv"] + [
        base / f"trajectory_{k}.csv" for k in range(8)
    ]


class TestRender:
    def test_flowfield(self, artifacts, tmp_path):
        out = render(
            PlotSpec(
                kind="flowfield",
                inputs=flowfield_inputs(artifacts),
                output=tmp_path / "fig1.png",
            )
        )
        assert out.exists() and out.stat().st_size > 0

    def test_convergence_from_compare_table(self, artifacts, tmp_path):
        out = render(
            PlotSpec(
                kind="convergence",
                inputs=[artifacts / "compare" / "compare.csv"],
                output=tmp_path / "steps.png",
            )
        )
        assert out.exists() and out.stat().st_size > 0

    def test_convergence_from_trajectories(self, artifacts, tmp_path):
        out = render(
            PlotSpec(
                kind="convergence",
                inputs=[artifacts / "solve" / "trajectory.csv"],
                output=tmp_path / "curve.png",
            )
        )
        assert out.exists() and out.stat().st_size > 0

    def test_lyapunov(self, artifacts, tmp_path):
        out = render(
            PlotSpec(
                kind="lyapunov",
                inputs=[artifacts / "solve" / "trajectory.csv"],
                output=tmp_path / "audit.png",
            )
        )
        assert out.exists() and out.stat().st_size > 0

    def test_slope(self, artifacts, tmp_path):
        out = render(
            PlotSpec(
                kind="slope",
                inputs=[artifacts / "slope" / "slope.csv"],
                output=tmp_path / "slope.png",
            )
        )
        assert out.exists() and out.stat().st_size > 0

    def test_rerender_is_byte_identical(self, artifacts, tmp_path):
        spec = PlotSpec(
            kind="lyapunov",
            inputs=[artifacts / "solve" / "trajectory.csv"],
            output=tmp_path / "a.png",
        )
        first = render(spec).read_bytes()
        spec.output = tmp_path / "b.png"
        assert render(spec).read_bytes() == first

    def test_inputs_not_mutated(self, artifacts, tmp_path):
        src = artifacts / "solve" / "trajectory.csv"
        before = src.read_bytes()
        render(PlotSpec(kind="lyapunov", inputs=[src], output=tmp_path / "x.png"))
        assert src.read_bytes() == before

    def test_missing_column_named(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("time,V\n0,1\n")
        with pytest.raises(MissingColumnError, match="Vdot"):
            render(PlotSpec(kind="lyapunov", inputs=[bad], output=tmp_path / "x.png"))

    def test_unknown_columns_ignored(self, artifacts, tmp_path):
        src = load_table(artifacts / "solve" / "trajectory.csv")
        extended = tmp_path / "extended.csv"
        names = list(src.columns)
        n = len(src.columns[names[0]])
        with open(extended, "w") as fh:
            fh.write(",".join(names + ["mystery"]) + "\n")
            for i in range(n):
                fh.write(",".join(src.columns[c][i] for c in names) + ",42\n")
        out = render(
            PlotSpec(kind="lyapunov", inputs=[extended], output=tmp_path / "x.png")
        )
        assert out.exists()


class TestMain:
    def test_cli_flowfield(self, artifacts, tmp_path, capsys):
        args = ["flowfield"] + [str(p) for p in flowfield_inputs(artifacts)]
        code = main(args + ["-o", str(tmp_path / "fig.png")])
        assert code == 0
        assert "wrote" in capsys.readouterr().out

    def test_cli_error_on_missing_column(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n")
        code = main(["slope", str(bad), "-o", str(tmp_path / "x.png")])
        assert code == 1
        assert "slope_predicted" in capsys.readouterr().err
