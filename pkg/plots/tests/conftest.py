import subprocess
import sys

import pytest


def run_cli(*args) -> None:
    """Invoke the primary experiment CLI as an external command."""
    subprocess.run(
        [sys.executable, "-m", "physarum_lp.cli", *args],
        check=True,
        capture_output=True,
        text=True,
    )


@pytest.fixture(scope="session")
def artifacts(tmp_path_factory):
    """CSV bundle produced once per session through the primary CLI."""
    root = tmp_path_factory.mktemp("artifacts")
    run_cli(
        "flowfield", "--builtin", "fig1", "--d", "5,1",
        "--resolution", "6", "--max-steps", "20000",
        "--out", str(root / "flowfield"),
    )
    run_cli(
        "solve", "--builtin", "fig1", "--h", "0.05",
        "--x0", "0.5,0.5", "--out", str(root / "solve"),
    )
    run_cli("compare", "--f-list", "10", "--out", str(root / "compare"))
    run_cli("slope", "--pairs", "3", "--seed", "1", "--out", str(root / "slope"))
    return root
