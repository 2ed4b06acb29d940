import pytest

from physarum_lp.problem import PositiveLP, fig1


@pytest.fixture(scope="session")
def fig1_lp() -> PositiveLP:
    return fig1()
