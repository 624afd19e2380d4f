import numpy as np
import pytest
from hypothesis import settings

from private_ppr.graph import Graph, make_clique, make_random_regular

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def clique_ppr(d: int, alpha: float) -> np.ndarray:
    """Closed-form PPR on K_{d+1} from source 0 for lazy-walk ``alpha``."""
    # p_s solves p_s = alpha + (1-alpha)(p_s/2 + (1 - p_s)/(2d))
    p_s = (alpha + (1 - alpha) / (2 * d)) / (1 - (1 - alpha) / 2 + (1 - alpha) / (2 * d))
    return np.concatenate([[p_s], np.full(d, (1 - p_s) / d)])


@pytest.fixture(scope="session")
def k5():
    return make_clique(5)


@pytest.fixture(scope="session")
def k101():
    return make_clique(101)


@pytest.fixture(scope="session")
def regular_100_10():
    return make_random_regular(100, 10, seed=7)


ACCEPTANCE: dict[int, str] = {}


def report(criterion: int, ok: bool, detail: str) -> None:
    """Records and prints one acceptance line; shown again in the terminal summary."""
    line = f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[criterion] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for key in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[key])
