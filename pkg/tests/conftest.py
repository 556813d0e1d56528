"""Shared fixtures: bundled matrices, golden values, and the generated case grid."""
import numpy as np
import pytest

from minkinv import CanonicalCaseSpec, MinkowskiMetric, generate_case
from minkinv import fixtures as bundled

S5 = np.sqrt(5.0)

# Golden values for the bundled index-2 matrices (closed forms).
EX2_MCEP = np.array([[-4.0, 2.0, -4.0], [-2.0, 1.0, -2.0], [4.0, -2.0, 4.0]])
EX2_CEP = np.array([[4.0, 2.0, -4.0], [2.0, 1.0, -2.0], [-4.0, -2.0, 4.0]]) / 9.0
EX2_G1 = -1.0 / 9.0
EX3_MCEP = np.array([[4 / 3, 2 / 3, 0.0], [-2 / 3, -1 / 3, 0.0], [0.0, 0.0, 0.0]])
EX3_G1 = 3.0 / 5.0
EX3_A1 = np.array(
    [
        [(16 + 2 * S5) / 15, (2 + 4 * S5) / 15, (10 - 4 * S5) / 15],
        [(-8 - S5) / 15, (-1 - 2 * S5) / 15, (-5 + 2 * S5) / 15],
        [0.0, 0.0, 0.0],
    ]
)
EX3_A1HAT = np.array(
    [
        [(48 + 22 * S5) / 45, (6 + 44 * S5) / 45, (30 - 44 * S5) / 45],
        [(-24 - 11 * S5) / 45, (-3 - 22 * S5) / 45, (-15 + 22 * S5) / 45],
        [0.0, 0.0, 0.0],
    ]
)


@pytest.fixture(scope="session")
def g3():
    return MinkowskiMetric(3)


@pytest.fixture(scope="session")
def ex1():
    return bundled.load("ex1")


@pytest.fixture(scope="session")
def ex2():
    return bundled.load("ex2")


@pytest.fixture(scope="session")
def ex3():
    return bundled.load("ex3")


@pytest.fixture(scope="session")
def ex4a():
    return bundled.load("ex4a")


@pytest.fixture(scope="session")
def ex4b():
    return bundled.load("ex4b")


def valid_case_combos(sizes=(3, 4, 5, 6), k_values=(1, 2, 3)):
    """All feasible (n, r, k) combos in the sweep grid (r = n forces k = 0)."""
    combos = []
    for n in sizes:
        for r in range(n + 1):
            if r == n:
                combos.append((n, r, 0))
            else:
                combos.extend((n, r, k) for k in k_values if k <= n - r)
    return combos


@pytest.fixture(scope="session")
def canonical_grid():
    """100 generated cases cycling the feasible (n, r, k) grid with fresh seeds."""
    cases = []
    combos = valid_case_combos()
    seed = 20240
    while len(cases) < 100:
        for n, r, k in combos:
            if len(cases) == 100:
                break
            spec = CanonicalCaseSpec(n=n, r=r, k=k, seed=seed)
            seed += 1
            metric = MinkowskiMetric(n)
            cases.append((spec, generate_case(spec, metric), metric))
    return cases


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py::test_criterion" in report.nodeid:
                rows.append((report.nodeid.split("::")[-1], outcome))
    if rows:
        terminalreporter.section("acceptance criteria")
        for name, outcome in sorted(rows):
            verdict = "PASS" if outcome == "passed" else "FAIL"
            terminalreporter.write_line(f"{verdict}  {name}")
