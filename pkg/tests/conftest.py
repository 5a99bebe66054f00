import random
from fractions import Fraction

import pytest

from seqctl.cost import CostSpec
from seqctl.model import ControlledBinaryModel
from seqctl.problem import TestingProblem

# verdict lines collected by the acceptance tests, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance checklist")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def coin2_model() -> ControlledBinaryModel:
    """Two biased-coin controls sharing a fair null coin."""
    return ControlledBinaryModel.from_tables(
        ["a", "b"], ["0", "1"],
        {"a": ["1/2", "1/2"], "b": ["1/2", "1/2"]},
        {"a": ["1/4", "3/4"], "b": ["1/3", "2/3"]})


def uninformative_model() -> ControlledBinaryModel:
    return ControlledBinaryModel.from_tables(
        ["u"], ["0", "1"], {"u": ["1/2", "1/2"]}, {"u": ["1/2", "1/2"]})


def disjoint_support_model() -> ControlledBinaryModel:
    return ControlledBinaryModel.from_tables(
        ["d"], ["0", "1"], {"d": ["1", "0"]}, {"d": ["0", "1"]})


def bernoulli_model(p0="1/2", p1="3/4") -> ControlledBinaryModel:
    p0, p1 = Fraction(p0), Fraction(p1)
    return ControlledBinaryModel.from_tables(
        ["x"], ["0", "1"],
        {"x": [str(1 - p0), str(p0)]},
        {"x": [str(1 - p1), str(p1)]})


@pytest.fixture
def coin2():
    return coin2_model()


@pytest.fixture
def cost5():
    return CostSpec(5, 5)


@pytest.fixture
def prob5(coin2, cost5):
    return TestingProblem(coin2, cost5)


@pytest.fixture
def uninformative():
    return uninformative_model()


@pytest.fixture
def disjoint():
    return disjoint_support_model()


def random_problem(rng: random.Random, n_controls: int | None = None) -> TestingProblem:
    """Small random rational instance: interior pmfs with denominators <= 6,
    penalties from {2, 5, 10}, stage weights from the two canonical mixes."""
    n_controls = n_controls or rng.choice([1, 2])
    controls = [f"x{i}" for i in range(n_controls)]
    outcomes = ["0", "1"]

    def prob() -> Fraction:
        den = rng.randint(2, 6)
        num = rng.randint(1, den - 1)
        return Fraction(num, den)

    pmf0 = {}
    pmf1 = {}
    for x in controls:
        p0, p1 = prob(), prob()
        pmf0[x] = [1 - p0, p0]
        pmf1[x] = [1 - p1, p1]
    model = ControlledBinaryModel.from_tables(controls, outcomes, pmf0, pmf1)
    lam0 = Fraction(rng.choice([2, 5, 10]))
    lam1 = Fraction(rng.choice([2, 5, 10]))
    pi0, pi1 = rng.choice([(Fraction(1), Fraction(0)), (Fraction(1, 2), Fraction(1, 2))])
    return TestingProblem(model, CostSpec(lam0, lam1, pi0, pi1))
