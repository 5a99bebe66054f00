import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seqctl.cost import CostSpec, trivial_value
from seqctl.errors import TooLargeError
from seqctl.model import ControlledBinaryModel
from seqctl.oracle import PlanStrategy, count_strategies, enumerate_optimal, _plans
from seqctl.problem import TestingProblem
from seqctl.strategy import evaluate_exact
from seqctl.truncated import solve_truncated

from conftest import random_problem, uninformative_model


def test_strategy_counts(prob5):
    assert count_strategies(prob5, 0) == 1
    assert count_strategies(prob5, 1) == 3
    assert count_strategies(prob5, 2) == 19
    assert count_strategies(prob5, 3) == 723


def test_coin2_one_step_candidates(prob5):
    risks = sorted(
        evaluate_exact(prob5.model, prob5.cost, PlanStrategy(plan), depth_cap=1).risk
        for plan in _plans(prob5, (), 1))
    assert risks == [Fraction(19, 4), Fraction(5), Fraction(31, 6)]
    result = enumerate_optimal(prob5, 1)
    assert result.min_risk == Fraction(19, 4)
    assert result.strategies_examined == 3


def test_cheap_penalties_pick_trivial(coin2):
    problem = TestingProblem(coin2, CostSpec("1/2", "1/2"))
    result = enumerate_optimal(problem, 2)
    assert result.min_risk == Fraction(1, 2)
    assert result.witness.plan == {(): ("stop",)}


def test_uninformative_minimum_is_trivial(cost5):
    # extra uninformative observations cost 1 each without buying anything,
    # so the included no-observation test wins outright
    problem = TestingProblem(uninformative_model(), cost5)
    result = enumerate_optimal(problem, 3)
    assert result.min_risk == trivial_value(cost5) == 5
    observing = [
        evaluate_exact(problem.model, problem.cost, PlanStrategy(p), depth_cap=3).risk
        for p in _plans(problem, (), 3) if p[()][0] == "continue"]
    assert min(observing) == 6  # observe once then stop


def test_witness_attains_minimum(prob5):
    result = enumerate_optimal(prob5, 2)
    oc = evaluate_exact(prob5.model, prob5.cost, result.witness, depth_cap=2)
    assert oc.risk == result.min_risk
    rows = result.witness_description(prob5)
    assert any(r["action"] == "continue" for r in rows)


def test_too_large_guards(prob5):
    with pytest.raises(TooLargeError):
        enumerate_optimal(prob5, 5)
    with pytest.raises(TooLargeError):
        enumerate_optimal(prob5, 3, max_strategies=100)


def test_single_control_restriction_matches_restricted_model(cost5):
    full = ControlledBinaryModel.from_tables(
        ["a", "b"], ["0", "1"],
        {"a": ["1/2", "1/2"], "b": ["1/2", "1/2"]},
        {"a": ["1/4", "3/4"], "b": ["1/3", "2/3"]})
    only_a = ControlledBinaryModel.from_tables(
        ["a"], ["0", "1"], {"a": ["1/2", "1/2"]}, {"a": ["1/4", "3/4"]})
    restricted = enumerate_optimal(TestingProblem(only_a, cost5), 2)
    no_control_dp = solve_truncated(TestingProblem(only_a, cost5), 2)
    assert restricted.min_risk == no_control_dp.value
    # the two-control optimum can only improve on the restriction
    assert enumerate_optimal(TestingProblem(full, cost5), 2).min_risk <= restricted.min_risk


@settings(deadline=None, max_examples=12)
@given(st.integers(0, 2**32), st.integers(1, 2))
def test_oracle_minimum_below_trivial_and_attained(seed, depth):
    problem = random_problem(random.Random(seed))
    result = enumerate_optimal(problem, depth)
    assert result.min_risk <= trivial_value(problem.cost)
    oc = evaluate_exact(problem.model, problem.cost, result.witness, depth_cap=depth)
    assert oc.risk == result.min_risk
