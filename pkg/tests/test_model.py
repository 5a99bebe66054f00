import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seqctl.errors import DeadCellError, StateExplosionError, UnknownIdError
from seqctl.model import (ControlledBinaryModel, load_model, ratio_step,
                          reachable_ratios, save_model, validate_model)
from seqctl.ratio import INF, format_ratio, parse_ratio, parse_rational

from conftest import coin2_model, random_problem
import random


def test_coin2_validates_clean(coin2):
    report = validate_model(coin2)
    assert report.empty and report.ok


def test_row_sum_violation():
    model = ControlledBinaryModel.from_tables(
        ["a"], ["0", "1"], {"a": ["0.5", "0.4"]}, {"a": ["0.3", "0.7"]})
    report = validate_model(model)
    assert not report.ok
    assert report.codes() == ["ROW_SUM"]
    assert report.violations[0].control == "a"


def test_dead_cell_is_warning_not_error():
    model = ControlledBinaryModel.from_tables(
        ["a"], ["0", "1", "2"], {"a": ["1/2", "1/2", "0"]}, {"a": ["1/4", "3/4", "0"]})
    report = validate_model(model)
    assert report.ok and not report.empty
    assert report.codes() == ["DEAD_CELL"]
    assert report.violations[0].severity == "WARNING"


def test_duplicate_and_negative_violations():
    model = ControlledBinaryModel.from_tables(
        ["a", "a"], ["0", "1"], {"a": ["3/2", "-1/2"]}, {"a": ["1/2", "1/2"]})
    codes = set(validate_model(model).codes())
    assert "DUPLICATE_CONTROL" in codes
    assert "NEGATIVE_PROB" in codes


def test_ratio_step_coin2(coin2):
    assert ratio_step(coin2, "a", "1") == Fraction(3, 2)
    assert ratio_step(coin2, "a", "0") == Fraction(1, 2)
    assert ratio_step(coin2, "b", "1") == Fraction(4, 3)
    assert ratio_step(coin2, "b", "0") == Fraction(2, 3)


def test_ratio_step_infinite_and_errors():
    model = ControlledBinaryModel.from_tables(
        ["a"], ["0", "1", "2"], {"a": ["0.7", "0.3", "0"]}, {"a": ["0.7", "0", "0.3"]})
    assert ratio_step(model, "a", "2") is INF
    assert ratio_step(model, "a", "1") == 0
    with pytest.raises(UnknownIdError):
        ratio_step(model, "zz", "0")
    with pytest.raises(UnknownIdError):
        ratio_step(model, "a", "9")
    dead = ControlledBinaryModel.from_tables(
        ["a"], ["0", "1", "2"], {"a": ["1/2", "1/2", "0"]}, {"a": ["1/4", "3/4", "0"]})
    with pytest.raises(DeadCellError):
        ratio_step(dead, "a", "2")


def test_reachable_ratios_depths(coin2):
    assert reachable_ratios(coin2, 0) == {Fraction(1)}
    depth1 = reachable_ratios(coin2, 1)
    assert depth1 == {Fraction(1), Fraction(1, 2), Fraction(2, 3), Fraction(4, 3), Fraction(3, 2)}
    assert len(reachable_ratios(coin2, 2)) == 13


def test_reachable_ratios_state_explosion(coin2):
    with pytest.raises(StateExplosionError):
        reachable_ratios(coin2, 4, max_states=10)


def test_reachable_ratios_absorbs_infinity():
    model = ControlledBinaryModel.from_tables(
        ["a"], ["0", "1"], {"a": ["1", "0"]}, {"a": ["0", "1"]})
    ratios = reachable_ratios(model, 2)
    assert ratios == {Fraction(1), Fraction(0), INF}


def test_json_round_trip_bit_exact(tmp_path, coin2):
    path = tmp_path / "m.json"
    save_model(coin2, path)
    again = load_model(path)
    assert again == coin2
    assert again.to_json_dict() == coin2.to_json_dict()
    # and the serialized text itself round-trips
    text = path.read_text()
    assert json.dumps(json.loads(text), indent=2) + "\n" == text


def test_parse_rational_forms():
    assert parse_rational("0.1") == Fraction(1, 10)
    assert parse_rational({"num": 3, "den": 4}) == Fraction(3, 4)
    assert parse_rational(2) == Fraction(2)
    assert parse_ratio("inf") is INF
    assert format_ratio(Fraction(19, 4)) == "19/4"
    assert format_ratio(Fraction(5)) == "5"
    assert format_ratio(INF) == "inf"
    with pytest.raises(ValueError):
        parse_ratio("-1/2")


@settings(deadline=None, max_examples=40)
@given(st.integers(0, 2**32), st.integers(1, 3))
def test_path_products_match_joint_pmf_ratio(seed, depth):
    """Product of step ratios along a path equals the ratio of joint pmfs."""
    rng = random.Random(seed)
    problem = random_problem(rng)
    model = problem.model
    path = [(rng.choice(model.controls), rng.choice(model.outcomes)) for _ in range(depth)]
    product = Fraction(1)
    mass0 = mass1 = Fraction(1)
    for x, y in path:
        product *= ratio_step(model, x, y)
        mass0 *= model.prob0(x, y)
        mass1 *= model.prob1(x, y)
    assert product == mass1 / mass0


@settings(deadline=None, max_examples=25)
@given(st.integers(0, 2**32), st.integers(0, 3))
def test_reachable_ratio_count_bound(seed, depth):
    rng = random.Random(seed)
    model = random_problem(rng).model
    ratios = reachable_ratios(model, depth)
    cells = len(model.controls) * len(model.outcomes)
    assert len(ratios) <= sum(cells**k for k in range(depth + 1))
    assert ratios <= reachable_ratios(model, depth + 1)
