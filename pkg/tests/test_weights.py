import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftframes.weights import (
    Weight,
    WeightPair,
    amalgam_norm,
    check_moderate,
    check_submultiplicative,
    constant_weight,
    grid_function_norm,
    make_polynomial_weight,
    seq_norm,
    validate_p,
    weight_from_json,
)

reals = st.floats(-1e6, 1e6, allow_nan=False)


def test_polynomial_weight_values():
    w = make_polynomial_weight(2.0)
    assert w(0.0) == 1.0
    assert w(3.0) == pytest.approx(16.0)
    assert make_polynomial_weight(0.0)(7.3) == 1.0


@pytest.mark.parametrize("s", [-1.0, math.inf, math.nan])
def test_bad_exponent(s):
    with pytest.raises(ValueError):
        make_polynomial_weight(s)


@given(st.floats(0, 6), reals, reals)
def test_submultiplicative(s, x, y):
    assert check_submultiplicative(make_polynomial_weight(s), x, y)


@given(st.floats(0, 3), st.floats(0, 3), reals, reals)
def test_moderation_for_smaller_exponent(s_mu, extra, x, y):
    pair = WeightPair(make_polynomial_weight(s_mu + extra), make_polynomial_weight(s_mu))
    assert check_moderate(pair, np.array([x, y]), 1e-12)


@given(reals)
def test_symmetric_and_at_least_one(x):
    w = make_polynomial_weight(1.5)
    assert w(x) == w(-x)
    assert w(x) >= 1.0


def test_validate_p():
    assert validate_p("inf") == math.inf
    assert validate_p(2) == 2.0
    with pytest.raises(ValueError):
        validate_p(3)


def test_seq_norm_mapping_and_array_agree():
    c = {-1: 3.0, 2: 4j}
    w = make_polynomial_weight(1.0)
    a = seq_norm(c, w, 2)
    b = seq_norm([3.0, 4j], w, 2, indices=[-1, 2])
    assert a == pytest.approx(b)
    assert a == pytest.approx(math.hypot(6.0, 12.0))
    assert seq_norm(c, constant_weight(), math.inf) == 4.0
    assert seq_norm(c, constant_weight(), 1) == 7.0


@given(st.lists(st.complex_numbers(max_magnitude=1e3, allow_nan=False), min_size=1, max_size=20))
def test_seq_norm_ordering(vals):
    w = constant_weight()
    n1, n2, ninf = (seq_norm(vals, w, p) for p in (1, 2, "inf"))
    assert ninf <= n2 * (1 + 1e-12) + 1e-300
    assert n2 <= n1 * (1 + 1e-12) + 1e-300


def test_grid_norm_of_constant():
    h = 0.01
    x = np.arange(100) * h
    assert grid_function_norm(np.ones(100), h, constant_weight(), 2, x) == pytest.approx(1.0)
    assert grid_function_norm(np.ones(100), h, constant_weight(), 1, x) == pytest.approx(1.0)


def test_amalgam_norm_unit_box():
    box = lambda x: np.where((x >= 0) & (x < 1), 1.0, 0.0)
    assert amalgam_norm(box, range(-3, 4), constant_weight(), 2) == pytest.approx(1.0)


def test_weight_json_round_trip():
    for w in (constant_weight(), make_polynomial_weight(2.5)):
        assert weight_from_json(w.to_json()) == w
    with pytest.raises(ValueError):
        weight_from_json({"kind": "exp"})
    with pytest.raises(ValueError):
        Weight("const", 1.0)
