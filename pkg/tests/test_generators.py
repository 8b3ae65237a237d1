import math

import numpy as np
import pytest
from scipy.integrate import trapezoid
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftframes.generators import (
    BumpGenerator,
    claim_section3_negative,
    family_lemma_4_1,
    family_theorem_3,
    family_theorem_3_general,
    family_theorem_4_3,
    family_theorem_4_6,
    hat_eval,
    make_bump,
    make_two_interval_bump,
    theorem3_gap_condition,
    time_domain_render,
)

PI = math.pi


def test_bump_values():
    b = make_bump((-1.0, 1.0))
    assert b(0.0) == 1.0
    assert b(1.0) == 0.0 and b(-1.0) == 0.0
    assert b(0.5) == pytest.approx(math.exp(-1.0 / 3.0), abs=1e-15)


def test_bump_rejects_empty_interval():
    with pytest.raises(ValueError):
        make_bump((1.0, 1.0))


@given(st.floats(-5, 5), st.floats(0.1, 5), st.floats(0, 1))
def test_bump_positive_inside_zero_outside(lo, width, t):
    b = make_bump((lo, lo + width))
    inside = lo + width * (0.05 + 0.9 * t)
    assert b(inside) > 0
    assert b(lo - 1e-9) == 0.0 and b(lo + width + 1e-9) == 0.0


def test_bump_smooth_at_endpoint():
    # finite differences up to order 4 stay bounded when stepping across the edge
    b = make_bump((-1.0, 1.0))
    h = 1e-2
    x = np.linspace(0.9, 1.1, 201)
    v = b(x)
    for order in range(1, 5):
        v = np.diff(v)
        assert np.max(np.abs(v)) / h**order < 1e4


def test_two_interval_tau():
    eps = 0.2
    tau = make_two_interval_bump((eps, PI - eps), (PI + eps, 2 * PI - eps))
    assert tau(PI / 2) == pytest.approx(1.0)
    assert tau(PI) == 0.0
    with pytest.raises(ValueError):
        make_two_interval_bump((0.0, 2.0), (1.0, 3.0))


def test_theorem3_family_labels():
    f = family_theorem_3((0, 2), 0.2)
    assert f.r == 2 and "satisfied" in f.label
    g = family_theorem_3((0, 1), 0.2)
    assert g.r == 2 and "violated" in g.label
    assert theorem3_gap_condition((0, 2, 4))
    assert family_theorem_3((0, 2, 4), 0.1).r == 3


@pytest.mark.parametrize("eps", [0.0, 0.25, 0.3, -0.1])
def test_epsilon_hypothesis(eps):
    with pytest.raises(ValueError):
        family_theorem_3((0, 2), eps)
    with pytest.raises(ValueError):
        family_lemma_4_1(eps)


def test_theorem3_general():
    assert family_theorem_3_general((-4, 4), (0, 2)).r == 2
    assert "satisfied" in family_theorem_3_general((0, 7), (0, 2, 5)).label
    with pytest.raises(ValueError):
        family_theorem_3_general((-3, 3), (0, 2))


def test_two_pi_family_sizes():
    assert family_lemma_4_1(0.24).r == 2
    assert family_theorem_4_3(1, 0.2).r == 2
    assert family_theorem_4_3(2, 0.2).r == 4
    assert family_theorem_4_3(3, 0.1).r == 6
    assert family_theorem_4_6(1, 0.2).r == 3
    assert family_theorem_4_6(2, 0.2).r == 6
    for bad in (0, -1, 1.5):
        with pytest.raises(ValueError):
            family_theorem_4_3(bad, 0.2)
        with pytest.raises(ValueError):
            family_theorem_4_6(bad, 0.2)


def test_theorem43_ordering():
    f = family_theorem_4_3(2, 0.2)
    assert [g.name for g in f.members] == ["theta_0", "theta_1", "psi_0", "psi_1"]


def test_omega_bump_disjoint_from_theta():
    f = family_theorem_4_6(1, 0.2)
    (tlo, thi), = f.members[0].support()
    (olo, ohi), = f.members[2].support()
    assert ohi < tlo or thi < olo


def test_hat_eval_examples():
    g0 = family_theorem_3((0,), 0.2).members[0]
    g2 = family_theorem_3((2,), 0.2).members[0]
    assert hat_eval(g0, 0.0) == 1.0
    assert hat_eval(g2, -2 * PI) == pytest.approx(1.0)
    assert hat_eval(g0, PI + 0.2) == 0.0


@given(st.integers(-4, 4), st.floats(-12, 12))
def test_shift_covariance(k, xi):
    prof = make_bump((-PI - 0.2, PI + 0.2))
    g = BumpGenerator(prof, k, PI)
    g0 = BumpGenerator(prof, 0, PI)
    assert hat_eval(g, xi) == pytest.approx(hat_eval(g0, xi + k * PI), abs=1e-15)


def test_support_exactness():
    g = family_theorem_3((2,), 0.2).members[0]
    (lo, hi), = g.support()
    xi = np.linspace(lo - 1, hi + 1, 4001)
    v = np.abs(g.hat(xi))
    assert np.all(v[(xi < lo) | (xi > hi)] == 0)
    assert np.all(v[(xi > lo + 0.02) & (xi < hi - 0.02)] > 0)


def test_render_mass_parseval_and_realness():
    g = family_theorem_3((0,), 0.2).members[0]
    h = 1 / 16
    x = np.arange(-256 * 16, 256 * 16 + 1) * h
    v = time_domain_render(g, x)
    assert abs(h * np.sum(v) - hat_eval(g, 0.0)) < 1e-6
    assert np.max(np.abs(v.imag)) < 1e-10
    xi = np.linspace(-PI - 0.2, PI + 0.2, 20001)
    parseval = trapezoid(np.abs(g.hat(xi)) ** 2, xi) / (2 * PI)
    assert abs(h * np.sum(np.abs(v) ** 2) - parseval) < 1e-6


def test_render_rejects_coarse_grid():
    g = family_theorem_3((0,), 0.2).members[0]
    with pytest.raises(ValueError):
        time_domain_render(g, np.arange(-10, 11) * 1.5)


def test_negative_claim_support_inside_period():
    f = claim_section3_negative(0.2)
    (lo, hi), = f.members[0].support()
    assert -PI < lo and hi < PI
    assert f.expect == "NotClosed"
