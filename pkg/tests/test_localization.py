import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from locdisc.domains import Dataset
from locdisc.hypotheses import HypothesisClass, Threshold
from locdisc.localization import (
    LocalizationConstants,
    RadiusTooSmall,
    c_minus,
    c_plus,
    containment_frequency,
    epsilon_term,
    member_minus,
    member_plus,
)
from locdisc.scenarios import ex41_domains

# frozen values, recomputed by hand from the formula
FROZEN_EPSILON = [
    ((2000, 2, 0.1), 0.124674),
    ((1000, 3, 0.1), 0.311140),
    ((500, 2, 0.1), 0.40997),
]


@pytest.mark.parametrize("args,value", FROZEN_EPSILON)
def test_epsilon_frozen(args, value):
    assert epsilon_term(*args) == pytest.approx(value, abs=5e-6)


def test_c_minus_frozen():
    assert c_minus(2000, 2, 0.1, 0.3) == pytest.approx(0.193397, abs=5e-6)


def test_reading_alternative():
    a = epsilon_term(2000, 2, 0.1, "ratio-of-log")
    assert a == pytest.approx(4 * (2 * (1 + 4 * math.log(1000)) - math.log(0.1) / 16) / 2000)
    with pytest.raises(ValueError):
        epsilon_term(2000, 2, 0.1, "other")


@pytest.mark.parametrize("bad", [dict(n=1, d=2, delta=0.1), dict(n=10, d=0, delta=0.1), dict(n=10, d=1, delta=1.0)])
def test_epsilon_validation(bad):
    with pytest.raises(ValueError):
        epsilon_term(**bad)


def test_log_clamped_when_n_equals_d():
    assert epsilon_term(2, 2, 0.5) == pytest.approx(4 * (2 + math.log(32)) / 2)


@given(st.integers(2, 10**6), st.integers(1, 5), st.floats(0.001, 0.9), st.floats(0.0, 1.0))
def test_c_plus_solves_its_quadratic(n, d, delta, r):
    if n < d:
        return
    e = epsilon_term(n, d, delta)
    c = c_plus(n, d, delta, r)
    assert c >= e - 1e-15
    assert c * c - e * c - e * r == pytest.approx(0.0, abs=1e-9 * max(1.0, c * c))


@given(st.integers(50, 10**6), st.floats(0.01, 0.5), st.floats(0.0, 1.0))
def test_c_minus_needs_radius_above_epsilon(n, delta, r):
    e = epsilon_term(n, 2, delta)
    if r > e:
        cm = c_minus(n, 2, delta, r)
        assert 0 < cm < r
    else:
        with pytest.raises(RadiusTooSmall):
            c_minus(n, 2, delta, r)


def test_constants_round_trip_and_tamper_check():
    c = LocalizationConstants(2000, 2, 0.1, 0.3)
    assert c.r_minus == pytest.approx(0.3 - 0.193397, abs=5e-6)
    assert c.r_plus > 0.3
    assert LocalizationConstants.from_dict(c.to_dict()) == c
    bad = c.to_dict() | {"epsilon": 0.5}
    with pytest.raises(ValueError):
        LocalizationConstants.from_dict(bad)
    small = LocalizationConstants(2000, 2, 0.1, 0.05)
    assert small.c_minus is None
    with pytest.raises(RadiusTooSmall):
        small.r_minus


def test_membership():
    x = np.linspace(0, 1, 2000)
    S = Dataset(x, (x < 0.5).astype(np.int8), 0, "S")
    c = LocalizationConstants(2000, 2, 0.1, 0.3)
    assert member_plus(Threshold(0.5), S, c) and member_minus(Threshold(0.5), S, c)
    assert not member_minus(Threshold(0.5 + 0.15), S, c)  # error 0.15 > r - c_minus ~ 0.107
    assert member_plus(Threshold(0.5 + 0.15), S, c)
    with pytest.raises(ValueError):
        member_plus(Threshold(0.5), Dataset(x[:10], S.labels[:10], 0, "S"), c)


def test_containment_frequency_on_narrow_source():
    P, _ = ex41_domains(0.1)
    res = containment_frequency(P, HypothesisClass.thresholds(0, 1), 2, 0.1, 0.3, 2000, 40, seed=1)
    assert res.freq_lower >= 0.9 and res.freq_upper >= 0.9
    assert res.trials == 40
    again = containment_frequency(P, HypothesisClass.thresholds(0, 1), 2, 0.1, 0.3, 2000, 40, seed=1)
    assert again.to_dict() == res.to_dict()
    with pytest.raises(RadiusTooSmall):
        containment_frequency(P, HypothesisClass.thresholds(0, 1), 2, 0.1, 0.05, 2000, 5, seed=1)
