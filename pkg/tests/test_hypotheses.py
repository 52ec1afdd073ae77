import math
from math import comb

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from locdisc.domains import Dataset
from locdisc.hypotheses import (
    TWO_PI,
    HypothesisClass,
    Linear2D,
    Region1D,
    Threshold,
    canonical_angle,
    canonical_candidates,
    disagreement_region,
    grid_arrays,
    hypothesis_from_dict,
    hypothesis_to_dict,
    linear_candidate_arrays,
    parameter_grid,
    predict,
    threshold_candidate_values,
)

finite = st.floats(-50, 50, allow_nan=False)


def test_threshold_labels_below_by_default():
    assert list(predict(Threshold(0.5), [0.2, 0.5, 0.7])) == [1, 0, 0]
    assert list(predict(Threshold(0.5, above=True), [0.2, 0.5, 0.7])) == [0, 1, 1]


def test_linear_labels_positive_side():
    h = Linear2D(0.0, 0.5)
    assert list(predict(h, [[0.7, 0.0], [0.3, 9.0], [0.5, 0.0]])) == [1, 0, 0]
    assert predict(h, (0.9, 0.1)) == 1


def test_predict_rejects_wrong_shapes():
    with pytest.raises(ValueError):
        predict(Threshold(0.0), np.zeros((3, 2)))
    with pytest.raises(ValueError):
        predict(Linear2D(0.0, 0.0), np.zeros(3))


def test_nan_parameters_rejected():
    with pytest.raises(ValueError):
        Threshold(float("nan"))
    with pytest.raises(ValueError):
        Linear2D(0.0, float("nan"))


@given(finite, st.lists(finite, min_size=1, max_size=20))
def test_threshold_flip_is_complement(t, xs):
    h = Threshold(t)
    assert np.array_equal(predict(h.flip(), xs), 1 - predict(h, xs))


@given(st.floats(-10, 10), st.floats(-3, 3), st.lists(st.tuples(finite, finite), min_size=1, max_size=20))
def test_linear_flip_is_complement_off_the_line(theta, b, pts):
    h = Linear2D(theta, b)
    x = np.asarray(pts)
    c, s = h.normal
    assume(np.all(np.abs(c * x[:, 0] + s * x[:, 1] - b) > 1e-9))
    assert np.array_equal(predict(h.flip(), x), 1 - predict(h, x))


@given(st.floats(-1e6, 1e6, allow_nan=False))
def test_canonical_angle_range(theta):
    a = canonical_angle(theta)
    assert 0.0 <= a < TWO_PI
    assert math.isclose(math.cos(a), math.cos(theta), abs_tol=1e-6)


@given(finite, finite, st.booleans(), st.booleans())
def test_threshold_disagreement_is_the_gap(a, b, oa, ob):
    reg = disagreement_region(Threshold(a, oa), Threshold(b, ob))
    lo, hi = min(a, b), max(a, b)
    if oa == ob:
        expect = ((lo, hi),) if lo < hi else ()
    else:
        expect = tuple(iv for iv in ((-math.inf, lo), (hi, math.inf)) if iv[0] < iv[1])
    assert reg == Region1D(expect)


def test_disagreement_region_type_mismatch():
    with pytest.raises(ValueError):
        disagreement_region(Threshold(0.0), Linear2D(0.0, 0.0))


@given(st.one_of(
    st.builds(Threshold, st.one_of(finite, st.just(math.inf), st.just(-math.inf)), st.booleans()),
    st.builds(Linear2D, st.floats(0, 7), st.floats(-5, 5)),
))
def test_dict_round_trip(h):
    assert hypothesis_from_dict(hypothesis_to_dict(h)) == h


def test_class_validation():
    with pytest.raises(ValueError):
        HypothesisClass.thresholds(1.0, 1.0)
    with pytest.raises(ValueError):
        HypothesisClass("polynomial", (0.0, 1.0))
    assert HypothesisClass.thresholds(0, 1).vc_dim == 2
    assert HypothesisClass.linear(-1, 1).vc_dim == 3


def test_grid_covers_box_and_both_orientations():
    cls = HypothesisClass.thresholds(0.0, 1.0)
    t, above = grid_arrays(cls, 0.25)
    assert set(np.round(t[np.isfinite(t)], 12)) >= {0.0, 0.25, 0.5, 0.75, 1.0}
    assert above.any() and (~above).any()
    assert len(list(parameter_grid(cls, 0.25))) == t.size


def _data(points):
    return Dataset(np.asarray(points, float), None, 0, "x")


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=15))
def test_threshold_candidates_realize_every_threshold_dichotomy(xs):
    x = np.asarray(xs)
    cands = canonical_candidates(HypothesisClass.thresholds(-5, 5), _data(x))
    labelings = {tuple(predict(h, x)) for h in cands}
    k = np.unique(x).size
    assert len(labelings) == 2 * k  # k + 1 cut positions, two orientations, constants counted once
    vals = threshold_candidate_values(_data(x))
    assert vals[0] == -math.inf and vals[-1] == math.inf


@pytest.mark.parametrize("n", [3, 5, 8, 12])
def test_linear_candidates_match_cover_count(n):
    # points in general position: the plane's affine halfplanes realize
    # 2 * sum_{k<=2} C(n-1, k) dichotomies
    rng = np.random.default_rng(n)
    pts = rng.uniform(0, 1, size=(n, 2))
    th, b = linear_candidate_arrays(_data(pts))
    labs = {tuple(predict(Linear2D(a, c), pts)) for a, c in zip(th, b)}
    assert len(labs) == 2 * sum(comb(n - 1, k) for k in range(3))


def test_linear_candidates_need_points():
    with pytest.raises(ValueError):
        linear_candidate_arrays(_data(np.zeros((0, 2))))
