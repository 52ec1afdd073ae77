import math

import pytest

from locdisc import discrepancy as disc
from locdisc import oracle
from locdisc.hypotheses import HypothesisClass, Threshold
from locdisc.scenarios import compare_1d, ex41_domains, ex42_domains, ex44_domains, random_pair, threshold_class

UNIT = HypothesisClass.thresholds(0.0, 1.0)
K = disc.DiscrepancyKind


def test_narrow_source_values():
    P, Q = ex41_domains(0.1)
    assert oracle.oracle_sup(K("hdh-divergence"), P, Q, UNIT) == pytest.approx(0.8, abs=2e-3)
    assert oracle.oracle_sup(K("disparity", anchor=Threshold(0.5)), P, Q, UNIT) == pytest.approx(0.4, abs=2e-3)
    assert oracle.oracle_sup(K("localized-hdh", r=0.1), P, Q, UNIT) == pytest.approx(0.0, abs=1e-12)
    assert oracle.oracle_sup(K("localized-hdh", r=0.05), Q, P, UNIT) == pytest.approx(0.4, abs=2e-3)


def test_tolerance_formula():
    P, Q = ex41_domains(0.1)
    # densities 5 and 1
    assert oracle.tolerance_1d(P, Q, 1e-4) == pytest.approx(2 * 1e-4 * 6)


def test_anchor_off_grid():
    P, Q = ex41_domains(0.1)
    v = oracle.oracle_sup(K("disparity", anchor=Threshold(0.123456)), P, Q, UNIT, 1e-3)
    e = disc.disparity_discrepancy(Threshold(0.123456), P, Q, UNIT).value
    assert v == pytest.approx(e, abs=oracle.tolerance_1d(P, Q, 1e-3))


def test_empty_localized_space():
    P, Q = ex41_domains(0.1)
    with pytest.raises(ValueError):
        oracle.oracle_sup(K("localized-hdh", r=0.0), P, Q, HypothesisClass.thresholds(0.7, 1.0))


def test_gaussian_mixture_tail_value():
    P, Q = ex42_domains()
    cls = threshold_class(P, Q)
    v = oracle.oracle_sup(K("hdh-divergence"), P, Q, cls)
    # two mixture halves overlap only through a one-sigma band
    assert v == pytest.approx(0.3413, abs=5e-3)


@pytest.mark.parametrize("k", range(5))
def test_engine_agrees_on_random_mixtures(k):
    P, Q, r = random_pair(123, k)
    kinds = [K("hdh-divergence"), K("localized-hdh", r=r), K("disparity", anchor=P.labeling),
             K("boosted-localized-hdh", r=r, gamma=1.5)]
    rows = compare_1d(P, Q, threshold_class(P, Q), kinds, 1e-3, 1e-4)
    assert all(row["agree"] for row in rows), rows


def test_planar_lattice_lower_bounds_engine():
    P, Q = ex44_domains()
    cls = HypothesisClass.linear(-1.5, 1.5)
    slack = oracle.planar_lattice_error(P.marginal, oracle.PLANAR_POINTS) + oracle.planar_lattice_error(
        Q.marginal, oracle.PLANAR_POINTS)
    ora = oracle.oracle_sup(K("localized-hdh", r=0.1), Q, P, cls, 0.04)
    eng = disc.localized_hdh(Q, P, cls, r=0.1, resolution=1e-2).value
    assert eng >= ora - slack
    assert ora > 0.5
