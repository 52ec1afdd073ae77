import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from locdisc import discrepancy as disc
from locdisc import objectives as obj
from locdisc.domains import Dataset, Domain, Marginal1D, sample
from locdisc.hypotheses import HypothesisClass, Threshold, canonical_candidates, predict
from locdisc.localization import LocalizationConstants
from locdisc.scenarios import ex41_domains, prop54_instance, threshold_class

UNIT = HypothesisClass.thresholds(0.0, 1.0)


def _reference(S, T, c, gamma=1.0):
    """Objective values by direct label-matrix evaluation over the candidate set."""
    H = canonical_candidates(UNIT, S, T)
    A = np.array([predict(h, S.points) for h in H], dtype=float)
    B = np.array([predict(h, T.points) for h in H], dtype=float)
    err = np.abs(A - S.labels[None, :]).mean(axis=1)
    As, Bs = 2 * A - 1, 2 * B - 1
    p = (1 - As @ As.T / len(S)) / 2
    q = (1 - Bs @ Bs.T / len(T)) / 2
    plus = err <= c.r_plus + 1e-12
    minus = err <= c.r_minus + 1e-12
    sub_p, sub_q = p[np.ix_(plus, plus)], q[np.ix_(plus, plus)]
    d13 = float(np.max(sub_q - sub_p))
    d21 = float(np.max(sub_q - sub_p**gamma))
    o13 = float(err[minus].min()) + d13
    inner = np.max(q[:, plus] - p[:, plus], axis=1)
    o16 = float(np.min(err + inner))
    return o13, d13, o16, d21, float(err[minus].min())


def _samples(seed, n=1000, m=800, flip=0.0):
    P, Q = ex41_domains(0.1)
    S = sample(P, n, seed, stream_id=1)
    if flip:
        rng = np.random.default_rng(seed)
        noisy = np.where(rng.random(n) < flip, 1 - S.labels, S.labels)
        S = Dataset(S.points, noisy, S.seed, S.source)
    return S, sample(Q, m, seed, labeled=False, stream_id=2)


@pytest.mark.parametrize("seed,flip,r", [(0, 0.0, 0.3), (1, 0.05, 0.4), (2, 0.1, 0.6)])
def test_objectives_match_direct_evaluation(seed, flip, r):
    S, T = _samples(seed, flip=flip)
    c = LocalizationConstants(len(S), 1, 0.1, r, gamma=2.0)
    o13, d13, o16, d21, e13 = _reference(S, T, c, gamma=2.0)
    s13 = obj.solve_objective_13(S, T, UNIT, c)
    assert s13.value == pytest.approx(o13, abs=1e-12)
    assert s13.discrepancy == pytest.approx(d13, abs=1e-12)
    assert s13.source_error == pytest.approx(e13, abs=1e-12)
    s16 = obj.solve_objective_16(S, T, UNIT, c)
    assert s16.value == pytest.approx(o16, abs=1e-12)
    s21 = obj.solve_objective_21(S, T, UNIT, c)
    assert s21.discrepancy == pytest.approx(d21, abs=1e-12)
    assert s21.discrepancy >= s13.discrepancy - 1e-12  # p**gamma <= p


def test_objective_13_on_narrow_source_admits_far_thresholds():
    # the inflated radius admits every below-oriented threshold, so the
    # localized term stays large at r = 0.3 (derived by direct evaluation)
    S, T = _samples(1, n=2000, m=2000)
    c = LocalizationConstants(2000, 2, 0.1, 0.3)
    s13 = obj.solve_objective_13(S, T, UNIT, c)
    assert c.r_plus > 0.5
    assert s13.discrepancy > 0.7
    assert abs(s13.h.t - 0.5) < 0.02


def test_objective_21_needs_gamma_and_reduces_at_one():
    S, T = _samples(3)
    c = LocalizationConstants(len(S), 1, 0.1, 0.3)
    with pytest.raises(ValueError):
        obj.solve_objective_21(S, T, UNIT, c)
    a = obj.solve_objective_21(S, T, UNIT, LocalizationConstants(len(S), 1, 0.1, 0.3, gamma=1.0))
    assert a.value == pytest.approx(obj.solve_objective_13(S, T, UNIT, c).value, abs=1e-12)


def test_infeasible_when_radius_below_capacity():
    S, T = _samples(4, n=500, m=500)
    c = LocalizationConstants(500, 2, 0.1, 0.2)
    with pytest.raises(obj.ObjectiveInfeasible, match="objective infeasible"):
        obj.solve_objective_13(S, T, UNIT, c)


def test_unlabeled_source_rejected():
    S, T = _samples(5, n=100, m=100)
    with pytest.raises(ValueError):
        obj.solve_objective_16(S.unlabeled(), T, UNIT, LocalizationConstants(100, 1, 0.1, 0.9))


@settings(max_examples=30)
@given(st.integers(0, 10_000))
def test_chain_inequality_holds(trial):
    P, Q, S, T, c = prop54_instance(11, trial, 500, 500)
    chk = obj.check_prop_54(S, T, threshold_class(P, Q), c)
    a, b, rr = chk.chain
    assert a <= b + 1e-12 and b <= rr + 1e-12 and chk.holds


# population bounds

def test_plain_bound_on_narrow_source():
    P, Q = ex41_domains(0.1)
    rep = obj.error_bound_rhs_thm32(Threshold(0.52), P, Q, UNIT, 0.15)
    assert rep.lhs == pytest.approx(0.02, abs=1e-12)
    assert rep.terms["source_error"] == pytest.approx(0.1, abs=1e-12)
    assert rep.holds and rep.rhs == pytest.approx(math.fsum(rep.terms.values()))
    dis = obj.error_bound_rhs_thm32(Threshold(0.52), P, Q, UNIT, 0.15, "disparity")
    assert dis.holds
    with pytest.raises(ValueError, match="localized set"):
        obj.error_bound_rhs_thm32(Threshold(0.9), P, Q, UNIT, 0.15)


def test_radius_below_joint_error_rejected():
    P = Domain(Marginal1D.uniform(0, 1), Threshold(0.3), "P")
    Q = Domain(Marginal1D.uniform(0, 1), Threshold(0.7), "Q")
    with pytest.raises(ValueError, match="below ideal joint error"):
        obj.error_bound_rhs_thm32(Threshold(0.5), P, Q, UNIT, 0.1)


@given(st.floats(0.0, 0.06), st.floats(1.0, 4.0))
def test_boosted_bound_valid_and_reduces(offset, gamma):
    P, Q = ex41_domains(0.1)
    h = Threshold(0.5 + offset)
    r = 0.3
    plain = obj.error_bound_rhs_thm32(h, P, Q, UNIT, r, lam=0.0, discrepancy_value=0.0)
    boosted = obj.error_bound_rhs_thm62(h, P, Q, UNIT, r, gamma, lam=0.0,
                                        discrepancy_value=disc.boosted_localized_hdh(P, Q, UNIT, r=r, gamma=gamma).value)
    assert boosted.holds and plain.holds
    if gamma == 1.0:
        assert boosted.terms["source_error"] == plain.terms["source_error"]
    e = plain.terms["source_error"]
    if 0 < e < 0.5 and gamma > 1:
        assert boosted.terms["source_error"] < e


def test_boosted_bound_range_checks():
    P, Q = ex41_domains(0.1)
    with pytest.raises(ValueError):
        obj.error_bound_rhs_thm62(Threshold(0.5), P, Q, UNIT, 0.6, 2.0)
    with pytest.raises(ValueError):
        obj.error_bound_rhs_thm62(Threshold(0.5), P, Q, UNIT, 0.3, 0.5)


def test_enumeration_on_narrow_source():
    P, Q = ex41_domains(0.1)
    res = obj.enumerate_population_bounds(P, Q, UNIT, 0.1, gammas=(1.0, 2.0))
    assert res["checked"] > 0
    assert all(b["violations"] == 0 for b in res["bounds"].values())
    assert res["bounds"]["thm6.2-gamma1"]["max_diff_vs_plain"] <= 1e-12
    assert res["shrinkage"]["held"] == res["shrinkage"]["checked"] > 0


# sample bounds

def _sol(n=2000):
    S, T = _samples(6, n=n, m=n)
    c = LocalizationConstants(n, 2, 0.1, 0.5)
    return S, T, c, obj.solve_objective_13(S, T, UNIT, c)


def test_sample_bound_terms_and_report():
    S, T, c, sol = _sol()
    rep = obj.gen_bound_rhs("5.3", sol, S, T, c, 0.0, target_domain=ex41_domains(0.1)[1])
    assert rep.diagnostic and rep.lhs is not None
    assert rep.rhs == pytest.approx(math.fsum(rep.terms.values()))
    assert all(rep.terms[k] >= 0 for k in ("fast_source", "fast_target", "root_source", "root_target"))
    bigger = obj.gen_bound_rhs("5.3", sol, S, T, c, 0.0, multiplier=2.0)
    assert bigger.rhs > rep.rhs
    header, row = rep.to_csv().strip().split("\n")
    assert header.split(",") == list(obj.CSV_COLUMNS)
    assert row.startswith("5.3,")


def test_sample_bound_pairing_and_conditions():
    S, T, c, sol = _sol()
    with pytest.raises(ValueError):
        obj.gen_bound_rhs("5.5", sol, S, T, c, 0.0)
    with pytest.raises(ValueError):
        obj.gen_bound_rhs("9.9", sol, S, T, c, 0.0)
    with pytest.raises(ValueError, match="radius condition"):
        obj.gen_bound_rhs("5.3", sol, S, T, c, 0.6, strict=True)
    rep = obj.gen_bound_rhs("5.3", sol, S, T, c, 0.6)
    assert any("radius condition" in n for n in rep.notes)
    s16 = obj.solve_objective_16(S, T, UNIT, c)
    assert obj.gen_bound_rhs("5.5", s16, S, T, c, 0.0).rhs >= s16.value
    g = LocalizationConstants(len(S), 2, 0.1, 0.5, gamma=2.0)
    s21 = obj.solve_objective_21(S, T, UNIT, g)
    assert obj.gen_bound_rhs("6.3", s21, S, T, g, 0.0).terms["fast_source"] < obj.gen_bound_rhs(
        "5.3", sol, S, T, c, 0.0).terms["fast_source"]


def test_classical_form_exceeds_localized_form_for_large_samples():
    S, T, c, sol = _sol()
    assert obj.classical_rhs(sol, len(S), len(T), 2, 0.0) > sol.source_error + sol.discrepancy
