"""Sample-level adaptation objectives and the assembled target-error bounds.

Three objectives choose a hypothesis from two samples:

* ``solve_objective_13``: least source error inside the deflated set, plus the
  localized pair discrepancy over the inflated set (the two parts separate).
* ``solve_objective_16``: least ``source error + anchored discrepancy`` over the
  whole class, the anchor taking part in the inner supremum.
* ``solve_objective_21``: as the first, with the boosted discrepancy.

Population bounds (``error_bound_rhs_thm32`` / ``error_bound_rhs_thm62``) use
exact masses; the sample bounds (``gen_bound_rhs``) replace the unspecified
big-O constants by a user multiplier and are diagnostic only.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import discrepancy as disc
from . import spaces
from .domains import Dataset, Domain, expected_error
from .hypotheses import (
    Hypothesis,
    HypothesisClass,
    hypothesis_to_dict,
    linear_candidate_arrays,
    threshold_candidate_values,
)
from .localization import SLACK, LocalizationConstants

OBJECTIVES = ("localized-hdh", "localized-disparity", "boosted")


class ObjectiveInfeasible(ValueError):
    """The constraint set of an objective is empty on the candidates."""


@dataclass
class ObjectiveSolution:
    objective: str
    h: Hypothesis
    value: float
    source_error: float
    discrepancy: float
    feasible: bool
    partner: Optional[tuple] = None  # witness of the discrepancy term
    constants: Optional[LocalizationConstants] = None
    candidates: int = 0

    def to_dict(self) -> dict:
        return {
            "objective": self.objective,
            "h": hypothesis_to_dict(self.h),
            "value": self.value,
            "source_error": self.source_error,
            "discrepancy": self.discrepancy,
            "feasible": self.feasible,
            "partner": None if self.partner is None else [hypothesis_to_dict(g) for g in self.partner],
            "constants": None if self.constants is None else self.constants.to_dict(),
            "candidates": self.candidates,
        }


CSV_COLUMNS = (
    "theorem",
    "lhs",
    "source_error",
    "discrepancy",
    "lambda",
    "fast_source",
    "fast_target",
    "root_source",
    "root_target",
    "rhs",
    "holds",
)


@dataclass
class BoundReport:
    theorem: str
    lhs: Optional[float]
    terms: dict
    rhs: float
    holds: Optional[bool]
    tolerance: float
    diagnostic: bool = False
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "lhs": self.lhs,
            "terms": dict(self.terms),
            "rhs": self.rhs,
            "holds": self.holds,
            "tolerance": self.tolerance,
            "diagnostic": self.diagnostic,
            "notes": list(self.notes),
        }

    def csv_row(self) -> dict:
        row = {k: "" for k in CSV_COLUMNS}
        row.update({k: v for k, v in self.terms.items() if k in row})
        row["theorem"] = self.theorem
        row["lhs"] = "" if self.lhs is None else self.lhs
        row["rhs"] = self.rhs
        row["holds"] = "" if self.holds is None else self.holds
        return row

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        if header:
            w.writeheader()
        w.writerow(self.csv_row())
        return buf.getvalue()


def _assemble(theorem, lhs, terms, tolerance, diagnostic=False, notes=()):
    rhs = math.fsum(terms.values())
    holds = None if lhs is None else bool(lhs <= rhs + tolerance)
    return BoundReport(theorem, lhs, dict(terms), rhs, holds, tolerance, diagnostic, list(notes))


# ---------------------------------------------------------------------------
# sample spaces shared by the objectives


class _Problem:
    """Candidate space on the pooled sample with exact integer error counts."""

    def __init__(self, source: Dataset, target: Dataset, cls: HypothesisClass, c: LocalizationConstants):
        if source.labels is None:
            raise ValueError("objectives need a labeled source sample")
        if len(source) != c.n:
            raise ValueError(f"constants are for n={c.n}, source sample has {len(source)} points")
        if cls.dim != source.dim or source.dim != target.dim:
            raise ValueError("class and sample dimensions differ")
        self.n, self.m = len(source), len(target)
        self.c = c
        if cls.kind == "threshold-1d":
            self.space = spaces.ThresholdSpace(threshold_candidate_values(source, target), source, target)
            sp = self.space
            self.err = spaces.threshold_error_counts(source, sp.t[sp.pos], sp.above)
        else:
            th, b = linear_candidate_arrays(source, target)
            self.space = spaces.LinearEmpiricalSpace(th, b, source, target)
            self.err = spaces.linear_error_counts(source, th, b)
        lex = self.space.lex_order()
        self.rank = np.empty_like(lex)
        self.rank[lex] = np.arange(lex.size)
        self.plus = self.err / self.n <= c.r_plus + SLACK

    def minus(self) -> np.ndarray:
        return self.err / self.n <= self.c.r_minus + SLACK

    def argmin(self, idx, num):
        """Index in ``idx`` with least ``num`` (lexicographic on ties)."""
        k = np.lexsort((self.rank[idx], num))[0]
        return int(idx[k])

    def pair_term(self, form: str, gamma: float = 1.0):
        """Localized pair supremum over the inflated set: ``(value, i, j)``."""
        kind = disc.DiscrepancyKind("boosted-localized-hdh" if form == "boosted" else "localized-hdh",
                                    r=self.c.r_plus, gamma=gamma if form == "boosted" else None)
        return disc._finite_search(kind, self.space, self.plus)[0]


def _separable(objective, prob: _Problem, gamma: float, form: str) -> ObjectiveSolution:
    try:
        minus = prob.minus()
    except ValueError as exc:
        raise ObjectiveInfeasible(f"objective infeasible: {exc}") from None
    idx = np.flatnonzero(minus)
    if idx.size == 0:
        raise ObjectiveInfeasible("objective infeasible: no candidate has source error <= r - c_minus")
    h_idx = prob.argmin(idx, prob.err[idx])
    v, i, j = prob.pair_term(form, gamma)
    src = float(prob.err[h_idx] / prob.n)
    sp = prob.space
    return ObjectiveSolution(
        objective, sp.hypothesis(h_idx), src + v, src, float(v), True,
        (sp.hypothesis(i), sp.hypothesis(j)), prob.c, int(sp.K),
    )


def solve_objective_13(source: Dataset, target: Dataset, cls: HypothesisClass, c: LocalizationConstants) -> ObjectiveSolution:
    return _separable("localized-hdh", _Problem(source, target, cls, c), 1.0, "signed")


def solve_objective_21(source: Dataset, target: Dataset, cls: HypothesisClass, c: LocalizationConstants) -> ObjectiveSolution:
    if c.gamma is None:
        raise ValueError("boosted objective needs constants with gamma")
    return _separable("boosted", _Problem(source, target, cls, c), c.gamma, "boosted")


def solve_objective_16(source: Dataset, target: Dataset, cls: HypothesisClass, c: LocalizationConstants) -> ObjectiveSolution:
    """Least ``source error + anchored localized discrepancy`` over all candidates."""
    prob = _Problem(source, target, cls, c)
    sp = prob.space
    F = np.flatnonzero(prob.plus)
    if F.size == 0:
        raise ObjectiveInfeasible("objective infeasible: inflated localized set is empty")
    anchors = np.arange(sp.K)
    n, m = prob.n, prob.m
    if isinstance(sp, spaces.ThresholdSpace):
        # integer numerators over n*m: err*m + (q*n - p*m)
        inner = spaces.threshold_best_partner_separable(sp, "signed", anchors, prob.plus)
    else:
        vals, _ = spaces.best_partner(sp, "signed", anchors, F)
        inner = np.rint(vals * (n * m)).astype(np.int64)
    num = prob.err.astype(np.int64) * m + inner
    h_idx = prob.argmin(anchors, num)
    q, p = sp.pair_masses(np.full(F.size, h_idx), F)
    vals = spaces.signed_value(q, p, sp.nq, sp.np_)
    j = disc._lex_first(sp, F[vals == vals.max()])
    src = float(prob.err[h_idx] / n)
    d = float(vals.max())
    return ObjectiveSolution(
        "localized-disparity", sp.hypothesis(h_idx), float(num[h_idx] / (n * m)), src, d,
        bool(prob.err[h_idx] / n <= c.r_plus + SLACK), (sp.hypothesis(j),), c, int(sp.K),
    )


@dataclass
class Prop54Check:
    chain: tuple
    holds: bool
    objective13: ObjectiveSolution
    objective16: ObjectiveSolution

    def to_dict(self) -> dict:
        return {
            "chain": list(self.chain),
            "holds": self.holds,
            "objective13": self.objective13.to_dict(),
            "objective16": self.objective16.to_dict(),
        }


def check_prop_54(source: Dataset, target: Dataset, cls: HypothesisClass, c: LocalizationConstants) -> Prop54Check:
    """``O(h_check) <= err(h_hat) + disc <= r + disc`` on one pair of samples."""
    s13 = solve_objective_13(source, target, cls, c)
    s16 = solve_objective_16(source, target, cls, c)
    a = s16.value
    b = s13.source_error + s13.discrepancy
    rr = c.r + s13.discrepancy
    return Prop54Check((a, b, rr), bool(a <= b + SLACK and b <= rr + SLACK), s13, s16)


# ---------------------------------------------------------------------------
# population bounds


def solver_slack(cls: HypothesisClass, source: Domain, target: Domain, resolution: float = disc.DEFAULT_RESOLUTION) -> float:
    """Mass a grid step can move: ``step * (density bound of P + density bound of Q)``.

    For planar classes the step is taken relative to the offset span and the
    density bound is replaced by 1 per domain.
    """
    span = cls.box[1] - cls.box[0]
    if cls.kind == "threshold-1d":
        return resolution * span * (source.marginal.density_max() + target.marginal.density_max())
    return 2.0 * resolution


def _lambda(source, target, cls, lam):
    if lam is None:
        lam, _ = disc.ideal_joint_error(source, target, cls)
    return float(lam)


def error_bound_rhs_thm32(
    h: Hypothesis,
    source: Domain,
    target: Domain,
    cls: HypothesisClass,
    r: float,
    variant: str = "hdh",
    *,
    lam: Optional[float] = None,
    discrepancy_value: Optional[float] = None,
    base_tolerance: float = 1e-9,
    resolution: float = disc.DEFAULT_RESOLUTION,
) -> BoundReport:
    """Population bound ``err_Q(h) <= err_P(h) + localized discrepancy + lambda``.

    ``lam`` and ``discrepancy_value`` may be passed in to reuse a previous
    computation when many hypotheses are checked on the same domains.
    """
    lam = _lambda(source, target, cls, lam)
    if not r > lam:
        raise ValueError(f"radius below ideal joint error: r={r} <= lambda={lam:.6g}")
    e_p = expected_error(h, source)
    if variant == "hdh":
        if e_p > r:
            raise ValueError(f"hypothesis not in the localized set: err_P={e_p:.6g} > r={r}")
        if discrepancy_value is None:
            discrepancy_value = disc.localized_hdh(source, target, cls, r=r).value
    elif variant == "disparity":
        if discrepancy_value is None:
            discrepancy_value = disc.localized_disparity(h, source, target, cls, r=r).value
    else:
        raise ValueError(f"unknown variant {variant!r}")
    terms = {"source_error": e_p, "discrepancy": float(discrepancy_value), "lambda": lam}
    tol = base_tolerance + solver_slack(cls, source, target, resolution)
    return _assemble(f"thm3.2-{variant}", expected_error(h, target), terms, tol)


def error_bound_rhs_thm62(
    h: Hypothesis,
    source: Domain,
    target: Domain,
    cls: HypothesisClass,
    r: float,
    gamma: float,
    *,
    lam: Optional[float] = None,
    discrepancy_value: Optional[float] = None,
    base_tolerance: float = 1e-9,
    resolution: float = disc.DEFAULT_RESOLUTION,
) -> BoundReport:
    """Boosted bound ``err_Q(h) <= 2**(gamma-1) err_P(h)**gamma + boosted discrepancy + lambda``."""
    if gamma < 1:
        raise ValueError(f"gamma must be >= 1, got {gamma}")
    lam = _lambda(source, target, cls, lam)
    if not lam < 0.5:
        raise ValueError(f"ideal joint error must be below 1/2, got {lam:.6g}")
    if not lam < r < 0.5:
        raise ValueError(f"radius must lie in (lambda, 1/2) = ({lam:.6g}, 0.5), got {r}")
    e_p = expected_error(h, source)
    if e_p > r:
        raise ValueError(f"hypothesis not in the localized set: err_P={e_p:.6g} > r={r}")
    if discrepancy_value is None:
        discrepancy_value = disc.boosted_localized_hdh(source, target, cls, r=r, gamma=gamma).value
    terms = {"source_error": 2.0 ** (gamma - 1.0) * e_p**gamma, "discrepancy": float(discrepancy_value), "lambda": lam}
    tol = base_tolerance + solver_slack(cls, source, target, resolution)
    return _assemble("thm6.2", expected_error(h, target), terms, tol)


def enumerate_population_bounds(source: Domain, target: Domain, cls: HypothesisClass, r: float,
                                gammas=(1.0,), resolution: float = disc.DEFAULT_RESOLUTION,
                                base_tolerance: float = 1e-6) -> dict:
    """Check both population bounds for every grid hypothesis in the localized set.

    Returns counts of checked hypotheses and violations per bound, the largest
    ``lhs - rhs`` seen, and the source-term shrinkage tally.
    """
    from .hypotheses import grid_arrays

    lam, _ = disc.ideal_joint_error(source, target, cls)
    span = cls.box[1] - cls.box[0]
    if cls.kind == "threshold-1d":
        a, b = grid_arrays(cls, resolution * span)
        e_p = spaces.threshold_errors_population(source.marginal, source.labeling, a, b)
        e_q = spaces.threshold_errors_population(target.marginal, target.labeling, a, b)
    else:
        a, b = grid_arrays(cls, (2 * math.pi * resolution, span * resolution))
        e_p = spaces.linear_errors_population(source.marginal, source.labeling, a, b)
        e_q = spaces.linear_errors_population(target.marginal, target.labeling, a, b)
    inside = e_p <= r
    e_p, e_q = e_p[inside], e_q[inside]
    tol = base_tolerance + solver_slack(cls, source, target, resolution)
    out = {"lambda": lam, "r": r, "checked": int(inside.sum()), "tolerance": tol, "bounds": {}}

    d1 = disc.localized_hdh(source, target, cls, r=r, resolution=resolution).value
    rhs = e_p + d1 + lam
    out["bounds"]["thm3.2"] = {
        "discrepancy": d1,
        "violations": int(np.sum(e_q > rhs + tol)),
        "worst_gap": float(np.max(e_q - rhs)) if e_q.size else None,
    }
    shrink_ok = shrink_n = 0
    for g in gammas:
        key = f"thm6.2-gamma{g:g}"
        if not (lam < r < 0.5):
            out["bounds"][key] = {"skipped": f"r={r} outside (lambda, 1/2)"}
            continue
        dg = disc.boosted_localized_hdh(source, target, cls, r=r, gamma=g, resolution=resolution).value
        src_term = 2.0 ** (g - 1.0) * e_p**g
        rhs_g = src_term + dg + lam
        entry = {
            "discrepancy": dg,
            "violations": int(np.sum(e_q > rhs_g + tol)),
            "worst_gap": float(np.max(e_q - rhs_g)) if e_q.size else None,
        }
        if g == 1.0:
            entry["max_diff_vs_plain"] = float(np.max(np.abs(rhs_g - rhs))) if e_q.size else 0.0
        if g > 1.0:
            mid = (e_p > 0) & (e_p < 0.5)
            shrink_n += int(mid.sum())
            shrink_ok += int(np.sum(src_term[mid] < e_p[mid]))
        out["bounds"][key] = entry
    out["shrinkage"] = {"checked": shrink_n, "held": shrink_ok}
    return out


# ---------------------------------------------------------------------------
# sample bounds


_THEOREM_OBJECTIVES = {"5.3": ("localized-hdh",), "5.5": ("localized-disparity",), "6.3": ("localized-hdh", "boosted")}


def _log_term(d, size, delta):
    return d * math.log(size) + math.log(1.0 / delta)


def gen_bound_rhs(
    theorem: str,
    solution: ObjectiveSolution,
    source: Dataset,
    target: Dataset,
    c: LocalizationConstants,
    lam: float,
    multiplier: float = 1.0,
    *,
    target_domain: Optional[Domain] = None,
    strict: bool = False,
    gamma: Optional[float] = None,
) -> BoundReport:
    """Evaluate every term of a sample bound with big-O constants set to ``multiplier``.

    With ``target_domain`` the realized target error of the chosen hypothesis
    is reported as the left side.  ``strict`` turns an unmet radius condition
    into an error instead of a note.
    """
    theorem = str(theorem)
    if theorem not in _THEOREM_OBJECTIVES:
        raise ValueError(f"unknown theorem {theorem!r}; choose from {sorted(_THEOREM_OBJECTIVES)}")
    if solution.objective not in _THEOREM_OBJECTIVES[theorem]:
        raise ValueError(f"theorem {theorem} does not pair with a {solution.objective} solution")
    if multiplier <= 0:
        raise ValueError("multiplier must be positive")
    n, m = len(source), len(target)
    if n != c.n:
        raise ValueError(f"constants are for n={c.n}, source sample has {n} points")
    d, delta, r = c.d, c.delta, c.r
    notes = []
    need = r > (c.epsilon + lam if theorem in ("5.3", "6.3") else lam)
    if not need:
        msg = f"radius condition fails for theorem {theorem} (r={r}, epsilon={c.epsilon:.6g}, lambda={lam:.6g})"
        if strict:
            raise ValueError(msg)
        notes.append(msg)
    C = multiplier
    ln_n, ln_m = _log_term(d, n, delta), _log_term(d, m, delta)
    dsc = max(0.0, solution.discrepancy)
    terms = {"source_error": solution.source_error, "discrepancy": solution.discrepancy, "lambda": float(lam)}
    if theorem == "5.3":
        terms["fast_source"] = C * ln_n / n
        terms["fast_target"] = C * ln_m / m
        terms["root_source"] = C * math.sqrt(2 * r * ln_n / n)
        terms["root_target"] = C * math.sqrt((dsc + 2 * r) * ln_m / m)
    elif theorem == "5.5":
        terms["fast_source"] = C * ln_n / n
        terms["fast_target"] = C * ln_m / m
        terms["root_source"] = C * math.sqrt((solution.source_error + r) * ln_n / n)
        terms["root_target"] = C * math.sqrt((max(0.0, solution.value) + r) * ln_m / m)
    else:
        g = gamma if gamma is not None else (c.gamma if c.gamma is not None else 1.0)
        terms["fast_source"] = (C * ln_n / n) ** g
        terms["fast_target"] = C * ln_m / m
        terms["root_source"] = (C * math.sqrt(2 * r * ln_n / n)) ** g
        terms["root_target"] = C * math.sqrt((dsc + (2 * r) ** g) * ln_m / m)
    lhs = None if target_domain is None else expected_error(solution.h, target_domain)
    notes.append("big-O constants replaced by the multiplier; diagnostic, not certified")
    return _assemble(theorem, lhs, terms, 0.0, diagnostic=True, notes=notes)


def classical_rhs(solution: ObjectiveSolution, n: int, m: int, d: int, lam: float, multiplier: float = 1.0) -> float:
    """Leading terms plus the classical ``sqrt(d log n / n) + sqrt(d log m / m)`` complexity."""
    return (solution.source_error + solution.discrepancy + lam
            + multiplier * (math.sqrt(d * math.log(n) / n) + math.sqrt(d * math.log(m) / m)))
