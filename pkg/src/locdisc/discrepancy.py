"""Population and empirical discrepancies between a source and a target.

All five quantities share one shape: a supremum, over hypotheses (or pairs of
hypotheses) from a possibly localized set, of the target mass minus the source
mass of a disagreement region.

* ``hdh_divergence``         sup over pairs of ``|Q(h d h') - P(h d h')|``
* ``disparity_discrepancy``  sup over ``h'`` of ``Q(h d h') - P(h d h')`` for a fixed anchor ``h``
* ``localized_hdh``          pair supremum, both members with source error ``<= r``
* ``localized_disparity``    anchor supremum, ``h'`` with source error ``<= r``
* ``boosted_localized_hdh``  pair supremum of ``Q(h d h') - P(h d h')**gamma`` over the localized set

Population values (both sides :class:`~locdisc.domains.Domain`) come from a
grid over the parameter box followed by local refinement of the best grid
witnesses; empirical values (both sides :class:`~locdisc.domains.Dataset`) are
exact maxima over the sample-induced candidate set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy.optimize import minimize_scalar

from . import spaces
from .domains import (
    Dataset,
    Domain,
    Marginal1D,
    Marginal2D,
    domains_class_box,
    empirical_error,
    expected_error,
    mass,
    sample,
)
from .hypotheses import (
    TWO_PI,
    Hypothesis,
    HypothesisClass,
    Linear2D,
    Threshold,
    disagreement_region,
    grid_arrays,
    hypothesis_from_dict,
    hypothesis_to_dict,
    linear_candidate_arrays,
    predict,
    threshold_candidate_values,
    _axis,
)

# default coarse grid step, as a fraction of the parameter span
DEFAULT_RESOLUTION = 1e-3
# local refinement stops at this parameter step
REFINE_TOL = 1e-9
# feasible-set boundaries are bisected to this width
BOUNDARY_TOL = 1e-10
MEMBERSHIP_SLACK = 1e-12

# planar pair searches: size caps for the start set and best-response set
PAIR_START_CAP = 1200
PAIR_RESPONSE_CAP = 60_000
PAIR_STARTS = 6

KINDS = ("hdh-divergence", "disparity", "localized-hdh", "localized-disparity", "boosted-localized-hdh")


class EmptyLocalizedSpace(ValueError):
    """No hypothesis satisfies the localization constraint."""


@dataclass(frozen=True)
class DiscrepancyKind:
    tag: str
    r: Optional[float] = None
    gamma: Optional[float] = None
    anchor: Optional[Hypothesis] = None

    def __post_init__(self):
        if self.tag not in KINDS:
            raise ValueError(f"unknown discrepancy {self.tag!r}")
        if self.tag.startswith(("localized", "boosted")):
            if self.r is None or self.r < 0:
                raise ValueError(f"{self.tag} needs a radius r >= 0")
        if self.tag == "boosted-localized-hdh":
            if self.gamma is None or self.gamma < 1:
                raise ValueError("boosted discrepancy needs gamma >= 1")
            if self.r <= 0:
                raise ValueError("boosted discrepancy needs r > 0")
        if self.tag in ("disparity", "localized-disparity") and self.anchor is None:
            raise ValueError(f"{self.tag} needs an anchor hypothesis")

    @property
    def pairwise(self) -> bool:
        return self.tag in ("hdh-divergence", "localized-hdh", "boosted-localized-hdh")

    @property
    def localized(self) -> bool:
        return self.r is not None

    @property
    def form(self) -> str:
        if self.tag == "hdh-divergence":
            return "abs"
        if self.tag == "boosted-localized-hdh":
            return "boosted"
        return "signed"

    def to_dict(self) -> dict:
        return {
            "tag": self.tag,
            "r": self.r,
            "gamma": self.gamma,
            "anchor": None if self.anchor is None else hypothesis_to_dict(self.anchor),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DiscrepancyKind":
        anchor = d.get("anchor")
        return cls(d["tag"], d.get("r"), d.get("gamma"), None if anchor is None else hypothesis_from_dict(anchor))


@dataclass
class DiscrepancyReport:
    kind: DiscrepancyKind
    value: float
    witness: tuple
    mode: str
    resolution: object
    source: str
    target: str
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.tag,
            "r": self.kind.r,
            "gamma": self.kind.gamma,
            "anchor": None if self.kind.anchor is None else hypothesis_to_dict(self.kind.anchor),
            "value": self.value,
            "witness": [hypothesis_to_dict(h) for h in self.witness],
            "mode": self.mode,
            "resolution": self.resolution,
            "source": self.source,
            "target": self.target,
            "details": self.details,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DiscrepancyReport":
        anchor = d.get("anchor")
        kind = DiscrepancyKind(d["kind"], d.get("r"), d.get("gamma"), None if anchor is None else hypothesis_from_dict(anchor))
        return cls(
            kind,
            float(d["value"]),
            tuple(hypothesis_from_dict(w) for w in d["witness"]),
            d["mode"],
            d["resolution"],
            d["source"],
            d["target"],
            d.get("details", {}),
        )


# ---------------------------------------------------------------------------
# direct evaluation (used for witnesses and by tests)


def pair_masses(source, target, h: Hypothesis, g: Hypothesis) -> tuple[float, float]:
    """``(target mass, source mass)`` of the disagreement region of ``h`` and ``g``."""
    if isinstance(source, Domain):
        region = disagreement_region(h, g)
        return mass(target.marginal, region), mass(source.marginal, region)
    region = disagreement_region(h, g)
    q = float(np.mean(region.contains(target.points)))
    p = float(np.mean(region.contains(source.points)))
    return q, p


def _counts(data: Dataset, h, g) -> int:
    return int(np.count_nonzero(predict(h, data.points) != predict(g, data.points)))


def pair_objective(source, target, h: Hypothesis, g: Hypothesis, form: str = "signed", gamma: float = 1.0) -> float:
    """Objective value of one pair, computed the way the engine reports it."""
    if isinstance(source, Dataset):
        q, p = _counts(target, h, g), _counts(source, h, g)
        return float(spaces.objective_values(form, q, p, len(target), len(source), gamma))
    q, p = pair_masses(source, target, h, g)
    return float(spaces.objective_values(form, q, p, 1.0, 1.0, gamma))


def source_error(source, h: Hypothesis) -> float:
    if isinstance(source, Domain):
        return expected_error(h, source)
    return empirical_error(h, source)


def evaluate_witness(report: DiscrepancyReport, source, target) -> float:
    """Re-evaluate a report's witness; reproduces ``report.value``."""
    k = report.kind
    if k.pairwise:
        h, g = report.witness
    else:
        h, g = k.anchor, report.witness[0]
    return pair_objective(source, target, h, g, k.form, k.gamma or 1.0)


# ---------------------------------------------------------------------------
# input handling


def _default_class(source, target) -> HypothesisClass:
    dim = source.dim
    if dim == 1:
        if isinstance(source, Domain) and isinstance(target, Domain):
            return HypothesisClass.thresholds(*domains_class_box(source, target))
        pts = np.concatenate([np.asarray(source.points), np.asarray(target.points)])
        return HypothesisClass.thresholds(float(pts.min()), float(pts.max()) + 1.0)
    boxes = []
    for side in (source, target):
        if isinstance(side, Domain):
            boxes.append(side.marginal.bounding_box())
        else:
            pts = np.asarray(side.points)
            boxes.append(((pts[:, 0].min(), pts[:, 0].max()), (pts[:, 1].min(), pts[:, 1].max())))
    reach = max(
        math.hypot(max(abs(xr[0]), abs(xr[1])), max(abs(yr[0]), abs(yr[1]))) for xr, yr in boxes
    )
    reach = round(reach + 0.0858, 1)  # a little past the farthest corner
    return HypothesisClass.linear(-reach, reach)


def _resolve_mode(source, target, mode: Optional[str]) -> str:
    both_domains = isinstance(source, Domain) and isinstance(target, Domain)
    both_data = isinstance(source, Dataset) and isinstance(target, Dataset)
    if not (both_domains or both_data):
        raise TypeError("source and target must both be Domains or both be Datasets")
    if source.dim != target.dim:
        raise ValueError(f"source is {source.dim}-D but target is {target.dim}-D")
    if mode is None:
        return "population-analytic" if both_domains else "empirical-exact"
    allowed = ("population-analytic", "population-grid", "monte-carlo") if both_domains else ("empirical-exact", "empirical-grid")
    if mode not in allowed:
        raise ValueError(f"mode {mode!r} not available for these inputs (choose from {allowed})")
    return mode


def _steps(cls: HypothesisClass, resolution: float):
    span = cls.box[1] - cls.box[0]
    if cls.kind == "threshold-1d":
        return resolution * span
    return (TWO_PI * resolution, span * resolution)


# ---------------------------------------------------------------------------
# public API


def hdh_divergence(source, target, cls: HypothesisClass | None = None, mode: str | None = None, **opts) -> DiscrepancyReport:
    """Supremum over hypothesis pairs of the absolute target-minus-source disagreement mass."""
    return compute(DiscrepancyKind("hdh-divergence"), source, target, cls, mode, **opts)


def disparity_discrepancy(anchor: Hypothesis, source, target, cls=None, mode=None, **opts) -> DiscrepancyReport:
    return compute(DiscrepancyKind("disparity", anchor=anchor), source, target, cls, mode, **opts)


def localized_hdh(source, target, cls=None, r: float | None = None, mode=None, **opts) -> DiscrepancyReport:
    """Pair supremum restricted to hypotheses whose source error is at most ``r``.

    For samples the constraint uses the empirical source error, or, when
    ``constants`` (:class:`~locdisc.localization.LocalizationConstants`) are
    given, membership in the inflated set ``err <= r + c_plus``.
    """
    if r is None:
        raise TypeError("localized_hdh needs r")
    return compute(DiscrepancyKind("localized-hdh", r=float(r)), source, target, cls, mode, **opts)


def localized_disparity(anchor: Hypothesis, source, target, cls=None, r: float | None = None, mode=None, **opts) -> DiscrepancyReport:
    if r is None:
        raise TypeError("localized_disparity needs r")
    return compute(DiscrepancyKind("localized-disparity", r=float(r), anchor=anchor), source, target, cls, mode, **opts)


def boosted_localized_hdh(source, target, cls=None, r: float | None = None, gamma: float = 1.0, mode=None, **opts) -> DiscrepancyReport:
    if r is None:
        raise TypeError("boosted_localized_hdh needs r")
    return compute(DiscrepancyKind("boosted-localized-hdh", r=float(r), gamma=float(gamma)), source, target, cls, mode, **opts)


def compute(
    kind: DiscrepancyKind,
    source,
    target,
    cls: HypothesisClass | None = None,
    mode: str | None = None,
    *,
    resolution: float = DEFAULT_RESOLUTION,
    constants=None,
    mc_size: int = 20_000,
    mc_seed: int = 0,
) -> DiscrepancyReport:
    """Dispatch on input type and mode; see the module docstring."""
    mode = _resolve_mode(source, target, mode)
    if cls is None:
        cls = _default_class(source, target)
    if cls.dim != source.dim:
        raise ValueError(f"{cls.kind} class on {source.dim}-D inputs")
    if kind.anchor is not None and kind.anchor.dim != source.dim:
        raise ValueError("anchor hypothesis dimension does not match the inputs")
    if kind.localized and isinstance(source, Dataset) and source.labels is None:
        raise ValueError("localized discrepancies need a labeled source sample")
    if mode.startswith("population") and not cls.bounded:
        raise ValueError("population search needs a bounded parameter box")

    if mode == "monte-carlo":
        src = sample(source, mc_size, mc_seed, labeled=True, stream_id=1)
        tgt = sample(target, mc_size, mc_seed, labeled=False, stream_id=2)
        rep = compute(kind, src, tgt, cls, "empirical-grid" if cls.dim == 2 else "empirical-exact",
                      resolution=resolution, constants=constants)
        rep.mode = "monte-carlo"
        rep.source, rep.target = source.name, target.name
        rep.details["mc_size"] = mc_size
        return rep

    if cls.kind == "threshold-1d":
        if mode.startswith("population"):
            return _population_threshold(kind, source, target, cls, resolution, refine=mode == "population-analytic")
        return _empirical(kind, source, target, cls, mode, resolution, constants)
    if mode.startswith("population"):
        return _population_linear(kind, source, target, cls, resolution, refine=mode == "population-analytic")
    return _empirical(kind, source, target, cls, mode, resolution, constants)


# ---------------------------------------------------------------------------
# shared search over a finite space


def _feasible_mask(kind: DiscrepancyKind, errors, limit):
    if not kind.localized:
        return np.ones(len(errors), dtype=bool)
    return errors <= limit


def _lex_first(space, idx):
    lex = space.lex_order()
    rank = np.empty_like(lex)
    rank[lex] = np.arange(lex.size)
    return int(idx[np.argmin(rank[idx])])


def _finite_search(kind: DiscrepancyKind, space, feasible, anchor_idx=None, n_starts: int = 1):
    """Best witnesses on the finite space: list of ``(value, i, j)``, best first.

    For anchored kinds ``i`` is the anchor index.
    """
    F = np.flatnonzero(feasible)
    if F.size == 0:
        raise EmptyLocalizedSpace("empty localized space: no hypothesis meets the source-error radius")
    form, gamma = kind.form, kind.gamma or 1.0
    if not kind.pairwise:
        vals, arg = spaces.best_partner(space, form, np.array([anchor_idx]), F, gamma=gamma)
        q, p = space.pair_masses(np.full(F.size, anchor_idx), F)
        allv = spaces.objective_values(form, q, p, space.nq, space.np_, gamma)
        order = _rank_desc(space, F, allv)
        return [(float(allv[k]), anchor_idx, int(F[k])) for k in order[:n_starts]]

    if isinstance(space, spaces.ThresholdSpace) and form in ("signed", "abs"):
        per = spaces.threshold_best_partner_separable(space, form, F, feasible)
        scale = space.signed_scale()
        per_v = per / scale
        order = _rank_desc(space, F, per)
        out = []
        seen = set()
        for k in order:
            i = int(F[k])
            q, p = space.pair_masses(np.full(F.size, i), F)
            v = spaces.objective_values(form, q, p, space.nq, space.np_, gamma)
            j = _lex_first(space, F[v == v.max()])
            key = tuple(sorted((i, j)))
            if key in seen:
                continue
            seen.add(key)
            out.append((float(v.max()), i, j))
            if len(out) >= n_starts:
                break
        out.sort(key=lambda x: -x[0])
        return out

    best = spaces.pair_sup(space, form, F, gamma=gamma)
    out = [best]
    if n_starts > 1:
        per, arg = spaces.best_partner(space, form, F, F, gamma=gamma)
        order = _rank_desc(space, F, per)
        seen = {tuple(sorted(best[1:]))}
        for k in order:
            key = tuple(sorted((int(F[k]), int(arg[k]))))
            if key in seen:
                continue
            seen.add(key)
            out.append((float(per[k]), int(F[k]), int(arg[k])))
            if len(out) >= n_starts:
                break
    return out


def _rank_desc(space, idx, vals):
    """Positions into ``idx`` sorted by value descending, lexicographic on ties."""
    lex = space.lex_order()
    rank = np.empty_like(lex)
    rank[lex] = np.arange(lex.size)
    return np.lexsort((rank[idx], -np.asarray(vals, dtype=float)))


def _pair_of(kind, space, i, j):
    return (space.hypothesis(i), space.hypothesis(j)) if kind.pairwise else (space.hypothesis(j),)


# ---------------------------------------------------------------------------
# empirical


def _empirical(kind, source: Dataset, target: Dataset, cls, mode, resolution, constants):
    if constants is not None and constants.n != len(source):
        raise ValueError(f"localization constants are for n={constants.n}, source has {len(source)} points")
    if cls.kind == "threshold-1d":
        if mode == "empirical-exact":
            T = threshold_candidate_values(source, target)
        else:
            T = np.concatenate([[-math.inf], _axis(*cls.box, _steps(cls, resolution)), [math.inf]])
        if kind.anchor is not None:
            T = np.append(T, kind.anchor.t)
        space = spaces.ThresholdSpace(T, source, target)
        errs = None
        if source.labels is not None:
            errs = spaces.threshold_error_counts(source, space.t[space.pos], space.above)
        anchor_idx = None
        if kind.anchor is not None:
            anchor_idx = int(np.searchsorted(space.t, kind.anchor.t)) + (space.L if kind.anchor.above else 0)
        res = int(space.K) if mode == "empirical-exact" else _steps(cls, resolution)
    else:
        if mode == "empirical-exact":
            th, b = linear_candidate_arrays(source, target)
        else:
            th, b = grid_arrays(cls, _steps(cls, resolution))
        if kind.anchor is not None:
            th = np.append(th, kind.anchor.theta)
            b = np.append(b, kind.anchor.b)
        space = spaces.LinearEmpiricalSpace(th, b, source, target)
        errs = spaces.linear_error_counts(source, th, b) if source.labels is not None else None
        anchor_idx = space.K - 1 if kind.anchor is not None else None
        res = int(space.K) if mode == "empirical-exact" else list(_steps(cls, resolution))

    details = {}
    if kind.localized:
        n = len(source)
        if constants is not None:
            limit = constants.r + constants.c_plus + MEMBERSHIP_SLACK
            details["membership"] = "r_plus"
        else:
            limit = kind.r + MEMBERSHIP_SLACK
            details["membership"] = "empirical_source_error"
        feasible = errs / n <= limit
    else:
        feasible = np.ones(space.K, dtype=bool)
    details["candidates"] = int(space.K)
    details["feasible"] = int(feasible.sum())
    v, i, j = _finite_search(kind, space, feasible, anchor_idx)[0]
    witness = _pair_of(kind, space, i, j)
    return DiscrepancyReport(kind, v, witness, mode, res, source.source, target.source, details)


# ---------------------------------------------------------------------------
# population, thresholds


def _bisect_boundary(err, r, t_in, t_out, tol=BOUNDARY_TOL):
    """Feasible endpoint of ``{err <= r}`` between a feasible and an infeasible point."""
    while abs(t_out - t_in) > tol:
        mid = 0.5 * (t_in + t_out)
        if err(mid) <= r:
            t_in = mid
        else:
            t_out = mid
    return t_in


def _threshold_feasible_sets(source: Domain, grid: np.ndarray, r: float):
    """Per orientation: refined boundary points and feasible intervals of ``{t : err <= r}``."""
    out = {}
    boundaries = []
    for above in (False, True):
        def err(t, above=above):
            return expected_error(Threshold(t, above), source)

        e = spaces.threshold_errors_population(source.marginal, source.labeling, grid, np.full(grid.size, above))
        ok = e <= r
        intervals = []
        k = 0
        while k < grid.size:
            if not ok[k]:
                k += 1
                continue
            start = k
            while k + 1 < grid.size and ok[k + 1]:
                k += 1
            lo = grid[start]
            hi = grid[k]
            if start > 0 and math.isfinite(grid[start - 1]) and math.isfinite(lo):
                lo = _bisect_boundary(err, r, lo, grid[start - 1])
                boundaries.append(lo)
            if k + 1 < grid.size and math.isfinite(grid[k + 1]) and math.isfinite(hi):
                hi = _bisect_boundary(err, r, hi, grid[k + 1])
                boundaries.append(hi)
            intervals.append((lo, hi))
            k += 1
        out[above] = intervals
    return out, np.array(boundaries)


def _containing(intervals, t):
    for lo, hi in intervals:
        if lo <= t <= hi:
            return lo, hi
    return t, t


def _population_threshold(kind, source: Domain, target: Domain, cls, resolution, refine=True):
    step = _steps(cls, resolution)
    grid = np.concatenate([[-math.inf], _axis(*cls.box, step), [math.inf]])
    extras = [source.labeling.t, target.labeling.t]
    if kind.anchor is not None:
        extras.append(kind.anchor.t)
    feas_sets = None
    if kind.localized:
        feas_sets, bnd = _threshold_feasible_sets(source, grid, kind.r)
        extras.extend(bnd.tolist())
    T = np.unique(np.concatenate([grid, np.asarray(extras, dtype=float)]))
    space = spaces.ThresholdSpace(T, source, target)
    if kind.localized:
        errs = spaces.threshold_errors_population(source.marginal, source.labeling, space.t[space.pos], space.above)
        # boundary points were certified with the scalar error; keep them feasible
        scalar_ok = np.isin(space.t[space.pos], np.asarray(extras[2 if kind.anchor is None else 3:], dtype=float))
        feasible = errs <= kind.r
        for idx in np.flatnonzero(scalar_ok & ~feasible):
            feasible[idx] = expected_error(space.hypothesis(idx), source) <= kind.r
    else:
        feasible = np.ones(space.K, dtype=bool)
    anchor_idx = None
    if kind.anchor is not None:
        anchor_idx = int(np.searchsorted(space.t, kind.anchor.t)) + (space.L if kind.anchor.above else 0)

    starts = _finite_search(kind, space, feasible, anchor_idx, n_starts=4 if refine else 1)
    best_v, best_w = None, None
    for v, i, j in starts:
        w = _pair_of(kind, space, i, j)
        if refine:
            w = _refine_thresholds(kind, source, target, w, step, feas_sets)
        val = _witness_value(kind, source, target, w)
        if best_v is None or val > best_v + 1e-15:
            best_v, best_w = val, w
    details = {"grid_points": int(grid.size), "candidates": int(space.K), "feasible": int(feasible.sum())}
    if feas_sets is not None:
        details["feasible_intervals"] = {
            ("above" if k else "below"): [[_jsonable(a), _jsonable(b)] for a, b in v] for k, v in feas_sets.items()
        }
    mode = "population-analytic" if refine else "population-grid"
    return DiscrepancyReport(kind, best_v, best_w, mode, step, source.name, target.name, details)


def _jsonable(x):
    return ("inf" if x > 0 else "-inf") if isinstance(x, float) and math.isinf(x) else float(x)


def _witness_value(kind, source, target, w):
    if kind.pairwise:
        return pair_objective(source, target, w[0], w[1], kind.form, kind.gamma or 1.0)
    return pair_objective(source, target, kind.anchor, w[0], kind.form, kind.gamma or 1.0)


def _refine_thresholds(kind, source, target, witness, step, feas_sets, rounds=4):
    """Coordinate-wise bounded Brent search around a grid witness."""
    hyps = list(witness)

    def value(hs):
        return _witness_value(kind, source, target, tuple(hs))

    def feasible(h):
        return not kind.localized or expected_error(h, source) <= kind.r

    cur = value(hyps)
    for _ in range(rounds):
        improved = False
        for k, h in enumerate(hyps):
            if not math.isfinite(h.t):
                continue
            lo, hi = h.t - step, h.t + step
            if feas_sets is not None:
                flo, fhi = _containing(feas_sets[h.above], h.t)
                lo, hi = max(lo, flo), min(hi, fhi)
            if not lo < hi:
                continue

            def f(t, k=k, h=h):
                trial = list(hyps)
                trial[k] = Threshold(t, h.above)
                return -value(trial)

            res = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": REFINE_TOL})
            for t in (float(res.x), lo, hi):
                cand = Threshold(t, h.above)
                if not feasible(cand):
                    continue
                trial = list(hyps)
                trial[k] = cand
                v = value(trial)
                if v > cur + 1e-15:
                    hyps, cur, improved = trial, v, True
        if not improved:
            break
    return tuple(hyps)


# ---------------------------------------------------------------------------
# population, linear classifiers


def _linear_errors(source: Domain, th, b):
    return spaces.linear_errors_population(source.marginal, source.labeling, th, b)


def _strided(idx: np.ndarray, cap: int) -> np.ndarray:
    if idx.size <= cap:
        return idx
    pick = np.linspace(0, idx.size - 1, cap).round().astype(int)
    return idx[np.unique(pick)]


def _population_linear(kind, source: Domain, target: Domain, cls, resolution, refine=True):
    steps = _steps(cls, resolution)
    th, b = grid_arrays(cls, steps)
    extra = [source.labeling, target.labeling] + ([kind.anchor] if kind.anchor is not None else [])
    th = np.concatenate([th, [h.theta for h in extra]])
    b = np.concatenate([b, [h.b for h in extra]])
    space = spaces.LinearPopulationSpace(th, b, source.marginal, target.marginal)
    if kind.localized:
        errs = _linear_errors(source, th, b)
        feasible = errs <= kind.r
    else:
        errs = None
        feasible = np.ones(space.K, dtype=bool)
    F = np.flatnonzero(feasible)
    if F.size == 0:
        raise EmptyLocalizedSpace("empty localized space: no hypothesis meets the source-error radius")
    form, gamma = kind.form, kind.gamma or 1.0
    details = {"candidates": int(space.K), "feasible": int(F.size)}

    if not kind.pairwise:
        anchor_idx = space.K - 1
        starts = _finite_search(kind, space, feasible, anchor_idx, n_starts=PAIR_STARTS if refine else 1)
        cands = [(v, (space.hypothesis(j),)) for v, _, j in starts]
    else:
        S = _strided(F, PAIR_START_CAP)
        R = _strided(F, PAIR_RESPONSE_CAP)
        per, arg = spaces.best_partner(space, form, S, S, gamma=gamma)
        order = _rank_desc(space, S, per)
        seen, cands = set(), []
        for k in order:
            key = tuple(sorted((int(S[k]), int(arg[k]))))
            if key in seen:
                continue
            seen.add(key)
            i, j = key
            v = float(per[k])
            if refine:
                i, j, v = _best_response(space, form, gamma, i, j, R)
            cands.append((v, (space.hypothesis(i), space.hypothesis(j))))
            if len(cands) >= (PAIR_STARTS if refine else 1):
                break
        details["start_set"] = int(S.size)
        details["response_set"] = int(R.size)

    best_v, best_w = None, None
    for v, w in sorted(cands, key=lambda c: -c[0]):
        if refine:
            w = _polish_lines(kind, source, target, w, steps)
        val = _witness_value(kind, source, target, w)
        if best_v is None or val > best_v + 1e-15:
            best_v, best_w = val, w
    mode = "population-analytic" if refine else "population-grid"
    return DiscrepancyReport(kind, best_v, best_w, mode, list(steps), source.name, target.name, details)


def _best_response(space, form, gamma, i, j, R, max_iter=8):
    """Alternately re-optimize each member of the pair over ``R``."""
    q, p = space.pair_masses(np.array([i]), np.array([j]))
    cur = float(spaces.objective_values(form, q, p, 1.0, 1.0, gamma)[0])
    for _ in range(max_iter):
        moved = False
        for side in (0, 1):
            fixed = j if side == 0 else i
            vals, arg = spaces.best_partner(space, form, np.array([fixed]), R, gamma=gamma)
            if vals[0] > cur + 1e-15:
                cur = float(vals[0])
                if side == 0:
                    i = int(arg[0])
                else:
                    j = int(arg[0])
                moved = True
        if not moved:
            break
    return i, j, cur


def _pivots(h: Linear2D, box):
    """Points on the line of ``h`` to rotate about: the foot of the box centre
    and the line's crossings with the box sides."""
    (x0, x1), (y0, y1) = box
    c, s = math.cos(h.theta), math.sin(h.theta)
    cx, cy = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
    d = c * cx + s * cy - h.b
    pts = [(cx - d * c, cy - d * s)]
    if abs(s) > 1e-12:
        for x in (x0, x1):
            pts.append((x, (h.b - c * x) / s))
    if abs(c) > 1e-12:
        for y in (y0, y1):
            pts.append(((h.b - s * y) / c, y))
    return pts


def _moves(h: Linear2D, box, ds_theta, ds_b):
    if not math.isfinite(h.b):
        return []
    out = [Linear2D(h.theta, h.b + ds_b), Linear2D(h.theta, h.b - ds_b)]
    for px, py in _pivots(h, box):
        for sgn in (1.0, -1.0):
            th = h.theta + sgn * ds_theta
            out.append(Linear2D(th, math.cos(th) * px + math.sin(th) * py))
    return out


def _union_box(a: Marginal2D, b: Marginal2D):
    (ax, ay), (bx, by) = a.bounding_box(), b.bounding_box()
    return (min(ax[0], bx[0]), max(ax[1], bx[1])), (min(ay[0], by[0]), max(ay[1], by[1]))


def _polish_lines(kind, source, target, witness, steps, tol=REFINE_TOL, max_evals=20_000):
    """Greedy pattern search over translations and pivot rotations of each line."""
    box = _union_box(source.marginal, target.marginal)
    hyps = list(witness)

    def value(hs):
        return _witness_value(kind, source, target, tuple(hs))

    def ok(h):
        return not kind.localized or expected_error(h, source) <= kind.r

    cur = value(hyps)
    ds_t, ds_b = steps
    evals = 0
    while max(ds_t, ds_b) > tol and evals < max_evals:
        best = None
        for k, h in enumerate(hyps):
            for cand in _moves(h, box, ds_t, ds_b):
                if not ok(cand):
                    continue
                trial = list(hyps)
                trial[k] = cand
                v = value(trial)
                evals += 1
                if v > cur + 1e-15 and (best is None or v > best[0]):
                    best = (v, trial)
        if best is None:
            ds_t *= 0.5
            ds_b *= 0.5
        else:
            cur, hyps = best
            ds_t *= 1.5
            ds_b *= 1.5
    return tuple(hyps)


# ---------------------------------------------------------------------------
# ideal joint error


def ideal_joint_error(source: Domain, target: Domain, cls: HypothesisClass | None = None,
                      resolution: float = DEFAULT_RESOLUTION) -> tuple[float, Hypothesis]:
    """Minimum over the class of source error plus target error, with a minimizer."""
    if not (isinstance(source, Domain) and isinstance(target, Domain)):
        raise TypeError("ideal joint error is defined for labeled domains")
    if cls is None:
        cls = _default_class(source, target)
    step = _steps(cls, resolution)

    def joint(h):
        return expected_error(h, source) + expected_error(h, target)

    if cls.kind == "threshold-1d":
        grid = np.concatenate([[-math.inf], _axis(*cls.box, step), [math.inf], [source.labeling.t, target.labeling.t]])
        t = np.concatenate([grid, grid])
        above = np.repeat([False, True], grid.size)
        vals = (spaces.threshold_errors_population(source.marginal, source.labeling, t, above)
                + spaces.threshold_errors_population(target.marginal, target.labeling, t, above))
        order = np.lexsort((above, t, vals))[:4]
        best_v, best_h = math.inf, None
        for k in order:
            h = Threshold(float(t[k]), bool(above[k]))
            v = joint(h)
            if math.isfinite(h.t):
                res = minimize_scalar(lambda x: joint(Threshold(x, h.above)), bounds=(h.t - step, h.t + step),
                                      method="bounded", options={"xatol": REFINE_TOL})
                cand = Threshold(float(res.x), h.above)
                cv = joint(cand)
                if cv < v:
                    h, v = cand, cv
            if v < best_v:
                best_v, best_h = v, h
        return best_v, best_h

    th, b = grid_arrays(cls, step)
    th = np.concatenate([th, [source.labeling.theta, target.labeling.theta]])
    b = np.concatenate([b, [source.labeling.b, target.labeling.b]])
    vals = _linear_errors(source, th, b) + spaces.linear_errors_population(target.marginal, target.labeling, th, b)
    order = np.lexsort((b, th, vals))[:4]
    best_v, best_h = math.inf, None
    for k in order:
        h = Linear2D(float(th[k]), float(b[k]))
        v = joint(h)
        if v > 0:
            h = _polish_min(joint, h, step, _union_box(source.marginal, target.marginal))
            v = joint(h)
        if v < best_v:
            best_v, best_h = v, h
    return best_v, best_h


def _polish_min(f, h, steps, box, tol=REFINE_TOL):
    ds_t, ds_b = steps
    cur = f(h)
    while max(ds_t, ds_b) > tol:
        cands = _moves(h, box, ds_t, ds_b)
        vals = [f(c) for c in cands]
        k = int(np.argmin(vals)) if vals else -1
        if k >= 0 and vals[k] < cur - 1e-18:
            h, cur = cands[k], vals[k]
        else:
            ds_t *= 0.5
            ds_b *= 0.5
    return h
