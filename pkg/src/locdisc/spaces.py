"""Finite hypothesis sets with vectorized disagreement masses.

A space indexes ``K`` hypotheses and answers, for index arrays ``I`` and
``J``, the target and source masses of the disagreement regions of
``(h_I, h_J)``.  Population spaces return probabilities; empirical spaces
return integer counts together with the sample sizes, so objectives over
samples can be evaluated in exact integer arithmetic.
"""

from __future__ import annotations

import math

import numpy as np

from .domains import Dataset, Domain, Marginal1D, Marginal2D
from .hypotheses import (
    Hypothesis,
    Linear2D,
    Threshold,
    predict,
)


def signed_value(q, p, nq, np_):
    """``q/nq - p/np_`` computed as one rounded quotient (exact numerators for counts)."""
    if isinstance(nq, (int, np.integer)) and isinstance(np_, (int, np.integer)):
        num = np.asarray(q, dtype=np.int64) * np.int64(np_) - np.asarray(p, dtype=np.int64) * np.int64(nq)
        return num / float(nq * np_)
    return np.asarray(q) / nq - np.asarray(p) / np_


def objective_values(form: str, q, p, nq, np_, gamma: float = 1.0):
    if form == "signed":
        return signed_value(q, p, nq, np_)
    if form == "abs":
        return np.abs(signed_value(q, p, nq, np_))
    if form == "boosted":
        pm = np.asarray(p) / np_
        return np.asarray(q) / nq - pm**gamma
    raise ValueError(f"unknown objective form {form!r}")


# ---------------------------------------------------------------------------
# thresholds


class _PopTable:
    """Per-component CDF / survival values of a 1-D marginal at sorted points."""

    def __init__(self, marginal: Marginal1D, t: np.ndarray):
        self.w = np.array([w for w, _ in marginal.components])
        self.cdf = np.stack([s.cdf(t) for _, s in marginal.components])
        self.sf = np.stack([s.sf(t) for _, s in marginal.components])
        self.upper = np.stack([s.upper_half(t) for _, s in marginal.components])
        self.total = 1.0

    def interval(self, lo, hi):
        out = 0.0
        for k in range(len(self.w)):
            c, s, u = self.cdf[k], self.sf[k], self.upper[k]
            m = np.where(u[lo], s[lo] - s[hi], c[hi] - c[lo])
            out = out + self.w[k] * np.maximum(m, 0.0)
        return out

    def outside(self, lo, hi):
        out = 0.0
        for k in range(len(self.w)):
            out = out + self.w[k] * (self.cdf[k][lo] + self.sf[k][hi])
        return out

    def below(self):
        return self.w @ self.cdf


class _CountTable:
    """Counts of sample points below each sorted threshold."""

    def __init__(self, x: np.ndarray, t: np.ndarray):
        xs = np.sort(np.asarray(x, dtype=float))
        self.counts = np.searchsorted(xs, t, side="left").astype(np.int64)
        self.total = int(xs.size)

    def interval(self, lo, hi):
        return self.counts[hi] - self.counts[lo]

    def outside(self, lo, hi):
        return self.total - (self.counts[hi] - self.counts[lo])

    def below(self):
        return self.counts


class ThresholdSpace:
    """Thresholds at sorted values ``t`` in both orientations.

    Index ``i < L`` is ``Threshold(t[i])``; index ``L + i`` is its flip.
    """

    kind = "threshold-1d"

    def __init__(self, t, source, target, *, src_err=None):
        t = np.unique(np.asarray(t, dtype=float))
        self.t = t
        self.L = t.size
        self.K = 2 * t.size
        self.pos = np.concatenate([np.arange(self.L), np.arange(self.L)])
        self.above = np.repeat([False, True], self.L)
        self.q = self._table(target)
        self.p = self._table(source)
        self.nq = self.q.total if isinstance(self.q, _CountTable) else 1.0
        self.np_ = self.p.total if isinstance(self.p, _CountTable) else 1.0
        self.src_err = src_err

    def _table(self, side):
        if isinstance(side, Domain):
            return _PopTable(side.marginal, self.t)
        if isinstance(side, Marginal1D):
            return _PopTable(side, self.t)
        return _CountTable(side.points if isinstance(side, Dataset) else side, self.t)

    # lexicographic order on (t, orientation)
    def lex_order(self) -> np.ndarray:
        return np.lexsort((self.above.astype(int), self.t[self.pos]))

    def hypothesis(self, i: int) -> Threshold:
        return Threshold(float(self.t[self.pos[i]]), bool(self.above[i]))

    def params(self, i: int) -> tuple:
        return (float(self.t[self.pos[i]]), int(self.above[i]))

    def _region_masses(self, table, I, J):
        pi, pj = self.pos[I], self.pos[J]
        lo, hi = np.minimum(pi, pj), np.maximum(pi, pj)
        same = self.above[I] == self.above[J]
        return np.where(same, table.interval(lo, hi), table.outside(lo, hi))

    def pair_masses(self, I, J):
        I, J = np.broadcast_arrays(np.asarray(I), np.asarray(J))
        return self._region_masses(self.q, I, J), self._region_masses(self.p, I, J)

    def below_signed(self):
        """Signed mass of ``(-inf, t)`` (target minus source), integer-exact for counts."""
        if isinstance(self.q, _CountTable) and isinstance(self.p, _CountTable):
            return self.q.counts * np.int64(self.p.total) - self.p.counts * np.int64(self.q.total)
        return self.q.below() / self.nq - self.p.below() / self.np_

    def signed_scale(self) -> float:
        if isinstance(self.q, _CountTable) and isinstance(self.p, _CountTable):
            return float(self.q.total * self.p.total)
        return 1.0


def threshold_errors_population(marginal: Marginal1D, labeling: Threshold, t: np.ndarray, above: np.ndarray):
    """Expected 0-1 error of ``Threshold(t, above)`` against a threshold labeling."""
    t = np.asarray(t, dtype=float)
    lo = np.minimum(t, labeling.t)
    hi = np.maximum(t, labeling.t)
    same = np.asarray(above) == labeling.above
    inner = marginal.interval_mass(lo, hi)
    outer = marginal.outside_mass(lo, hi)
    return np.where(same, inner, outer)


def threshold_error_counts(data: Dataset, t: np.ndarray, above: np.ndarray) -> np.ndarray:
    """Number of misclassified sample points for ``Threshold(t, above)``."""
    if data.labels is None:
        raise ValueError("empirical error needs a labeled dataset")
    order = np.argsort(data.points, kind="stable")
    xs = data.points[order]
    ys = data.labels[order].astype(np.int64)
    k = np.searchsorted(xs, np.asarray(t, dtype=float), side="left")
    zeros_below = k - np.concatenate([[0], np.cumsum(ys)])[k]
    ones_total = int(ys.sum())
    ones_above = ones_total - (k - zeros_below)
    below_err = zeros_below + ones_above
    return np.where(np.asarray(above), len(xs) - below_err, below_err).astype(np.int64)


# ---------------------------------------------------------------------------
# linear classifiers


class LinearPopulationSpace:
    kind = "linear-2d"

    def __init__(self, theta, b, source: Marginal2D, target: Marginal2D, *, src_err=None):
        self.theta = np.asarray(theta, dtype=float)
        self.b = np.asarray(b, dtype=float)
        self.K = self.theta.size
        self.src = source
        self.tgt = target
        self.mp = source.halfplane_mass(self.theta, self.b)
        self.mq = target.halfplane_mass(self.theta, self.b)
        self.nq = self.np_ = 1.0
        self.src_err = src_err

    def lex_order(self) -> np.ndarray:
        return np.lexsort((self.b, self.theta))

    def hypothesis(self, i: int) -> Linear2D:
        return Linear2D(float(self.theta[i]), float(self.b[i]))

    def params(self, i: int) -> tuple:
        return (float(self.theta[i]), float(self.b[i]))

    def pair_masses(self, I, J):
        I, J = np.broadcast_arrays(np.asarray(I), np.asarray(J))
        t1, b1, t2, b2 = self.theta[I], self.b[I], self.theta[J], self.b[J]
        q12 = self.tgt.intersection_mass(t1, b1, t2, b2)
        p12 = self.src.intersection_mass(t1, b1, t2, b2)
        q = np.clip(self.mq[I] + self.mq[J] - 2.0 * q12, 0.0, 1.0)
        p = np.clip(self.mp[I] + self.mp[J] - 2.0 * p12, 0.0, 1.0)
        return q, p


class LinearEmpiricalSpace:
    kind = "linear-2d"

    def __init__(self, theta, b, source: Dataset, target: Dataset, *, src_err=None):
        self.theta = np.asarray(theta, dtype=float)
        self.b = np.asarray(b, dtype=float)
        self.K = self.theta.size
        self.Lp = self._labels(source.points)
        self.Lq = self._labels(target.points)
        self.ap = self.Lp.sum(axis=1).astype(np.int64)
        self.aq = self.Lq.sum(axis=1).astype(np.int64)
        self.np_ = len(source)
        self.nq = len(target)
        self.src_err = src_err

    def _labels(self, pts) -> np.ndarray:
        c, s = np.cos(self.theta), np.sin(self.theta)
        proj = c[:, None] * pts[None, :, 0] + s[:, None] * pts[None, :, 1]
        return (proj > self.b[:, None]).astype(np.float64)

    def lex_order(self) -> np.ndarray:
        return np.lexsort((self.b, self.theta))

    def hypothesis(self, i: int) -> Linear2D:
        return Linear2D(float(self.theta[i]), float(self.b[i]))

    def params(self, i: int) -> tuple:
        return (float(self.theta[i]), float(self.b[i]))

    def pair_masses(self, I, J):
        I, J = np.broadcast_arrays(np.asarray(I), np.asarray(J))
        if I.ndim == 2 and I.shape[1] > 1 and np.all(I == I[:, :1]) and np.all(J == J[:1, :]):
            rows, cols = I[:, 0], J[0, :]
            iq = np.rint(self.Lq[rows] @ self.Lq[cols].T).astype(np.int64)
            ip = np.rint(self.Lp[rows] @ self.Lp[cols].T).astype(np.int64)
        else:
            iq = np.rint(np.einsum("...k,...k->...", self.Lq[I], self.Lq[J])).astype(np.int64)
            ip = np.rint(np.einsum("...k,...k->...", self.Lp[I], self.Lp[J])).astype(np.int64)
        q = self.aq[I] + self.aq[J] - 2 * iq
        p = self.ap[I] + self.ap[J] - 2 * ip
        return q, p


def linear_error_counts(data: Dataset, theta, b) -> np.ndarray:
    if data.labels is None:
        raise ValueError("empirical error needs a labeled dataset")
    theta = np.asarray(theta, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.empty(theta.size, dtype=np.int64)
    step = max(1, 2_000_000 // max(1, len(data)))
    for s in range(0, theta.size, step):
        c, sn = np.cos(theta[s : s + step]), np.sin(theta[s : s + step])
        pred = c[:, None] * data.points[None, :, 0] + sn[:, None] * data.points[None, :, 1] > b[s : s + step, None]
        out[s : s + step] = (pred != data.labels[None, :].astype(bool)).sum(axis=1)
    return out


def linear_errors_population(marginal: Marginal2D, labeling: Linear2D, theta, b) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    b = np.asarray(b, dtype=float)
    return marginal.xor_mass(theta, b, labeling.theta, labeling.b)


# ---------------------------------------------------------------------------
# generic searches


def pair_sup(space, form: str, rows, cols=None, *, gamma: float = 1.0, symmetric=True, chunk_cells=4_000_000):
    """Max of the pair objective over ``rows x cols`` with lexicographic tie-breaking.

    ``rows``/``cols`` are index arrays (any order); they are scanned in the
    space's lexicographic parameter order so the first maximizer found is the
    lexicographically smallest.  Returns ``(value, i, j)`` or ``None`` when
    either side is empty.
    """
    lex = space.lex_order()
    rank = np.empty_like(lex)
    rank[lex] = np.arange(lex.size)
    rows = np.asarray(rows)
    rows = rows[np.argsort(rank[rows], kind="stable")]
    cols = rows if cols is None else np.asarray(cols)[np.argsort(rank[np.asarray(cols)], kind="stable")]
    if rows.size == 0 or cols.size == 0:
        return None
    best = None
    step = max(1, chunk_cells // cols.size)
    for s in range(0, rows.size, step):
        R = rows[s : s + step]
        q, p = space.pair_masses(R[:, None], cols[None, :])
        vals = objective_values(form, q, p, space.nq, space.np_, gamma)
        k = int(np.argmax(vals))
        v = float(vals.flat[k])
        if best is None or v > best[0]:
            best = (v, int(R[k // cols.size]), int(cols[k % cols.size]))
    return best


def best_partner(space, form: str, anchors, partners, *, gamma: float = 1.0, chunk_cells=4_000_000):
    """For each anchor, the max over ``partners`` of the pair objective."""
    anchors = np.asarray(anchors)
    partners = np.asarray(partners)
    out = np.full(anchors.size, -math.inf)
    arg = np.full(anchors.size, -1)
    if partners.size == 0:
        return out, arg
    lex = space.lex_order()
    rank = np.empty_like(lex)
    rank[lex] = np.arange(lex.size)
    partners = partners[np.argsort(rank[partners], kind="stable")]
    step = max(1, chunk_cells // partners.size)
    for s in range(0, anchors.size, step):
        A = anchors[s : s + step]
        q, p = space.pair_masses(A[:, None], partners[None, :])
        vals = objective_values(form, q, p, space.nq, space.np_, gamma)
        k = np.argmax(vals, axis=1)
        out[s : s + step] = vals[np.arange(A.size), k]
        arg[s : s + step] = partners[k]
    return out, arg


def threshold_best_partner_separable(space: ThresholdSpace, form: str, anchors, partner_mask):
    """Best partner values for signed / absolute objectives in O(K).

    The signed objective of a threshold pair is ``G(hi) - G(lo)`` for equal
    orientations and its negation otherwise, with ``G`` the signed mass below
    each threshold, so prefix/suffix extrema over the admissible partners give
    every anchor's optimum at once.  Values are in the space's exact scale
    (integer numerators for samples); divide by ``space.signed_scale()``.
    """
    G = space.below_signed()
    L = space.L
    integer = np.issubdtype(np.asarray(G).dtype, np.integer)
    neg_inf = np.iinfo(np.int64).min // 4 if integer else -math.inf
    pos_inf = np.iinfo(np.int64).max // 4 if integer else math.inf
    G = np.asarray(G)

    def prefix(vals, mask, fn, fill):
        v = np.where(mask, vals, fill)
        return fn.accumulate(v)

    def suffix(vals, mask, fn, fill):
        v = np.where(mask, vals, fill)
        return fn.accumulate(v[::-1])[::-1]

    stats = {}
    for o in (0, 1):
        m = np.asarray(partner_mask[o * L : (o + 1) * L], dtype=bool)
        stats[o] = (
            prefix(G, m, np.maximum, neg_inf),
            prefix(G, m, np.minimum, pos_inf),
            suffix(G, m, np.maximum, neg_inf),
            suffix(G, m, np.minimum, pos_inf),
            m.any(),
        )

    anchors = np.asarray(anchors)
    pos = space.pos[anchors]
    orient = space.above[anchors].astype(int)
    g = G[pos]
    best = np.full(anchors.size, neg_inf, dtype=G.dtype if integer else float)
    for o in (0, 1):
        sel = orient == o
        if not sel.any():
            continue
        p_ = pos[sel]
        gi = g[sel]
        cand = []
        smax, smin, tmax, tmin, nonempty = stats[o]  # same orientation
        if nonempty:
            cand += [tmax[p_] - gi, gi - smin[p_]]  # region [t_i, t_j) or [t_j, t_i)
            if form == "abs":
                cand += [gi - tmin[p_], smax[p_] - gi]
        smax, smin, tmax, tmin, nonempty = stats[1 - o]  # opposite orientation
        if nonempty:
            cand += [gi - tmin[p_], smax[p_] - gi]  # complement of [lo, hi)
            if form == "abs":
                cand += [tmax[p_] - gi, gi - smin[p_]]
        if cand:
            c = np.stack(cand)
            # guard sentinels from producing spurious large values
            valid = np.abs(c) < (pos_inf // 2 if integer else math.inf)
            c = np.where(valid, c, neg_inf)
            best[sel] = c.max(axis=0)
    return best
