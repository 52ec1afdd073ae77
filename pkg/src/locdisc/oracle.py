"""Independent brute-force oracle for population discrepancies.

Deliberately naive: a fixed dense grid, every pair evaluated, no refinement,
no pruning, no prefix tricks.  Masses come from a separate code path (the
complementary error function for Gaussians, a point lattice for planar
marginals), so agreement with the engine is evidence for both.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit
from scipy.special import erfc

from .domains import Domain, Gaussian, Marginal1D, Marginal2D, UniformInterval, UniformRect, UniformSegment
from .hypotheses import HypothesisClass, Linear2D, Threshold

_SQRT2 = math.sqrt(2.0)
PLANAR_POINTS = 3600


def _phi_parts(shape, x):
    """``(P(X < x), P(X >= x))`` for one component, each accurate in its tail."""
    x = np.asarray(x, dtype=float)
    if isinstance(shape, Gaussian):
        z = (x - shape.mean) / (shape.stddev * _SQRT2)
        return 0.5 * erfc(-z), 0.5 * erfc(z)
    w = shape.hi - shape.lo
    below = np.clip((x - shape.lo) / w, 0.0, 1.0)
    above = np.clip((shape.hi - x) / w, 0.0, 1.0)
    return below, above


def _tails(marginal: Marginal1D, t: np.ndarray):
    """Mixture ``P(X < t)`` and ``P(X >= t)`` at the grid."""
    lo = np.zeros(t.size)
    up = np.zeros(t.size)
    for w, s in marginal.components:
        a, b = _phi_parts(s, t)
        lo += w * a
        up += w * b
    return lo, up


@njit(cache=True)
def _mass(F, S, i, j):
    # [t_i, t_j), differencing the smaller tail
    if F[i] < S[i]:
        m = F[j] - F[i]
    else:
        m = S[i] - S[j]
    return m if m > 0.0 else 0.0


@njit(cache=True)
def _pair_max(Fq, Sq, Fp, Sp, feas, form, gamma):
    """Every pair ``(i <= j)`` in every orientation combination."""
    K = Fq.size
    best = -np.inf
    for i in range(K):
        for j in range(i, K):
            q_in = _mass(Fq, Sq, i, j)
            p_in = _mass(Fp, Sp, i, j)
            for oi in range(2):
                if not feas[oi, i]:
                    continue
                for oj in range(2):
                    if not feas[oj, j]:
                        continue
                    if oi == oj:
                        q, p = q_in, p_in
                    else:
                        q, p = 1.0 - q_in, 1.0 - p_in
                    if form == 0:
                        v = q - p
                    elif form == 1:
                        v = abs(q - p)
                    else:
                        v = q - max(p, 0.0) ** gamma
                    if v > best:
                        best = v
    return best


_FORMS = {"signed": 0, "abs": 1, "boosted": 2}


def density_bound(marginal) -> float:
    if isinstance(marginal, Marginal1D):
        total = 0.0
        for w, s in marginal.components:
            total += w * (1.0 / (s.hi - s.lo) if isinstance(s, UniformInterval) else 1.0 / (s.stddev * math.sqrt(2 * math.pi)))
        return total
    raise TypeError("density bound is defined for 1-D marginals")


def tolerance_1d(source: Domain, target: Domain, step: float) -> float:
    """``2 * step * (density bound of source + density bound of target)``."""
    return 2.0 * step * (density_bound(source.marginal) + density_bound(target.marginal))


def _threshold_grid(cls: HypothesisClass, resolution: float):
    lo, hi = cls.box
    step = resolution * (hi - lo)
    k = int(math.ceil((hi - lo) / step - 1e-9))
    t = np.concatenate([[-math.inf], lo + step * np.arange(k + 1), [math.inf]])
    t[-2] = min(t[-2], hi)
    return t, step


def _labels_1d(domain: Domain, t):
    """Errors of ``h_t`` (below) against the domain's threshold labeling, and of the flip."""
    lab = domain.labeling
    err_below = np.empty(t.size)
    for k, tk in enumerate(t):
        a, b = (tk, lab.t) if tk <= lab.t else (lab.t, tk)
        m = 0.0
        for w, s in domain.marginal.components:
            la, ua = _phi_parts(s, a)
            lb, ub = _phi_parts(s, b)
            m += w * max(0.0, float(lb - la) if la < ua else float(ua - ub))
        err_below[k] = m if not lab.above else 1.0 - m
    return err_below, 1.0 - err_below


def oracle_sup(kind, source: Domain, target: Domain, cls: HypothesisClass, resolution: float = 1e-4,
               *, chunk: int = 512) -> float:
    """Dense-grid maximum of the objective behind ``kind`` (a DiscrepancyKind)."""
    if cls.kind == "linear-2d":
        return _oracle_planar(kind, source, target, cls, resolution)
    t, step = _threshold_grid(cls, resolution)
    K = t.size
    Fq, Sq = _tails(target.marginal, t)
    Fp, Sp = _tails(source.marginal, t)
    if kind.localized:
        e_below, e_above = _labels_1d(source, t)
        feas = np.vstack([e_below <= kind.r, e_above <= kind.r])
    else:
        feas = np.ones((2, K), dtype=bool)
    if not feas.any():
        raise ValueError("empty localized space")

    if kind.pairwise:
        return float(_pair_max(Fq, Sq, Fp, Sp, feas, _FORMS[kind.form], float(kind.gamma or 1.0)))

    a = kind.anchor
    if not isinstance(a, Threshold):
        raise TypeError("anchor must be a threshold")
    # the anchor need not sit on the grid: place it in a copy of the grid
    ta = np.concatenate([t, [a.t]])
    order = np.argsort(ta, kind="stable")
    ta = ta[order]
    ai = int(np.flatnonzero(order == K)[0])
    Fq2, Sq2 = _tails(target.marginal, ta)
    Fp2, Sp2 = _tails(source.marginal, ta)
    best = -math.inf
    pos = np.flatnonzero(order != K)  # grid points in the copy
    for k, j in enumerate(pos):
        i0, j0 = min(ai, j), max(ai, j)
        q_in = _mass(Fq2, Sq2, i0, j0)
        p_in = _mass(Fp2, Sp2, i0, j0)
        for oj in range(2):
            if not feas[oj, order[j]]:
                continue
            if oj == int(a.above):
                v = q_in - p_in
            else:
                v = (1.0 - q_in) - (1.0 - p_in)
            best = max(best, v)
    return float(best)


# ---------------------------------------------------------------------------
# planar: masses from a midpoint lattice


def _lattice(marginal: Marginal2D, points: int):
    s = marginal.shape
    if isinstance(s, UniformRect):
        k = int(round(math.sqrt(points)))
        xs = s.x_range[0] + (np.arange(k) + 0.5) / k * (s.x_range[1] - s.x_range[0])
        ys = s.y_range[0] + (np.arange(k) + 0.5) / k * (s.y_range[1] - s.y_range[0])
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        return np.column_stack([X.ravel(), Y.ravel()]), 1.0 / k
    if isinstance(s, UniformSegment):
        u = (np.arange(points) + 0.5) / points
        a, b = np.asarray(s.a, float), np.asarray(s.b, float)
        return a[None, :] + u[:, None] * (b - a)[None, :], 1.0 / points
    raise TypeError(f"no lattice for {type(s).__name__}")


def planar_lattice_error(marginal: Marginal2D, points: int) -> float:
    """Rough bound on the lattice error of the mass of a two-line region."""
    _, h = _lattice(marginal, points)
    return 4.0 * h if isinstance(marginal.shape, UniformRect) else 2.0 * h


def _oracle_planar(kind, source, target, cls, resolution, points=PLANAR_POINTS):
    th_step = 2 * math.pi * resolution
    lo, hi = cls.box
    b_step = (hi - lo) * resolution
    thetas = th_step * np.arange(int(math.ceil(2 * math.pi / th_step - 1e-9)))
    bs = lo + b_step * np.arange(int(math.floor((hi - lo) / b_step + 1e-9)) + 1)
    TH, B = np.meshgrid(thetas, bs, indexing="ij")
    TH, B = TH.ravel(), B.ravel()
    Xp, _ = _lattice(source.marginal, points)
    Xq, _ = _lattice(target.marginal, points)

    def side(X):
        return (np.cos(TH)[:, None] * X[None, :, 0] + np.sin(TH)[:, None] * X[None, :, 1] > B[:, None]).astype(np.float32)

    Sp, Sq = side(Xp), side(Xq)
    if kind.localized:
        lab = source.labeling
        yp = (math.cos(lab.theta) * Xp[:, 0] + math.sin(lab.theta) * Xp[:, 1] > lab.b).astype(np.float32)
        err = np.mean(np.abs(Sp - yp[None, :]), axis=1)
        keep = err <= kind.r
        Sp, Sq = Sp[keep], Sq[keep]
        if Sp.shape[0] == 0:
            raise ValueError("empty localized space")
    np_, nq = Sp.shape[1], Sq.shape[1]
    ap, aq = Sp.sum(axis=1), Sq.sum(axis=1)
    if not kind.pairwise:
        a = kind.anchor
        ya = (math.cos(a.theta) * Xp[:, 0] + math.sin(a.theta) * Xp[:, 1] > a.b).astype(np.float32)
        yq = (math.cos(a.theta) * Xq[:, 0] + math.sin(a.theta) * Xq[:, 1] > a.b).astype(np.float32)
        p = np.mean(np.abs(Sp - ya[None, :]), axis=1)
        q = np.mean(np.abs(Sq - yq[None, :]), axis=1)
        return float(np.max(q - p))
    best = -math.inf
    gamma = kind.gamma or 1.0
    for s in range(0, Sp.shape[0], 256):
        ip = Sp[s : s + 256] @ Sp.T
        iq = Sq[s : s + 256] @ Sq.T
        p = (ap[s : s + 256, None] + ap[None, :] - 2 * ip) / np_
        q = (aq[s : s + 256, None] + aq[None, :] - 2 * iq) / nq
        if kind.form == "abs":
            v = np.abs(q - p)
        elif kind.form == "boosted":
            v = q - np.clip(p, 0, None) ** gamma
        else:
            v = q - p
        best = max(best, float(v.max()))
    return best
