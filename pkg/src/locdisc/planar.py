"""Vectorized masses of half-planes and half-plane pairs under the two planar
marginals (uniform rectangle, uniform segment).

A half-plane is ``{x : cos(theta) x1 + sin(theta) x2 > b}``; all functions take
broadcastable arrays of ``theta`` and ``b`` (``b`` may be infinite).
"""

from __future__ import annotations

import numpy as np


def _sum_of_uniforms_sf(z, p, q):
    """P(pU + qV > z) for independent U, V ~ U[0, 1] and p, q >= 0.

    Piecewise-quadratic closed form; every piece is evaluated without
    subtracting nearly equal quantities, so thin slivers keep full absolute
    precision.
    """
    big = np.maximum(p, q)
    small = np.minimum(p, q)
    total = big + small
    with np.errstate(divide="ignore", invalid="ignore"):
        lower_corner = z * z / (2.0 * big * small)
        middle = (z - 0.5 * small) / big
        upper_corner = (total - z) ** 2 / (2.0 * big * small)
    cdf = np.where(
        z <= 0.0,
        0.0,
        np.where(
            z >= total,
            1.0,
            np.where(
                z <= small,
                lower_corner,
                np.where(z <= big, middle, 1.0 - upper_corner),
            ),
        ),
    )
    # degenerate small side: V contributes nothing
    flat = np.clip(np.where(big > 0, z / np.where(big > 0, big, 1.0), (z < 0) * 1.0), 0.0, 1.0)
    cdf = np.where(small == 0.0, np.where(big == 0.0, (z >= 0) * 1.0, flat), cdf)
    return 1.0 - cdf


def rect_halfplane_mass(theta, b, xr, yr):
    """Uniform-rectangle mass of the half-plane(s)."""
    theta = np.asarray(theta, dtype=float)
    b = np.asarray(b, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    wx, wy = xr[1] - xr[0], yr[1] - yr[0]
    p, q = np.abs(c) * wx, np.abs(s) * wy
    low = c * xr[0] + s * yr[0] + np.minimum(c, 0.0) * wx + np.minimum(s, 0.0) * wy
    with np.errstate(invalid="ignore"):
        z = b - low
    out = _sum_of_uniforms_sf(z, p, q)
    out = np.where(np.isposinf(b), 0.0, np.where(np.isneginf(b), 1.0, out))
    return out


def _bounds_at(y, c, s, b, x0, x1):
    """x-interval of ``{c x + s y > b}`` within ``[x0, x1]`` at height ``y``."""
    with np.errstate(divide="ignore", invalid="ignore"):
        cut = (b - s * y) / c
    lo = np.where(c > 0, np.clip(cut, x0, x1), x0)
    hi = np.where(c < 0, np.clip(cut, x0, x1), x1)
    flat = c == 0
    on = s * y > b
    lo = np.where(flat, np.where(on, x0, x1), lo)
    hi = np.where(flat, x1, hi)
    lo = np.where(np.isneginf(b), x0, np.where(np.isposinf(b), x1, lo))
    hi = np.where(np.isneginf(b), x1, hi)
    return lo, hi


def rect_pair_intersection_mass(th1, b1, th2, b2, xr, yr):
    """Uniform-rectangle mass of the intersection of two half-planes.

    The width of the intersection along a horizontal slice is piecewise linear
    in the slice height, with kinks only where a boundary line meets a vertical
    side or where the two lines cross; the midpoint rule on those pieces is
    exact.
    """
    th1, b1, th2, b2 = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (th1, b1, th2, b2)))
    x0, x1 = xr
    y0, y1 = yr
    c1, s1, c2, s2 = np.cos(th1), np.sin(th1), np.cos(th2), np.sin(th2)
    with np.errstate(divide="ignore", invalid="ignore"):
        cand = [
            (b1 - c1 * x0) / s1,
            (b1 - c1 * x1) / s1,
            (b2 - c2 * x0) / s2,
            (b2 - c2 * x1) / s2,
            (c1 * b2 - c2 * b1) / (c1 * s2 - c2 * s1),
        ]
    ys = [np.full(th1.shape, y0), np.full(th1.shape, y1)]
    for v in cand:
        v = np.where(np.isfinite(v), v, y0)
        ys.append(np.clip(v, y0, y1))
    ys = np.sort(np.stack(ys, axis=-1), axis=-1)
    mids = 0.5 * (ys[..., 1:] + ys[..., :-1])
    dy = ys[..., 1:] - ys[..., :-1]
    ex = (...,) + (None,)
    lo1, hi1 = _bounds_at(mids, c1[ex], s1[ex], b1[ex], x0, x1)
    lo2, hi2 = _bounds_at(mids, c2[ex], s2[ex], b2[ex], x0, x1)
    width = np.maximum(0.0, np.minimum(hi1, hi2) - np.maximum(lo1, lo2))
    area = np.sum(width * dy, axis=-1)
    return area / ((x1 - x0) * (y1 - y0))


def _segment_interval(theta, b, a, d):
    """Parameter interval ``[lo, hi]`` of ``{u in [0,1] : a + u d in half-plane}``."""
    c, s = np.cos(theta), np.sin(theta)
    alpha = c * a[0] + s * a[1]
    beta = c * d[0] + s * d[1]
    with np.errstate(divide="ignore", invalid="ignore"):
        cut = (b - alpha) / beta
    lo = np.where(beta > 0, np.clip(cut, 0.0, 1.0), 0.0)
    hi = np.where(beta < 0, np.clip(cut, 0.0, 1.0), 1.0)
    flat = beta == 0
    on = alpha > b
    lo = np.where(flat, np.where(on, 0.0, 1.0), lo)
    hi = np.where(flat, 1.0, hi)
    lo = np.where(np.isneginf(b), 0.0, np.where(np.isposinf(b), 1.0, lo))
    hi = np.where(np.isneginf(b), 1.0, hi)
    return lo, hi


def segment_halfplane_mass(theta, b, a, e):
    a = np.asarray(a, dtype=float)
    d = np.asarray(e, dtype=float) - a
    lo, hi = _segment_interval(np.asarray(theta, float), np.asarray(b, float), a, d)
    return np.maximum(0.0, hi - lo)


def segment_pair_intersection_mass(th1, b1, th2, b2, a, e):
    a = np.asarray(a, dtype=float)
    d = np.asarray(e, dtype=float) - a
    lo1, hi1 = _segment_interval(np.asarray(th1, float), np.asarray(b1, float), a, d)
    lo2, hi2 = _segment_interval(np.asarray(th2, float), np.asarray(b2, float), a, d)
    return np.maximum(0.0, np.minimum(hi1, hi2) - np.maximum(lo1, lo2))
