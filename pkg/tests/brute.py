"""Exhaustive dichotomy enumeration for small 1-D samples.

Independent of the package's candidate construction: every 0/1 vector over
the pooled points is tried and kept when some threshold realizes it.
"""

import itertools

import numpy as np


def threshold_realizable(x, labels):
    """True iff ``labels`` is ``1[x < t]`` or ``1[x >= t]`` for some ``t``."""
    order = np.argsort(x, kind="stable")
    xs, ys = np.asarray(x)[order], np.asarray(labels)[order]
    # equal points must agree
    for k in range(len(xs) - 1):
        if xs[k] == xs[k + 1] and ys[k] != ys[k + 1]:
            return False
    changes = int(np.sum(ys[1:] != ys[:-1]))
    return changes <= 1


def dichotomies(x):
    x = np.asarray(x, dtype=float)
    out = []
    for bits in itertools.product((0, 1), repeat=len(x)):
        lab = np.array(bits, dtype=np.int8)
        if threshold_realizable(x, lab):
            out.append(lab)
    return out


def brute_sup(kind, xs, ys, xt, r=None, gamma=1.0, anchor_labels=None):
    """Supremum over realizable dichotomies of the pooled sample ``xs ++ xt``."""
    n, m = len(xs), len(xt)
    pooled = np.concatenate([xs, xt])
    labs = dichotomies(pooled)
    if r is not None:
        labs_f = [h for h in labs if np.mean(h[:n] != ys) <= r + 1e-12]
    else:
        labs_f = labs
    if not labs_f:
        return None
    best = -np.inf
    if anchor_labels is not None:
        pairs = ((anchor_labels, g) for g in labs_f)
    else:
        pairs = itertools.product(labs_f, labs_f)
    for h, g in pairs:
        d = h != g
        p = float(np.mean(d[:n]))
        q = float(np.mean(d[n:]))
        if kind == "abs":
            v = abs(q - p)
        elif kind == "boosted":
            v = q - p**gamma
        else:
            v = q - p
        best = max(best, v)
    return best
