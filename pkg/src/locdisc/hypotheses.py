"""Threshold and planar linear classifiers, their disagreement regions, and
finite hypothesis sets (parameter grids and sample-induced candidates).

Conventions
-----------
``Threshold(t)`` outputs 1 on ``x < t`` and 0 otherwise; its flip
``Threshold(t, above=True)`` is the exact complement ``1 - h_t`` and outputs 1
on ``x >= t``.  ``t`` may be ``-inf`` or ``+inf`` (constant classifiers).

``Linear2D(theta, b)`` outputs 1 iff ``cos(theta) x1 + sin(theta) x2 > b``.
Points on the line get 0.  Orientation is folded into ``theta``: the flip of
``(theta, b)`` is ``(theta + pi, -b)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence, Union

import numpy as np

TWO_PI = 2.0 * math.pi

# relative size of the offset used to push a line off the two sample points
# that define it
ETA_REL = 1e-9


@dataclass(frozen=True)
class Threshold:
    t: float
    above: bool = False

    dim = 1

    def __post_init__(self):
        if math.isnan(self.t):
            raise ValueError("threshold must not be NaN")
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "above", bool(self.above))

    @property
    def orientation(self) -> str:
        return "above" if self.above else "below"

    def flip(self) -> "Threshold":
        return Threshold(self.t, not self.above)

    def params(self) -> tuple:
        return (self.t, int(self.above))

    def __call__(self, x):
        return predict(self, x)


@dataclass(frozen=True)
class Linear2D:
    theta: float
    b: float

    dim = 2

    def __post_init__(self):
        if math.isnan(self.theta) or math.isnan(self.b):
            raise ValueError("linear classifier parameters must not be NaN")
        object.__setattr__(self, "theta", canonical_angle(self.theta))
        object.__setattr__(self, "b", float(self.b))

    @property
    def normal(self) -> tuple[float, float]:
        return math.cos(self.theta), math.sin(self.theta)

    def flip(self) -> "Linear2D":
        return Linear2D(self.theta + math.pi, -self.b)

    def params(self) -> tuple:
        return (self.theta, self.b)

    def __call__(self, x):
        return predict(self, x)


Hypothesis = Union[Threshold, Linear2D]


def canonical_angle(theta: float) -> float:
    theta = math.fmod(float(theta), TWO_PI)
    if theta < 0.0:
        theta += TWO_PI
    if theta >= TWO_PI:  # fmod of values just below a multiple of 2*pi
        theta = 0.0
    return theta


def predict(h: Hypothesis, x) -> np.ndarray | int:
    """Labels in {0, 1}.  Accepts a scalar / (n,) array in 1-D or (2,) / (n, 2) in 2-D."""
    if isinstance(h, Threshold):
        arr = np.asarray(x, dtype=float)
        if arr.ndim > 1:
            raise ValueError(f"threshold classifier expects 1-D inputs, got shape {arr.shape}")
        below = arr < h.t
        out = (~below if h.above else below).astype(np.int8)
        return int(out) if out.ndim == 0 else out
    if isinstance(h, Linear2D):
        arr = np.asarray(x, dtype=float)
        if arr.shape[-1:] != (2,):
            raise ValueError(f"linear classifier expects points of shape (..., 2), got {arr.shape}")
        c, s = h.normal
        out = (c * arr[..., 0] + s * arr[..., 1] > h.b).astype(np.int8)
        return int(out) if out.ndim == 0 else out
    raise TypeError(f"unknown hypothesis type {type(h).__name__}")


# ---------------------------------------------------------------------------
# Regions


@dataclass(frozen=True)
class Region1D:
    """Finite union of disjoint half-open intervals ``[a, b)``, sorted."""

    intervals: tuple[tuple[float, float], ...] = ()

    dimension = 1

    def __post_init__(self):
        merged: list[list[float]] = []
        for a, b in sorted((float(a), float(b)) for a, b in self.intervals):
            if not a < b:
                continue
            if merged and a <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        object.__setattr__(self, "intervals", tuple((a, b) for a, b in merged))

    @classmethod
    def everything(cls) -> "Region1D":
        return cls(((-math.inf, math.inf),))

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=bool)
        for a, b in self.intervals:
            out |= (x >= a) & (x < b)
        return out

    def complement(self) -> "Region1D":
        edges = [-math.inf]
        for a, b in self.intervals:
            edges.extend([a, b])
        edges.append(math.inf)
        return Region1D(tuple(zip(edges[::2], edges[1::2])))

    @property
    def is_empty(self) -> bool:
        return not self.intervals


@dataclass(frozen=True)
class HalfPlane:
    """``{x : cos(theta) x1 + sin(theta) x2 > b}``."""

    theta: float
    b: float


@dataclass(frozen=True)
class Region2D:
    """Boolean combination of at most two open half-planes.

    ``op`` is ``"single"`` (one plane), ``"xor"`` (symmetric difference, the
    wedge pair produced by two linear classifiers) or ``"and"``.  ``negate``
    complements the result.  ``planes == ()`` with ``op == "single"`` is the
    empty set.
    """

    planes: tuple[HalfPlane, ...] = ()
    op: str = "single"
    negate: bool = False

    dimension = 2

    def __post_init__(self):
        if self.op not in ("single", "xor", "and"):
            raise ValueError(f"unknown region op {self.op!r}")
        if self.op == "single" and len(self.planes) > 1:
            raise ValueError("single-plane region takes at most one plane")
        if self.op in ("xor", "and") and len(self.planes) != 2:
            raise ValueError(f"{self.op!r} region takes exactly two planes")

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        ins = [
            math.cos(p.theta) * x[..., 0] + math.sin(p.theta) * x[..., 1] > p.b
            for p in self.planes
        ]
        if not ins:
            out = np.zeros(x.shape[:-1], dtype=bool)
        elif self.op == "single":
            out = ins[0]
        elif self.op == "xor":
            out = ins[0] ^ ins[1]
        else:
            out = ins[0] & ins[1]
        return ~out if self.negate else out

    def complement(self) -> "Region2D":
        return Region2D(self.planes, self.op, not self.negate)

    @property
    def is_empty(self) -> bool:
        return not self.planes and not self.negate


Region = Union[Region1D, Region2D]


def disagreement_region(h: Hypothesis, g: Hypothesis) -> Region:
    """Set of points on which ``h`` and ``g`` predict differently."""
    if isinstance(h, Threshold) and isinstance(g, Threshold):
        lo, hi = sorted((h.t, g.t))
        core = Region1D(((lo, hi),))
        return core if h.above == g.above else core.complement()
    if isinstance(h, Linear2D) and isinstance(g, Linear2D):
        if h == g:
            return Region2D()
        return Region2D((HalfPlane(h.theta, h.b), HalfPlane(g.theta, g.b)), "xor")
    raise ValueError(
        f"hypotheses live in different instance spaces: {type(h).__name__} vs {type(g).__name__}"
    )


# ---------------------------------------------------------------------------
# Hypothesis classes and finite hypothesis sets


@dataclass(frozen=True)
class HypothesisClass:
    """Descriptor of an implemented class.

    ``box`` is the search range for ``t`` (thresholds) or for the offset ``b``
    (linear classifiers; ``theta`` always ranges over ``[0, 2 pi)``).
    """

    kind: str
    box: tuple[float, float]
    vc_dim: int = field(default=0)

    def __post_init__(self):
        if self.kind not in ("threshold-1d", "linear-2d"):
            raise ValueError(f"unknown hypothesis class {self.kind!r}")
        lo, hi = (float(v) for v in self.box)
        if not lo < hi:
            raise ValueError(f"empty parameter box {self.box}")
        object.__setattr__(self, "box", (lo, hi))
        if not self.vc_dim:
            object.__setattr__(self, "vc_dim", 2 if self.kind == "threshold-1d" else 3)

    @classmethod
    def thresholds(cls, lo: float, hi: float) -> "HypothesisClass":
        return cls("threshold-1d", (lo, hi))

    @classmethod
    def linear(cls, b_lo: float, b_hi: float) -> "HypothesisClass":
        return cls("linear-2d", (b_lo, b_hi))

    @property
    def dim(self) -> int:
        return 1 if self.kind == "threshold-1d" else 2

    @property
    def bounded(self) -> bool:
        return all(math.isfinite(v) for v in self.box)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "vc_dim": self.vc_dim, "box": list(self.box)}

    @classmethod
    def from_dict(cls, d: dict) -> "HypothesisClass":
        return cls(d["kind"], tuple(d["box"]), d.get("vc_dim", 0))


def _axis(lo: float, hi: float, step: float) -> np.ndarray:
    if step <= 0:
        raise ValueError("resolution must be positive")
    n = (hi - lo) / step
    k = int(round(n))
    if abs(n - k) <= 1e-9 * max(1.0, n):
        return np.linspace(lo, hi, k + 1)
    pts = lo + step * np.arange(int(math.floor(n)) + 1)
    return np.append(pts, hi)


def grid_arrays(cls: HypothesisClass, resolution) -> tuple[np.ndarray, np.ndarray]:
    """Grid parameters as arrays, in the order :func:`parameter_grid` yields them.

    Thresholds: ``(t, above)``; linear: ``(theta, b)``.  For linear classes
    ``resolution`` is either one step used for both axes or a pair
    ``(theta_step, b_step)``.
    """
    if not cls.bounded:
        raise ValueError("parameter grid needs a finite parameter box")
    lo, hi = cls.box
    if cls.kind == "threshold-1d":
        t = _axis(lo, hi, float(resolution))
        return np.concatenate([t, t]), np.repeat([False, True], t.size)
    if np.ndim(resolution) == 0:
        th_step = b_step = float(resolution)
    else:
        th_step, b_step = (float(v) for v in resolution)
    if th_step <= 0 or b_step <= 0:
        raise ValueError("resolution must be positive")
    thetas = th_step * np.arange(int(math.ceil(TWO_PI / th_step - 1e-9)))
    bs = _axis(lo, hi, b_step)
    th, bb = np.meshgrid(thetas, bs, indexing="ij")
    return th.ravel(), bb.ravel()


def parameter_grid(cls: HypothesisClass, resolution) -> Iterator[Hypothesis]:
    """Uniform grid over the class's parameter box, deterministic order."""
    a, b = grid_arrays(cls, resolution)
    if cls.kind == "threshold-1d":
        for t, above in zip(a.tolist(), b.tolist()):
            yield Threshold(t, above)
    else:
        for th, off in zip(a.tolist(), b.tolist()):
            yield Linear2D(th, off)


def _pooled_points(data: Sequence, dim: int) -> np.ndarray:
    pts = []
    for d in data:
        p = np.asarray(getattr(d, "points", d), dtype=float)
        if dim == 1:
            p = p.reshape(-1)
        else:
            p = p.reshape(-1, 2)
        pts.append(p)
    if not pts or sum(len(p) for p in pts) == 0:
        raise ValueError("candidate construction needs at least one data point")
    return np.concatenate(pts)


def threshold_candidate_values(*data) -> np.ndarray:
    """Sorted thresholds ``-inf``, midpoints of consecutive distinct points, ``+inf``."""
    x = np.unique(_pooled_points(data, 1))
    mids = 0.5 * (x[:-1] + x[1:])
    return np.concatenate([[-math.inf], mids, [math.inf]])


def linear_candidate_arrays(*data) -> tuple[np.ndarray, np.ndarray]:
    """``(theta, b)`` arrays of the linear candidates induced by a sample.

    For every pair of distinct points the line through them is perturbed four
    ways (shifted to either side, rotated about the midpoint either way), each
    in both orientations; so the two points can receive any of their four joint
    labels while every other point (in general position) keeps the side of the
    line through the pair.  Four constant classifiers complete the set.
    """
    pts = _pooled_points(data, 2)
    pts = np.unique(pts, axis=0)
    n = len(pts)
    span = pts.max(axis=0) - pts.min(axis=0) if n else np.zeros(2)
    eta = ETA_REL * max(float(np.hypot(*span)), 1.0)
    thetas = [0.0, 0.0, 0.5 * math.pi, 0.5 * math.pi]
    offs = [-math.inf, math.inf, -math.inf, math.inf]
    if n >= 2:
        i, j = np.triu_indices(n, k=1)
        p, q = pts[i], pts[j]
        d = q - p
        length = np.hypot(d[:, 0], d[:, 1])
        base = np.arctan2(d[:, 1], d[:, 0]) + 0.5 * math.pi  # normal angle
        mid = 0.5 * (p + q)
        c, s = np.cos(base), np.sin(base)
        b0 = c * mid[:, 0] + s * mid[:, 1]
        alpha = 2.0 * eta / length
        rot_p, rot_m = base + alpha, base - alpha
        b_rp = np.cos(rot_p) * mid[:, 0] + np.sin(rot_p) * mid[:, 1]
        b_rm = np.cos(rot_m) * mid[:, 0] + np.sin(rot_m) * mid[:, 1]
        th_list = [base, base, rot_p, rot_m]
        b_list = [b0 - eta, b0 + eta, b_rp, b_rm]
        th_all = np.concatenate(th_list + [t + math.pi for t in th_list])
        b_all = np.concatenate(b_list + [-v for v in b_list])
        th_all = np.mod(th_all, TWO_PI)
        th_all[th_all >= TWO_PI] = 0.0
        thetas = np.concatenate([thetas, th_all])
        offs = np.concatenate([offs, b_all])
    return np.asarray(thetas, dtype=float), np.asarray(offs, dtype=float)


def canonical_candidates(cls: HypothesisClass, *data) -> list[Hypothesis]:
    """Finite hypothesis set realizing every labeling of the pooled sample that
    the class can realize, so that suprema of empirical objectives over it are
    exact."""
    if cls.kind == "threshold-1d":
        ts = threshold_candidate_values(*data).tolist()
        return [Threshold(t, False) for t in ts] + [Threshold(t, True) for t in ts]
    th, b = linear_candidate_arrays(*data)
    return [Linear2D(a, c) for a, c in zip(th.tolist(), b.tolist())]


# ---------------------------------------------------------------------------
# JSON


def _enc(v: float):
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _dec(v) -> float:
    return float(v)


def hypothesis_to_dict(h: Hypothesis) -> dict:
    if isinstance(h, Threshold):
        return {"kind": "threshold", "t": _enc(h.t), "orientation": h.orientation}
    return {"kind": "linear2d", "theta": h.theta, "b": _enc(h.b)}


def hypothesis_from_dict(d: dict) -> Hypothesis:
    kind = d.get("kind")
    if kind == "threshold":
        orient = d.get("orientation", "below")
        if orient not in ("below", "above"):
            raise ValueError(f"bad threshold orientation {orient!r}")
        return Threshold(_dec(d["t"]), orient == "above")
    if kind == "linear2d":
        return Linear2D(_dec(d["theta"]), _dec(d["b"]))
    raise ValueError(f"unknown hypothesis kind {kind!r}")
