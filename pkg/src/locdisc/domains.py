"""Analytic marginals, labeled domains, and seeded datasets.

Masses are exact up to rounding.  Gaussian interval masses are taken from
whichever tail of the component the interval sits in, so masses of order
1e-16 (the ideal joint error of well-separated Gaussian mixtures) keep their
relative accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from scipy.special import ndtr

from . import planar
from .hypotheses import (
    Hypothesis,
    Linear2D,
    Region,
    Region1D,
    Region2D,
    Threshold,
    disagreement_region,
    hypothesis_from_dict,
    hypothesis_to_dict,
    predict,
)
from .rng import stream

WEIGHT_TOL = 1e-12

# half-width of the search box around a Gaussian component, in std devs;
# the mass outside is below 1e-32
GAUSS_BOX_SIGMAS = 12.0


@dataclass(frozen=True)
class UniformInterval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo < self.hi):
            raise ValueError(f"uniform interval needs finite lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def density_max(self) -> float:
        return 1.0 / (self.hi - self.lo)

    def cdf(self, x):
        return np.clip((np.asarray(x, dtype=float) - self.lo) / (self.hi - self.lo), 0.0, 1.0)

    def sf(self, x):
        return np.clip((self.hi - np.asarray(x, dtype=float)) / (self.hi - self.lo), 0.0, 1.0)

    def upper_half(self, x):
        return np.zeros(np.shape(x), dtype=bool)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, size=n)

    def support(self) -> tuple[float, float]:
        return self.lo, self.hi

    def to_dict(self) -> dict:
        return {"type": "uniform", "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class Gaussian:
    mean: float
    stddev: float

    def __post_init__(self):
        if not (math.isfinite(self.mean) and self.stddev > 0 and math.isfinite(self.stddev)):
            raise ValueError(f"gaussian needs finite mean and stddev > 0, got {self}")

    @property
    def density_max(self) -> float:
        return 1.0 / (self.stddev * math.sqrt(2.0 * math.pi))

    def cdf(self, x):
        return ndtr((np.asarray(x, dtype=float) - self.mean) / self.stddev)

    def sf(self, x):
        return ndtr((self.mean - np.asarray(x, dtype=float)) / self.stddev)

    def upper_half(self, x):
        return np.asarray(x, dtype=float) >= self.mean

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.normal(self.mean, self.stddev, size=n)

    def support(self) -> tuple[float, float]:
        w = GAUSS_BOX_SIGMAS * self.stddev
        return self.mean - w, self.mean + w

    def to_dict(self) -> dict:
        return {"type": "gaussian", "mean": self.mean, "stddev": self.stddev}


Shape1D = Union[UniformInterval, Gaussian]


def _shape_from_dict(d: dict) -> Shape1D:
    if d["type"] == "uniform":
        return UniformInterval(float(d["lo"]), float(d["hi"]))
    if d["type"] == "gaussian":
        return Gaussian(float(d["mean"]), float(d["stddev"]))
    raise ValueError(f"unknown 1-D shape {d['type']!r}")


@dataclass(frozen=True)
class Marginal1D:
    components: tuple[tuple[float, Shape1D], ...]

    dim = 1

    def __post_init__(self):
        comps = tuple((float(w), s) for w, s in self.components)
        if not comps:
            raise ValueError("mixture needs at least one component")
        if any(w < 0 for w, _ in comps):
            raise ValueError("mixture weights must be nonnegative")
        if abs(sum(w for w, _ in comps) - 1.0) > WEIGHT_TOL:
            raise ValueError(f"mixture weights sum to {sum(w for w, _ in comps)!r}, not 1")
        object.__setattr__(self, "components", comps)

    @classmethod
    def uniform(cls, lo: float, hi: float) -> "Marginal1D":
        return cls(((1.0, UniformInterval(lo, hi)),))

    @classmethod
    def gaussian_mixture(cls, *parts: tuple[float, float, float]) -> "Marginal1D":
        """``parts`` are ``(weight, mean, stddev)`` triples."""
        return cls(tuple((w, Gaussian(m, s)) for w, m, s in parts))

    def cdf(self, x):
        """Mass of ``(-inf, x)``."""
        return sum(w * s.cdf(x) for w, s in self.components)

    def interval_mass(self, a, b):
        """Mass of ``[a, b)`` (zero where ``b <= a``), elementwise."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        total = np.zeros(np.broadcast(a, b).shape)
        for w, s in self.components:
            upper = s.upper_half(a)
            with np.errstate(invalid="ignore"):
                m = np.where(upper, s.sf(a) - s.sf(b), s.cdf(b) - s.cdf(a))
            total = total + w * np.maximum(m, 0.0)
        return total

    def outside_mass(self, a, b):
        """Mass of ``(-inf, a) u [b, inf)`` for ``a <= b``, elementwise."""
        return sum(w * (s.cdf(a) + s.sf(b)) for w, s in self.components)

    def density_max(self) -> float:
        """Upper bound on the density (sum of component maxima)."""
        return sum(w * s.density_max for w, s in self.components)

    def support_box(self) -> tuple[float, float]:
        lo = min(s.support()[0] for w, s in self.components if w > 0)
        hi = max(s.support()[1] for w, s in self.components if w > 0)
        return lo, hi

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        weights = np.array([w for w, _ in self.components])
        which = rng.choice(len(weights), size=n, p=weights / weights.sum())
        out = np.empty(n)
        for k, (_, s) in enumerate(self.components):
            idx = np.flatnonzero(which == k)
            out[idx] = s.sample(rng, idx.size)
        return out

    def to_dict(self) -> dict:
        return {
            "type": "mixture1d",
            "components": [{"weight": w, "shape": s.to_dict()} for w, s in self.components],
        }


@dataclass(frozen=True)
class UniformRect:
    x_range: tuple[float, float]
    y_range: tuple[float, float]

    def __post_init__(self):
        xr = tuple(float(v) for v in self.x_range)
        yr = tuple(float(v) for v in self.y_range)
        if not (xr[0] < xr[1] and yr[0] < yr[1]) or not all(map(math.isfinite, xr + yr)):
            raise ValueError("rectangle must have positive finite area")
        object.__setattr__(self, "x_range", xr)
        object.__setattr__(self, "y_range", yr)

    def to_dict(self) -> dict:
        return {"type": "rect", "x_range": list(self.x_range), "y_range": list(self.y_range)}


@dataclass(frozen=True)
class UniformSegment:
    a: tuple[float, float]
    b: tuple[float, float]

    def __post_init__(self):
        a = tuple(float(v) for v in self.a)
        b = tuple(float(v) for v in self.b)
        if a == b or not all(map(math.isfinite, a + b)):
            raise ValueError("segment must have positive finite length")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def to_dict(self) -> dict:
        return {"type": "segment", "a": list(self.a), "b": list(self.b)}


@dataclass(frozen=True)
class Marginal2D:
    shape: Union[UniformRect, UniformSegment]

    dim = 2

    @classmethod
    def rect(cls, x_range, y_range) -> "Marginal2D":
        return cls(UniformRect(tuple(x_range), tuple(y_range)))

    @classmethod
    def segment(cls, a, b) -> "Marginal2D":
        return cls(UniformSegment(tuple(a), tuple(b)))

    def halfplane_mass(self, theta, b):
        sh = self.shape
        if isinstance(sh, UniformRect):
            return planar.rect_halfplane_mass(theta, b, sh.x_range, sh.y_range)
        return planar.segment_halfplane_mass(theta, b, sh.a, sh.b)

    def intersection_mass(self, th1, b1, th2, b2):
        sh = self.shape
        if isinstance(sh, UniformRect):
            return planar.rect_pair_intersection_mass(th1, b1, th2, b2, sh.x_range, sh.y_range)
        return planar.segment_pair_intersection_mass(th1, b1, th2, b2, sh.a, sh.b)

    def xor_mass(self, th1, b1, th2, b2):
        m1 = self.halfplane_mass(th1, b1)
        m2 = self.halfplane_mass(th2, b2)
        m12 = self.intersection_mass(th1, b1, th2, b2)
        return np.clip(m1 + m2 - 2.0 * m12, 0.0, 1.0)

    def bounding_box(self) -> tuple[tuple[float, float], tuple[float, float]]:
        sh = self.shape
        if isinstance(sh, UniformRect):
            return sh.x_range, sh.y_range
        xs = sorted((sh.a[0], sh.b[0]))
        ys = sorted((sh.a[1], sh.b[1]))
        return (xs[0], xs[1]), (ys[0], ys[1])

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        sh = self.shape
        if isinstance(sh, UniformRect):
            x = rng.uniform(*sh.x_range, size=n)
            y = rng.uniform(*sh.y_range, size=n)
            return np.column_stack([x, y])
        u = rng.uniform(0.0, 1.0, size=n)
        a = np.asarray(sh.a)
        return a + u[:, None] * (np.asarray(sh.b) - a)

    def to_dict(self) -> dict:
        return {"type": "planar", "shape": self.shape.to_dict()}


Marginal = Union[Marginal1D, Marginal2D]


def marginal_from_dict(d: dict) -> Marginal:
    if d["type"] == "mixture1d":
        return Marginal1D(
            tuple((float(c["weight"]), _shape_from_dict(c["shape"])) for c in d["components"])
        )
    if d["type"] == "planar":
        sh = d["shape"]
        if sh["type"] == "rect":
            return Marginal2D.rect(sh["x_range"], sh["y_range"])
        if sh["type"] == "segment":
            return Marginal2D.segment(sh["a"], sh["b"])
        raise ValueError(f"unknown planar shape {sh['type']!r}")
    raise ValueError(f"unknown marginal type {d['type']!r}")


@dataclass(frozen=True)
class Domain:
    marginal: Marginal
    labeling: Hypothesis
    name: str = "domain"

    def __post_init__(self):
        if self.marginal.dim != self.labeling.dim:
            raise ValueError(
                f"labeling acts on {self.labeling.dim}-D inputs but the marginal is {self.marginal.dim}-D"
            )

    @property
    def dim(self) -> int:
        return self.marginal.dim

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "marginal": self.marginal.to_dict(),
            "labeling": hypothesis_to_dict(self.labeling),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Domain":
        return cls(
            marginal_from_dict(d["marginal"]),
            hypothesis_from_dict(d["labeling"]),
            d.get("name", "domain"),
        )


@dataclass(frozen=True, eq=False)
class Dataset:
    points: np.ndarray
    labels: np.ndarray | None
    seed: int
    source: str

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            lab = np.asarray(self.labels, dtype=np.int8)
            if lab.shape != (len(pts),):
                raise ValueError("labels must have one entry per point")
            lab.setflags(write=False)
            object.__setattr__(self, "labels", lab)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return 1 if self.points.ndim == 1 else 2

    @property
    def labeled(self) -> bool:
        return self.labels is not None

    def unlabeled(self) -> "Dataset":
        return Dataset(self.points, None, self.seed, self.source)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        same_labels = (self.labels is None and other.labels is None) or (
            self.labels is not None
            and other.labels is not None
            and np.array_equal(self.labels, other.labels)
        )
        return (
            self.seed == other.seed
            and self.source == other.source
            and np.array_equal(self.points, other.points)
            and same_labels
        )


# ---------------------------------------------------------------------------


def mass(marginal: Marginal, region: Region) -> float:
    """Probability that ``marginal`` assigns to ``region``."""
    if marginal.dim != region.dimension:
        raise ValueError(f"{region.dimension}-D region under a {marginal.dim}-D marginal")
    if isinstance(region, Region1D):
        return float(sum(float(marginal.interval_mass(a, b)) for a, b in region.intervals))
    p = region.planes
    if not p:
        core = 0.0
    elif region.op == "single":
        core = float(marginal.halfplane_mass(p[0].theta, p[0].b))
    elif region.op == "and":
        core = float(marginal.intersection_mass(p[0].theta, p[0].b, p[1].theta, p[1].b))
    else:
        core = float(marginal.xor_mass(p[0].theta, p[0].b, p[1].theta, p[1].b))
    return 1.0 - core if region.negate else core


def sample(domain: Domain, count: int, seed: int, labeled: bool = True, stream_id: int = 0) -> Dataset:
    """``count`` i.i.d. draws from the domain's marginal, deterministic per seed."""
    if count < 1:
        raise ValueError("sample size must be at least 1")
    rng = stream(seed, stream_id)
    pts = domain.marginal.sample(rng, int(count))
    labels = np.asarray(predict(domain.labeling, pts), dtype=np.int8) if labeled else None
    return Dataset(pts, labels, int(seed), domain.name)


def expected_error(h: Hypothesis, domain: Domain) -> float:
    """0-1 risk of ``h`` on ``domain``."""
    if h.dim != domain.dim:
        raise ValueError(f"{h.dim}-D hypothesis on a {domain.dim}-D domain")
    return mass(domain.marginal, disagreement_region(h, domain.labeling))


def empirical_error(h: Hypothesis, data: Dataset) -> float:
    if data.labels is None:
        raise ValueError("empirical error needs a labeled dataset")
    if h.dim != data.dim:
        raise ValueError(f"{h.dim}-D hypothesis on {data.dim}-D data")
    return float(np.mean(predict(h, data.points) != data.labels))


def domains_class_box(*domains: Domain, pad: float = 0.0) -> tuple[float, float]:
    """Threshold search box covering all 1-D supports (Gaussians to 12 sigma)."""
    lo = min(d.marginal.support_box()[0] for d in domains)
    hi = max(d.marginal.support_box()[1] for d in domains)
    return lo - pad, hi + pad
