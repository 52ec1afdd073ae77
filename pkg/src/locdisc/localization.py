"""Sample-based localization: the capacity term, the inflated and deflated
radii, membership in the empirical localized sets, and a Monte Carlo check of
how often the sandwich ``H~(r-) <= H_r <= H~(r+)`` holds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import spaces
from .domains import Dataset, Domain, empirical_error, sample
from .hypotheses import (
    Hypothesis,
    HypothesisClass,
    grid_arrays,
    threshold_candidate_values,
)
from .rng import derive_seed

SLACK = 1e-12

# "-ln(delta)/16" grouped as -ln(delta/16) (default) or as -(ln delta)/16
READINGS = ("log-of-ratio", "ratio-of-log")


class RadiusTooSmall(ValueError):
    """The deflated radius needs ``r`` above the capacity term."""


def epsilon_term(n: int, d: int, delta: float, reading: str = "log-of-ratio") -> float:
    """Capacity term ``4 (d (1 + 4 ln(n/d)) + ln(16/delta)) / n``.

    ``ln(n/d)`` is clamped at 0.  With ``reading="ratio-of-log"`` the
    confidence part is ``-ln(delta)/16`` instead of ``ln(16/delta)``.
    """
    if d < 1 or n < d:
        raise ValueError(f"need n >= d >= 1, got n={n}, d={d}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if reading == "log-of-ratio":
        conf = math.log(16.0 / delta)
    elif reading == "ratio-of-log":
        conf = -math.log(delta) / 16.0
    else:
        raise ValueError(f"unknown reading {reading!r}; choose from {READINGS}")
    return 4.0 * (d * (1.0 + 4.0 * max(0.0, math.log(n / d))) + conf) / n


def c_plus(n: int, d: int, delta: float, r: float, reading: str = "log-of-ratio") -> float:
    e = epsilon_term(n, d, delta, reading)
    return 0.5 * e * (1.0 + math.sqrt(1.0 + 4.0 * r / e))


def c_minus(n: int, d: int, delta: float, r: float, reading: str = "log-of-ratio") -> float:
    e = epsilon_term(n, d, delta, reading)
    if not r > e:
        raise RadiusTooSmall(f"radius not above capacity term: r={r} <= {e:.6g}")
    return math.sqrt(e * r)


@dataclass(frozen=True)
class LocalizationConstants:
    n: int
    d: int
    delta: float
    r: float
    gamma: Optional[float] = None
    reading: str = "log-of-ratio"
    epsilon: float = field(init=False)
    c_plus: float = field(init=False)
    c_minus: Optional[float] = field(init=False)  # None unless r > epsilon

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("r must be nonnegative")
        if self.gamma is not None and self.gamma < 1:
            raise ValueError("gamma must be >= 1")
        e = epsilon_term(self.n, self.d, self.delta, self.reading)
        object.__setattr__(self, "epsilon", e)
        object.__setattr__(self, "c_plus", c_plus(self.n, self.d, self.delta, self.r, self.reading))
        cm = c_minus(self.n, self.d, self.delta, self.r, self.reading) if self.r > e else None
        object.__setattr__(self, "c_minus", cm)

    @property
    def r_plus(self) -> float:
        return self.r + self.c_plus

    @property
    def r_minus(self) -> float:
        if self.c_minus is None:
            raise RadiusTooSmall(f"radius not above capacity term: r={self.r} <= {self.epsilon:.6g}")
        return self.r - self.c_minus

    def with_n(self, n: int) -> "LocalizationConstants":
        return LocalizationConstants(n, self.d, self.delta, self.r, self.gamma, self.reading)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "delta": self.delta,
            "r": self.r,
            "gamma": self.gamma,
            "reading": self.reading,
            "epsilon": self.epsilon,
            "c_plus": self.c_plus,
            "c_minus": self.c_minus,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LocalizationConstants":
        c = cls(int(d["n"]), int(d["d"]), float(d["delta"]), float(d["r"]), d.get("gamma"), d.get("reading", "log-of-ratio"))
        for key in ("epsilon", "c_plus", "c_minus"):
            if key in d and d[key] != getattr(c, key):
                raise ValueError(f"stored {key}={d[key]} does not match recomputed {getattr(c, key)}")
        return c


def _check_size(data: Dataset, c: LocalizationConstants):
    if len(data) != c.n:
        raise ValueError(f"dataset has {len(data)} points but constants are for n={c.n}")


def member_plus(h: Hypothesis, data: Dataset, c: LocalizationConstants) -> bool:
    _check_size(data, c)
    return empirical_error(h, data) <= c.r_plus + SLACK


def member_minus(h: Hypothesis, data: Dataset, c: LocalizationConstants) -> bool:
    _check_size(data, c)
    return empirical_error(h, data) <= c.r_minus + SLACK


def _population_errors(source: Domain, cls: HypothesisClass, params):
    if cls.kind == "threshold-1d":
        t, above = params
        return spaces.threshold_errors_population(source.marginal, source.labeling, t, above)
    th, b = params
    return spaces.linear_errors_population(source.marginal, source.labeling, th, b)


def _error_counts(data: Dataset, cls: HypothesisClass, params):
    if cls.kind == "threshold-1d":
        return spaces.threshold_error_counts(data, *params)
    return spaces.linear_error_counts(data, *params)


@dataclass
class ContainmentResult:
    freq_lower: float
    freq_upper: float
    trials: int
    constants: LocalizationConstants
    candidates_note: str

    def to_dict(self) -> dict:
        return {
            "freq_lower": self.freq_lower,
            "freq_upper": self.freq_upper,
            "trials": self.trials,
            "constants": self.constants.to_dict(),
            "candidates_note": self.candidates_note,
        }


def containment_frequency(
    source: Domain,
    cls: HypothesisClass,
    d: int,
    delta: float,
    r: float,
    n: int,
    trials: int,
    seed: int,
    resolution: float = 1e-3,
    reading: str = "log-of-ratio",
) -> ContainmentResult:
    """Fraction of trials where each inclusion holds on the checked candidates.

    Each trial draws ``n`` labeled source points from its own stream.  The
    candidates are the fixed population grid plus (for thresholds) the
    trial's sample-induced thresholds; the inclusions are universally
    quantified, so this is a check on a dense finite family only.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    c = LocalizationConstants(n, d, delta, r, reading=reading)
    lo_cut = c.r_minus  # raises unless r > epsilon
    hi_cut = c.r_plus
    if cls.kind == "threshold-1d":
        span = cls.box[1] - cls.box[0]
        g_t, g_above = grid_arrays(cls, resolution * span)
        note = "population grid plus sample-induced thresholds"
    else:
        g_t, g_above = grid_arrays(cls, (2 * math.pi * resolution, (cls.box[1] - cls.box[0]) * resolution))
        note = "population grid only"
    grid_pop = _population_errors(source, cls, (g_t, g_above))

    ok_lower = ok_upper = 0
    for trial in range(trials):
        data = sample(source, n, derive_seed(seed, trial), labeled=True)
        params = (g_t, g_above)
        pop = grid_pop
        if cls.kind == "threshold-1d":
            vals = threshold_candidate_values(data)
            ct = np.concatenate([vals, vals])
            ca = np.repeat([False, True], vals.size)
            params = (np.concatenate([g_t, ct]), np.concatenate([g_above, ca]))
            pop = np.concatenate([grid_pop, _population_errors(source, cls, (ct, ca))])
        emp = _error_counts(data, cls, params) / n
        in_minus = emp <= lo_cut + SLACK
        in_r = pop <= r
        in_plus = emp <= hi_cut + SLACK
        ok_lower += bool(np.all(in_r[in_minus]))
        ok_upper += bool(np.all(in_plus[in_r]))
    return ContainmentResult(ok_lower / trials, ok_upper / trials, trials, c, note)
