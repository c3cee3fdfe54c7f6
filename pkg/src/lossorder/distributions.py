"""Loss-distribution representations.

Every admissible representation of a loss distribution lives here: finite
categorical/histogram data, piecewise-polynomial densities on compact
support, the smooth parametric families used by the comparison examples
(Gumbel, Gamma, Weibull, Gaussian), truncations, point masses, and discrete
lattice distributions with unbounded support.  All objects are immutable and
expose density/CDF/survival evaluation plus log-domain moments.

The Gumbel family follows the minimum-extreme-value parametrisation
f(x|a,b) = (1/b) exp((x-a)/b - exp((x-a)/b)), i.e. scipy's ``gumbel_l``.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import stats
from scipy.special import gammaln, logsumexp

from ._quad import expand_bound, log_power_integral, signed_log_moment
from .errors import (
    EmptyTruncation,
    InvalidOrder,
    MomentsUndefined,
    NoDensity,
)

__all__ = [
    "SupportInterval",
    "LossDistribution",
    "CategoricalDistribution",
    "HistogramDistribution",
    "PiecewisePolyDensity",
    "ParametricDistribution",
    "TruncatedDistribution",
    "PointMass",
    "LatticeDistribution",
    "Gumbel",
    "Gamma",
    "Weibull",
    "Gaussian",
    "truncate",
]


@dataclass(frozen=True)
class SupportInterval:
    """Closed support interval; ``upper`` may be +inf, ``lower`` may be -inf."""

    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise ValueError(f"empty support [{self.lower}, {self.upper}]")

    @property
    def is_compact(self):
        return np.isfinite(self.lower) and np.isfinite(self.upper)

    def intersect(self, other):
        return SupportInterval(
            max(self.lower, other.lower), min(self.upper, other.upper)
        )


def _check_order(k):
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise InvalidOrder(f"moment order must be a positive integer, got {k!r}")


class LossDistribution:
    """Common interface of all distribution representations."""

    #: whether pdf() is meaningful
    has_density = True
    #: whether the distribution is supported on a finite/countable set
    is_discrete = False

    @property
    def support(self) -> SupportInterval:
        raise NotImplementedError

    def pdf(self, x):
        raise NotImplementedError

    def logpdf(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self.pdf(x))

    def cdf(self, x):
        raise NotImplementedError

    def sf(self, x):
        """Survival function Pr(X > x)."""
        return 1.0 - self.cdf(x)

    def log_moment(self, k):
        """log E[X^k] for integer k >= 1."""
        _check_order(k)
        return self._log_moment(int(k))

    def _log_moment(self, k):
        raise NotImplementedError


def _discrete_log_moment(values, probs, k):
    values = np.asarray(values, dtype=float)
    probs = np.asarray(probs, dtype=float)
    mask = probs > 0
    if not mask.any():
        raise MomentsUndefined("distribution carries no mass")
    if (values[mask] <= 0).any():
        raise MomentsUndefined("log-domain moments need strictly positive outcomes")
    return float(logsumexp(np.log(probs[mask]) + k * np.log(values[mask])))


@dataclass(frozen=True)
class CategoricalDistribution(LossDistribution):
    """Finite categorical distribution over severity-ranked labels.

    ``labels`` and ``ranks`` are listed in strictly descending severity order
    (worst category first), matching the order in which the lexicographic
    comparison scans the probability vector.
    """

    labels: tuple
    ranks: tuple
    probs: tuple

    has_density = False
    is_discrete = True

    def __post_init__(self):
        labels = tuple(self.labels)
        ranks = tuple(float(r) for r in self.ranks)
        probs = tuple(float(p) for p in self.probs)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "ranks", ranks)
        object.__setattr__(self, "probs", probs)
        if not (len(labels) == len(ranks) == len(probs)):
            raise ValueError("labels, ranks and probs must have equal length")
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate category labels")
        if any(a <= b for a, b in zip(ranks, ranks[1:])):
            raise ValueError("ranks must be strictly descending")
        if min(probs) < 0:
            raise ValueError("negative probability")
        if abs(sum(probs) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {sum(probs)!r}, not 1")

    @property
    def support(self):
        return SupportInterval(self.ranks[-1], self.ranks[0])

    def pdf(self, x):
        raise NoDensity("categorical distribution has no density")

    def pmf(self, label):
        return self.probs[self.labels.index(label)]

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        ranks = np.asarray(self.ranks)
        probs = np.asarray(self.probs)
        return np.where(
            ranks[None, ...] <= np.atleast_1d(x)[..., None], probs, 0.0
        ).sum(axis=-1).reshape(x.shape)[()]

    def _log_moment(self, k):
        return _discrete_log_moment(self.ranks, self.probs, k)


@dataclass(frozen=True)
class HistogramDistribution(LossDistribution):
    """Empirical distribution given by per-bin counts on ascending loss values."""

    bin_values: tuple
    counts: tuple

    has_density = False
    is_discrete = True

    def __post_init__(self):
        values = tuple(float(v) for v in self.bin_values)
        counts = tuple(int(c) for c in self.counts)
        object.__setattr__(self, "bin_values", values)
        object.__setattr__(self, "counts", counts)
        if len(values) != len(counts):
            raise ValueError("bin_values and counts must have equal length")
        if any(a >= b for a, b in zip(values, values[1:])):
            raise ValueError("bin_values must be strictly ascending")
        if min(counts, default=0) < 0:
            raise ValueError("negative count")
        if sum(counts) <= 0:
            raise ValueError("histogram total must be positive")

    @property
    def total(self):
        return sum(self.counts)

    @cached_property
    def probs(self):
        counts = np.asarray(self.counts, dtype=float)
        return tuple(counts / counts.sum())

    @property
    def support(self):
        return SupportInterval(self.bin_values[0], self.bin_values[-1])

    def pdf(self, x):
        raise NoDensity("histogram distribution has no density")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        values = np.asarray(self.bin_values)
        probs = np.asarray(self.probs)
        idx = np.searchsorted(values, np.atleast_1d(x), side="right")
        cum = np.concatenate([[0.0], np.cumsum(probs)])
        return cum[idx].reshape(x.shape)[()]

    def _log_moment(self, k):
        return _discrete_log_moment(self.bin_values, self.probs, k)


class PiecewisePolyDensity(LossDistribution):
    """Continuous density that is polynomial on each segment of a partition.

    ``coefficients[i]`` holds ascending-power coefficients of the density on
    ``[breakpoints[i], breakpoints[i+1]]``, in the global x coordinate.
    """

    _GRID = 1024

    def __init__(self, breakpoints, coefficients):
        breakpoints = np.asarray(breakpoints, dtype=float)
        if breakpoints.ndim != 1 or len(breakpoints) < 2:
            raise ValueError("need at least two breakpoints")
        if np.any(np.diff(breakpoints) <= 0):
            raise ValueError("breakpoints must be strictly ascending")
        if len(coefficients) != len(breakpoints) - 1:
            raise ValueError("one coefficient list per segment required")
        self._breaks = breakpoints
        self._polys = [np.polynomial.Polynomial(c) for c in coefficients]
        self._antiderivs = [p.integ() for p in self._polys]
        cum = np.concatenate(
            [[0.0], np.cumsum([
                ad(b) - ad(a)
                for ad, a, b in zip(self._antiderivs, breakpoints[:-1], breakpoints[1:])
            ])]
        )
        self._cum = cum
        grid = np.linspace(breakpoints[0], breakpoints[-1], self._GRID)
        if np.min(self.pdf(grid)) < -1e-9:
            raise ValueError("density is negative on the support")
        if abs(cum[-1] - 1.0) > 1e-9:
            raise ValueError(f"density integrates to {cum[-1]!r}, not 1")

    @classmethod
    def uniform(cls, lo, hi):
        return cls([lo, hi], [[1.0 / (hi - lo)]])

    @property
    def breakpoints(self):
        return self._breaks.copy()

    @property
    def support(self):
        return SupportInterval(self._breaks[0], self._breaks[-1])

    def _segment_index(self, x):
        idx = np.searchsorted(self._breaks, x, side="right") - 1
        return np.clip(idx, 0, len(self._polys) - 1)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x)
        idx = self._segment_index(flat)
        out = np.array([self._polys[i](v) for i, v in zip(idx, flat)])
        inside = (flat >= self._breaks[0]) & (flat <= self._breaks[-1])
        out = np.where(inside, np.maximum(out, 0.0), 0.0)
        return out.reshape(x.shape)[()]

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        flat = np.clip(np.atleast_1d(x), self._breaks[0], self._breaks[-1])
        idx = self._segment_index(flat)
        out = np.array([
            self._cum[i] + self._antiderivs[i](v) - self._antiderivs[i](self._breaks[i])
            for i, v in zip(idx, flat)
        ])
        return np.clip(out, 0.0, 1.0).reshape(x.shape)[()]

    def derivative(self, x, k):
        """k-th one-sided derivative of the density at x (right endpoint uses
        the final segment's polynomial)."""
        idx = int(self._segment_index(np.asarray([x]))[0])
        return float(self._polys[idx].deriv(k)(x)) if k <= self._polys[idx].degree() else 0.0

    def _log_moment(self, k):
        lo, hi = self._breaks[0], self._breaks[-1]
        if lo <= 0:
            return signed_log_moment(self.logpdf, lo, hi, k)
        return float(log_power_integral(self.logpdf, self._breaks, [k])[0])


_FAMILIES = ("gumbel", "gamma", "weibull", "gaussian")


@dataclass(frozen=True)
class ParametricDistribution(LossDistribution):
    """Smooth parametric family: gumbel(a=location, b=scale),
    gamma(a=shape, b=scale), weibull(a=shape, b=scale), gaussian(mu, sigma)."""

    family: str
    a: float
    b: float

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.b <= 0:
            raise ValueError("scale parameter must be positive")
        if self.family in ("gamma", "weibull") and self.a <= 0:
            raise ValueError("shape parameter must be positive")

    @cached_property
    def _frozen(self):
        if self.family == "gumbel":
            return stats.gumbel_l(loc=self.a, scale=self.b)
        if self.family == "gamma":
            return stats.gamma(self.a, scale=self.b)
        if self.family == "weibull":
            return stats.weibull_min(self.a, scale=self.b)
        return stats.norm(self.a, self.b)

    @property
    def support(self):
        if self.family in ("gamma", "weibull"):
            return SupportInterval(0.0, np.inf)
        return SupportInterval(-np.inf, np.inf)

    def pdf(self, x):
        return self._frozen.pdf(x)

    def logpdf(self, x):
        # gumbel_l overflows in exp() far out in the right tail where the
        # log-density is -inf anyway
        with np.errstate(over="ignore"):
            return self._frozen.logpdf(x)

    def cdf(self, x):
        return self._frozen.cdf(x)

    def sf(self, x):
        return self._frozen.sf(x)

    def ppf(self, q):
        return self._frozen.ppf(q)

    def isf(self, q):
        return self._frozen.isf(q)

    def _log_moment(self, k):
        if self.family == "gamma":
            return k * np.log(self.b) + gammaln(self.a + k) - gammaln(self.a)
        if self.family == "weibull":
            return k * np.log(self.b) + float(gammaln(1.0 + k / self.a))
        lo, hi = _moment_window(self._frozen, k)
        return signed_log_moment(self.logpdf, lo, hi, k)


def _moment_window(frozen, k):
    """Integration window wide enough for the x^k-weighted density."""
    lo = float(frozen.ppf(1e-18))
    hi = float(frozen.isf(1e-18))
    step = max(1.0, 0.05 * (hi - lo))

    def logw(x):
        return k * np.log(max(abs(x), 1e-300)) + float(frozen.logpdf(x))

    hi = expand_bound(logw, hi, step, +1)
    if lo < 0:
        lo = expand_bound(logw, lo, step, -1)
    return lo, hi


def Gumbel(a, b):
    """Minimum-extreme-value Gumbel with location a and scale b."""
    return ParametricDistribution("gumbel", a, b)


def Gamma(a, b):
    return ParametricDistribution("gamma", a, b)


def Weibull(a, b):
    return ParametricDistribution("weibull", a, b)


def Gaussian(mu, sigma):
    return ParametricDistribution("gaussian", mu, sigma)


class TruncatedDistribution(LossDistribution):
    """Conditional distribution Pr(X <= x | a <= X <= b) of a continuous base."""

    def __init__(self, base, window: SupportInterval):
        if not base.has_density:
            raise NoDensity("truncation requires a base with a density")
        eff = window.intersect(base.support)
        mass = float(base.cdf(eff.upper) - base.cdf(eff.lower))
        if mass <= 1e-300:
            raise EmptyTruncation(
                f"window [{window.lower}, {window.upper}] carries no mass"
            )
        self.base = base
        self.window = eff
        self._mass = mass

    @property
    def support(self):
        return self.window

    @property
    def renormalization(self):
        """Pr(a <= X <= b) under the base distribution."""
        return self._mass

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.window.lower) & (x <= self.window.upper)
        return np.where(inside, self.base.pdf(x) / self._mass, 0.0)[()]

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.window.lower) & (x <= self.window.upper)
        return np.where(
            inside, self.base.logpdf(x) - np.log(self._mass), -np.inf
        )[()]

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        clipped = np.clip(x, self.window.lower, self.window.upper)
        lo_cdf = self.base.cdf(self.window.lower)
        return np.clip((self.base.cdf(clipped) - lo_cdf) / self._mass, 0.0, 1.0)[()]

    def derivative(self, x, k):
        from .ordering import density_derivative  # deferred, avoids cycle

        return density_derivative(self.base, x, k) / self._mass

    def _log_moment(self, k):
        lo, hi = self.window.lower, self.window.upper
        if not np.isfinite(lo):
            lo = float(_moment_window(self.base._frozen, k)[0]) \
                if isinstance(self.base, ParametricDistribution) else hi - 1.0
        return signed_log_moment(self.logpdf, lo, hi, k)


@dataclass(frozen=True)
class PointMass(LossDistribution):
    """Degenerate distribution: all mass at a single loss value >= 1."""

    value: float

    has_density = False
    is_discrete = True

    def __post_init__(self):
        if self.value < 1.0:
            raise ValueError("point mass must sit at a loss value >= 1")

    @property
    def support(self):
        return SupportInterval(self.value, self.value)

    def pdf(self, x):
        raise NoDensity("point mass has no density")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= self.value, 1.0, 0.0)[()]

    def _log_moment(self, k):
        return k * np.log(self.value)


class LatticeDistribution(LossDistribution):
    """Discrete distribution on the integers {lower, lower+1, ...} with
    unbounded support, defined by a log-pmf callable."""

    _CAP = 100_000

    def __init__(self, log_pmf, lower=1, name="lattice"):
        self._log_pmf = log_pmf
        self.lower = int(lower)
        self.name = name

    has_density = False
    is_discrete = True

    @property
    def support(self):
        return SupportInterval(float(self.lower), np.inf)

    def pdf(self, x):
        raise NoDensity("lattice distribution has no density")

    def pmf(self, j):
        return float(np.exp(self._log_pmf(int(j))))

    def cdf(self, x):
        x = float(np.asarray(x, dtype=float))
        if x < self.lower:
            return 0.0
        top = int(np.floor(x))
        return min(1.0, sum(self.pmf(j) for j in range(self.lower, top + 1)))

    def quantile(self, q):
        """Smallest support point j with CDF(j) >= q."""
        acc = 0.0
        for j in range(self.lower, self._CAP):
            acc += self.pmf(j)
            if acc >= q:
                return j
        raise MomentsUndefined("quantile scan exceeded lattice cap")

    def truncated(self, a, b):
        """Renormalised finite restriction to integer points in [a, b]."""
        points = list(range(max(self.lower, int(np.ceil(a))), int(np.floor(b)) + 1))
        probs = np.array([self.pmf(j) for j in points])
        total = probs.sum()
        if total <= 0:
            raise EmptyTruncation("lattice window carries no mass")
        probs = probs / total
        order = np.argsort(points)[::-1]
        return CategoricalDistribution(
            labels=tuple(str(points[i]) for i in order),
            ranks=tuple(float(points[i]) for i in order),
            probs=tuple(probs[i] for i in order),
        )

    def _log_moment(self, k):
        terms = []
        best = -np.inf
        for j in range(max(self.lower, 1), self._CAP):
            t = self._log_pmf(j) + k * np.log(j)
            terms.append(t)
            best = max(best, t)
            if t < best - 60 and j > 10 * (k + 1):
                break
        return float(logsumexp(terms))


def truncate(d, a, b):
    """Truncate a density-bearing distribution to the window [a, b]."""
    if a >= b:
        raise ValueError("truncation window must satisfy a < b")
    return TruncatedDistribution(d, SupportInterval(float(a), float(b)))


def descending_pmf(d):
    """(values, probs) in strictly descending severity order, for finite
    discrete distributions."""
    if isinstance(d, CategoricalDistribution):
        return np.asarray(d.ranks), np.asarray(d.probs)
    if isinstance(d, HistogramDistribution):
        return (
            np.asarray(d.bin_values)[::-1].copy(),
            np.asarray(d.probs)[::-1].copy(),
        )
    if isinstance(d, PointMass):
        return np.asarray([d.value]), np.asarray([1.0])
    raise TypeError(f"{type(d).__name__} has no finite pmf")
