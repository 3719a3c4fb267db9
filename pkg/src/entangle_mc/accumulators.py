"""Mergeable Monte Carlo accumulators: histograms, binned moments, scalars.

Merging is exact for integer counts. Floating sums are only reproducible
bit-for-bit when merged in a fixed order, which the block engine in
:mod:`entangle_mc.experiments` guarantees.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvariantViolation


@dataclass(frozen=True)
class Axis:
    """``bins`` equal-width bins covering ``[lo, hi]`` (``hi`` lands in the last bin)."""

    lo: float
    hi: float
    bins: int

    def __post_init__(self):
        if self.bins < 1 or not self.hi > self.lo:
            raise ValueError(f"bad axis {self}")

    @property
    def width(self):
        return (self.hi - self.lo) / self.bins

    @property
    def edges(self):
        return self.lo + self.width * np.arange(self.bins + 1)

    @property
    def centers(self):
        return self.lo + self.width * (np.arange(self.bins) + 0.5)

    def index(self, values):
        """Bin index of each value; out-of-range values are a hard error."""
        x = np.asarray(values, dtype=float)
        if x.size and (not np.all(np.isfinite(x)) or x.min() < self.lo or x.max() > self.hi):
            bad = x[~np.isfinite(x) | (x < self.lo) | (x > self.hi)][0]
            raise InvariantViolation(f"value {bad!r} outside axis [{self.lo}, {self.hi}]")
        idx = np.floor((x - self.lo) / self.width).astype(np.int64)
        return np.clip(idx, 0, self.bins - 1)

    def bin_of(self, value):
        return int(self.index([value])[0])


def entanglement_axis(bins=100):
    """``[0, 1]`` split into ``bins`` bins."""
    return Axis(0.0, 1.0, bins)


def delta_axis(bins=101):
    """Bins of width ``2 / (bins - 1)`` centred on ``-1, ..., 1``.

    With an odd bin count one bin is centred exactly on zero, so the
    ``Delta E = 0`` bin is unambiguous.
    """
    if bins < 2:
        raise ValueError("delta axis needs at least 2 bins")
    w = 2.0 / (bins - 1)
    return Axis(-1.0 - 0.5 * w, 1.0 + 0.5 * w, bins)


@dataclass
class Histogram:
    axis: Axis
    counts: np.ndarray

    @classmethod
    def empty(cls, axis):
        return cls(axis, np.zeros(axis.bins, dtype=np.int64))

    @classmethod
    def from_values(cls, axis, values):
        idx = axis.index(values)
        return cls(axis, np.bincount(idx, minlength=axis.bins).astype(np.int64))

    @property
    def total(self):
        return int(self.counts.sum())

    @property
    def density(self):
        """``counts / (total * width)``; all zeros for an empty histogram."""
        if self.total == 0:
            return np.zeros(self.axis.bins)
        return self.counts / (self.total * self.axis.width)

    def mass_at(self, value):
        """Fraction of samples in the bin containing ``value``."""
        if self.total == 0:
            return 0.0
        return self.counts[self.axis.bin_of(value)] / self.total

    def merge(self, other):
        if other.axis != self.axis:
            raise ValueError("cannot merge histograms on different axes")
        return Histogram(self.axis, self.counts + other.counts)


@dataclass
class ConditionalCurve:
    """Per-bin count, sum and sum of squares of a value binned by a key."""

    axis: Axis
    count: np.ndarray
    sum1: np.ndarray
    sum2: np.ndarray

    @classmethod
    def empty(cls, axis):
        z = np.zeros(axis.bins)
        return cls(axis, np.zeros(axis.bins, dtype=np.int64), z, z.copy())

    @classmethod
    def from_values(cls, axis, keys, values):
        idx = axis.index(keys)
        values = np.asarray(values, dtype=float)
        return cls(
            axis,
            np.bincount(idx, minlength=axis.bins).astype(np.int64),
            np.bincount(idx, weights=values, minlength=axis.bins),
            np.bincount(idx, weights=values * values, minlength=axis.bins),
        )

    @property
    def bin_centers(self):
        return self.axis.centers

    def _per_bin(self, s):
        out = np.full(self.axis.bins, np.nan)
        nz = self.count > 0
        out[nz] = s[nz] / self.count[nz]
        return out

    @property
    def mean(self):
        """Bin means; NaN marks empty bins."""
        return self._per_bin(self.sum1)

    @property
    def second_moment(self):
        return self._per_bin(self.sum2)

    @property
    def variance(self):
        """Population variance ``<x^2> - <x>^2``, clamped at zero."""
        m = self.mean
        v = self.second_moment - m * m
        neg = v < -1e-12
        if np.any(neg):
            raise InvariantViolation(f"negative bin variance {np.nanmin(v):.3e}")
        return np.where(np.isnan(v), np.nan, np.maximum(v, 0.0))

    def merge(self, other):
        if other.axis != self.axis:
            raise ValueError("cannot merge curves on different axes")
        return ConditionalCurve(
            self.axis, self.count + other.count, self.sum1 + other.sum1, self.sum2 + other.sum2
        )


@dataclass
class ScalarStat:
    """Running moments of a scalar sample."""

    n: int = 0
    sum1: float = 0.0
    sum2: float = 0.0
    sum3: float = 0.0

    @classmethod
    def from_values(cls, values):
        x = np.asarray(values, dtype=float)
        return cls(int(x.size), float(np.sum(x)), float(np.sum(x * x)), float(np.sum(x**3)))

    @property
    def mean(self):
        return self.sum1 / self.n if self.n else math.nan

    @property
    def variance(self):
        if not self.n:
            return math.nan
        return max(self.sum2 / self.n - self.mean**2, 0.0)

    @property
    def stderr(self):
        if self.n < 2:
            return math.nan
        return math.sqrt(self.variance / (self.n - 1))

    @property
    def skewness(self):
        var = self.variance
        if not self.n or not var > 0:
            return math.nan
        m = self.mean
        third = self.sum3 / self.n - 3 * m * self.sum2 / self.n + 2 * m**3
        return third / var**1.5

    def merge(self, other):
        return ScalarStat(
            self.n + other.n, self.sum1 + other.sum1, self.sum2 + other.sum2, self.sum3 + other.sum3
        )


@dataclass
class Tally:
    value: int = 0

    def merge(self, other):
        return Tally(self.value + other.value)


class Scalar(NamedTuple):
    """A reported number: value, standard error (NaN if not applicable), sample size."""

    value: float
    stderr: float = math.nan
    n: int = 0

    @classmethod
    def of(cls, stat):
        return cls(stat.mean, stat.stderr, stat.n)
