import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from entangle_mc.accumulators import (
    Axis,
    ConditionalCurve,
    Histogram,
    Scalar,
    ScalarStat,
    Tally,
    delta_axis,
    entanglement_axis,
)
from entangle_mc.errors import InvariantViolation


def test_axis_edges_and_index():
    ax = entanglement_axis()
    assert ax.width == pytest.approx(0.01)
    assert ax.bin_of(0.0) == 0
    assert ax.bin_of(1.0) == 99
    assert ax.bin_of(0.015) == 1
    with pytest.raises(InvariantViolation):
        ax.index([1.0 + 1e-9])
    with pytest.raises(InvariantViolation):
        ax.index([np.nan])


def test_delta_axis_is_centred_on_zero():
    ax = delta_axis()
    assert ax.bins == 101
    assert ax.width == pytest.approx(0.02)
    zero = ax.bin_of(0.0)
    assert ax.centers[zero] == pytest.approx(0.0, abs=1e-15)
    assert ax.bin_of(-1.0) == 0 and ax.bin_of(1.0) == 100
    assert delta_axis(41).width == pytest.approx(0.05)


def test_histogram_matches_numpy():
    x = np.random.default_rng(0).random(1000)
    h = Histogram.from_values(entanglement_axis(), x)
    np.testing.assert_array_equal(h.counts, np.histogram(x, bins=100, range=(0, 1))[0])
    assert h.total == 1000
    assert np.sum(h.density) * h.axis.width == pytest.approx(1.0)


def test_histogram_merge_requires_same_axis():
    with pytest.raises(ValueError):
        Histogram.empty(Axis(0, 1, 10)).merge(Histogram.empty(Axis(0, 1, 11)))


def test_curve_matches_per_bin_statistics():
    rng = np.random.default_rng(1)
    keys = rng.random(5000)
    vals = keys**2 + 0.1 * rng.standard_normal(5000)
    ax = Axis(0.0, 1.0, 10)
    c = ConditionalCurve.from_values(ax, keys, vals)
    for b in range(10):
        sel = vals[ax.index(keys) == b]
        assert c.count[b] == sel.size
        assert c.mean[b] == pytest.approx(sel.mean())
        assert c.variance[b] == pytest.approx(sel.var())


def test_curve_empty_bins_are_nan():
    c = ConditionalCurve.from_values(Axis(0, 1, 4), [0.1, 0.15], [1.0, 3.0])
    assert c.mean[0] == 2.0 and c.variance[0] == 1.0
    assert np.all(np.isnan(c.mean[1:])) and np.all(np.isnan(c.variance[1:]))


def test_scalar_stat_matches_scipy():
    x = np.random.default_rng(2).exponential(size=2000)
    st_ = ScalarStat.from_values(x)
    assert st_.mean == pytest.approx(x.mean())
    assert st_.variance == pytest.approx(x.var())
    assert st_.stderr == pytest.approx(stats.sem(x))
    assert st_.skewness == pytest.approx(stats.skew(x))
    assert math.isnan(ScalarStat().mean)
    s = Scalar.of(st_)
    assert s.n == 2000 and s.value == st_.mean


ints = st.lists(st.integers(0, 99), max_size=50)


@given(ints, ints, ints)
def test_property_merge_is_associative_and_commutative(a, b, c):
    ax = Axis(0.0, 100.0, 10)
    ha, hb, hc = (Histogram.from_values(ax, v) for v in (a, b, c))
    left = ha.merge(hb).merge(hc)
    right = ha.merge(hb.merge(hc))
    np.testing.assert_array_equal(left.counts, right.counts)
    np.testing.assert_array_equal(ha.merge(hb).counts, hb.merge(ha).counts)
    whole = Histogram.from_values(ax, a + b + c)
    np.testing.assert_array_equal(left.counts, whole.counts)
    assert Tally(len(a)).merge(Tally(len(b))).value == len(a) + len(b)


@given(st.lists(st.floats(-1, 1), min_size=2, max_size=40), st.integers(1, 39))
def test_property_split_stats_merge(values, cut):
    cut = min(cut, len(values) - 1)
    merged = ScalarStat.from_values(values[:cut]).merge(ScalarStat.from_values(values[cut:]))
    whole = ScalarStat.from_values(values)
    assert merged.n == whole.n
    assert merged.mean == pytest.approx(whole.mean, abs=1e-12)
    assert merged.variance == pytest.approx(whole.variance, abs=1e-12)
