import datetime

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hydroscales.errors import EmptyResult, TooShort, ZeroVariance
from hydroscales.series import (
    CalendarMonths,
    FixedBlock,
    ResolutionSpec,
    SemiMonth,
    TimeSeries,
    aggregate,
    default_resolutions,
    derive_resolutions,
    difference,
    standardize,
)

from conftest import START, daily_series


def test_standardize_small_example():
    out = standardize(daily_series([1.0, 2.0, 3.0]))
    np.testing.assert_allclose(out.values, [-1.0, 0.0, 1.0], atol=1e-15)


def test_standardize_constant_raises():
    with pytest.raises(ZeroVariance):
        standardize(daily_series([5.0, 5.0, 5.0]))


def test_standardize_too_short():
    with pytest.raises(TooShort):
        standardize(daily_series([1.0]))


def test_standardize_moments(rng):
    out = standardize(daily_series(rng.normal(loc=50.0, scale=9.0, size=500)))
    assert abs(out.values.mean()) < 1e-12
    assert abs(out.values.std(ddof=1) - 1.0) < 1e-12


def test_standardize_idempotent(rng):
    once = standardize(daily_series(rng.uniform(0, 100, size=64)))
    twice = standardize(once)
    np.testing.assert_allclose(twice.values, once.values, atol=1e-12)


def test_difference_examples():
    s = daily_series([1.0, 3.0, 6.0, 10.0])
    np.testing.assert_array_equal(difference(s, 1).values, [2.0, 3.0, 4.0])
    np.testing.assert_array_equal(difference(s, 2).values, [1.0, 1.0])


def test_difference_linear_ramp_is_constant():
    ramp = daily_series(4.0 + 0.5 * np.arange(20))
    np.testing.assert_allclose(difference(ramp, 1).values, np.full(19, 0.5), atol=1e-12)


def test_difference_too_short():
    with pytest.raises(TooShort):
        difference(daily_series([1.0, 2.0]), 2)


@given(st.lists(st.integers(-1000, 1000), min_size=4, max_size=60))
def test_difference_order2_composes(values):
    s = daily_series(np.asarray(values, dtype=float))
    np.testing.assert_array_equal(
        difference(s, 2).values, difference(difference(s, 1), 1).values
    )


def _spec(rule, statistic="sum", frequency=2, name="test"):
    return ResolutionSpec(name, rule, statistic, frequency)


def test_fixed_block_sum_and_mean():
    s = daily_series([1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
    np.testing.assert_array_equal(aggregate(s, _spec(FixedBlock(2))).values, [3.0, 7.0, 11.0])
    np.testing.assert_array_equal(
        aggregate(s, _spec(FixedBlock(3), "mean")).values, [2.0, 5.0]
    )


def test_fixed_block_drops_trailing_remainder():
    s = daily_series(np.arange(7.0))
    assert len(aggregate(s, _spec(FixedBlock(3)))) == 2


def test_fixed_block_empty_result():
    with pytest.raises(EmptyResult):
        aggregate(daily_series([1.0, 2.0]), _spec(FixedBlock(5)))


def test_fixed_block_mean_preserves_constant():
    s = daily_series(np.full(30, 7.25))
    np.testing.assert_array_equal(
        aggregate(s, _spec(FixedBlock(7), "mean")).values, np.full(4, 7.25)
    )


def test_fixed_block_sum_is_width_times_mean(rng):
    s = daily_series(rng.normal(size=100))
    total = aggregate(s, _spec(FixedBlock(7), "sum")).values
    mean = aggregate(s, _spec(FixedBlock(7), "mean")).values
    np.testing.assert_allclose(total, 7.0 * mean, rtol=1e-12)
    # standardization absorbs the constant factor
    std_sum = standardize(aggregate(s, _spec(FixedBlock(7), "sum")))
    std_mean = standardize(aggregate(s, _spec(FixedBlock(7), "mean")))
    np.testing.assert_allclose(std_sum.values, std_mean.values, atol=1e-10)


def test_fixed_block_sum_conservation(rng):
    v = rng.normal(size=45)
    out = aggregate(daily_series(v), _spec(FixedBlock(7), "sum")).values
    kept = 7 * (45 // 7)
    assert out.sum() == pytest.approx(v[:kept].sum(), abs=1e-10)


def test_semimonth_blocks_january():
    # January 1990: day-of-month as value; blocks are 1-15 and 16-31
    s = daily_series(np.arange(1.0, 32.0), datetime.date(1990, 1, 1))
    out = aggregate(s, _spec(SemiMonth(), "sum", 24))
    np.testing.assert_array_equal(out.values, [sum(range(1, 16)), sum(range(16, 32))])
    assert out.start_date == datetime.date(1990, 1, 1)


def test_semimonth_drops_partial_leading_block():
    # starts Jan 10: the 1-15 block is incomplete, first output is 16-31
    s = daily_series(np.ones(22), datetime.date(1990, 1, 10))
    out = aggregate(s, _spec(SemiMonth(), "sum", 24))
    np.testing.assert_array_equal(out.values, [16.0])
    assert out.start_date == datetime.date(1990, 1, 16)


def test_calendar_month_lengths():
    # Jan + Feb 1990 of ones: month sums are the month lengths
    s = daily_series(np.ones(59), datetime.date(1990, 1, 1))
    out = aggregate(s, _spec(CalendarMonths(1), "sum", 12))
    np.testing.assert_array_equal(out.values, [31.0, 28.0])


def test_calendar_month_leap_february():
    s = daily_series(np.ones(60), datetime.date(2000, 1, 1))
    out = aggregate(s, _spec(CalendarMonths(1), "sum", 12))
    np.testing.assert_array_equal(out.values, [31.0, 29.0])


def test_calendar_groups_align_to_january():
    # starting in February, the first complete 2-month group is Mar-Apr
    n = (datetime.date(1990, 7, 1) - datetime.date(1990, 2, 1)).days
    s = daily_series(np.ones(n), datetime.date(1990, 2, 1))
    out = aggregate(s, _spec(CalendarMonths(2), "sum", 6))
    assert out.start_date == datetime.date(1990, 3, 1)
    np.testing.assert_array_equal(out.values, [61.0, 61.0])  # Mar+Apr, May+Jun


def test_calendar_empty_result():
    with pytest.raises(EmptyResult):
        aggregate(daily_series(np.ones(20), datetime.date(1990, 1, 10)), _spec(SemiMonth(), "sum", 24))


def test_default_resolution_frequency_table():
    expected = {
        "1-day": 365,
        "2-day": 182,
        "3-day": 121,
        "7-day": 52,
        "0.5-month": 24,
        "1-month": 12,
        "2-month": 6,
        "3-month": 4,
        "6-month": 2,
    }
    specs = default_resolutions()
    assert {s.name: s.frequency for s in specs} == expected
    assert len(specs) == 9


def test_derive_resolutions_counts(rng):
    n = (datetime.date(2008, 1, 1) - START).days  # 2922 days incl. leap days
    assert n == 2922
    daily = daily_series(rng.normal(size=n))
    out = derive_resolutions(daily, default_resolutions("mean"))
    assert len(out) == 9
    np.testing.assert_array_equal(out["1-day"].values, daily.values)
    assert len(out["7-day"]) == 2922 // 7 == 417
    assert len(out["1-month"]) == 96
    assert len(out["6-month"]) == 16


def test_resolution_spec_validation():
    with pytest.raises(ValueError):
        ResolutionSpec("x", FixedBlock(2), "median", 12)
    with pytest.raises(ValueError):
        ResolutionSpec("x", FixedBlock(2), "sum", 1)
    with pytest.raises(ValueError):
        FixedBlock(0)
    with pytest.raises(ValueError):
        CalendarMonths(4)


def test_time_series_rejects_non_finite():
    with pytest.raises(ValueError):
        TimeSeries(np.array([1.0, np.nan]), START)
