"""Core time series representation and multi-resolution temporal aggregation.

A daily record is the base resolution; coarser series are derived from it by
fixed-width block statistics, half-month calendar blocks, or calendar-month
groups aligned to January. Each named resolution carries the number of
seasons per year used by every downstream seasonal feature.
"""

from __future__ import annotations

import calendar
import datetime
from dataclasses import dataclass, replace
from typing import Union

import numpy as np

from .errors import EmptyResult, TooShort, ZeroVariance

Statistic = str  # "sum" | "mean"


@dataclass(frozen=True)
class FixedBlock:
    """Non-overlapping blocks of ``width`` consecutive source samples."""

    width: int

    def __post_init__(self):
        if self.width < 1:
            raise ValueError(f"block width must be >= 1, got {self.width}")


@dataclass(frozen=True)
class SemiMonth:
    """Calendar blocks covering days 1-15 and 16-end of each month."""


@dataclass(frozen=True)
class CalendarMonths:
    """Groups of ``months`` consecutive calendar months aligned to January."""

    months: int

    def __post_init__(self):
        if self.months not in (1, 2, 3, 6):
            raise ValueError(f"calendar month group must be one of 1, 2, 3, 6, got {self.months}")


AggregationRule = Union[FixedBlock, SemiMonth, CalendarMonths]


@dataclass(frozen=True)
class ResolutionSpec:
    """An aggregation rule plus the seasons-per-year count of its output."""

    name: str
    rule: AggregationRule
    statistic: Statistic
    frequency: int

    def __post_init__(self):
        if self.statistic not in ("sum", "mean"):
            raise ValueError(f"statistic must be 'sum' or 'mean', got {self.statistic!r}")
        if self.frequency < 2:
            raise ValueError(f"frequency must be >= 2, got {self.frequency}")


#: Seasons per year for the nine standard resolutions, finest to coarsest.
DEFAULT_FREQUENCIES = {
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


def default_resolutions(statistic: Statistic = "mean") -> list[ResolutionSpec]:
    """Build the nine standard resolution specs with the given statistic.

    The 1-day spec is a width-1 block (identity pass-through of the daily
    record); 0.5-month uses the day 1-15 / 16-end split; month groups align
    to January so each year contains exactly ``frequency`` seasons.
    """
    rules: list[tuple[str, AggregationRule]] = [
        ("1-day", FixedBlock(1)),
        ("2-day", FixedBlock(2)),
        ("3-day", FixedBlock(3)),
        ("7-day", FixedBlock(7)),
        ("0.5-month", SemiMonth()),
        ("1-month", CalendarMonths(1)),
        ("2-month", CalendarMonths(2)),
        ("3-month", CalendarMonths(3)),
        ("6-month", CalendarMonths(6)),
    ]
    return [
        ResolutionSpec(name, rule, statistic, DEFAULT_FREQUENCIES[name])
        for name, rule in rules
    ]


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """A gap-free, uniformly sampled real-valued sequence.

    ``start_date`` anchors the first sample on the calendar;
    ``resolution_name`` tags which aggregation produced the series.
    """

    values: np.ndarray
    start_date: datetime.date
    resolution_name: str = "1-day"

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1:
            raise ValueError("series values must be one-dimensional")
        if arr.size and not np.all(np.isfinite(arr)):
            raise ValueError("series values must be finite (records are gap-free)")
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size


def standardize_values(values: np.ndarray) -> np.ndarray:
    """Scale an array to mean 0 and sample standard deviation 1 (n-1)."""
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        raise TooShort(f"standardize needs >= 2 values, got {v.size}")
    if np.ptp(v) == 0.0:
        raise ZeroVariance("cannot standardize a constant series")
    centered = v - v.mean()
    centered -= centered.mean()  # second pass removes the fp residual
    sd = centered.std(ddof=1)
    if sd == 0.0:
        raise ZeroVariance("cannot standardize a constant series")
    return centered / sd


def standardize(series: TimeSeries) -> TimeSeries:
    """Scale to mean 0 and sample standard deviation 1 (n-1 denominator).

    Raises TooShort for fewer than 2 values and ZeroVariance when all
    values are equal. Idempotent up to floating point roundoff.
    """
    return replace(series, values=standardize_values(series.values))


def difference(series: TimeSeries, order: int = 1) -> TimeSeries:
    """Consecutive differences, applied ``order`` times."""
    if order < 1:
        raise ValueError(f"difference order must be >= 1, got {order}")
    v = series.values
    if v.size <= order:
        raise TooShort(f"difference of order {order} needs > {order} values, got {v.size}")
    out = np.diff(v, n=order)
    start = series.start_date  # differenced samples keep the anchor of the later term
    return TimeSeries(out, start, series.resolution_name)


def _dates_for(series: TimeSeries) -> np.ndarray:
    start = np.datetime64(series.start_date.isoformat(), "D")
    return start + np.arange(len(series))


def _block_keys(series: TimeSeries, rule: AggregationRule) -> np.ndarray:
    """Integer block key per daily sample, non-decreasing along time."""
    dates = _dates_for(series)
    months0 = dates.astype("datetime64[M]").astype(np.int64)  # months since 1970-01
    if isinstance(rule, SemiMonth):
        day = (dates - dates.astype("datetime64[M]")).astype(np.int64) + 1
        return months0 * 2 + (day > 15)
    if isinstance(rule, CalendarMonths):
        years = months0 // 12
        group = (months0 % 12) // rule.months
        return years * (12 // rule.months) + group
    raise TypeError(f"no calendar keys for rule {rule!r}")


def _expected_block_days(rule: AggregationRule, key: int) -> int:
    if isinstance(rule, SemiMonth):
        months0, half = divmod(key, 2)
        year, month = 1970 + months0 // 12, months0 % 12 + 1
        n_days = calendar.monthrange(year, month)[1]
        return 15 if half == 0 else n_days - 15
    if isinstance(rule, CalendarMonths):
        per_year = 12 // rule.months
        year, group = 1970 + key // per_year, key % per_year
        first = group * rule.months + 1
        return sum(calendar.monthrange(year, first + m)[1] for m in range(rule.months))
    raise TypeError(f"no block size for rule {rule!r}")


def _block_start_date(rule: AggregationRule, key: int) -> datetime.date:
    if isinstance(rule, SemiMonth):
        months0, half = divmod(key, 2)
        year, month = 1970 + months0 // 12, months0 % 12 + 1
        return datetime.date(year, month, 1 if half == 0 else 16)
    if isinstance(rule, CalendarMonths):
        per_year = 12 // rule.months
        year, group = 1970 + key // per_year, key % per_year
        return datetime.date(year, group * rule.months + 1, 1)
    raise TypeError(f"no start date for rule {rule!r}")


def aggregate(series: TimeSeries, spec: ResolutionSpec) -> TimeSeries:
    """Aggregate a daily series to one coarser resolution.

    Fixed blocks start at the first observation and a trailing incomplete
    block is dropped; calendar blocks (semi-month, month groups) keep only
    blocks fully covered by the record, so partial leading and trailing
    blocks are dropped as well. Raises EmptyResult when nothing survives.
    """
    v = series.values
    rule = spec.rule
    if isinstance(rule, FixedBlock):
        w = rule.width
        n_blocks = v.size // w
        if n_blocks == 0:
            raise EmptyResult(f"{spec.name}: no complete block of width {w} in {v.size} values")
        blocks = v[: n_blocks * w].reshape(n_blocks, w)
        out = blocks.sum(axis=1) if spec.statistic == "sum" else blocks.mean(axis=1)
        return TimeSeries(out, series.start_date, spec.name)

    keys = _block_keys(series, rule)
    uniq, first_idx, counts = np.unique(keys, return_index=True, return_counts=True)
    complete = np.array(
        [counts[i] == _expected_block_days(rule, int(uniq[i])) for i in range(uniq.size)]
    )
    if not complete.any():
        raise EmptyResult(f"{spec.name}: record covers no complete calendar block")
    out = np.empty(int(complete.sum()))
    j = 0
    for i in np.nonzero(complete)[0]:
        block = v[first_idx[i] : first_idx[i] + counts[i]]
        out[j] = block.sum() if spec.statistic == "sum" else block.mean()
        j += 1
    start = _block_start_date(rule, int(uniq[np.nonzero(complete)[0][0]]))
    return TimeSeries(out, start, spec.name)


def derive_resolutions(
    daily: TimeSeries, specs: list[ResolutionSpec]
) -> dict[str, TimeSeries]:
    """Aggregate one daily series to every spec; one output series per spec.

    The 1-day spec (a width-1 block) reproduces the daily record under its
    own name, so the result holds exactly ``len(specs)`` series.
    """
    out: dict[str, TimeSeries] = {}
    for spec in specs:
        if spec.name in out:
            raise ValueError(f"duplicate resolution name {spec.name!r}")
        out[spec.name] = aggregate(daily, spec)
    return out
