"""Shared synthetic-data helpers."""

from __future__ import annotations

import datetime

import numpy as np
import pytest

from hydroscales.series import TimeSeries

START = datetime.date(2000, 1, 1)


def ar1(phi: float, n: int, rng, scale: float = 1.0) -> np.ndarray:
    """A zero-start AR(1) path driven by Gaussian innovations."""
    e = rng.normal(scale=scale, size=n)
    x = np.empty(n)
    x[0] = e[0]
    for t in range(1, n):
        x[t] = phi * x[t - 1] + e[t]
    return x


def seasonal_daily(
    n_days: int, rng, amplitude: float = 1.0, noise: float = 0.8, level: float = 10.0
) -> np.ndarray:
    """Annual sinusoid plus white noise, the stand-in for a daily record."""
    doy = np.arange(n_days)
    phase = rng.uniform(0.0, 2.0 * np.pi)
    return amplitude * np.sin(2.0 * np.pi * doy / 365.25 + phase) + rng.normal(
        scale=noise, size=n_days
    ) + level


def daily_series(values: np.ndarray, start: datetime.date = START) -> TimeSeries:
    return TimeSeries(np.asarray(values, dtype=float), start, "1-day")


def write_daily_csv(path, values, start: datetime.date = START) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("date,value\n")
        day = start
        for v in values:
            fh.write(f"{day.isoformat()},{float(v)!r}\n")
            day += datetime.timedelta(days=1)


def write_manifest(
    root, n_locations: int, series_types: list[str], n_days: int, seed: int
) -> "object":
    """Create a manifest plus data files under ``root``; returns its path.

    Temperature-like types get a strong seasonal cycle, the others weaker
    seasonality with heavier noise, so slices differ but all featurise.
    """
    data_dir = root / "data"
    data_dir.mkdir(exist_ok=True)
    lines = ["location_id,series_type,path"]
    for i in range(n_locations):
        for series_type in series_types:
            rng = np.random.default_rng([seed, i, hash(series_type) % (2**32)])
            if series_type == "temperature":
                values = seasonal_daily(n_days, rng, amplitude=1.5, noise=0.6)
            else:
                base = seasonal_daily(n_days, rng, amplitude=0.6, noise=1.0, level=5.0)
                values = np.maximum(base + rng.exponential(scale=0.5, size=n_days), 0.01)
            name = f"{series_type}_{i:03d}.csv"
            write_daily_csv(data_dir / name, values)
            lines.append(f"loc{i:03d},{series_type},data/{name}")
    manifest = root / "manifest.csv"
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return manifest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
