"""Assembly of the 23-feature characterisation of a series and the
summary statistics over a feature matrix.

The canonical feature order below is fixed: every file written, every
forest column, and every importance ranking uses it.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Iterable, Union

import numpy as np

from . import correlation, decomposition, dispersion, spectral
from .errors import DegenerateColumn, EmptyMatrix, FeatureError, HydroscalesError, TooShort
from .series import TimeSeries, standardize_values

#: Canonical feature order.
FEATURE_NAMES = (
    "x_acf1",
    "x_acf10",
    "diff1_acf1",
    "diff1_acf10",
    "diff2_acf1",
    "diff2_acf10",
    "seas_acf1",
    "x_pacf5",
    "diff1x_pacf5",
    "diff2x_pacf5",
    "seas_pacf",
    "std1st_der",
    "entropy",
    "lumpiness",
    "stability",
    "nonlinearity",
    "trend",
    "spike",
    "linearity",
    "curvature",
    "e_acf1",
    "e_acf10",
    "seasonal_strength",
)


@dataclass(frozen=True)
class FeatureVector:
    """The 23 named features of one series at one resolution."""

    x_acf1: float
    x_acf10: float
    diff1_acf1: float
    diff1_acf10: float
    diff2_acf1: float
    diff2_acf10: float
    seas_acf1: float
    x_pacf5: float
    diff1x_pacf5: float
    diff2x_pacf5: float
    seas_pacf: float
    std1st_der: float
    entropy: float
    lumpiness: float
    stability: float
    nonlinearity: float
    trend: float
    spike: float
    linearity: float
    curvature: float
    e_acf1: float
    e_acf10: float
    seasonal_strength: float

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in FEATURE_NAMES])

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in FEATURE_NAMES}

    @classmethod
    def from_dict(cls, values: dict[str, float]) -> "FeatureVector":
        return cls(**{name: float(values[name]) for name in FEATURE_NAMES})


assert tuple(f.name for f in fields(FeatureVector)) == FEATURE_NAMES


@dataclass(frozen=True)
class FeatureRow:
    """One feature vector keyed by location, series type and resolution."""

    location_id: str
    series_type: str
    resolution: str
    features: FeatureVector

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.series_type, self.resolution, self.location_id)


@dataclass
class FeatureMatrix:
    """An ordered collection of feature rows with unique keys."""

    rows: list[FeatureRow]

    def __post_init__(self):
        keys = [r.key for r in self.rows]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate (location, type, resolution) keys in feature matrix")

    def sorted(self) -> "FeatureMatrix":
        """Rows in lexicographic (series_type, resolution, location_id) order."""
        return FeatureMatrix(sorted(self.rows, key=lambda r: r.key))

    def slice(self, series_type: str, resolution: str) -> "FeatureMatrix":
        return FeatureMatrix(
            [r for r in self.rows if r.series_type == series_type and r.resolution == resolution]
        )

    def to_array(self) -> np.ndarray:
        return np.array([r.features.as_array() for r in self.rows])

    @property
    def series_types(self) -> list[str]:
        return sorted({r.series_type for r in self.rows})

    @property
    def resolutions(self) -> list[str]:
        return sorted({r.resolution for r in self.rows})


def compute_features(series: Union[TimeSeries, np.ndarray], frequency: int) -> FeatureVector:
    """Compute all 23 features of one series at one seasonal frequency.

    The series is standardised first, so the result is invariant to affine
    transforms of the input. Any failing feature fails the whole vector
    with a FeatureError naming it: clustering needs complete rows and no
    imputation scheme is defined for partial ones.
    """
    values = series.values if isinstance(series, TimeSeries) else np.asarray(series, dtype=float)
    n = values.size
    if n < 2 * frequency:
        raise TooShort(f"features at frequency {frequency} need >= {2 * frequency} values, got {n}")
    out: dict[str, float] = {}

    def step(name: str, fn, *args):
        try:
            return fn(*args)
        except HydroscalesError as exc:
            raise FeatureError(name, exc) from exc

    v = step("standardize", standardize_values, values)
    out.update(step("correlation", correlation.correlation_features, v, frequency))
    out["std1st_der"] = step("std1st_der", dispersion.std1st_der, v)
    out["entropy"] = step("entropy", spectral.spectral_entropy, v)
    out["lumpiness"], out["stability"] = step("lumpiness", dispersion.tiled_stats, v, frequency)
    out["nonlinearity"] = step("nonlinearity", dispersion.nonlinearity, v)
    decomp = step("stl", decomposition.stl_decompose, v, frequency)
    out.update(step("stl", decomposition.stl_features, decomp, frequency))
    return FeatureVector.from_dict(out)


def summarize_means(matrix: FeatureMatrix) -> list[dict]:
    """Per (type, feature, resolution) means over locations, with ranks of
    the means across resolutions.

    Ranks run from the smallest mean (1) upward; tied means share the
    smaller rank and the following rank is skipped.
    """
    if not matrix.rows:
        raise EmptyMatrix("cannot summarise an empty feature matrix")
    records = []
    for series_type in matrix.series_types:
        rows_t = [r for r in matrix.rows if r.series_type == series_type]
        resolutions = sorted({r.resolution for r in rows_t})
        for feature in FEATURE_NAMES:
            means = []
            for resolution in resolutions:
                vals = [
                    getattr(r.features, feature) for r in rows_t if r.resolution == resolution
                ]
                means.append(float(np.mean(vals)))
            ranks = _competition_ranks(means)
            for resolution, mean, rank in zip(resolutions, means, ranks):
                records.append(
                    {
                        "series_type": series_type,
                        "feature": feature,
                        "resolution": resolution,
                        "mean": mean,
                        "rank": rank,
                    }
                )
    return records


def _competition_ranks(values: Iterable[float]) -> list[int]:
    """1 + count of strictly smaller values; ties share the smaller rank."""
    vals = list(values)
    return [1 + sum(1 for other in vals if other < v) for v in vals]


def feature_correlations(
    matrix: FeatureMatrix, series_type: str, resolution: str
) -> np.ndarray:
    """Pearson correlations between the 23 features over one (type,
    resolution) slice of the matrix; symmetric with unit diagonal."""
    data = matrix.slice(series_type, resolution).to_array()
    if data.shape[0] < 3:
        raise EmptyMatrix(
            f"need >= 3 rows for ({series_type}, {resolution}), got {data.shape[0]}"
        )
    sd = data.std(axis=0, ddof=1)
    degenerate = [FEATURE_NAMES[i] for i in np.nonzero(sd == 0.0)[0]]
    if degenerate:
        raise DegenerateColumn(degenerate)
    corr = np.corrcoef(data, rowvar=False)
    np.fill_diagonal(corr, 1.0)
    return (corr + corr.T) / 2.0
