"""Tiled-window dispersion statistics, first-difference variability, and
the polynomial-regression nonlinearity statistic.
"""

from __future__ import annotations

import numpy as np

from .errors import SingularDesign, TooShort


def tiled_stats(values: np.ndarray, frequency: int) -> tuple[float, float]:
    """Lumpiness and stability from non-overlapping windows of one season.

    The series is cut into windows of exactly ``frequency`` values starting
    at the first observation (trailing remainder dropped). Stability is the
    sample variance of the window means, lumpiness the sample variance of
    the window variances.

    Returns
    -------
    (lumpiness, stability)
    """
    v = np.asarray(values, dtype=float)
    if frequency < 1:
        raise ValueError(f"frequency must be >= 1, got {frequency}")
    n_windows = v.size // frequency
    if n_windows < 2:
        raise TooShort(f"tiled stats need >= 2 windows of {frequency}, got {v.size} values")
    windows = v[: n_windows * frequency].reshape(n_windows, frequency)
    means = windows.mean(axis=1)
    if frequency == 1:
        variances = np.zeros(n_windows)
    else:
        variances = windows.var(axis=1, ddof=1)
    lumpiness = float(variances.var(ddof=1))
    stability = float(means.var(ddof=1))
    return lumpiness, stability


def std1st_der(values: np.ndarray) -> float:
    """Sample standard deviation of the first-order differenced series."""
    v = np.asarray(values, dtype=float)
    if v.size < 3:
        raise TooShort(f"std of first differences needs >= 3 values, got {v.size}")
    return float(np.diff(v).std(ddof=1))


def _sse(design: np.ndarray, y: np.ndarray) -> float | None:
    """Residual sum of squares of a least-squares fit; None if rank-deficient."""
    coef, res, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < design.shape[1]:
        return None
    if res.size:
        return float(res[0])
    return float(((y - design @ coef) ** 2).sum())


def nonlinearity(values: np.ndarray) -> float:
    """Neglected-nonlinearity statistic from an auxiliary cubic regression.

    Regresses v_t on {1, v_{t-1}} and again with the quadratic and cubic
    powers of the lag added; the scaled drop in residual sum of squares,
    10 * (SSE0 - SSE1) / SSE0, is near 0 for linear dynamics and grows with
    neglected nonlinearity. Invariant to affine transforms of the series.

    Raises SingularDesign when the augmented design is rank-deficient
    (for instance a binary-valued series, where the powers collapse).
    """
    v = np.asarray(values, dtype=float)
    n = v.size
    if n < 8:
        raise TooShort(f"nonlinearity statistic needs >= 8 values, got {n}")
    y = v[1:]
    lag = v[:-1]
    base = np.column_stack([np.ones(n - 1), lag])
    sse0 = _sse(base, y)
    if sse0 is None:
        raise SingularDesign("lagged regressor is constant")
    if sse0 <= 1e-12 * float(((y - y.mean()) ** 2).sum()):
        return 0.0  # the linear fit is exact up to roundoff
    sse1 = _sse(np.column_stack([base, lag**2, lag**3]), y)
    if sse1 is None:
        raise SingularDesign("polynomial terms of the lag are collinear")
    return max(0.0, 10.0 * (sse0 - sse1) / sse0)
