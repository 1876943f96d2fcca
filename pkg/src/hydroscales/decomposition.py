"""Seasonal-trend decomposition with locally weighted regression, and the
features read off the components.

The decomposition is the classic inner-loop procedure specialised to a
periodic seasonal component: each cycle-subseries is replaced by its mean
(a fixed seasonal pattern), the pattern is low-pass filtered out of the
trend, and the trend is smoothed with a degree-1 loess whose window is the
next odd integer at or above 1.5x the seasonal frequency. Two inner
iterations, no robustness iterations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .correlation import acf
from .errors import FrequencyTooSmall, SingularFit, SpanTooSmall, TooShort, ZeroVariance

_CHUNK = 2048  # loess rows solved per batch; bounds the (rows x window) scratch


@dataclass(frozen=True)
class Decomposition:
    """Additive split of a series: seasonal + trend + remainder = input."""

    seasonal: np.ndarray
    trend: np.ndarray
    remainder: np.ndarray


def loess_smooth(
    y: np.ndarray,
    x: np.ndarray,
    span: float,
    degree: int = 1,
    robustness_weights: np.ndarray | None = None,
) -> np.ndarray:
    """Locally weighted polynomial smoothing with tricube neighbour weights.

    At each x_i the q = ceil(span * n) nearest neighbours are fit with a
    weighted polynomial of the given degree and the fit is evaluated at x_i.
    Weights are tricube in the distance scaled by the window radius, times
    the optional robustness weights.

    Parameters
    ----------
    y, x : arrays of equal length; x strictly increasing
    span : fraction of points per window, in (0, 1]
    degree : 1 or 2
    robustness_weights : optional non-negative per-point multipliers

    Raises
    ------
    SpanTooSmall when the window holds fewer than degree + 1 points,
    SingularFit when a local design matrix is rank-deficient.
    """
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    n = y.size
    if x.size != n:
        raise ValueError("x and y must have equal length")
    if n >= 2 and not np.all(np.diff(x) > 0):
        raise ValueError("x must be strictly increasing")
    if not 0.0 < span <= 1.0:
        raise ValueError(f"span must be in (0, 1], got {span}")
    if degree not in (1, 2):
        raise ValueError(f"degree must be 1 or 2, got {degree}")
    q = math.ceil(span * n)
    if q < degree + 1:
        raise SpanTooSmall(f"window of {q} points cannot fit degree {degree}")
    rw = None
    if robustness_weights is not None:
        rw = np.asarray(robustness_weights, dtype=float)
        if rw.size != n:
            raise ValueError("robustness weights must match series length")

    # x sorted => the q nearest neighbours of each point form a contiguous
    # window; slide its start with a two-pointer pass.
    lo = np.empty(n, dtype=np.int64)
    start = 0
    for i in range(n):
        while start + q < n and x[start + q] - x[i] < x[i] - x[start]:
            start += 1
        lo[i] = start

    out = np.empty(n)
    cols = np.arange(q)
    for begin in range(0, n, _CHUNK):
        end = min(begin + _CHUNK, n)
        idx = lo[begin:end, None] + cols[None, :]
        xw = x[idx] - x[begin:end, None]  # distances from each target
        yw = y[idx]
        lam = np.maximum(xw[:, -1], -xw[:, 0])  # > 0: q >= 2 distinct x
        u = np.abs(xw) / lam[:, None]
        w = np.clip(1.0 - u**3, 0.0, None) ** 3
        if rw is not None:
            w *= rw[idx]
        out[begin:end] = _weighted_poly_at_zero(xw, yw, w, degree)
    return out


def _weighted_poly_at_zero(t, y, w, degree):
    """Batched weighted polynomial fit; returns the value at t = 0 per row."""
    if degree == 1:
        sw = w.sum(axis=1)
        swt = (w * t).sum(axis=1)
        swt2 = (w * t * t).sum(axis=1)
        swy = (w * y).sum(axis=1)
        swty = (w * t * y).sum(axis=1)
        det = sw * swt2 - swt * swt
        scale = sw * swt2
        bad = det <= 1e-12 * np.maximum(scale, 1e-300)
        if bad.any():
            raise SingularFit("local linear fit is rank-deficient")
        return (swt2 * swy - swt * swty) / det
    # degree 2: per-row 3x3 normal equations
    powers = np.stack([np.ones_like(t), t, t * t], axis=2)  # rows x q x 3
    wp = w[:, :, None] * powers
    a = np.einsum("rqi,rqj->rij", wp, powers)
    b = np.einsum("rqi,rq->ri", wp, y)
    try:
        coef = np.linalg.solve(a, b[:, :, None])
    except np.linalg.LinAlgError as exc:
        raise SingularFit("local quadratic fit is rank-deficient") from exc
    return coef[:, 0, 0]


def _next_odd(value: float) -> int:
    m = math.ceil(value)
    return m if m % 2 == 1 else m + 1


def _moving_average(a: np.ndarray, width: int) -> np.ndarray:
    return np.convolve(a, np.full(width, 1.0 / width), mode="valid")


def stl_decompose(values: np.ndarray, frequency: int, inner_iterations: int = 2) -> Decomposition:
    """Decompose a series into periodic seasonal, smooth trend and remainder.

    Each inner iteration recomputes the fixed seasonal pattern from the
    detrended cycle-subseries means, removes the pattern's leakage into the
    trend band with a cascade of moving averages (frequency, frequency, 3)
    followed by a degree-1 loess, then re-smooths the deseasonalised series
    into the trend.
    """
    v = np.asarray(values, dtype=float)
    n = v.size
    if frequency < 2:
        raise FrequencyTooSmall(f"seasonal frequency must be >= 2, got {frequency}")
    if n < 2 * frequency:
        raise TooShort(f"need >= 2 full cycles ({2 * frequency} values), got {n}")

    f = frequency
    grid = np.arange(n, dtype=float)
    # Windows are floored at 5 points: a 3-point tricube window on a uniform
    # grid leaves a single positive weight, which cannot support a line.
    low_pass_span = min(1.0, max(5, _next_odd(f)) / n)
    trend_span = min(1.0, max(5, _next_odd(1.5 * f)) / n)
    tiled = np.arange(-f, n + f) % f

    trend = np.zeros(n)
    seasonal = np.zeros(n)
    for _ in range(inner_iterations):
        detrended = v - trend
        pattern = np.array([detrended[i::f].mean() for i in range(f)])
        cycle = pattern[tiled]  # one extra period on each side
        low = _moving_average(_moving_average(_moving_average(cycle, f), f), 3)
        low = loess_smooth(low, grid, low_pass_span, degree=1)
        seasonal = cycle[f : f + n] - low
        trend = loess_smooth(v - seasonal, grid, trend_span, degree=1)
    return Decomposition(seasonal=seasonal, trend=trend, remainder=v - seasonal - trend)


def _orthonormal_quadratic_basis(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Unit-norm linear and quadratic vectors, each orthogonal to the
    constant and to one another, over the time index 1..n."""
    t = np.arange(1.0, n + 1.0)
    q0 = np.full(n, 1.0 / math.sqrt(n))
    u1 = t - t.mean()
    q1 = u1 / np.linalg.norm(u1)
    t2 = t * t
    u2 = t2 - (q0 @ t2) * q0 - (q1 @ t2) * q1
    q2 = u2 / np.linalg.norm(u2)
    return q1, q2


def _loo_variances(r: np.ndarray) -> np.ndarray:
    """Sample variance of the remainder with each element left out, O(n)."""
    n = r.size
    m = r.mean()
    ss = float(((r - m) ** 2).sum())
    ss_wo = ss - (r - m) ** 2 * (n / (n - 1.0))
    return np.maximum(ss_wo, 0.0) / (n - 2.0)


def stl_features(d: Decomposition, frequency: int) -> dict[str, float]:
    """The seven decomposition features.

    trend and seasonal_strength are one minus the remainder-variance share
    of the deseasonalised and detrended series, clamped below at 0; spike is
    the variance of the leave-one-out remainder variances; linearity and
    curvature are the trend component's coefficients on an orthonormal
    quadratic basis in the time index; e_acf1 / e_acf10 are remainder
    autocorrelation summaries.
    """
    seasonal, trend_c, remainder = d.seasonal, d.trend, d.remainder
    n = remainder.size
    if n < 3:
        raise TooShort("decomposition features need >= 3 values")
    var_r = float(remainder.var(ddof=1))
    var_tr = float((trend_c + remainder).var(ddof=1))
    var_sr = float((seasonal + remainder).var(ddof=1))
    if var_tr == 0.0 or var_sr == 0.0:
        raise ZeroVariance("deseasonalised or detrended series is constant")
    trend_strength = max(0.0, 1.0 - var_r / var_tr)
    seasonal_strength = max(0.0, 1.0 - var_r / var_sr)
    spike = float(_loo_variances(remainder).var(ddof=1))
    q1, q2 = _orthonormal_quadratic_basis(n)
    linearity = float(q1 @ trend_c)
    curvature = float(q2 @ trend_c)
    if np.ptp(remainder) == 0.0:
        e_acf1, e_acf10 = 0.0, 0.0  # no remainder left to correlate
    else:
        r = acf(remainder, 10)
        e_acf1, e_acf10 = float(r[0]), float(r @ r)
    return {
        "trend": trend_strength,
        "spike": spike,
        "linearity": linearity,
        "curvature": curvature,
        "e_acf1": e_acf1,
        "e_acf10": e_acf10,
        "seasonal_strength": seasonal_strength,
    }
