"""Sample autocorrelation, partial autocorrelation, and the features built
on them.

The ACF uses the biased estimator (full-series denominator), which keeps
every value in [-1, 1] and the autocovariance sequence non-negative
definite -- both required for the Durbin-Levinson recursion behind the
partial autocorrelations.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateInput, DegenerateRecursion, TooShort, ZeroVariance

#: Names of the correlation-based features, in canonical output order.
CORRELATION_FEATURE_NAMES = (
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
)


def acf(values: np.ndarray, max_lag: int) -> np.ndarray:
    """Biased sample autocorrelations at lags 1..max_lag.

    r_k = sum_{t=1}^{n-k} (v_t - mean)(v_{t+k} - mean) / sum_t (v_t - mean)^2

    Parameters
    ----------
    values : array of shape (n,), n > max_lag
    max_lag : largest lag, >= 1

    Returns
    -------
    array of shape (max_lag,), entry k-1 holding the lag-k autocorrelation.
    """
    v = np.asarray(values, dtype=float)
    if max_lag < 1:
        raise ValueError(f"max_lag must be >= 1, got {max_lag}")
    n = v.size
    if n <= max_lag:
        raise TooShort(f"acf to lag {max_lag} needs > {max_lag} values, got {n}")
    c = v - v.mean()
    denom = float(c @ c)
    if denom == 0.0:
        raise ZeroVariance("acf of a constant series")
    return np.array([float(c[:-k] @ c[k:]) for k in range(1, max_lag + 1)]) / denom


def pacf(values: np.ndarray, max_lag: int) -> np.ndarray:
    """Partial autocorrelations phi_kk at lags 1..max_lag via Durbin-Levinson.

    Runs the recursion on the biased ACF. Raises DegenerateRecursion when
    the innovation variance underflows (the series is too close to a
    deterministic linear recursion for the requested lag depth).
    """
    r = acf(values, max_lag)
    out = np.empty(max_lag)
    out[0] = r[0]
    prev = np.array([r[0]])
    for k in range(2, max_lag + 1):
        rev = r[k - 2 :: -1]  # r_{k-1}, ..., r_1
        den = 1.0 - float(prev @ r[: k - 1])
        if not np.isfinite(den) or den <= 0.0:
            raise DegenerateRecursion(f"innovation variance vanished at lag {k}")
        phi = (r[k - 1] - float(prev @ rev)) / den
        # |phi_kk| <= 1 holds exactly for the biased ACF; clamp fp overshoot.
        phi = min(1.0, max(-1.0, phi))
        out[k - 1] = phi
        prev = np.concatenate([prev - phi * prev[::-1], [phi]])
    return out


def _acf1_acf10(values: np.ndarray) -> tuple[float, float]:
    r = acf(values, 10)
    return float(r[0]), float(r @ r)


def correlation_features(values: np.ndarray, frequency: int) -> dict[str, float]:
    """The 11 correlation features of one series at one seasonal frequency.

    Lag-1 and summed-squared lag-1..10 autocorrelations of the series and of
    its first and second differences, the seasonal-lag autocorrelation and
    partial autocorrelation, and summed-squared lag-1..5 partial
    autocorrelations of the series and its differences.

    A differenced series that turns out constant (a perfectly linear or
    quadratic input) raises DegenerateInput.
    """
    v = np.asarray(values, dtype=float)
    n = v.size
    if n <= max(frequency + 1, 12):
        raise TooShort(
            f"correlation features need > max(frequency + 1, 12) = "
            f"{max(frequency + 1, 12)} values, got {n}"
        )
    d1 = np.diff(v)
    d2 = np.diff(v, n=2)
    x_acf1, x_acf10 = _acf1_acf10(v)
    seas_acf1 = float(acf(v, frequency)[-1])
    p = pacf(v, 5)
    seas_pacf = float(pacf(v, frequency)[-1])
    try:
        d1_acf1, d1_acf10 = _acf1_acf10(d1)
        d2_acf1, d2_acf10 = _acf1_acf10(d2)
        p1 = pacf(d1, 5)
        p2 = pacf(d2, 5)
    except ZeroVariance as exc:
        raise DegenerateInput(f"differenced series is constant: {exc}") from exc
    return {
        "x_acf1": x_acf1,
        "x_acf10": x_acf10,
        "diff1_acf1": d1_acf1,
        "diff1_acf10": d1_acf10,
        "diff2_acf1": d2_acf1,
        "diff2_acf10": d2_acf10,
        "seas_acf1": seas_acf1,
        "x_pacf5": float(p @ p),
        "diff1x_pacf5": float(p1 @ p1),
        "diff2x_pacf5": float(p2 @ p2),
        "seas_pacf": seas_pacf,
    }
