"""Autoregressive spectral density estimation and spectral entropy.

The AR model is fit by Yule-Walker equations solved with the Levinson
recursion over the biased autocovariances, which guarantees a stationary
fit at every order; the order is picked by AIC. The entropy of the
normalised spectral density measures how concentrated the spectrum is:
a flat (white) spectrum scores exactly 1, a sharp seasonal peak scores
near 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import TooShort, ZeroVariance

#: Grid points over (0, pi] on which the spectral density is evaluated.
SPECTRAL_GRID_POINTS = 512


@dataclass(frozen=True)
class ArModel:
    """A fitted autoregressive model of the selected order."""

    order: int
    coefficients: np.ndarray  # length == order
    innovation_variance: float


def default_max_order(n: int) -> int:
    """Conventional order cap: min(n - 1, floor(10 * log10 n))."""
    return min(n - 1, int(10.0 * math.log10(n)))


def fit_ar(values: np.ndarray, max_order: int | None = None) -> ArModel:
    """Fit AR(p) for p = 0..max_order and return the AIC-minimising model.

    AIC = n * ln(innovation variance) + 2 * order, with the innovation
    variance tracked through the Levinson recursion. Ties keep the smaller
    order.
    """
    v = np.asarray(values, dtype=float)
    n = v.size
    if max_order is None:
        max_order = default_max_order(n)
    if max_order < 0:
        raise ValueError(f"max_order must be >= 0, got {max_order}")
    if n <= max_order + 1:
        raise TooShort(f"AR fit to order {max_order} needs > {max_order + 1} values, got {n}")
    c = v - v.mean()
    cov0 = float(c @ c) / n
    if cov0 == 0.0:
        raise ZeroVariance("AR fit of a constant series")
    r = np.array([float(c[:-k] @ c[k:]) for k in range(1, max_order + 1)]) / (n * cov0)

    best_order = 0
    best_coef = np.empty(0)
    sigma2 = cov0
    best_sigma2 = cov0
    best_aic = n * math.log(cov0)
    coef = np.empty(0)
    for k in range(1, max_order + 1):
        den = 1.0 - (float(coef @ r[: k - 1]) if k > 1 else 0.0)
        if den <= 0.0:
            break  # recursion exhausted; keep the best model so far
        phi = (r[k - 1] - (float(coef @ r[k - 2 :: -1]) if k > 1 else 0.0)) / den
        phi = min(1.0, max(-1.0, phi))
        coef = np.concatenate([coef - phi * coef[::-1], [phi]])
        sigma2 *= 1.0 - phi * phi
        if sigma2 <= 0.0:
            break
        aic = n * math.log(sigma2) + 2.0 * k
        if aic < best_aic:
            best_aic = aic
            best_order = k
            best_coef = coef.copy()
            best_sigma2 = sigma2
    return ArModel(order=best_order, coefficients=best_coef, innovation_variance=best_sigma2)


def spectral_density(model: ArModel, grid_points: int = SPECTRAL_GRID_POINTS) -> np.ndarray:
    """AR spectral density on a uniform grid of angular frequencies over
    (0, pi]: f(w) = sigma^2 / (2 pi |1 - sum_j phi_j e^{-i j w}|^2)."""
    w = np.pi * np.arange(1, grid_points + 1) / grid_points
    if model.order == 0:
        return np.full(grid_points, model.innovation_variance / (2.0 * np.pi))
    j = np.arange(1, model.order + 1)
    transfer = 1.0 - np.exp(-1j * np.outer(w, j)) @ model.coefficients.astype(complex)
    return model.innovation_variance / (2.0 * np.pi * np.abs(transfer) ** 2)


def spectral_entropy(
    values: np.ndarray,
    max_order: int | None = None,
    grid_points: int = SPECTRAL_GRID_POINTS,
) -> float:
    """Normalised Shannon entropy of the AR spectral density, in (0, 1].

    The density is normalised to a probability mass over the grid and the
    entropy divided by ln(grid size), so a flat spectrum (an order-0 fit)
    scores exactly 1. Lower values mean a more predictable series.
    """
    model = fit_ar(values, max_order)
    if model.order == 0:
        return 1.0
    density = spectral_density(model, grid_points)
    p = density / density.sum()
    return float(-(p @ np.log(p)) / math.log(grid_points))
